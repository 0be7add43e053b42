#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topodof/inner.hpp"
#include "topodof/outer.hpp"
#include "topodof/rational.hpp"
#include "topodof/topology.hpp"

namespace topodof {

struct BoundsConfig {
  OuterSearchConfig outer;
  std::size_t n_max = 0;  // 0 means K+1
  std::uint64_t node_budget = 200'000'000;
  // Cap the repetition-coding search at the proven outer bound; ratios above
  // a valid upper bound cannot be feasible, so this only skips dead work.
  bool cap_src_by_outer = true;
  bool with_certificates = false;
};

// Raised when a computed certificate fails its independent replay; the CLI
// maps it to exit code 2.
struct CertificateReplayError : std::logic_error {
  using std::logic_error::logic_error;
};

struct BoundsReport {
  std::string canonical_bits;
  std::uint64_t canonical_hash = 0;
  std::size_t k = 0;
  std::size_t cross_links = 0;
  Rational outer, rgc, ia, src, best_inner;
  bool tight = false;
  Rational gain_rgc, gain_ia;  // src/rgc and src/ia, exact
  bool src_exhaustive = true;
  std::optional<GeneratorCertificate> outer_certificate;
  std::optional<TransmissionMatrix> src_certificate;

  std::string to_json(bool include_certificates) const;
  static BoundsReport from_json(const std::string& text);

  static std::string csv_header();
  std::string to_csv_row() const;
};

// Outer + inner bounds for one topology; certificates are replay-verified
// before the report is emitted (throws CertificateReplayError otherwise).
// Deterministic given (t, cfg).
BoundsReport run_bounds(const Topology& t, const BoundsConfig& cfg = {});

// ---------------------------------------------------------------------------
// Checkpointed record store: one length-prefixed JSON record per line,
// append-only, keyed by the canonical bit-string. A truncated or corrupted
// trailing record is detected on load and cut off, so interrupted runs
// resume cleanly.
// ---------------------------------------------------------------------------
class RecordStore {
 public:
  explicit RecordStore(std::string path);

  // Loads all intact records, truncating a damaged tail if present.
  std::map<std::string, std::string> load();

  void append(const std::string& key, const std::string& json_payload);

 private:
  std::string path_;
};

// ---------------------------------------------------------------------------
// Survey drivers
// ---------------------------------------------------------------------------

struct WinCounts {
  std::size_t topologies = 0;
  std::size_t src_beats_rgc = 0;
  std::size_t src_beats_ia = 0;
};

// Distribution summary of a survey. The value/gain statistics cover the
// tight topologies (those whose symmetric DoF is pinned exactly); non-tight
// topologies are carried as keys into the record store, where their
// replayable certificates document both sides of the gap.
struct SurveyAggregate {
  std::size_t topology_count = 0;
  std::size_t tight_count = 0;
  std::vector<std::string> nontight_keys;
  std::map<Rational, std::size_t> dsym_hist;
  std::map<Rational, std::size_t> gain_rgc_hist;  // gains > 1 only
  std::map<Rational, std::size_t> gain_ia_hist;   // gains > 1 only
  std::size_t src_beats_both = 0;
  std::size_t both_max_gain_count = 0;  // attains max of both gain supports
  std::map<std::size_t, WinCounts> by_cross_links;

  std::string to_json() const;
};

SurveyAggregate aggregate_reports(const std::vector<BoundsReport>& reports);

struct SurveyOptions {
  std::string out_dir;     // empty: no persistence
  bool resume = false;
  std::size_t jobs = 1;
  BoundsConfig bounds;
  // Optional deterministic subsample of the unique topologies: keep indices
  // 0, stride, 2*stride, ... up to limit items (0 disables each).
  std::size_t sample_limit = 0;
  std::size_t sample_stride = 1;
  bool progress = false;  // stderr progress lines
};

// Enumerates the six-cell class, deduplicates by canonical form, runs bounds
// on every unique topology and aggregates. Records are persisted per
// topology when out_dir is set; completed keys are skipped on resume.
SurveyAggregate survey_six_cell(const SurveyOptions& opts,
                                std::vector<BoundsReport>* reports_out = nullptr);

// Unique canonical representatives of the six-cell class in enumeration
// order (the deterministic population used for sampled suites).
std::vector<Topology> six_cell_unique();

SurveyAggregate survey_ring(double radius, std::size_t samples, std::uint64_t seed,
                            const SurveyOptions& opts,
                            std::vector<BoundsReport>* reports_out = nullptr);

}  // namespace topodof
