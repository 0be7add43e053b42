#include "topodof/survey.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace topodof {

// ---------------------------------------------------------------------------
// run_bounds
// ---------------------------------------------------------------------------

BoundsReport run_bounds(const Topology& t, const BoundsConfig& cfg) {
  if (auto bad = validate(t))
    throw std::invalid_argument("run_bounds: diagonal zero at user " + std::to_string(*bad));

  BoundsReport report;
  CanonicalForm cf = canonicalize(t);
  report.canonical_bits = cf.bits;
  report.canonical_hash = cf.hash;
  report.k = t.k();
  report.cross_links = t.cross_link_count();

  OuterBoundResult outer = outer_bound(t, cfg.outer);
  report.outer = outer.value;

  InnerBoundsConfig icfg;
  icfg.n_max = cfg.n_max;
  icfg.node_budget = cfg.node_budget;
  if (cfg.cap_src_by_outer) icfg.src_ratio_cap = outer.value;
  InnerBoundsResult inner = inner_bounds(t, icfg);

  report.rgc = inner.rgc;
  report.ia = inner.ia;
  report.src = inner.src;
  report.best_inner = inner.best;
  report.tight = inner.best == outer.value;
  report.gain_rgc = inner.src / inner.rgc;
  report.gain_ia = inner.src / inner.ia;
  report.src_exhaustive = inner.src_exhaustive;

  // Replay both certificates independently before emitting the report.
  std::string why;
  if (!verify_certificate(t, outer.certificate, outer.value, cfg.outer.theorem1_only, &why))
    throw CertificateReplayError("outer certificate replay failed: " + why);
  if (inner.src_matrix) {
    TmVerifyResult check = verify_transmission_matrix(t, *inner.src_matrix);
    if (!check.ok)
      throw CertificateReplayError("src certificate replay failed" +
                                   (check.malformed.empty() ? "" : ": " + check.malformed));
    if (!(inner.src_matrix->ratio() == inner.src))
      throw CertificateReplayError("src certificate ratio mismatch");
  }

  report.outer_certificate = std::move(outer.certificate);
  report.src_certificate = std::move(inner.src_matrix);
  if (!cfg.with_certificates) {
    // Certificates were verified; keep reports lean unless asked.
    report.outer_certificate.reset();
    report.src_certificate.reset();
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

std::string BoundsReport::to_json(bool include_certificates) const {
  nlohmann::json j;
  j["canonical_bits"] = canonical_bits;
  char hash_hex[17];
  std::snprintf(hash_hex, sizeof hash_hex, "%016llx", (unsigned long long)canonical_hash);
  j["canonical_hash"] = std::string(hash_hex);
  j["k"] = k;
  j["cross_links"] = cross_links;
  j["outer"] = outer.to_string();
  j["rgc"] = rgc.to_string();
  j["ia"] = ia.to_string();
  j["src"] = src.to_string();
  j["best_inner"] = best_inner.to_string();
  j["tight"] = tight;
  j["gain_rgc"] = gain_rgc.to_string();
  j["gain_ia"] = gain_ia.to_string();
  j["src_exhaustive"] = src_exhaustive;
  if (include_certificates && outer_certificate)
    j["outer_certificate"] = nlohmann::json::parse(outer_certificate->to_json());
  if (include_certificates && src_certificate)
    j["src_certificate"] = nlohmann::json::parse(src_certificate->to_json());
  return j.dump();
}

BoundsReport BoundsReport::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  BoundsReport r;
  r.canonical_bits = j.at("canonical_bits").get<std::string>();
  r.canonical_hash = std::stoull(j.at("canonical_hash").get<std::string>(), nullptr, 16);
  r.k = j.at("k").get<std::size_t>();
  r.cross_links = j.at("cross_links").get<std::size_t>();
  r.outer = Rational::parse(j.at("outer").get<std::string>());
  r.rgc = Rational::parse(j.at("rgc").get<std::string>());
  r.ia = Rational::parse(j.at("ia").get<std::string>());
  r.src = Rational::parse(j.at("src").get<std::string>());
  r.best_inner = Rational::parse(j.at("best_inner").get<std::string>());
  r.tight = j.at("tight").get<bool>();
  r.gain_rgc = Rational::parse(j.at("gain_rgc").get<std::string>());
  r.gain_ia = Rational::parse(j.at("gain_ia").get<std::string>());
  r.src_exhaustive = j.at("src_exhaustive").get<bool>();
  if (j.contains("outer_certificate"))
    r.outer_certificate = GeneratorCertificate::from_json(j.at("outer_certificate").dump());
  if (j.contains("src_certificate"))
    r.src_certificate = TransmissionMatrix::from_json(j.at("src_certificate").dump());
  return r;
}

std::string BoundsReport::csv_header() {
  return "canonical_hash,k,cross_links,outer,rgc,ia,src,best,tight,gain_rgc,gain_ia,"
         "src_exhaustive";
}

std::string BoundsReport::to_csv_row() const {
  std::ostringstream os;
  char hash_hex[17];
  std::snprintf(hash_hex, sizeof hash_hex, "%016llx", (unsigned long long)canonical_hash);
  os << hash_hex << ',' << k << ',' << cross_links << ',' << outer.to_string() << ','
     << rgc.to_string() << ',' << ia.to_string() << ',' << src.to_string() << ','
     << best_inner.to_string() << ',' << (tight ? 1 : 0) << ',' << gain_rgc.to_string() << ','
     << gain_ia.to_string() << ',' << (src_exhaustive ? 1 : 0);
  return os.str();
}

// ---------------------------------------------------------------------------
// RecordStore
// ---------------------------------------------------------------------------

RecordStore::RecordStore(std::string path) : path_(std::move(path)) {}

std::map<std::string, std::string> RecordStore::load() {
  std::map<std::string, std::string> out;
  std::ifstream in(path_, std::ios::binary);
  if (!in) return out;
  std::stringstream buf;
  buf << in.rdbuf();
  in.close();
  const std::string data = buf.str();

  // Frames are "<payload bytes> <payload>\n"; anything that does not parse
  // as a complete frame marks a damaged tail, which gets truncated away.
  std::size_t pos = 0;
  std::size_t good_end = 0;
  while (pos < data.size()) {
    std::size_t space = data.find(' ', pos);
    if (space == std::string::npos || space == pos) break;
    std::size_t len = 0;
    bool numeric = true;
    for (std::size_t i = pos; i < space; ++i) {
      if (data[i] < '0' || data[i] > '9') {
        numeric = false;
        break;
      }
      len = len * 10 + std::size_t(data[i] - '0');
    }
    if (!numeric) break;
    std::size_t payload_start = space + 1;
    if (payload_start + len + 1 > data.size()) break;  // frame cut short
    if (data[payload_start + len] != '\n') break;
    try {
      nlohmann::json j = nlohmann::json::parse(data.substr(payload_start, len));
      out[j.at("key").get<std::string>()] = j.at("record").dump();
    } catch (const std::exception&) {
      break;
    }
    pos = payload_start + len + 1;
    good_end = pos;
  }
  if (good_end < data.size()) {
    std::error_code ec;
    std::filesystem::resize_file(path_, good_end, ec);
  }
  return out;
}

void RecordStore::append(const std::string& key, const std::string& json_payload) {
  nlohmann::json j;
  j["key"] = key;
  j["record"] = nlohmann::json::parse(json_payload);
  std::string payload = j.dump();
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  out << payload.size() << ' ' << payload << '\n';
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

SurveyAggregate aggregate_reports(const std::vector<BoundsReport>& reports) {
  SurveyAggregate agg;
  agg.topology_count = reports.size();

  // Value and gain statistics cover the topologies whose symmetric DoF is
  // pinned (best inner = outer); the non-tight ones are listed separately
  // with replayable certificates so the gaps can be triaged.
  Rational one(1);
  for (const BoundsReport& r : reports) {
    if (!r.tight) {
      agg.nontight_keys.push_back(r.canonical_bits);
      continue;
    }
    ++agg.tight_count;
    ++agg.dsym_hist[r.outer];
    WinCounts& wins = agg.by_cross_links[r.cross_links];
    ++wins.topologies;
    if (r.gain_rgc > one) {
      ++agg.gain_rgc_hist[r.gain_rgc];
      ++wins.src_beats_rgc;
    }
    if (r.gain_ia > one) {
      ++agg.gain_ia_hist[r.gain_ia];
      ++wins.src_beats_ia;
    }
    if (r.gain_rgc > one && r.gain_ia > one) ++agg.src_beats_both;
  }
  if (!agg.gain_rgc_hist.empty() && !agg.gain_ia_hist.empty()) {
    Rational max_rgc = agg.gain_rgc_hist.rbegin()->first;
    Rational max_ia = agg.gain_ia_hist.rbegin()->first;
    for (const BoundsReport& r : reports)
      if (r.tight && r.gain_rgc == max_rgc && r.gain_ia == max_ia)
        ++agg.both_max_gain_count;
  }
  std::sort(agg.nontight_keys.begin(), agg.nontight_keys.end());
  return agg;
}

std::string SurveyAggregate::to_json() const {
  nlohmann::json j;
  j["topology_count"] = topology_count;
  j["tight_count"] = tight_count;
  j["nontight_count"] = nontight_keys.size();
  j["nontight_keys"] = nontight_keys;
  auto hist_json = [](const std::map<Rational, std::size_t>& h) {
    auto arr = nlohmann::json::array();
    for (const auto& [value, count] : h) {
      nlohmann::json e;
      e["value"] = value.to_string();
      e["count"] = count;
      arr.push_back(e);
    }
    return arr;
  };
  j["dsym_hist"] = hist_json(dsym_hist);
  j["gain_rgc_hist"] = hist_json(gain_rgc_hist);
  j["gain_ia_hist"] = hist_json(gain_ia_hist);
  j["src_beats_both"] = src_beats_both;
  j["both_max_gain_count"] = both_max_gain_count;
  auto arr = nlohmann::json::array();
  for (const auto& [links, wins] : by_cross_links) {
    nlohmann::json e;
    e["cross_links"] = links;
    e["topologies"] = wins.topologies;
    e["src_beats_rgc"] = wins.src_beats_rgc;
    e["src_beats_ia"] = wins.src_beats_ia;
    arr.push_back(e);
  }
  j["by_cross_links"] = arr;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

std::vector<Topology> six_cell_unique() {
  std::map<std::string, Topology> seen;
  std::vector<Topology> unique;
  six_cell_enumerate([&](const Topology& t) {
    CanonicalForm cf = canonicalize(t);
    auto [it, inserted] = seen.emplace(cf.bits, t);
    if (inserted) unique.push_back(canonical_representative(t));
  });
  return unique;
}

namespace {

SurveyAggregate run_population(std::vector<Topology> topologies, const SurveyOptions& opts,
                               std::vector<BoundsReport>* reports_out) {
  // Optional deterministic subsample over the unique population.
  if (opts.sample_stride > 1 || opts.sample_limit > 0) {
    std::vector<Topology> sampled;
    for (std::size_t i = 0; i < topologies.size(); i += std::max<std::size_t>(1, opts.sample_stride)) {
      sampled.push_back(topologies[i]);
      if (opts.sample_limit && sampled.size() >= opts.sample_limit) break;
    }
    topologies = std::move(sampled);
  }

  std::map<std::string, BoundsReport> done;
  std::unique_ptr<RecordStore> store;
  if (!opts.out_dir.empty()) {
    std::filesystem::create_directories(opts.out_dir);
    store = std::make_unique<RecordStore>(opts.out_dir + "/records.jsonl");
    if (opts.resume) {
      for (auto& [key, payload] : store->load()) done.emplace(key, BoundsReport::from_json(payload));
    } else {
      std::error_code ec;
      std::filesystem::remove(opts.out_dir + "/records.jsonl", ec);
    }
  }

  std::vector<const Topology*> pending;
  for (const Topology& t : topologies) {
    CanonicalForm cf = canonicalize(t);
    if (!done.count(cf.bits)) pending.push_back(&t);
  }

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> completed{0};
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= pending.size()) return;
      try {
        BoundsReport report = run_bounds(*pending[i], opts.bounds);
        std::lock_guard<std::mutex> lock(mu);
        if (store) store->append(report.canonical_bits, report.to_json(opts.bounds.with_certificates));
        done.emplace(report.canonical_bits, std::move(report));
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
      std::size_t c = completed.fetch_add(1) + 1;
      if (opts.progress && c % 250 == 0)
        std::cerr << "  bounds " << c << "/" << pending.size() << "\n";
    }
  };

  std::size_t jobs = std::max<std::size_t>(1, opts.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Deterministic merge: aggregation walks the sorted key map.
  std::vector<BoundsReport> reports;
  reports.reserve(done.size());
  for (auto& [key, report] : done) reports.push_back(report);
  SurveyAggregate agg = aggregate_reports(reports);

  if (!opts.out_dir.empty()) {
    std::ofstream agg_out(opts.out_dir + "/aggregate.json");
    agg_out << agg.to_json() << "\n";
    std::ofstream csv(opts.out_dir + "/report.csv");
    csv << BoundsReport::csv_header() << "\n";
    for (const BoundsReport& r : reports) csv << r.to_csv_row() << "\n";
  }
  if (reports_out) *reports_out = std::move(reports);
  return agg;
}

}  // namespace

SurveyAggregate survey_six_cell(const SurveyOptions& opts,
                                std::vector<BoundsReport>* reports_out) {
  return run_population(six_cell_unique(), opts, reports_out);
}

SurveyAggregate survey_ring(double radius, std::size_t samples, std::uint64_t seed,
                            const SurveyOptions& opts,
                            std::vector<BoundsReport>* reports_out) {
  std::vector<Topology> instances = ring_sample(radius, seed, samples);
  std::map<std::string, Topology> seen;
  std::vector<Topology> unique;
  for (const Topology& t : instances) {
    CanonicalForm cf = canonicalize(t);
    auto [it, inserted] = seen.emplace(cf.bits, t);
    if (inserted) unique.push_back(canonical_representative(t));
  }
  return run_population(std::move(unique), opts, reports_out);
}

}  // namespace topodof
