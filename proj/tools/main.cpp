// topodof — exact symmetric-DoF bound calculator for partially-connected
// interference networks with topology-only transmitter knowledge.
//
// Subcommands:
//   bounds <topology-file> [--json|--csv] [--certificates] [--n-max N]
//          [--family adjacency|extended] [--theorem1-only] [--budget N]
//   verify-matrix <topology-file> <tm-file>
//   simulate <topology-file> <tm-file> --trials N --seed S
//   survey six-cell [--out DIR] [--resume] [--jobs J] [--limit N] [--stride N]
//   survey ring --radius R --samples N --seed S [--out DIR] [--resume] [--jobs J]
//   oracle lemma-match --trials N --seed S
//
// Exit codes: 0 ok, 1 invalid input, 2 internal assertion (certificate
// replay failure).

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "topodof/simulate.hpp"
#include "topodof/survey.hpp"

namespace {

using namespace topodof;

int usage() {
  std::cerr <<
      "usage:\n"
      "  topodof bounds <topology-file> [--json|--csv] [--certificates]\n"
      "                 [--n-max N] [--family adjacency|extended] [--theorem1-only]\n"
      "                 [--budget N] [--no-outer-cap]\n"
      "  topodof verify-matrix <topology-file> <tm-file>\n"
      "  topodof simulate <topology-file> <tm-file> --trials N --seed S\n"
      "  topodof survey six-cell [--out DIR] [--resume] [--jobs J] [--limit N] [--stride N]\n"
      "  topodof survey ring --radius R --samples N --seed S [--out DIR] [--resume] [--jobs J]\n"
      "  topodof oracle lemma-match --trials N --seed S\n";
  return 1;
}

struct ArgReader {
  std::vector<std::string> args;
  std::size_t pos = 0;

  bool done() const { return pos >= args.size(); }
  std::string next() { return args[pos++]; }
  std::string peek() const { return args[pos]; }

  // Returns true and consumes "--name value" when present at the cursor.
  bool option(const std::string& name, std::string* value) {
    if (done() || args[pos] != name) return false;
    if (pos + 1 >= args.size()) throw std::invalid_argument("missing value for " + name);
    *value = args[pos + 1];
    pos += 2;
    return true;
  }
  bool flag(const std::string& name) {
    if (done() || args[pos] != name) return false;
    ++pos;
    return true;
  }
};

int cmd_bounds(ArgReader& args) {
  if (args.done()) return usage();
  std::string path = args.next();
  bool as_json = false, as_csv = false, certificates = false;
  BoundsConfig cfg;
  std::string value;
  while (!args.done()) {
    if (args.flag("--json")) as_json = true;
    else if (args.flag("--csv")) as_csv = true;
    else if (args.flag("--certificates")) certificates = true;
    else if (args.flag("--theorem1-only")) cfg.outer.theorem1_only = true;
    else if (args.flag("--no-outer-cap")) cfg.cap_src_by_outer = false;
    else if (args.option("--n-max", &value)) cfg.n_max = std::stoul(value);
    else if (args.option("--budget", &value)) cfg.node_budget = std::stoull(value);
    else if (args.option("--family", &value)) {
      if (value == "adjacency") cfg.outer.family = GeneratorFamily::adjacency_subsets;
      else if (value == "extended") cfg.outer.family = GeneratorFamily::extended_signed;
      else throw std::invalid_argument("unknown family: " + value);
    } else throw std::invalid_argument("unknown option: " + args.peek());
  }
  cfg.with_certificates = certificates;

  Topology t = Topology::load_file(path);
  if (auto bad = validate(t)) {
    std::cerr << "invalid topology: diagonal zero at user " << *bad << "\n";
    return 1;
  }
  BoundsReport report = run_bounds(t, cfg);
  if (as_json) {
    std::cout << report.to_json(certificates) << "\n";
  } else if (as_csv) {
    std::cout << BoundsReport::csv_header() << "\n" << report.to_csv_row() << "\n";
  } else {
    std::cout << "k            " << report.k << "\n"
              << "cross links  " << report.cross_links << "\n"
              << "outer        " << report.outer << "\n"
              << "rgc          " << report.rgc << "\n"
              << "ia           " << report.ia << "\n"
              << "src          " << report.src << (report.src_exhaustive ? "" : " (budget-capped)")
              << "\n"
              << "best inner   " << report.best_inner << "\n"
              << "tight        " << (report.tight ? "yes" : "no") << "\n"
              << "gain vs rgc  " << report.gain_rgc << "\n"
              << "gain vs ia   " << report.gain_ia << "\n";
    if (certificates && report.outer_certificate)
      std::cout << "outer certificate: " << report.outer_certificate->to_json() << "\n";
    if (certificates && report.src_certificate)
      std::cout << "src certificate:   " << report.src_certificate->to_json() << "\n";
  }
  return 0;
}

int cmd_verify_matrix(ArgReader& args) {
  if (args.done()) return usage();
  std::string topo_path = args.next();
  if (args.done()) return usage();
  std::string tm_path = args.next();
  Topology t = Topology::load_file(topo_path);
  TransmissionMatrix tm = TransmissionMatrix::load_file(tm_path);
  TmVerifyResult result = verify_transmission_matrix(t, tm);
  if (!result.malformed.empty()) {
    std::cout << "malformed: " << result.malformed << "\n";
    return 1;
  }
  if (result.ok) {
    std::cout << "ok: achieves " << tm.ratio() << " per user\n";
    return 0;
  }
  for (const auto& [receiver, row] : result.failures)
    std::cout << "fail: receiver " << receiver << " cannot isolate symbol row " << row << "\n";
  return 1;
}

int cmd_simulate(ArgReader& args) {
  if (args.done()) return usage();
  std::string topo_path = args.next();
  if (args.done()) return usage();
  std::string tm_path = args.next();
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::string value;
  while (!args.done()) {
    if (args.option("--trials", &value)) trials = std::stoul(value);
    else if (args.option("--seed", &value)) seed = std::stoull(value);
    else throw std::invalid_argument("unknown option: " + args.peek());
  }
  Topology t = Topology::load_file(topo_path);
  TransmissionMatrix tm = TransmissionMatrix::load_file(tm_path);
  std::string malformed = tm.malformed_reason();
  if (!malformed.empty()) {
    std::cerr << "malformed transmission matrix: " << malformed << "\n";
    return 1;
  }

  std::size_t successes = 0;
  double max_residual = 0.0;
  double log_norm_sum = 0.0;
  std::size_t log_norm_count = 0;
  std::size_t singular = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    DecodeTrialResult r = decode_trial(t, tm, SplitMix64::mix(seed, i));
    if (r.all_solved) ++successes;
    singular += r.singular_events;
    max_residual = std::max(max_residual, r.max_residual);
    for (const DecodeOutcome& o : r.outcomes)
      if (o.solved) {
        log_norm_sum += std::log(o.norm_sq);
        ++log_norm_count;
      }
  }
  nlohmann::json j;
  j["trials"] = trials;
  j["successes"] = successes;
  j["max_residual"] = max_residual;
  j["mean_log_norm"] = log_norm_count ? log_norm_sum / double(log_norm_count) : 0.0;
  j["violations"] = trials - successes;
  j["singular_events"] = singular;
  std::cout << j.dump(2) << "\n";
  return successes == trials ? 0 : 1;
}

int cmd_survey(ArgReader& args) {
  if (args.done()) return usage();
  std::string kind = args.next();
  SurveyOptions opts;
  opts.jobs = 1;
  opts.progress = true;
  double radius = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 1;
  std::string value;
  while (!args.done()) {
    if (args.option("--out", &value)) opts.out_dir = value;
    else if (args.flag("--resume")) opts.resume = true;
    else if (args.option("--jobs", &value)) opts.jobs = std::stoul(value);
    else if (args.option("--limit", &value)) opts.sample_limit = std::stoul(value);
    else if (args.option("--stride", &value)) opts.sample_stride = std::stoul(value);
    else if (args.option("--radius", &value)) radius = std::stod(value);
    else if (args.option("--samples", &value)) samples = std::stoul(value);
    else if (args.option("--seed", &value)) seed = std::stoull(value);
    else if (args.option("--budget", &value)) opts.bounds.node_budget = std::stoull(value);
    else throw std::invalid_argument("unknown option: " + args.peek());
  }

  SurveyAggregate agg;
  if (kind == "six-cell") {
    agg = survey_six_cell(opts);
  } else if (kind == "ring") {
    if (!(radius > 0.0) || samples == 0) {
      std::cerr << "survey ring requires --radius and --samples\n";
      return 1;
    }
    agg = survey_ring(radius, samples, seed, opts);
  } else {
    return usage();
  }
  std::cout << agg.to_json() << "\n";
  return 0;
}

int cmd_oracle(ArgReader& args) {
  if (args.done()) return usage();
  std::string kind = args.next();
  if (kind != "lemma-match") return usage();
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::string value;
  while (!args.done()) {
    if (args.option("--trials", &value)) trials = std::stoul(value);
    else if (args.option("--seed", &value)) seed = std::stoull(value);
    else throw std::invalid_argument("unknown option: " + args.peek());
  }
  OracleReport report = lemma_match_oracle(trials, 6, 6, seed);
  nlohmann::json j;
  j["trials"] = report.trials;
  j["disagreements"] = report.disagreements;
  j["predicate_true"] = report.predicate_true;
  std::cout << j.dump(2) << "\n";
  return report.disagreements == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  ArgReader args;
  for (int i = 1; i < argc; ++i) args.args.emplace_back(argv[i]);
  if (args.done()) return usage();
  std::string cmd = args.next();
  try {
    if (cmd == "bounds") return cmd_bounds(args);
    if (cmd == "verify-matrix") return cmd_verify_matrix(args);
    if (cmd == "simulate") return cmd_simulate(args);
    if (cmd == "survey") return cmd_survey(args);
    if (cmd == "oracle") return cmd_oracle(args);
    return usage();
  } catch (const CertificateReplayError& e) {
    std::cerr << "internal assertion: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::logic_error& e) {
    std::cerr << "internal assertion: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
