#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssum/baseline.hpp"
#include "ssum/core.hpp"
#include "ssum/representation.hpp"

namespace ssum {

// The numeric ids feed the seed mix, so they are fixed.
enum class Algorithm { brute = 0, dp = 1, mim = 2, bitpack = 3, repov = 4, packedrepov = 5 };

const char* to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);
bool is_randomized(Algorithm a);

/** circuit and word are simulated with full accounting; native runs without. */
enum class RunMode { circuit, word, native };

const char* to_string(RunMode m);
RunMode parse_run_mode(std::string_view s);

struct SolveOptions {
  Algorithm algorithm = Algorithm::mim;
  RunMode mode = RunMode::circuit;
  std::uint64_t seed = 0;
  /** Independent runs until a yes or an exact no. */
  unsigned amplify = 1;
  RepOverrides rep;
  /** Bit packing gives up past this multiple of 2^(n/2) ell^-1/2 log ell. */
  std::optional<double> bitpack_cutoff;
  std::optional<Mask> planted;
};

struct SolverReport {
  Verdict verdict;
  RamCounter cost;  // summed over runs
  std::uint64_t wall_ns = 0;
  unsigned runs = 0;
  SolveStats stats;  // of the last run
};

/** Seed of run r; run 0 uses the base seed itself. */
std::uint64_t run_seed(std::uint64_t base, unsigned r);

/** Runs the solver, amplified, and re-validates every yes witness. */
SolverReport run_solver(const Instance& inst, const SolveOptions& opts);

nlohmann::json stats_to_json(const SolveStats& st);
nlohmann::json report_to_json(const Instance& inst, const SolveOptions& opts,
                              const SolverReport& r);

// ---- generators ------------------------------------------------------------

enum class GenKind { dense, planted, unbalanced_planted, low_additive_structure, no_instance };

const char* to_string(GenKind k);
GenKind parse_gen_kind(std::string_view s);

struct GenSpec {
  GenKind kind = GenKind::dense;
  unsigned n = 0;
  unsigned value_bits = 0;
  std::uint64_t seed = 0;
  /** |S| / n for the planted kinds. */
  std::optional<double> plant_balance;
};

struct Generated {
  Instance instance;
  std::optional<Mask> planted;
  /** Known answer: yes for planted kinds, no for no-instance. */
  std::optional<bool> expected;
};

/** Same GenSpec, same instance. Throws Error on invalid parameters. */
Generated generate(const GenSpec& spec, unsigned word_len = 0);

// ---- suites ----------------------------------------------------------------

struct BenchConfig {
  std::vector<Algorithm> algorithms;
  std::vector<unsigned> n_values;
  std::vector<unsigned> ells;
  unsigned trials = 1;
  std::uint64_t seed = 0;
  RunMode mode = RunMode::circuit;
  GenKind kind = GenKind::planted;
  /** 0 picks ell - ceil(log2 n) - 1. */
  unsigned value_bits = 0;
  unsigned amplify = 1;
  unsigned threads = 1;
  RepOverrides rep;
};

struct BenchRow {
  Algorithm algorithm;
  unsigned n = 0, ell = 0;
  RunMode mode = RunMode::circuit;
  std::uint64_t seed = 0;
  std::string verdict;  // yes, no, or truncated
  std::uint64_t charged_cost = 0;
  std::uint64_t wall_ns = 0;
  std::optional<bool> success;
  nlohmann::json extra;
};

inline constexpr const char* kBenchHeader =
    "algorithm,n,ell,mode,seed,verdict,charged_cost,wall_ns,success,extra_json";

/** Seed of one run: mix(master, algorithm id, instance id, trial id). */
std::uint64_t trial_seed(std::uint64_t master, Algorithm a, std::uint64_t instance_id,
                         std::uint64_t trial);

/** Rows sorted by (algorithm, n, ell, seed). */
std::vector<BenchRow> run_suite(const BenchConfig& cfg);
void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

/** Least-squares slope of y on x. */
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/** Slope of log2(mean cost) vs n per (algorithm, ell) and cost ratios vs ell. */
std::string bench_summary(const std::vector<BenchRow>& rows);

struct VerifyConfig {
  Algorithm algorithm = Algorithm::repov;
  GenKind family = GenKind::planted;
  unsigned n = 20;
  unsigned trials = 100;
  unsigned amplify = 1;
  std::uint64_t seed = 0;
  unsigned ell = 0;  // 0: default word length of each instance
  unsigned value_bits = 0;
  RunMode mode = RunMode::circuit;
  RepOverrides rep;
  std::optional<double> plant_balance;
};

struct VerifyReport {
  unsigned trials = 0;
  unsigned yes_instances = 0;
  unsigned detected = 0;         // yes instances answered yes
  unsigned single_run_hits = 0;  // yes instances answered yes on the first run
  unsigned false_positives = 0;
  unsigned disagreements = 0;
  double detection_rate = 0;
  double single_run_rate = 0;
  double ci_low = 0, ci_high = 0;  // Wilson 95% for detection_rate
  std::uint64_t total_runs = 0;
};

/** Wilson score interval at z. */
std::pair<double, double> wilson_interval(unsigned hits, unsigned n, double z = 1.96);

/** Exact answer used as ground truth: brute force, DP, or meet in the middle. */
bool oracle_answer(const Instance& inst);

VerifyReport verify_suite(const VerifyConfig& cfg);
nlohmann::json verify_to_json(const VerifyConfig& cfg, const VerifyReport& r);

}  // namespace ssum
