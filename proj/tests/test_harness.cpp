#include <doctest.h>

#include <sstream>

#include "ssum/harness.hpp"
#include "test_util.hpp"

using namespace ssum;
using u64 = std::uint64_t;

TEST_CASE("generators are deterministic") {
  const GenSpec spec{GenKind::dense, 24, 40, 7, std::nullopt};
  const Generated a = generate(spec), b = generate(spec);
  CHECK(format_instance(a.instance) == format_instance(b.instance));
  GenSpec other = spec;
  other.seed = 8;
  CHECK(format_instance(generate(other).instance) != format_instance(a.instance));
  for (const auto& v : a.instance.values) {
    CHECK(v >= 1);
    CHECK(v <= a.instance.target);
  }
}

TEST_CASE("planted kinds carry their witness") {
  for (GenKind k : {GenKind::planted, GenKind::unbalanced_planted, GenKind::low_additive_structure}) {
    for (u64 seed = 0; seed < 50; ++seed) {
      const Generated g = generate({k, 20, 30, seed, std::nullopt});
      REQUIRE(g.planted.has_value());
      REQUIRE(g.expected == std::optional<bool>(true));
      REQUIRE(witness_valid(g.instance, *g.planted));
      REQUIRE(brute_force(g.instance).answer);
    }
  }
  const Generated u = generate({GenKind::unbalanced_planted, 40, 30, 1, std::nullopt});
  CHECK(std::popcount(*u.planted) == 6);
  const Generated h = generate({GenKind::planted, 40, 30, 1, 0.25});
  CHECK(std::popcount(*h.planted) == 10);
}

TEST_CASE("no-instances have no solution") {
  for (u64 seed = 0; seed < 100; ++seed) {
    const Generated g = generate({GenKind::no_instance, 16, 12, seed, std::nullopt});
    REQUIRE(g.expected == std::optional<bool>(false));
    REQUIRE((g.instance.target & 1) == 1);
    for (const auto& v : g.instance.values) REQUIRE((v & 1) == 0);
    REQUIRE_FALSE(brute_force(g.instance).answer);
  }
}

TEST_CASE("invalid generator specs") {
  CHECK_THROWS_AS(generate({GenKind::dense, 0, 10, 1, std::nullopt}), Error);
  CHECK_THROWS_AS(generate({GenKind::dense, 65, 10, 1, std::nullopt}), Error);
  CHECK_THROWS_AS(generate({GenKind::dense, 30, 2, 1, std::nullopt}), Error);
  CHECK_THROWS_AS(generate({GenKind::planted, 20, 20, 1, 1.5}), Error);
  CHECK_THROWS_AS(parse_gen_kind("sparse"), Error);
  CHECK_THROWS_AS(parse_algorithm("fft"), Error);
}

TEST_CASE("run_solver validates and amplifies") {
  const Generated g = generate({GenKind::planted, 20, 30, 3, std::nullopt});
  for (Algorithm a : {Algorithm::brute, Algorithm::dp, Algorithm::mim, Algorithm::bitpack,
                      Algorithm::repov, Algorithm::packedrepov}) {
    if (a == Algorithm::dp) continue;  // target too large
    SolveOptions o;
    o.algorithm = a;
    o.seed = 5;
    o.amplify = 10;
    const SolverReport r = run_solver(g.instance, o);
    REQUIRE(r.verdict.answer);
    REQUIRE(testutil::consistent(g.instance, r.verdict));
    CHECK(r.runs >= 1);
    CHECK(r.cost.charged_cost() > 0);
  }
  const Generated no = generate({GenKind::no_instance, 20, 30, 3, std::nullopt});
  SolveOptions o;
  o.algorithm = Algorithm::mim;
  o.amplify = 5;
  const SolverReport r = run_solver(no.instance, o);
  CHECK_FALSE(r.verdict.answer);
  CHECK(r.runs == 1);  // deterministic algorithms stop after one run

  o.mode = RunMode::native;
  CHECK(run_solver(no.instance, o).cost.charged_cost() == 0);
}

TEST_CASE("report json") {
  const Generated g = generate({GenKind::planted, 12, 20, 2, std::nullopt});
  SolveOptions o;
  o.algorithm = Algorithm::brute;
  const SolverReport r = run_solver(g.instance, o);
  const auto j = report_to_json(g.instance, o, r);
  CHECK(j["verdict"] == "yes");
  CHECK(j["algorithm"] == "brute");
  CHECK(j["n"] == 12);
  CHECK(j["wall_ns"] == 0);
  CHECK(j.contains("witness_indices"));
}

TEST_CASE("bench csv") {
  BenchConfig empty;
  std::ostringstream e;
  write_bench_csv(run_suite(empty), e);
  CHECK(e.str() == std::string(kBenchHeader) + "\n");

  BenchConfig cfg;
  cfg.algorithms = {Algorithm::mim, Algorithm::bitpack};
  cfg.n_values = {12, 16};
  cfg.ells = {64};
  cfg.trials = 3;
  cfg.seed = 11;
  std::ostringstream a, b;
  const auto rows = run_suite(cfg);
  CHECK(rows.size() == 12);
  write_bench_csv(rows, a);
  cfg.threads = 2;
  write_bench_csv(run_suite(cfg), b);
  CHECK(a.str() == b.str());
  for (const auto& r : rows) CHECK(r.success == std::optional<bool>(true));
}

TEST_CASE("slope fit") {
  CHECK(fit_slope({1, 2, 3}, {2, 4, 6}) == doctest::Approx(2));
  CHECK(fit_slope({0, 1, 2, 3}, {1, 1.5, 2, 2.5}) == doctest::Approx(0.5));

  BenchConfig cfg;
  cfg.algorithms = {Algorithm::mim};
  cfg.n_values = {14, 16, 18, 20, 22};
  cfg.ells = {64};
  cfg.trials = 3;
  cfg.kind = GenKind::no_instance;
  const auto rows = run_suite(cfg);
  const std::string s = bench_summary(rows);
  REQUIRE(s.find("slope algorithm=mim") != std::string::npos);
  const auto pos = s.find("log2_cost_per_n=");
  const double slope = std::stod(s.substr(pos + 16));
  CHECK(slope > 0.45);
  CHECK(slope < 0.56);
}

TEST_CASE("verify suite") {
  for (Algorithm a : {Algorithm::bitpack, Algorithm::repov, Algorithm::packedrepov}) {
    VerifyConfig cfg;
    cfg.algorithm = a;
    cfg.n = 16;
    cfg.trials = 40;
    cfg.amplify = 20;
    cfg.seed = 4;
    for (GenKind f : {GenKind::planted, GenKind::no_instance, GenKind::dense}) {
      cfg.family = f;
      const VerifyReport r = verify_suite(cfg);
      CHECK(r.false_positives == 0);
      if (f == GenKind::planted) CHECK(r.detected == r.yes_instances);
      if (f == GenKind::no_instance) CHECK(r.yes_instances == 0);
    }
  }
}

TEST_CASE("wilson interval") {
  const auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.5962).epsilon(1e-3));
  const auto [l0, h0] = wilson_interval(0, 10);
  CHECK(l0 == doctest::Approx(0.0));
  CHECK(h0 > 0.25);
  CHECK(h0 < 0.32);
}
