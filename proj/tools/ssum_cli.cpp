#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ssum/constants.hpp"
#include "ssum/harness.hpp"

using namespace ssum;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

unsigned to_unsigned(const std::string& s) {
  std::size_t pos = 0;
  const unsigned long v = std::stoul(s, &pos);
  if (pos != s.size()) throw Error("malformed integer '" + s + "'");
  return static_cast<unsigned>(v);
}

// "a..b" or a single value.
std::vector<unsigned> parse_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) return {to_unsigned(s)};
  const unsigned a = to_unsigned(s.substr(0, dots)), b = to_unsigned(s.substr(dots + 2));
  if (a > b) throw Error("empty range '" + s + "'");
  std::vector<unsigned> out;
  for (unsigned v = a; v <= b; ++v) out.push_back(v);
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact subset sum solvers with word-RAM cost accounting"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate an instance file");
  std::string kind, out_path;
  unsigned n = 0, bits = 0, ell = 0;
  std::optional<double> balance;
  std::uint64_t seed = 0;
  gen->add_option("--kind", kind, "dense|planted|unbalanced-planted|low-additive-structure|no-instance")
      ->required();
  gen->add_option("--n", n)->required();
  gen->add_option("--bits", bits)->required();
  gen->add_option("--plant-balance", balance, "|S| / n for planted kinds");
  gen->add_option("--seed", seed)->required();
  gen->add_option("-o", out_path)->required();

  // solve
  auto* solve = app.add_subcommand("solve", "Decide one instance file");
  std::string alg = "mim", mode = "circuit", file;
  bool search = false, no_dp = false;
  double dp_exponent = 0.499;
  unsigned amplify = 1;
  solve->add_option("--alg", alg)->check(
      CLI::IsMember({"brute", "dp", "mim", "bitpack", "repov", "packedrepov"}));
  solve->add_option("--ell", ell, "word length in bits (default: from the instance)");
  solve->add_option("--mode", mode)->check(CLI::IsMember({"circuit", "word", "native"}));
  solve->add_option("--seed", seed);
  solve->add_flag("--search", search, "recover a witness through the self-reduction");
  solve->add_option("--amplify", amplify, "independent runs of a randomized solver");
  solve->add_flag("--no-dp-dispatch", no_dp, "never switch to the DP for small targets");
  solve->add_option("--dp-exponent", dp_exponent, "DP is used when t <= 2^(x n)");
  solve->add_option("file", file)->required();

  // verify
  auto* verify = app.add_subcommand("verify", "Statistical run against an exact oracle");
  std::string family;
  unsigned trials = 0;
  verify->add_option("--alg", alg)->required();
  verify->add_option("--family", family)->required();
  verify->add_option("--n", n)->required();
  verify->add_option("--trials", trials)->required();
  verify->add_option("--amplify", amplify)->required();
  verify->add_option("--seed", seed)->required();
  verify->add_option("--ell", ell);
  verify->add_option("--bits", bits);
  verify->add_option("--mode", mode);
  verify->add_option("--plant-balance", balance);

  // bench
  auto* bench = app.add_subcommand("bench", "Scaling runs written as CSV");
  std::string algs, n_range, ells;
  unsigned threads = 1;
  std::string bench_kind = "planted";
  bench->add_option("--algs", algs)->required();
  bench->add_option("--n", n_range)->required();
  bench->add_option("--ell", ells)->required();
  bench->add_option("--trials", trials)->required();
  bench->add_option("--seed", seed)->required();
  bench->add_option("-o", out_path)->required();
  bench->add_option("--mode", mode);
  bench->add_option("--kind", bench_kind);
  bench->add_option("--bits", bits);
  bench->add_option("--amplify", amplify);
  bench->add_option("--threads", threads);

  // curves
  auto* curves = app.add_subcommand("curves", "Exponent curves over a density grid");
  std::string rho;
  curves->add_option("--rho", rho, "a..b:step")->required();
  curves->add_option("-o", out_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      GenSpec spec;
      spec.kind = parse_gen_kind(kind);
      spec.n = n;
      spec.value_bits = bits;
      spec.seed = seed;
      spec.plant_balance = balance;
      const Generated g = generate(spec);
      write_instance_file(out_path, g.instance, g.planted);
      return 0;
    }
    if (*solve) {
      const ParsedInstance pi = read_instance_file(file, ell);
      const Instance& inst = pi.instance;
      SolveOptions opts;
      opts.algorithm = parse_algorithm(alg);
      opts.mode = parse_run_mode(mode);
      opts.seed = seed;
      opts.amplify = amplify;
      opts.planted = pi.planted;
      std::string dispatched;
      if (!no_dp && opts.algorithm != Algorithm::dp && opts.algorithm != Algorithm::brute &&
          inst.target <= kDpMaxTarget && dp_preferred(inst, dp_exponent)) {
        dispatched = to_string(opts.algorithm);
        opts.algorithm = Algorithm::dp;
      }
      SolverReport r = run_solver(inst, opts);
      if (search && r.verdict.answer) {
        // The witness comes from repeated decisions on shrinking subinstances.
        const Decider decide = [&](const Instance& sub, std::uint64_t s) {
          SolveOptions o = opts;
          o.seed = s;
          o.planted.reset();
          return run_solver(sub, o).verdict;
        };
        r.verdict = decide_to_search(decide, inst, is_randomized(opts.algorithm), seed);
        check_verdict(inst, r.verdict);
      }
      nlohmann::json j = report_to_json(inst, opts, r);
      if (!dispatched.empty()) j["dispatched_from"] = dispatched;
      if (search) j["search"] = "self-reduction";
      std::cout << j.dump() << '\n';
      return 0;
    }
    if (*verify) {
      VerifyConfig cfg;
      cfg.algorithm = parse_algorithm(alg);
      cfg.family = parse_gen_kind(family);
      cfg.n = n;
      cfg.trials = trials;
      cfg.amplify = amplify;
      cfg.seed = seed;
      cfg.ell = ell;
      cfg.value_bits = bits;
      cfg.mode = parse_run_mode(mode);
      cfg.plant_balance = balance;
      const VerifyReport r = verify_suite(cfg);
      std::cout << verify_to_json(cfg, r).dump() << '\n';
      return r.false_positives == 0 ? 0 : 2;
    }
    if (*bench) {
      BenchConfig cfg;
      for (const auto& a : split(algs, ',')) cfg.algorithms.push_back(parse_algorithm(a));
      cfg.n_values = parse_range(n_range);
      for (const auto& e : split(ells, ',')) cfg.ells.push_back(to_unsigned(e));
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.mode = parse_run_mode(mode);
      cfg.kind = parse_gen_kind(bench_kind);
      cfg.value_bits = bits;
      cfg.amplify = amplify;
      cfg.threads = threads;
      const auto rows = run_suite(cfg);
      std::ostringstream csv;
      write_bench_csv(rows, csv);
      write_file(out_path, csv.str());
      std::cout << bench_summary(rows);
      return 0;
    }
    if (*curves) {
      std::ostringstream csv;
      write_curves_csv(emit_curves(parse_rho_grid(rho)), csv);
      write_file(out_path, csv.str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
