#include "ssum/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace ssum {

using u64 = std::uint64_t;
using nlohmann::json;

namespace {

template <class E, std::size_t N>
E parse_enum(std::string_view s, const std::pair<E, const char*> (&table)[N],
             const char* what) {
  for (const auto& [e, name] : table) {
    if (s == name) return e;
  }
  throw Error(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

template <class E, std::size_t N>
const char* name_of(E e, const std::pair<E, const char*> (&table)[N]) {
  for (const auto& [k, name] : table) {
    if (k == e) return name;
  }
  return "?";
}

constexpr std::pair<Algorithm, const char*> kAlgNames[] = {
    {Algorithm::brute, "brute"},     {Algorithm::dp, "dp"},
    {Algorithm::mim, "mim"},         {Algorithm::bitpack, "bitpack"},
    {Algorithm::repov, "repov"},     {Algorithm::packedrepov, "packedrepov"}};

constexpr std::pair<RunMode, const char*> kModeNames[] = {
    {RunMode::circuit, "circuit"}, {RunMode::word, "word"}, {RunMode::native, "native"}};

constexpr std::pair<GenKind, const char*> kKindNames[] = {
    {GenKind::dense, "dense"},
    {GenKind::planted, "planted"},
    {GenKind::unbalanced_planted, "unbalanced-planted"},
    {GenKind::low_additive_structure, "low-additive-structure"},
    {GenKind::no_instance, "no-instance"}};

unsigned ceil_log2(u64 v) { return v <= 1 ? 0 : std::bit_width(v - 1); }

// Uniform in [0, 2^bits).
Int random_bits(Rng& rng, unsigned bits) {
  Int v = 0;
  unsigned have = 0;
  while (have < bits) {
    const unsigned take = std::min(64u, bits - have);
    u64 w = rng.next();
    if (take < 64) w &= (u64{1} << take) - 1;
    v = (v << take) | Int(w);
    have += take;
  }
  return v;
}

// Uniform in [lo, hi] by rejection on the bit length of the span.
Int random_between(Rng& rng, const Int& lo, const Int& hi) {
  const Int span = hi - lo + 1;
  const unsigned bits = bit_length(span - 1);
  for (;;) {
    Int r = random_bits(rng, bits);
    if (r < span) return lo + r;
  }
}

Int random_value(Rng& rng, unsigned bits) {
  return random_between(rng, Int(1), Int(1) << bits);
}

Mask random_subset(Rng& rng, unsigned n, unsigned size) {
  std::vector<unsigned> idx(n);
  for (unsigned i = 0; i < n; ++i) idx[i] = i;
  rng.shuffle(idx);
  Mask m = 0;
  for (unsigned i = 0; i < size; ++i) m |= Mask{1} << idx[i];
  return m;
}

// Values outside S that exceed t are redrawn below t so the instance is valid.
Generated finish_planted(std::vector<Int> values, Mask S, Rng& rng, unsigned word_len) {
  Int t = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if ((S >> i) & 1) t += values[i];
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > t) values[i] = random_between(rng, Int(1), t);
  }
  Generated g{make_instance(std::move(values), t, word_len), S, true};
  if (!witness_valid(g.instance, S)) throw Error("planted witness does not sum to t");
  return g;
}

unsigned planted_size(const GenSpec& spec, double def) {
  const double b = spec.plant_balance.value_or(def);
  if (!(b > 0 && b <= 1)) throw Error("plant balance must lie in (0, 1]");
  return std::clamp<unsigned>(static_cast<unsigned>(std::lround(b * spec.n)), 1, spec.n);
}

}  // namespace

const char* to_string(Algorithm a) { return name_of(a, kAlgNames); }
Algorithm parse_algorithm(std::string_view s) { return parse_enum(s, kAlgNames, "algorithm"); }
bool is_randomized(Algorithm a) {
  return a == Algorithm::bitpack || a == Algorithm::repov || a == Algorithm::packedrepov;
}
const char* to_string(RunMode m) { return name_of(m, kModeNames); }
RunMode parse_run_mode(std::string_view s) { return parse_enum(s, kModeNames, "mode"); }
const char* to_string(GenKind k) { return name_of(k, kKindNames); }
GenKind parse_gen_kind(std::string_view s) { return parse_enum(s, kKindNames, "kind"); }

u64 run_seed(u64 base, unsigned r) { return r == 0 ? base : mix_seed({base, r}); }

SolverReport run_solver(const Instance& inst, const SolveOptions& opts) {
  SolverReport rep;
  const CostModel model = opts.mode == RunMode::word ? CostModel::word : CostModel::circuit;
  rep.cost.model = model;
  rep.cost.word_len = inst.word_len;
  const unsigned runs = std::max(1u, opts.amplify);
  for (unsigned r = 0; r < runs; ++r) {
    SolveContext ctx(inst.word_len, model, run_seed(opts.seed, r),
                     opts.mode != RunMode::native);
    ctx.planted = opts.planted;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    switch (opts.algorithm) {
      case Algorithm::brute:
        v = brute_force(inst);
        // charged as one addition per item per subset
        ctx.machine.unit(inst.size() << inst.size());
        ctx.stats.path = "brute";
        ctx.stats.exact = true;
        break;
      case Algorithm::dp:
        v = dp_bellman(inst);
        ctx.machine.unit(inst.size() * (static_cast<u64>(inst.target) + 1));
        ctx.stats.path = "dp";
        ctx.stats.exact = true;
        break;
      case Algorithm::mim:
        v = meet_in_the_middle(inst, ctx);
        break;
      case Algorithm::bitpack: {
        BitPackConfig cfg = bitpack_config(inst.word_len, inst.size(), model);
        cfg.cutoff_factor = opts.bitpack_cutoff;
        v = bit_packing(inst, cfg, ctx);
        break;
      }
      case Algorithm::repov:
        v = representation_ov(inst, opts.rep, ctx);
        break;
      case Algorithm::packedrepov:
        v = packed_representation_ov(inst, opts.rep, ctx);
        break;
    }
    if (opts.mode == RunMode::native) {
      rep.wall_ns += static_cast<u64>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                          std::chrono::steady_clock::now() - start)
                                          .count());
    }
    rep.cost += ctx.machine.counter();
    ++rep.runs;
    rep.stats = std::move(ctx.stats);
    v.rng_seed = ctx.seed;
    rep.verdict = v;
    if (v.answer) {
      check_verdict(inst, v);
      break;
    }
    if (rep.stats.exact || !is_randomized(opts.algorithm)) break;
  }
  rep.verdict.trials_used = rep.runs;
  return rep;
}

json stats_to_json(const SolveStats& st) {
  json j;
  j["path"] = st.path;
  j["case"] = st.case_label;
  j["comparisons"] = st.comparisons;
  j["descents"] = st.descents;
  j["collisions"] = st.collisions;
  j["p"] = st.p;
  j["s_used"] = st.s_used;
  j["couples"] = st.couples_created;
  j["budget_exhausted"] = st.budget_exhausted;
  j["exact"] = st.exact;
  j["good_residue_hit"] = st.good_residue_hit ? json(*st.good_residue_hit) : json(nullptr);
  j["notes"] = st.notes;
  return j;
}

json report_to_json(const Instance& inst, const SolveOptions& opts, const SolverReport& r) {
  json j;
  j["algorithm"] = to_string(opts.algorithm);
  j["n"] = inst.size();
  j["ell"] = inst.word_len;
  j["mode"] = to_string(opts.mode);
  j["seed"] = opts.seed;
  j["verdict"] = r.verdict.answer ? "yes" : "no";
  if (r.verdict.witness) {
    const Mask m = r.verdict.witness->subset_mask;
    j["witness"] = mask_hex(m);
    std::vector<unsigned> idx;
    for (unsigned i = 0; i < 64; ++i) {
      if ((m >> i) & 1) idx.push_back(i);
    }
    j["witness_indices"] = idx;
  } else {
    j["witness"] = nullptr;
  }
  j["runs"] = r.runs;
  j["charged_cost"] = r.cost.charged_cost();
  j["ops"] = {{"unit", r.cost.unit_ops},
              {"mul", r.cost.mul_ops},
              {"mem", r.cost.mem_ops},
              {"ac0", r.cost.ac0_ops}};
  j["wall_ns"] = r.wall_ns;
  j["stats"] = stats_to_json(r.stats);
  return j;
}

Generated generate(const GenSpec& spec, unsigned word_len) {
  const unsigned n = spec.n;
  if (n == 0 || n > kMaxItems) throw Error("n must lie in [1, 64]");
  if (spec.value_bits < std::max(1u, ceil_log2(n))) {
    throw Error("value bits must be at least ceil(log2 n)");
  }
  const unsigned bits = spec.value_bits;
  Rng rng(mix_seed({spec.seed, static_cast<u64>(spec.kind), n, bits}));
  std::vector<Int> values(n);
  switch (spec.kind) {
    case GenKind::dense: {
      Int total = 0, mx = 0;
      for (auto& v : values) {
        v = random_value(rng, bits);
        total += v;
        mx = std::max(mx, v);
      }
      const Int t = random_between(rng, mx, total);
      Generated g{make_instance(std::move(values), t, word_len), std::nullopt, std::nullopt};
      return g;
    }
    case GenKind::planted:
    case GenKind::unbalanced_planted: {
      for (auto& v : values) v = random_value(rng, bits);
      const double def = spec.kind == GenKind::planted ? 0.5 : 0.15;
      const Mask S = random_subset(rng, n, planted_size(spec, def));
      return finish_planted(std::move(values), S, rng, word_len);
    }
    case GenKind::low_additive_structure: {
      // Half the values are powers of two padded with ones; few distinct sums.
      const unsigned k = (n + 1) / 2;
      const unsigned shave = static_cast<unsigned>(std::ceil(0.5 * std::log2(std::max(2u, k))));
      const unsigned powers = k > shave + 1 ? k - shave - 1 : 1;
      for (unsigned i = 0; i < k; ++i) {
        values[i] = i < powers ? Int(1) << std::min(i, bits - 1) : Int(1);
      }
      for (unsigned i = k; i < n; ++i) values[i] = random_value(rng, bits);
      std::vector<unsigned> order(n);
      for (unsigned i = 0; i < n; ++i) order[i] = i;
      rng.shuffle(order);
      std::vector<Int> shuffled(n);
      for (unsigned i = 0; i < n; ++i) shuffled[i] = values[order[i]];
      const Mask S = random_subset(rng, n, planted_size(spec, 0.5));
      return finish_planted(std::move(shuffled), S, rng, word_len);
    }
    case GenKind::no_instance: {
      // All values even and t odd: no subset can hit t.
      Int total = 0, mx = 0;
      for (auto& v : values) {
        v = 2 * random_value(rng, bits - 1 > 0 ? bits - 1 : 1);
        total += v;
        mx = std::max(mx, v);
      }
      Int t = n == 1 ? mx + 1 : random_between(rng, mx, total - 1);
      if ((t & 1) == 0) t += 1;
      Generated g{make_instance(std::move(values), t, word_len), std::nullopt, false};
      if (t <= (u64{1} << 20) && dp_bellman(g.instance).answer) {
        throw Error("no-instance generator produced a yes instance");
      }
      return g;
    }
  }
  throw Error("unhandled kind");
}

u64 trial_seed(u64 master, Algorithm a, u64 instance_id, u64 trial) {
  return mix_seed({master, static_cast<u64>(a), instance_id, trial});
}

namespace {

struct BenchJob {
  unsigned n, ell, trial;
};

unsigned default_bits(unsigned n, unsigned ell) {
  const unsigned lg = ceil_log2(n);
  return std::max(std::max(1u, lg), ell > lg + 1 ? ell - lg - 1 : 1);
}

std::vector<BenchRow> run_job(const BenchConfig& cfg, const BenchJob& job) {
  std::vector<BenchRow> rows;
  const u64 instance_id = (u64{job.n} << 32) | job.ell;
  GenSpec spec;
  spec.kind = cfg.kind;
  spec.n = job.n;
  spec.value_bits = cfg.value_bits ? cfg.value_bits : default_bits(job.n, job.ell);
  spec.seed = mix_seed({cfg.seed, instance_id, job.trial});
  const Generated g = generate(spec, job.ell);
  for (Algorithm a : cfg.algorithms) {
    BenchRow row;
    row.algorithm = a;
    row.n = job.n;
    row.ell = job.ell;
    row.mode = cfg.mode;
    row.seed = trial_seed(cfg.seed, a, instance_id, job.trial);
    SolveOptions opts;
    opts.algorithm = a;
    opts.mode = cfg.mode;
    opts.seed = row.seed;
    opts.amplify = cfg.amplify;
    opts.rep = cfg.rep;
    opts.planted = g.planted;
    try {
      const SolverReport r = run_solver(g.instance, opts);
      row.verdict = r.verdict.answer ? "yes" : "no";
      row.charged_cost = r.cost.charged_cost();
      row.wall_ns = r.wall_ns;
      if (g.expected) row.success = r.verdict.answer == *g.expected;
      row.extra = stats_to_json(r.stats);
      row.extra["runs"] = r.runs;
    } catch (const SizeError& e) {
      row.verdict = "truncated";
      row.extra = {{"truncated", e.what()}};
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<BenchRow> run_suite(const BenchConfig& cfg) {
  std::vector<BenchJob> jobs;
  for (unsigned n : cfg.n_values) {
    for (unsigned ell : cfg.ells) {
      for (unsigned t = 0; t < cfg.trials; ++t) jobs.push_back({n, ell, t});
    }
  }
  std::vector<std::vector<BenchRow>> out(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        out[i] = run_job(cfg, jobs[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, cfg.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);
  std::vector<BenchRow> rows;
  for (auto& v : out) {
    for (auto& r : v) rows.push_back(std::move(r));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::make_tuple(static_cast<int>(a.algorithm), a.n, a.ell, a.seed) <
           std::make_tuple(static_cast<int>(b.algorithm), b.n, b.ell, b.seed);
  });
  return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << kBenchHeader << '\n';
  for (const BenchRow& r : rows) {
    std::string extra = r.extra.is_null() ? "{}" : r.extra.dump();
    std::string quoted = "\"";
    for (char c : extra) {
      quoted += c;
      if (c == '"') quoted += '"';
    }
    quoted += '"';
    out << to_string(r.algorithm) << ',' << r.n << ',' << r.ell << ',' << to_string(r.mode)
        << ',' << r.seed << ',' << r.verdict << ',' << r.charged_cost << ',' << r.wall_ns
        << ',' << (r.success ? (*r.success ? "1" : "0") : "") << ',' << quoted << '\n';
  }
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t k = std::min(x.size(), y.size());
  if (k < 2) return 0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx == 0 ? 0 : sxy / sxx;
}

std::string bench_summary(const std::vector<BenchRow>& rows) {
  // mean charged cost per (algorithm, ell, n)
  std::map<std::tuple<int, unsigned, unsigned>, std::pair<double, unsigned>> acc;
  for (const BenchRow& r : rows) {
    if (r.verdict == "truncated") continue;
    auto& [sum, cnt] = acc[{static_cast<int>(r.algorithm), r.ell, r.n}];
    sum += static_cast<double>(r.charged_cost);
    ++cnt;
  }
  std::ostringstream os;
  os << std::setprecision(6);
  std::map<std::pair<int, unsigned>, std::pair<std::vector<double>, std::vector<double>>> by_ell;
  std::map<std::pair<int, unsigned>, std::vector<std::pair<unsigned, double>>> by_n;
  for (const auto& [key, v] : acc) {
    const auto [a, ell, n] = key;
    const double mean = v.first / v.second;
    if (mean <= 0) continue;
    by_ell[{a, ell}].first.push_back(n);
    by_ell[{a, ell}].second.push_back(std::log2(mean));
    by_n[{a, n}].push_back({ell, mean});
  }
  for (const auto& [key, xy] : by_ell) {
    if (xy.first.size() < 2) continue;
    os << "slope algorithm=" << to_string(static_cast<Algorithm>(key.first))
       << " ell=" << key.second << " log2_cost_per_n=" << fit_slope(xy.first, xy.second)
       << '\n';
  }
  for (const auto& [key, pts] : by_n) {
    if (pts.size() < 2) continue;
    os << "ell_scan algorithm=" << to_string(static_cast<Algorithm>(key.first))
       << " n=" << key.second;
    for (const auto& [ell, mean] : pts) {
      os << " ell" << ell << ":ratio=" << mean / pts.front().second
         << ",normalized=" << mean * std::sqrt(static_cast<double>(ell)) / std::log2(ell);
    }
    os << '\n';
  }
  return os.str();
}

std::pair<double, double> wilson_interval(unsigned hits, unsigned n, double z) {
  if (n == 0) return {0, 1};
  const double ph = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double denom = 1 + z2 / n;
  const double centre = (ph + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(ph * (1 - ph) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

bool oracle_answer(const Instance& inst) {
  if (inst.size() <= 20) return brute_force(inst).answer;
  if (inst.target <= (u64{1} << 22)) return dp_bellman(inst).answer;
  return meet_in_the_middle(inst).answer;
}

VerifyReport verify_suite(const VerifyConfig& cfg) {
  VerifyReport rep;
  for (unsigned i = 0; i < cfg.trials; ++i) {
    GenSpec spec;
    spec.kind = cfg.family;
    spec.n = cfg.n;
    spec.value_bits = cfg.value_bits ? cfg.value_bits
                      : cfg.ell      ? default_bits(cfg.n, cfg.ell) - 1
                                     : std::max(cfg.n, ceil_log2(cfg.n));
    spec.seed = mix_seed({cfg.seed, 0x7e51f, i});
    spec.plant_balance = cfg.plant_balance;
    const Generated g = generate(spec, cfg.ell);
    const bool truth = g.expected ? *g.expected : oracle_answer(g.instance);
    SolveOptions opts;
    opts.algorithm = cfg.algorithm;
    opts.mode = cfg.mode;
    opts.amplify = cfg.amplify;
    opts.rep = cfg.rep;
    opts.planted = g.planted;
    opts.seed = trial_seed(cfg.seed, cfg.algorithm, i, 0);
    const SolverReport r = run_solver(g.instance, opts);
    ++rep.trials;
    rep.total_runs += r.runs;
    const bool said = r.verdict.answer;
    if (said && (!r.verdict.witness || !witness_valid(g.instance, r.verdict.witness->subset_mask))) {
      ++rep.false_positives;
    }
    if (said && !truth) ++rep.false_positives;
    if (said != truth) ++rep.disagreements;
    if (truth) {
      ++rep.yes_instances;
      if (said) {
        ++rep.detected;
        if (r.runs == 1) ++rep.single_run_hits;
      }
    }
  }
  if (rep.yes_instances) {
    rep.detection_rate = static_cast<double>(rep.detected) / rep.yes_instances;
    rep.single_run_rate = static_cast<double>(rep.single_run_hits) / rep.yes_instances;
  }
  std::tie(rep.ci_low, rep.ci_high) = wilson_interval(rep.detected, rep.yes_instances);
  return rep;
}

json verify_to_json(const VerifyConfig& cfg, const VerifyReport& r) {
  json j;
  j["algorithm"] = to_string(cfg.algorithm);
  j["family"] = to_string(cfg.family);
  j["n"] = cfg.n;
  j["ell"] = cfg.ell;
  j["mode"] = to_string(cfg.mode);
  j["amplify"] = cfg.amplify;
  j["seed"] = cfg.seed;
  j["trials"] = r.trials;
  j["yes_instances"] = r.yes_instances;
  j["detected"] = r.detected;
  j["detection_rate"] = r.detection_rate;
  j["single_run_rate"] = r.single_run_rate;
  j["ci95"] = {r.ci_low, r.ci_high};
  j["false_positives"] = r.false_positives;
  j["disagreements"] = r.disagreements;
  j["total_runs"] = r.total_runs;
  return j;
}

}  // namespace ssum
