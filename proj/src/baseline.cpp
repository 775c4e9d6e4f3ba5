#include "ssum/baseline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace ssum {

namespace {

using u64 = std::uint64_t;

unsigned ceil_log2(u64 v) { return v <= 1 ? 0 : std::bit_width(v - 1); }

Mask find_mask(const Instance& inst, const std::vector<unsigned>& idx,
               const Int& sum) {
  const auto items = items_of(inst, idx);
  const SumList L = sorted_sum_enumeration(items);
  auto it = std::lower_bound(L.sums.begin(), L.sums.end(), sum);
  if (it == L.sums.end() || *it != sum) throw Error("witness recovery failed");
  return L.masks[static_cast<std::size_t>(it - L.sums.begin())];
}

SumList drop_masks(SumList L) {
  L.masks.clear();
  L.masks.shrink_to_fit();
  return L;
}

}  // namespace

std::vector<unsigned> index_range(unsigned begin, unsigned end) {
  std::vector<unsigned> out;
  for (unsigned i = begin; i < end; ++i) out.push_back(i);
  return out;
}

std::pair<std::vector<unsigned>, std::vector<unsigned>> split_halves(
    const std::vector<unsigned>& idx) {
  const std::size_t k = (idx.size() + 1) / 2;
  return {std::vector<unsigned>(idx.begin(), idx.begin() + k),
          std::vector<unsigned>(idx.begin() + k, idx.end())};
}

std::optional<std::pair<std::size_t, std::size_t>> mitm_two_pointer(
    const SumList& LA, std::size_t a0, std::size_t a1, const SumList& LB,
    std::size_t b0, std::size_t b1, const Int& t, Machine* machine) {
  if (a0 >= a1 || b0 >= b1) return std::nullopt;
  std::size_t i = a0, j = b1;
  u64 steps = 0;
  std::optional<std::pair<std::size_t, std::size_t>> hit;
  while (i < a1 && j > b0) {
    ++steps;
    const Int s = LA.sums[i] + LB.sums[j - 1];
    if (s == t) {
      hit = std::make_pair(i, j - 1);
      break;
    }
    if (s < t) {
      ++i;
    } else {
      --j;
    }
  }
  if (machine) machine->unit(steps);
  return hit;
}

std::optional<std::pair<std::size_t, std::size_t>> mitm_two_pointer(
    const SumList& LA, const SumList& LB, const Int& t, Machine* machine) {
  return mitm_two_pointer(LA, 0, LA.size(), LB, 0, LB.size(), t, machine);
}

Verdict meet_in_the_middle(const Instance& inst, SolveContext& ctx) {
  const auto n = static_cast<unsigned>(inst.size());
  const auto [a_idx, b_idx] = split_halves(index_range(0, n));
  const SumList LA =
      sorted_sum_enumeration(items_of(inst, a_idx), &ctx.machine);
  const SumList LB =
      sorted_sum_enumeration(items_of(inst, b_idx), &ctx.machine);
  ctx.stats.path = "mim";
  ctx.stats.exact = true;
  if (auto hit = mitm_two_pointer(LA, LB, inst.target, &ctx.machine)) {
    return yes_verdict(LA.masks[hit->first] | LB.masks[hit->second], ctx.seed);
  }
  return no_verdict(ctx.seed);
}

Verdict meet_in_the_middle(const Instance& inst) {
  SolveContext ctx(inst.word_len, CostModel::circuit, 0, false);
  return meet_in_the_middle(inst, ctx);
}

BitPackConfig bitpack_config(unsigned word_len, std::size_t n,
                             CostModel mode) {
  BitPackConfig cfg;
  cfg.mode = mode;
  const long d = std::lround(std::log2(static_cast<double>(word_len)));
  cfg.d_size = static_cast<unsigned>(std::max<long>(1, d));
  if (n >= 3 && cfg.d_size > n - 2) cfg.d_size = static_cast<unsigned>(n - 2);
  if (mode == CostModel::circuit) {
    cfg.effective_word_len = word_len;
    cfg.m = default_hash_bits(word_len);
    cfg.per_word = std::max(1u, word_len / cfg.m);
    cfg.unit_bits = word_len;
    return cfg;
  }
  // Word RAM: simulate a shorter word ell' ~ n/10 whose comparisons are
  // answered by a table over pairs of packed units.
  unsigned lp = std::bit_ceil(static_cast<unsigned>(
      std::max<std::size_t>(8, (n + 9) / 10)));
  lp = std::min(lp, word_len);
  for (;;) {
    const unsigned m = std::min(3 * ceil_log2(lp), lp);
    unsigned q = std::max(1u, lp / m);
    while (q > 1 && 2 * q * m > kMemoCap) --q;
    if (2 * q * m <= kMemoCap || lp <= 8) {
      cfg.m = std::min(m, kMemoCap / 2);
      cfg.per_word = q;
      break;
    }
    lp /= 2;
  }
  cfg.effective_word_len = lp;
  cfg.unit_bits = cfg.m * cfg.per_word;
  cfg.memoized = true;
  return cfg;
}

Step bit_packing_advance(const Int& a_block_max, const Int& b_block_min,
                         const Int& t) {
  return a_block_max + b_block_min < t ? Step::advance_a : Step::retreat_b;
}

std::optional<Mask> bitpack_search(const SumList& LA, const SumList& LB,
                                   const SumList& WD, const Int& t,
                                   const BitPackConfig& cfg, SolveContext& ctx,
                                   std::optional<u64> cost_limit) {
  Machine& M = ctx.machine;
  if (cfg.m == 0 || cfg.per_word == 0 || cfg.m * cfg.per_word > cfg.unit_bits) {
    throw Error("bit-packing configuration inconsistent with the word length");
  }
  if (LA.size() == 0 || LB.size() == 0) return std::nullopt;
  const unsigned ell = M.word_len();
  const PseudolinearHash h = draw_hash(ell, cfg.m, ctx.rng);

  std::vector<u64> ha(LA.size()), hb(LB.size());
  for (std::size_t i = 0; i < LA.size(); ++i) ha[i] = hash_eval(h, LA.sums[i], &M);
  for (std::size_t j = 0; j < LB.size(); ++j) hb[j] = hash_eval(h, LB.sums[j], &M);
  const auto HA = pack_sequence(ha, cfg.m, cfg.unit_bits, cfg.per_word);
  const auto HB = pack_sequence(hb, cfg.m, cfg.unit_bits, cfg.per_word);
  M.unit(HA.size() * cfg.per_word + HB.size() * cfg.per_word);

  const MemoTable* memo = nullptr;
  if (cfg.memoized) {
    memo = &hash_difference_memo(cfg.m, cfg.per_word);
    M.memo_build(*memo);
  }
  const std::size_t q = cfg.per_word;
  const u64 hmask = cfg.m == 64 ? ~u64{0} : (u64{1} << cfg.m) - 1;

  for (std::size_t di = 0; di < WD.size(); ++di) {
    const Int& wd = WD.sums[di];
    if (wd > t) break;
    const Int tp = t - wd;
    if (LA.sums.front() + LB.sums.front() > tp ||
        LA.sums.back() + LB.sums.back() < tp) {
      M.unit();
      continue;
    }
    const u64 ht = hash_eval(h, tp, &M);
    std::size_t i = 0, j = HB.size();
    while (i < HA.size() && j > 0) {
      const std::size_t jb = j - 1;
      ++ctx.stats.comparisons;
      bool fired;
      if (memo) {
        const PackedWord c = complement_hashes(HB[jb], ht);
        fired = memo->lookup(HA[i].bits.low64(), c.bits.low64());
        M.unit();
        M.ac0(0, true);
      } else {
        fired = packed_hash_compare(HA[i], HB[jb], ht & hmask);
        M.ac0(static_cast<u64>(q) * q);
      }
      const std::size_t a0 = i * q, a1 = std::min(LA.size(), a0 + q);
      const std::size_t b0 = jb * q, b1 = std::min(LB.size(), b0 + q);
      if (fired) {
        ++ctx.stats.descents;
        if (auto hit = mitm_two_pointer(LA, a0, a1, LB, b0, b1, tp, &M)) {
          ctx.stats.path = "bitpack";
          Mask ma = LA.has_masks() ? LA.masks[hit->first] : 0;
          Mask mb = LB.has_masks() ? LB.masks[hit->second] : 0;
          Mask md = WD.has_masks() ? WD.masks[di] : 0;
          // Positions are returned through the stats when masks were dropped.
          if (!LA.has_masks() || !LB.has_masks()) {
            ctx.stats.notes["hit_a"] = to_string(LA.sums[hit->first]);
            ctx.stats.notes["hit_b"] = to_string(LB.sums[hit->second]);
            ctx.stats.notes["hit_d"] = to_string(wd);
          }
          return ma | mb | md;
        }
        ++ctx.stats.collisions;
      }
      M.unit();
      if (bit_packing_advance(LA.sums[a1 - 1], LB.sums[b0], tp) ==
          Step::advance_a) {
        ++i;
      } else {
        --j;
      }
      if (cost_limit && M.charged_cost() > *cost_limit) {
        ctx.stats.budget_exhausted = true;
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

Verdict bit_packing(const Instance& inst, const BitPackConfig& cfg,
                    SolveContext& ctx) {
  const auto n = static_cast<unsigned>(inst.size());
  if (n < cfg.d_size + 2 || cfg.d_size == 0) {
    // Too few items for D and two nonempty halves.
    ctx.stats.case_label = "fallback";
    ctx.stats.notes["fallback"] = "n too small for |D| and two halves";
    Verdict v = meet_in_the_middle(inst, ctx);
    ctx.stats.exact = true;
    return v;
  }
  ctx.stats.case_label = "bitpack";
  if (cfg.mode == CostModel::word) {
    ctx.stats.notes["word_len_effective"] = std::to_string(cfg.effective_word_len);
    ctx.stats.notes["memo_index_bits"] =
        std::to_string(2 * cfg.m * cfg.per_word);
  }
  // D takes the last |D| indices; A gets the larger half of the rest.
  const std::vector<unsigned> d_idx = index_range(n - cfg.d_size, n);
  const auto [a_idx, b_idx] = split_halves(index_range(0, n - cfg.d_size));
  const SumList WD = sorted_sum_enumeration(items_of(inst, d_idx), &ctx.machine);
  SumList LA = sorted_sum_enumeration(items_of(inst, a_idx), &ctx.machine);
  SumList LB = sorted_sum_enumeration(items_of(inst, b_idx), &ctx.machine);
  if (!cfg.keep_masks) {
    LA = drop_masks(std::move(LA));
    LB = drop_masks(std::move(LB));
  }

  std::optional<u64> limit;
  if (cfg.cutoff_factor) {
    const double ell = inst.word_len;
    limit = static_cast<u64>(*cfg.cutoff_factor * std::exp2(n / 2.0) /
                             std::sqrt(ell) * std::log2(ell));
  }
  ctx.stats.path = "bitpack";
  auto hit = bitpack_search(LA, LB, WD, inst.target, cfg, ctx, limit);
  ctx.stats.exact = hit.has_value() || !ctx.stats.budget_exhausted;
  if (!hit) return no_verdict(ctx.seed);
  Mask m = *hit;
  if (!cfg.keep_masks) {
    const Int a(ctx.stats.notes.at("hit_a")), b(ctx.stats.notes.at("hit_b"));
    m |= find_mask(inst, a_idx, a) | find_mask(inst, b_idx, b);
  }
  return yes_verdict(m, ctx.seed);
}

Verdict bit_packing(const Instance& inst, SolveContext& ctx) {
  return bit_packing(inst, bitpack_config(inst.word_len, inst.size(),
                                          ctx.machine.model()),
                     ctx);
}

}  // namespace ssum
