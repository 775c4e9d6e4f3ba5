#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "rep_common.hpp"
#include "ssum/representation.hpp"

namespace ssum {

using u64 = std::uint64_t;
using detail::full_mask;
using detail::mask_of;

namespace {

u64 low_mask(unsigned bits) {
  return bits >= 64 ? ~u64{0} : (u64{1} << bits) - 1;
}

// Table over one-couple units (u, v') where v' has its hash shifted by
// -h(t''); the packed test then runs against a zero target.
std::shared_ptr<const MemoTable> hash_ov_memo(unsigned m, const QuartersetCollection& Q) {
  static std::mutex mu;
  static std::map<std::pair<unsigned, std::vector<u64>>, std::shared_ptr<const MemoTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(m, Q.disjoint_rows);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (cache.size() >= 8) cache.clear();  // 8 MiB per table at the cap; holders keep theirs

  // Entry (a, b) is hash_ov_word on one-couple words with target 0, evaluated
  // directly: hash sum 0 or -1 mod 2^m and a disjoint member pair.
  const unsigned q = static_cast<unsigned>(Q.size());
  const u64 qmask = low_mask(q), hmask = low_mask(m);
  std::vector<u64> reach(u64{1} << q, 0);  // members disjoint from some member of a bitmap
  for (u64 bm = 1; bm < reach.size(); ++bm) {
    const unsigned k = static_cast<unsigned>(std::countr_zero(bm));
    reach[bm] = reach[bm & (bm - 1)] | Q.disjoint_rows[k];
  }
  const unsigned w = m + q;
  auto table = std::make_shared<const MemoTable>(build_memo(
      [&](u64 a, u64 b) {
        const u64 s = ((a >> q) + (b >> q)) & hmask;
        if (s != 0 && s != hmask) return false;
        return (reach[a & qmask] & b & qmask) != 0;
      },
      2 * w));
  return cache.emplace(key, std::move(table)).first->second;
}

struct TPrimeLists {
  CollectionList RA, RB;
  std::vector<PackedTriple> HA, HB;
  std::vector<char> sampled;
};

}  // namespace

std::vector<PackedTriple> sample_packing(const CollectionList& R,
                                         const PseudolinearHash& h,
                                         unsigned bitmap_bits,
                                         unsigned unit_bits, Machine* machine) {
  const CoupleLayout layout{h.m, bitmap_bits};
  const unsigned sw = layout.slot_width();
  if (sw > unit_bits || sw > 64) {
    throw Error("a hash-collection couple is wider than the packing word");
  }
  const std::size_t cap = unit_bits / sw;
  std::vector<PackedTriple> out;
  std::vector<u64> vals;
  for (std::size_t i = 0; i < R.size(); i += cap) {
    const std::size_t k = std::min(cap, R.size() - i);
    vals.clear();
    for (std::size_t j = i; j < i + k; ++j) {
      vals.push_back(layout.encode(hash_eval(h, R[j].sum, machine),
                                   R[j].collection));
    }
    PackedTriple T;
    T.low_sum = R[i].sum;
    T.packed = pack_word(vals, sw, unit_bits);
    T.high_sum = R[i + k - 1].sum;
    T.first = i;
    T.count = static_cast<unsigned>(k);
    out.push_back(std::move(T));
  }
  if (machine) machine->unit(R.size() + 3 * out.size());
  return out;
}

std::optional<CouplePair> sample_searching(const Int& t2,
                                           const CollectionList& RA,
                                           const CollectionList& RB,
                                           const std::vector<PackedTriple>& HA,
                                           const std::vector<PackedTriple>& HB,
                                           const SearchContext& sc) {
  if (HA.empty() || HB.empty()) return std::nullopt;
  const QuartersetCollection& Q = *sc.collection;
  Machine* M = sc.machine;
  const u64 ht = hash_eval(*sc.hash, t2, M);
  const unsigned q = static_cast<unsigned>(Q.size());
  const CoupleLayout layout{sc.hash->m, q};
  const u64 hmask = low_mask(layout.hash_bits), qmask = low_mask(q);
  std::size_t i = 0, j = HB.size();
  while (i < HA.size() && j > 0) {
    const PackedTriple& wa = HA[i];
    const PackedTriple& wb = HB[j - 1];
    if (sc.stats) ++sc.stats->comparisons;
    bool fired;
    if (sc.memo) {
      const u64 v = wb.packed.slot(0);
      const u64 shifted = layout.encode(((v >> q) - ht) & hmask, v & qmask);
      fired = sc.memo->lookup(wa.packed.slot(0), shifted);
      if (M) {
        M->unit();
        M->ac0(0, true);
      }
    } else {
      fired = hash_ov_word(wa.packed, wb.packed, ht, layout, Q.disjoint_rows);
      if (M) M->ac0(static_cast<u64>(wa.count) * wb.count * (q + 1));
    }
    if (fired) {
      if (sc.stats) ++sc.stats->descents;
      auto hit = couple_two_pointer(RA, wa.first, wa.first + wa.count, RB,
                                    wb.first, wb.first + wb.count, t2, Q, M);
      if (hit) return hit;
      if (sc.stats) ++sc.stats->collisions;
    }
    if (M) M->unit();
    // Advance on the largest A sum against the smallest B sum of the pair.
    if (wa.high_sum + wb.low_sum < t2) {
      ++i;
    } else {
      --j;
    }
  }
  return std::nullopt;
}

Verdict packed_representation_ov(const Instance& inst, const RepOverrides& ov,
                                 SolveContext& ctx) {
  static const ConstantSet K = solve_base_constants();
  const std::size_t n = inst.size();
  const unsigned ell = inst.word_len;
  const real lg = std::log2(static_cast<real>(ell));
  Machine& M = ctx.machine;
  SolveStats& st = ctx.stats;
  if (n < 4) {
    st.case_label = "fallback";
    st.notes["fallback"] = "n too small";
    return meet_in_the_middle(inst, ctx);
  }
  const real rho = std::log2(static_cast<real>(n)) / lg;
  st.notes["rho"] = std::to_string(static_cast<double>(rho));
  if (rho <= density_boundary() && !ov.force_case) {
    Verdict v = bit_packing(inst, ctx);
    st.case_label = "bitpack";
    return v;
  }
  real rho_c = std::min<real>(rho, 1.01L);
  if (rho_c <= density_boundary()) rho_c = density_boundary() + 1e-3L;
  const CaseConstants cc = solve_case_constants(rho_c);
  const u64 p = ov.p ? *ov.p : sample_prime(ell, cc.beta, ctx.rng);
  st.p = p;

  std::vector<u64> res(n);
  {
    std::vector<char> hit(p, 0);
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      res[i] = mod_small(inst.values[i], p);
      if (!hit[res[i]]) {
        hit[res[i]] = 1;
        ++distinct;
      }
    }
    M.unit(n);
    M.mul(n);
    const real threshold = static_cast<real>(n) / lg;  // ell^rho / log ell
    bool case1 = static_cast<real>(distinct) > threshold;
    if (ov.force_case) case1 = *ov.force_case == 1;
    st.case_label = case1 ? "I" : "II";
    st.notes["residues"] = std::to_string(distinct);
  }
  const bool case1 = st.case_label == "I";

  std::vector<unsigned> perm(n);
  for (unsigned i = 0; i < n; ++i) perm[i] = i;
  ctx.rng.shuffle(perm);

  std::vector<unsigned> c_idx, d_idx;
  real e1, e2;
  if (case1) {
    e1 = cc.eps1_prime;
    e2 = 0;
    const real c_real = std::floor(std::log2(static_cast<real>(n) / lg) / 2);
    const unsigned c = ov.c_size ? *ov.c_size
                                 : static_cast<unsigned>(std::max<real>(1, c_real));
    std::vector<Int> Y;
    for (unsigned i : perm) Y.push_back(inst.values[i]);
    // A stalled greedy pass means no C of that size exists along this order.
    std::vector<std::size_t> picked;
    for (unsigned want = std::min<unsigned>(c, static_cast<unsigned>(n)); want >= 1; --want) {
      try {
        picked = select_c(Y, p, want);
        break;
      } catch (const Error&) {
        st.notes["c_clamped"] = std::to_string(want - 1);
      }
    }
    for (std::size_t pos : picked) c_idx.push_back(perm[pos]);
    std::vector<unsigned> rest;
    for (unsigned i : perm) {
      if (std::find(c_idx.begin(), c_idx.end(), i) == c_idx.end()) rest.push_back(i);
    }
    long d = ov.d_size ? static_cast<long>(*ov.d_size)
                       : std::lround((2 - rho + cc.beta / 2) * lg);
    d = std::clamp<long>(d, 1, static_cast<long>(rest.size()) - 2);
    std::vector<Int> R;
    for (unsigned i : rest) R.push_back(inst.values[i]);
    std::vector<std::size_t> dpos;
    for (; d >= 1; --d) {
      try {
        dpos = select_d(R, p, static_cast<unsigned>(d));
        break;
      } catch (const Error&) {
        st.notes["d_clamped"] = std::to_string(d - 1);
      }
    }
    for (std::size_t pos : dpos) d_idx.push_back(rest[pos]);
  } else {
    e1 = K.eps1;
    e2 = K.eps2;
    // D: congruent values from the fullest residue class.
    std::map<u64, std::vector<unsigned>> classes;
    for (unsigned i : perm) classes[res[i]].push_back(i);
    const std::vector<unsigned>* best = nullptr;
    for (const auto& [r, members] : classes) {
      if (!best || members.size() > best->size()) best = &members;
    }
    long d = ov.d_size ? static_cast<long>(*ov.d_size) : std::lround(lg);
    d = std::clamp<long>(d, 1, static_cast<long>(best->size()));
    d = std::min<long>(d, static_cast<long>(n) - 6);
    if (d < 1) d = 1;
    if (static_cast<std::size_t>(d) < std::size_t(std::lround(lg)))
      st.notes["d_clamped"] = std::to_string(d);
    d_idx.assign(best->begin(), best->begin() + d);
    std::vector<unsigned> rest;
    for (unsigned i : perm) {
      if (std::find(d_idx.begin(), d_idx.end(), i) == d_idx.end()) rest.push_back(i);
    }
    const unsigned c = ov.c_size ? *ov.c_size : representation_c_size(ell, cc.beta);
    const std::size_t cc_size = std::min<std::size_t>(c, rest.size());
    c_idx.assign(rest.begin(), rest.begin() + static_cast<long>(cc_size));
  }
  std::sort(c_idx.begin(), c_idx.end());
  std::sort(d_idx.begin(), d_idx.end());
  std::vector<unsigned> ab;
  for (unsigned i = 0; i < n; ++i) {
    if (std::find(c_idx.begin(), c_idx.end(), i) == c_idx.end() &&
        std::find(d_idx.begin(), d_idx.end(), i) == d_idx.end())
      ab.push_back(i);
  }
  st.notes["c_size"] = std::to_string(c_idx.size());
  st.notes["d_size"] = std::to_string(d_idx.size());
  if (ab.size() < 2 || c_idx.empty()) {
    st.case_label = "fallback";
    st.notes["fallback"] = "degenerate |A|, |B| or |C|";
    return meet_in_the_middle(inst, ctx);
  }
  const auto [a_idx, b_idx] = split_halves(ab);
  const unsigned qbound = ov.qbound ? *ov.qbound
                                    : quarterset_bound(static_cast<unsigned>(c_idx.size()), e2);
  st.notes["qbound"] = std::to_string(qbound);

  if (!ov.skip_preprocessing) {
    if (auto v = preprocess_unbalanced(inst, c_idx, e1, Engine::bitpack, ctx)) {
      return *v;
    }
    if (!case1) {
      if (auto v = preprocess_additive(inst, c_idx, cc.lambda, Engine::bitpack, ctx)) {
        return *v;
      }
    }
    if (unbalanced_is_exhaustive(c_idx.size(), e1)) {
      st.path = "preprocess-exhaustive";
      st.exact = true;
      return no_verdict(ctx.seed);
    }
  }

  const SumList WD = sorted_sum_enumeration(items_of(inst, d_idx), &M);
  const QuartersetCollection Q = make_collection(inst, c_idx, qbound, p, &M);
  const unsigned q = static_cast<unsigned>(Q.size());
  auto LA = std::make_shared<SumList>(sorted_sum_enumeration(items_of(inst, a_idx), &M));
  auto LB = std::make_shared<SumList>(sorted_sum_enumeration(items_of(inst, b_idx), &M));
  const ResidueSplit splitA(LA, p, &M), splitB(LB, p, &M);
  st.notes["collection_size"] = std::to_string(q);
  st.notes["wd_mod_p"] = std::to_string(residue_sumset_size(
      [&] {
        std::vector<Int> D;
        for (unsigned i : d_idx) D.push_back(inst.values[i]);
        return D;
      }(),
      p));

  // Hash width and packing unit.
  unsigned m = default_hash_bits(ell);
  unsigned unit_bits = ell;
  std::shared_ptr<const MemoTable> memo_owner;
  const MemoTable* memo = nullptr;
  if (M.model() == CostModel::word && q + 4 <= kMemoCap / 2) {
    m = std::min(m, kMemoCap / 2 - q);
    unit_bits = m + q;
    memo_owner = hash_ov_memo(m, Q);
    memo = memo_owner.get();
    M.memo_build(*memo);
  } else if (m + q > ell) {
    if (q + 1 > ell) throw SizeError("collection bitmap wider than the word");
    m = ell - q;
  }
  if (m != default_hash_bits(ell)) st.notes["hash_bits"] = std::to_string(m);
  const PseudolinearHash h = draw_hash(ell, m, ctx.rng);

  // Budgets.
  const real beta = cc.beta, lam = cc.lambda;
  real s_formula, k_exp;
  if (case1) {
    s_formula = std::pow(static_cast<real>(ell),
                         1 + beta / 2 - (1 - cc.eps1_prime) * rho_c / 4);
    k_exp = 0.5L + (1 - entropy(0.25L) - cc.eps1_prime / 2) * rho_c / 2 +
            (1 - rho_c + beta / 2) / 2;
  } else {
    s_formula = std::pow(static_cast<real>(ell), 1 + K.eps1 * beta / 2 + lam);
    k_exp = 0.5L + (1 - entropy((1 + K.eps2) / 4) - K.eps1 / 2) * beta - lam;
  }
  s_formula *= ov.c_s * lg * lg;
  const real s_cap = std::ceil(ov.s_ceiling * static_cast<real>(p));
  const u64 s_budget =
      ov.s ? *ov.s : detail::clamp_budget(std::min(s_formula, s_cap), kCoupleBudgetCap);
  const real k_formula = ov.c_k * std::exp2(n / 2.0L) *
                         std::pow(static_cast<real>(ell), -k_exp) * lg * lg;
  const u64 k_cutoff = ov.k ? *ov.k : detail::clamp_budget(k_formula, kCoupleBudgetCap);
  st.notes["s_budget"] = std::to_string(s_budget);
  st.notes["k_cutoff"] = std::to_string(k_cutoff);

  const Mask a_mask = mask_of(a_idx), d_mask = mask_of(d_idx);
  SearchContext sc{&Q, &h, &M, &st, memo};
  std::optional<bool> good_hit;

  for (const detail::Side& side : detail::sides(inst, ov.both_orientations)) {
    // t' over (T - W(D)) mod p; negative shifted targets cannot be hit.
    std::map<u64, TPrimeLists> lists;
    for (const Int& w : WD.sums) {
      if (w > side.target) break;
      lists[mod_small(side.target - w, p)];
    }
    u64 good_t = p;
    std::vector<char> good;
    if (ctx.planted) {
      const Mask S = side.complement ? full_mask(n) ^ *ctx.planted : *ctx.planted;
      good_t = mod_small(side.target - inst.sum_of(S & d_mask), p);
      good.assign(p, 0);
      for (u64 g : detail::good_residues(inst, S, a_mask, Q, p)) good[g] = 1;
      if (!good_hit) good_hit = false;
    }

    for (auto& [tp, L] : lists) {
      L.sampled.assign(p, 0);
      std::vector<CollectionList> partsA, partsB;
      u64 couples = 0;
      for (u64 draw = 0; draw < s_budget; ++draw) {
        const u64 r = ctx.rng.below(p);
        M.unit();
        ++st.s_used;
        if (L.sampled[r]) continue;
        L.sampled[r] = 1;
        if (tp == good_t && good[r]) good_hit = true;
        CollectionList ra = residue_couple_list(splitA, Q, r, &M, &couples);
        CollectionList rb = residue_couple_list(splitB, Q, (tp + p - r) % p, &M, &couples);
        if (!ra.empty()) partsA.push_back(std::move(ra));
        if (!rb.empty()) partsB.push_back(std::move(rb));
        if (couples >= k_cutoff) {
          st.budget_exhausted = true;
          break;
        }
      }
      st.couples_created += couples;
      L.RA = merge_sorted(partsA, false, &M);
      L.RB = merge_sorted(partsB, false, &M);
      // Residues partition the sums, so merged lists stay strictly increasing.
      for (const CollectionList* R : {&L.RA, &L.RB}) {
        for (std::size_t i = 1; i < R->size(); ++i) {
          if (!((*R)[i - 1].sum < (*R)[i].sum)) throw Error("duplicate sum across residues");
        }
      }
      L.HA = sample_packing(L.RA, h, q, unit_bits, &M);
      L.HB = sample_packing(L.RB, h, q, unit_bits, &M);
    }

    for (std::size_t di = 0; di < WD.size(); ++di) {
      const Int& w = WD.sums[di];
      if (w > side.target) break;
      const Int t2 = side.target - w;
      const TPrimeLists& L = lists.at(mod_small(t2, p));
      auto hit = sample_searching(t2, L.RA, L.RB, L.HA, L.HB, sc);
      if (!hit) continue;
      const Int a = L.RA[hit->ia].sum - Q.sums[hit->qa];
      const Int b = L.RB[hit->ib].sum - Q.sums[hit->qb];
      Mask mk = detail::mask_for_sum(*LA, a) | detail::mask_for_sum(*LB, b) |
                Q.global[hit->qa] | Q.global[hit->qb] | WD.masks[di];
      if (side.complement) mk = full_mask(n) ^ mk;
      if (!witness_valid(inst, mk)) throw Error("packed search built a bad witness");
      st.good_residue_hit = good_hit;
      st.path = "main";
      return yes_verdict(mk, ctx.seed);
    }
  }
  st.good_residue_hit = good_hit;
  st.path = "main";
  return no_verdict(ctx.seed);
}

Verdict packed_representation_ov(const Instance& inst, SolveContext& ctx) {
  return packed_representation_ov(inst, RepOverrides{}, ctx);
}

}  // namespace ssum
