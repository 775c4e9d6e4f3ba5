#include <cmath>
#include <memory>

#include "rep_common.hpp"
#include "ssum/representation.hpp"

namespace ssum {

using u64 = std::uint64_t;
using detail::full_mask;
using detail::mask_of;

RepParams representation_params(const Instance& inst, const RepOverrides& ov,
                                Rng& rng) {
  static const ConstantSet K = solve_base_constants();
  RepParams P;
  const unsigned ell = inst.word_len;
  const real lg = std::log2(static_cast<real>(ell));
  P.beta = K.beta;
  P.lambda = K.lambda;
  P.e1 = K.eps1;
  P.e2 = K.eps2;
  P.c_s = ov.c_s;
  P.c_k = ov.c_k;
  P.case_label = "rep";
  P.c_size = ov.c_size ? *ov.c_size : representation_c_size(ell, K.beta);
  P.qbound = ov.qbound ? *ov.qbound : quarterset_bound(P.c_size, K.eps2);
  P.p = ov.p ? *ov.p : sample_prime(ell, K.beta, rng);

  const real s_formula = ov.c_s *
                         std::pow(static_cast<real>(ell),
                                  1 + K.lambda + K.eps1 * K.beta / 2) *
                         lg * lg;
  const real s_cap = std::ceil(ov.s_ceiling * static_cast<real>(P.p));
  P.s_budget = ov.s ? *ov.s
                    : detail::clamp_budget(std::min(s_formula, s_cap),
                                           kCoupleBudgetCap);
  const real k_exp = (1 - K.eps1 / 2) * K.beta - (1 + K.lambda);
  const real k_formula = ov.c_k * std::exp2(inst.size() / 2.0L) *
                         std::pow(static_cast<real>(ell), -k_exp) * lg * lg;
  P.k_cutoff = ov.k ? *ov.k : detail::clamp_budget(k_formula, kCoupleBudgetCap);
  return P;
}

Verdict representation_ov(const Instance& inst, const RepOverrides& ov,
                          SolveContext& ctx) {
  const std::size_t n = inst.size();
  Machine& M = ctx.machine;
  SolveStats& st = ctx.stats;
  const RepParams P = representation_params(inst, ov, ctx.rng);
  st.p = P.p;
  st.case_label = P.case_label;
  st.notes["c_size"] = std::to_string(P.c_size);
  st.notes["qbound"] = std::to_string(P.qbound);
  st.notes["s_budget"] = std::to_string(P.s_budget);
  st.notes["k_cutoff"] = std::to_string(P.k_cutoff);
  if (n < P.c_size + 2 || P.c_size == 0) {
    st.case_label = "fallback";
    st.notes["fallback"] = "n too small for |C| and two nonempty halves";
    return meet_in_the_middle(inst, ctx);
  }

  // Any partition works; C is drawn uniformly so repeated runs differ.
  std::vector<unsigned> perm(n);
  for (unsigned i = 0; i < n; ++i) perm[i] = i;
  ctx.rng.shuffle(perm);
  std::vector<unsigned> c_idx(perm.begin(), perm.begin() + P.c_size);
  std::vector<unsigned> rest(perm.begin() + P.c_size, perm.end());
  std::sort(c_idx.begin(), c_idx.end());
  std::sort(rest.begin(), rest.end());
  const auto [a_idx, b_idx] = split_halves(rest);

  if (!ov.skip_preprocessing) {
    if (auto v = preprocess_unbalanced(inst, c_idx, P.e1, Engine::mitm, ctx)) {
      return *v;
    }
    if (auto v = preprocess_additive(inst, c_idx, P.lambda, Engine::mitm, ctx)) {
      return *v;
    }
    if (unbalanced_is_exhaustive(P.c_size, P.e1)) {
      // Every |S n C| was covered on one of the two sides.
      st.path = "preprocess-exhaustive";
      st.exact = true;
      return no_verdict(ctx.seed);
    }
  }

  auto LA = std::make_shared<SumList>(sorted_sum_enumeration(items_of(inst, a_idx), &M));
  auto LB = std::make_shared<SumList>(sorted_sum_enumeration(items_of(inst, b_idx), &M));
  const ResidueSplit splitA(LA, P.p, &M), splitB(LB, P.p, &M);
  const QuartersetCollection Q = make_collection(inst, c_idx, P.qbound, P.p, &M);
  st.notes["collection_size"] = std::to_string(Q.size());
  const MemoTable* memo = nullptr;
  if (M.model() == CostModel::word) {
    memo = ov_memo_for(Q);
    if (memo) M.memo_build(*memo);
    st.notes["ov_memo"] = memo ? "on" : "off";
  }

  const Mask a_mask = mask_of(a_idx);
  std::optional<bool> good_hit;
  std::vector<char> seen(P.p, 0);
  for (const detail::Side& side : detail::sides(inst, ov.both_orientations)) {
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<char> good;
    if (ctx.planted) {
      const Mask S = side.complement ? full_mask(n) ^ *ctx.planted : *ctx.planted;
      good.assign(P.p, 0);
      for (u64 g : detail::good_residues(inst, S, a_mask, Q, P.p)) good[g] = 1;
      if (!good_hit) good_hit = false;
    }
    const u64 t_mod = mod_small(side.target, P.p);
    u64 couples = 0;
    for (u64 draw = 0; draw < P.s_budget; ++draw) {
      const u64 r = ctx.rng.below(P.p);
      M.unit();
      ++st.s_used;
      if (seen[r]) continue;
      seen[r] = 1;
      if (!good.empty() && good[r]) good_hit = true;
      const CollectionList RA = residue_couple_list(splitA, Q, r, &M, &couples);
      const CollectionList RB =
          residue_couple_list(splitB, Q, (t_mod + P.p - r) % P.p, &M, &couples);
      auto hit = couple_two_pointer(RA, 0, RA.size(), RB, 0, RB.size(),
                                    side.target, Q, &M, memo);
      if (hit) {
        const Int a = RA[hit->ia].sum - Q.sums[hit->qa];
        const Int b = RB[hit->ib].sum - Q.sums[hit->qb];
        Mask m = detail::mask_for_sum(*LA, a) | detail::mask_for_sum(*LB, b) |
                 Q.global[hit->qa] | Q.global[hit->qb];
        if (side.complement) m = full_mask(n) ^ m;
        if (!witness_valid(inst, m)) throw Error("representation search built a bad witness");
        st.couples_created += couples;
        st.good_residue_hit = good_hit;
        st.path = "main";
        return yes_verdict(m, ctx.seed);
      }
      if (couples >= P.k_cutoff) {
        st.budget_exhausted = true;
        break;
      }
    }
    st.couples_created += couples;
  }
  st.good_residue_hit = good_hit;
  st.path = "main";
  return no_verdict(ctx.seed);
}

Verdict representation_ov(const Instance& inst, SolveContext& ctx) {
  return representation_ov(inst, RepOverrides{}, ctx);
}

}  // namespace ssum
