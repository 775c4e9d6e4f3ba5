#pragma once

// Helpers shared by the two representation solvers.

#include <algorithm>
#include <bit>
#include <vector>

#include "ssum/representation.hpp"

namespace ssum::detail {

inline Mask full_mask(std::size_t n) {
  return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1;
}

inline Mask mask_of(const std::vector<unsigned>& idx) {
  Mask m = 0;
  for (unsigned i : idx) m |= Mask{1} << i;
  return m;
}

/** Generating mask of sum s in L; s must be present. */
inline Mask mask_for_sum(const SumList& L, const Int& s) {
  auto it = std::lower_bound(L.sums.begin(), L.sums.end(), s);
  if (it == L.sums.end() || *it != s) throw Error("sum missing from its list");
  return L.masks[static_cast<std::size_t>(it - L.sums.begin())];
}

struct Side {
  Int target;
  bool complement = false;
};

/** The instance, and its complement when asked and distinct. */
inline std::vector<Side> sides(const Instance& inst, bool both) {
  std::vector<Side> out{{inst.target, false}};
  const Int rest = inst.total() - inst.target;
  if (both && rest >= 0 && rest != inst.target) out.push_back({rest, true});
  return out;
}

/**
 * Residues r for which S n A shifted by a valid Q1 lands on r mod p, with
 * Q1 u Q2 = S n C both inside the collection. Empty if S n C is too large.
 */
inline std::vector<std::uint64_t> good_residues(const Instance& inst, Mask S,
                                                Mask a_mask,
                                                const QuartersetCollection& Q,
                                                std::uint64_t p) {
  std::vector<std::uint64_t> out;
  const Mask c_mask = mask_of(Q.c_idx);
  const Mask sc = S & c_mask;
  const unsigned k = static_cast<unsigned>(std::popcount(sc));
  if (k > 2 * Q.bound) return out;
  const std::uint64_t base = mod_small(inst.sum_of(S & a_mask), p);
  for (std::size_t i = 0; i < Q.size(); ++i) {
    const Mask g = Q.global[i];
    if ((g & ~sc) != 0) continue;
    if (k - static_cast<unsigned>(std::popcount(g)) > Q.bound) continue;
    out.push_back((base + Q.sums_mod_p[i]) % p);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/** Exponent form budget, clamped to [1, cap]. */
inline std::uint64_t clamp_budget(long double v, std::uint64_t cap) {
  if (!(v >= 1)) return 1;
  if (v >= static_cast<long double>(cap)) return cap;
  return static_cast<std::uint64_t>(v);
}

}  // namespace ssum::detail
