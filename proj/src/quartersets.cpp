#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "ssum/representation.hpp"

namespace ssum {

using u64 = std::uint64_t;

unsigned quarterset_bound(unsigned c, real e2) {
  return static_cast<unsigned>(std::floor((1 + e2) * c / 4 + 1e-12L));
}

std::vector<u64> near_quartersets(unsigned c, unsigned bound) {
  if (c > 63) throw SizeError("C too large for quarterset masks");
  std::vector<u64> out;
  for (u64 m = 0; m < (u64{1} << c); ++m) {
    if (static_cast<unsigned>(std::popcount(m)) <= bound) out.push_back(m);
  }
  return out;
}

bool QuartersetCollection::disjoint_pair(u64 a, u64 b) const {
  u64 compat = 0;
  while (a) {
    compat |= disjoint_rows[std::countr_zero(a)];
    a &= a - 1;
  }
  return (compat & b) != 0;
}

QuartersetCollection make_collection(const Instance& inst,
                                     std::vector<unsigned> c_idx,
                                     unsigned bound, u64 p, Machine* machine) {
  QuartersetCollection Q;
  Q.c_idx = std::move(c_idx);
  Q.bound = bound;
  Q.p = p;
  // Enumerating masks is 2^|C|; refuse before that gets silly.
  if (Q.c_idx.size() > 24) throw SizeError("C too large to enumerate");
  Q.local = near_quartersets(static_cast<unsigned>(Q.c_idx.size()), bound);
  if (Q.local.size() > 64) {
    throw SizeError("near-quarterset collection has " +
                    std::to_string(Q.local.size()) + " members (max 64)");
  }
  for (u64 m : Q.local) {
    Mask g = 0;
    Int s = 0;
    for (unsigned b = 0; b < Q.c_idx.size(); ++b) {
      if ((m >> b) & 1) {
        g |= Mask{1} << Q.c_idx[b];
        s += inst.values[Q.c_idx[b]];
      }
    }
    Q.global.push_back(g);
    Q.sums_mod_p.push_back(p ? mod_small(s, p) : 0);
    Q.sums.push_back(std::move(s));
  }
  const std::size_t k = Q.size();
  Q.disjoint_rows.assign(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if ((Q.local[i] & Q.local[j]) == 0) Q.disjoint_rows[i] |= u64{1} << j;
    }
  }
  if (machine) machine->unit(k * (Q.c_idx.size() + 1) + k * k);
  return Q;
}

CollectionList residue_couple_list(const ResidueSplit& split,
                                   const QuartersetCollection& Q, u64 r,
                                   Machine* machine, u64* couples) {
  const u64 p = split.p();
  if (Q.p != p) throw Error("collection and split use different moduli");
  const SumList& src = split.source();
  std::vector<CollectionList> parts;
  for (std::size_t k = 0; k < Q.size(); ++k) {
    const u64 j = (r % p + p - Q.sums_mod_p[k]) % p;
    const auto bucket = split.bucket(j);
    if (machine) machine->unit();
    if (bucket.empty()) continue;
    CollectionList part;
    part.reserve(bucket.size());
    for (std::uint32_t idx : bucket) {
      part.push_back(CollectionEntry{src.sums[idx] + Q.sums[k], u64{1} << k});
    }
    if (machine) machine->unit(bucket.size());
    if (couples) *couples += bucket.size();
    parts.push_back(std::move(part));
  }
  CollectionList out;
  if (parts.size() == 1) {
    out = std::move(parts.front());
  } else if (!parts.empty()) {
    out = merge_sorted(parts, true, machine);
  }
  for (const CollectionEntry& e : out) {
    if (mod_small(e.sum, p) != r % p) throw Error("couple list residue mismatch");
  }
  return out;
}

std::vector<std::size_t> select_c(const std::vector<Int>& Y, u64 p,
                                  unsigned target_size) {
  std::vector<std::size_t> chosen;
  if (target_size == 0) return chosen;
  if (p == 0) throw Error("select_c needs p >= 1");
  std::vector<u64> W{0};
  std::vector<char> diff(p, 0);
  diff[0] = 1;
  std::vector<char> used(Y.size(), 0);
  while (chosen.size() < target_size) {
    std::size_t pick = Y.size();
    u64 pr = 0;
    for (std::size_t i = 0; i < Y.size(); ++i) {
      if (used[i]) continue;
      pr = mod_small(Y[i], p);
      if (!diff[pr]) {
        pick = i;
        break;
      }
    }
    if (pick == Y.size()) {
      throw Error("select_c: no element avoids W(C) - W(C) mod p");
    }
    used[pick] = 1;
    chosen.push_back(pick);
    const std::size_t w = W.size();
    for (std::size_t i = 0; i < w; ++i) W.push_back((W[i] + pr) % p);
    std::fill(diff.begin(), diff.end(), 0);
    for (u64 a : W) {
      for (u64 b : W) diff[(a + p - b) % p] = 1;
    }
  }
  return chosen;
}

std::vector<std::size_t> select_d(const std::vector<Int>& Y, u64 p,
                                  unsigned target_size, u64 q) {
  std::vector<std::size_t> out;
  if (target_size == 0) return out;
  if (target_size > Y.size()) throw Error("select_d: Y smaller than |D|");
  if (q == 0) {
    const u64 c = (Y.size() + target_size - 1) / target_size;
    q = std::max<u64>(1, c - 1);
  }
  std::map<u64, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < Y.size(); ++i) {
    classes[mod_small(Y[i], p) % q].push_back(i);
  }
  const std::vector<std::size_t>* best = nullptr;
  for (const auto& [j, members] : classes) {
    if (!best || members.size() > best->size()) best = &members;
  }
  if (best->size() < target_size) {
    throw Error("select_d: no residue progression holds |D| elements");
  }
  out.assign(best->begin(), best->begin() + target_size);
  return out;
}

std::size_t residue_sumset_size(const std::vector<Int>& D, u64 p) {
  std::vector<char> in(p, 0), next;
  in[0] = 1;
  for (const Int& d : D) {
    const u64 r = mod_small(d, p);
    next = in;
    for (u64 x = 0; x < p; ++x) {
      if (in[x]) next[(x + r) % p] = 1;
    }
    in.swap(next);
  }
  return static_cast<std::size_t>(std::count(in.begin(), in.end(), 1));
}

const MemoTable* ov_memo_for(const QuartersetCollection& Q) {
  const unsigned w = 2 * static_cast<unsigned>(Q.size());
  if (w > kMemoCap) return nullptr;
  static std::mutex mu;
  static std::map<std::vector<u64>, std::unique_ptr<MemoTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[Q.disjoint_rows];
  if (!slot) {
    slot = std::make_unique<MemoTable>(build_memo(
        [&Q](u64 a, u64 b) { return Q.disjoint_pair(a, b); }, w));
  }
  return slot.get();
}

std::optional<CouplePair> couple_two_pointer(
    const CollectionList& RA, std::size_t a0, std::size_t a1,
    const CollectionList& RB, std::size_t b0, std::size_t b1, const Int& t,
    const QuartersetCollection& Q, Machine* machine, const MemoTable* ov_memo) {
  std::size_t i = a0, j = b1;
  u64 steps = 0;
  std::optional<CouplePair> hit;
  while (i < a1 && j > b0 && !hit) {
    ++steps;
    const Int s = RA[i].sum + RB[j - 1].sum;
    if (s < t) {
      ++i;
    } else if (s > t) {
      --j;
    } else {
      const u64 ca = RA[i].collection, cb = RB[j - 1].collection;
      bool disjoint;
      if (ov_memo) {
        disjoint = ov_memo->lookup(ca, cb);
        if (machine) machine->ac0(0, true);
      } else {
        disjoint = Q.disjoint_pair(ca, cb);
        if (machine) machine->ac0(Q.size() * Q.size());
      }
      if (disjoint) {
        u64 a = ca;
        while (a) {
          const unsigned k = static_cast<unsigned>(std::countr_zero(a));
          const u64 m = Q.disjoint_rows[k] & cb;
          if (m) {
            hit = CouplePair{i, j - 1, k,
                             static_cast<unsigned>(std::countr_zero(m))};
            break;
          }
          a &= a - 1;
        }
      }
      ++i;
      --j;
    }
  }
  if (machine) machine->unit(steps);
  return hit;
}

unsigned representation_c_size(unsigned word_len, real beta) {
  const real lg = std::log2(static_cast<real>(word_len));
  const real v = beta * std::log2(word_len / (beta * lg));
  return std::max(4u, static_cast<unsigned>(std::max<real>(0, std::floor(v))));
}

}  // namespace ssum
