#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "ssum/representation.hpp"
#include "test_util.hpp"

using namespace ssum;
using testutil::ints;
using u64 = std::uint64_t;

namespace {

bool trial_division_prime(u64 v) {
  if (v < 2) return false;
  for (u64 d = 2; d * d <= v; ++d) {
    if (v % d == 0) return false;
  }
  return true;
}

// Planted instance with |S| = size and values in [1, 2^bits].
Instance planted(Rng& rng, unsigned n, unsigned size, unsigned bits, Mask* S,
                 unsigned ell = 0) {
  std::vector<unsigned> idx(n);
  for (unsigned i = 0; i < n; ++i) idx[i] = i;
  rng.shuffle(idx);
  *S = 0;
  for (unsigned i = 0; i < size; ++i) *S |= Mask{1} << idx[i];
  std::vector<Int> v;
  Int t = 0;
  for (unsigned i = 0; i < n; ++i) {
    v.emplace_back(1 + rng.below(u64{1} << bits));
    if ((*S >> i) & 1) t += v.back();
  }
  for (unsigned i = 0; i < n; ++i) {
    if (v[i] > t) v[i] = 1 + rng.below(static_cast<u64>(t));
  }
  return make_instance(v, t, ell);
}

Instance no_instance(Rng& rng, unsigned n, unsigned bits, unsigned ell = 0) {
  std::vector<Int> v;
  Int sum = 0;
  for (unsigned i = 0; i < n; ++i) {
    v.emplace_back(2 * (1 + rng.below(u64{1} << (bits - 1))));
    sum += v.back();
  }
  Int t = sum / 2 + 1;
  if ((t & 1) == 0) t += 1;
  for (auto& x : v) {
    if (x > t) x = 2;
  }
  return make_instance(v, t, ell);
}

CollectionList random_collection_list(Rng& rng, unsigned k, u64 max_sum, unsigned q) {
  std::set<u64> sums;
  while (sums.size() < k) sums.insert(rng.below(max_sum));
  CollectionList out;
  for (u64 s : sums) out.push_back({Int(s), 1 + rng.below((u64{1} << q) - 1)});
  return out;
}

bool reference_pair(const CollectionList& A, const CollectionList& B, const Int& t,
                    const QuartersetCollection& Q) {
  for (const auto& a : A) {
    for (const auto& b : B) {
      if (a.sum + b.sum == t && Q.disjoint_pair(a.collection, b.collection)) return true;
    }
  }
  return false;
}

QuartersetCollection collection_over(unsigned c, unsigned bound, u64 p) {
  std::vector<Int> v(c + 2, Int(1));
  for (unsigned i = 0; i < c + 2; ++i) v[i] = Int(i + 1);
  const Instance x = make_instance(v, Int(1000));
  std::vector<unsigned> idx;
  for (unsigned i = 0; i < c; ++i) idx.push_back(i);
  return make_collection(x, idx, bound, p);
}

}  // namespace

// ---- primes ------------------------------------------------------------------

TEST_CASE("primality against trial division") {
  for (u64 v = 0; v < 20000; ++v) REQUIRE(is_prime(v) == trial_division_prime(v));
  CHECK(is_prime(18446744073709551557ULL));
  CHECK_FALSE(is_prime(18446744073709551555ULL));
  CHECK_FALSE(is_prime(3215031751ULL));  // strong pseudoprime to bases 2, 3, 5, 7
}

TEST_CASE("prime sampling") {
  const auto [lo, hi] = prime_range(16, 1.1186L);
  // 16^1.5593 = 75.4
  CHECK(lo == 76);
  CHECK(hi == 150);
  Rng a(1), b(1);
  const u64 p = sample_prime(16, 1.1186L, a);
  CHECK(p == sample_prime(16, 1.1186L, b));
  CHECK(p >= lo);
  CHECK(p <= hi);
  CHECK(trial_division_prime(p));

  const auto [lo32, hi32] = prime_range(32, 1.1186L);
  Rng r(2);
  for (int i = 0; i < 1000; ++i) {
    const u64 q = sample_prime(32, 1.1186L, r);
    REQUIRE(trial_division_prime(q));
    REQUIRE(q >= lo32);
    REQUIRE(q <= hi32);
  }
}

TEST_CASE("prime residue spread") {
  std::vector<Int> Y;
  for (int i = 0; i < 10; ++i) Y.emplace_back(i);
  CHECK(prime_residue_spread(Y, 101) == doctest::Approx(1.0));
  for (u64 p : {7ULL, 101ULL, 1009ULL}) {
    CHECK(prime_residue_spread({Int(0), Int(p), Int(2 * p)}, p) == doctest::Approx(1.0 / 3));
  }
}

// ---- preprocessing --------------------------------------------------------------

TEST_CASE("additive preprocessing on many equal values") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Int> v(10, Int(1));
    for (int i = 0; i < 20; ++i) v.emplace_back(1 + rng.below(1u << 20));
    Int total = 0;
    for (const auto& x : v) total += x;
    const Int t = static_cast<u64>(1u << 20) + rng.below(static_cast<u64>(total) - (1u << 20));
    const Instance x = make_instance(v, t, 64);
    std::vector<unsigned> Y;
    for (unsigned i = 0; i < 10; ++i) Y.push_back(i);
    SolveContext ctx(64, CostModel::circuit, 1);
    auto r = preprocess_additive(x, Y, 0.5L, Engine::mitm, ctx);
    REQUIRE(r.has_value());
    REQUIRE(r->answer == meet_in_the_middle(x).answer);
    REQUIRE(testutil::consistent(x, *r));
    REQUIRE(ctx.stats.exact);
  }
}

TEST_CASE("additive preprocessing declines full sumsets") {
  std::vector<Int> v;
  for (unsigned i = 0; i < 16; ++i) v.emplace_back(Int(1) << i);
  const Instance x = make_instance(v, Int(1) << 16, 64);
  std::vector<unsigned> Y{0, 1, 2, 3, 4, 5};
  SolveContext ctx(64, CostModel::circuit, 1);
  CHECK_FALSE(preprocess_additive(x, Y, 0.5L, Engine::mitm, ctx).has_value());
  CHECK_FALSE(preprocess_additive(x, Y, 0.5L, Engine::bitpack, ctx).has_value());
}

TEST_CASE("additive preprocessing on powers of two padded with ones") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    // Y = (1, 2, ..., 2^(k - eps log k - 1), 1, ..., 1) with k = 12
    const unsigned k = 12, powers = 12 - 2 - 1;
    std::vector<Int> v;
    for (unsigned i = 0; i < powers; ++i) v.emplace_back(Int(1) << i);
    while (v.size() < k) v.emplace_back(1);
    for (unsigned i = 0; i < 24; ++i) v.emplace_back(1 + rng.below(1u << 30));
    Mask S = 0;
    Int t = 0;
    for (unsigned i = 0; i < v.size(); ++i) {
      if (rng.coin(0.5)) {
        S |= Mask{1} << i;
        t += v[i];
      }
    }
    for (auto& x : v) {
      if (x > t) x = t;
    }
    t = 0;
    for (unsigned i = 0; i < v.size(); ++i) {
      if ((S >> i) & 1) t += v[i];
    }
    const Instance x = make_instance(v, t, 64);
    std::vector<unsigned> Y;
    for (unsigned i = 0; i < k; ++i) Y.push_back(i);
    for (Engine e : {Engine::mitm, Engine::bitpack}) {
      SolveContext ctx(64, CostModel::circuit, rng.next());
      auto r = preprocess_additive(x, Y, 0.2L, e, ctx);
      REQUIRE(r.has_value());
      REQUIRE(r->answer);
      REQUIRE(testutil::consistent(x, *r));
    }
  }
}

TEST_CASE("unbalanced preprocessing") {
  CHECK(unbalanced_max_size(5, 0.1579L) == 2);
  CHECK(unbalanced_is_exhaustive(5, 0.1579L));
  CHECK_FALSE(unbalanced_is_exhaustive(8, 0.1579L));

  Rng rng(5);
  const std::vector<unsigned> Y{0, 1, 2, 3, 4, 5, 6, 7};
  const Mask y_mask = 0xff;
  for (int trial = 0; trial < 100; ++trial) {
    // S avoids Y, or takes at most 2 of its 8 elements
    Mask S = 0;
    unsigned in_y = static_cast<unsigned>(rng.below(3));
    for (unsigned i = 0; i < in_y; ++i) S |= Mask{1} << rng.below(8);
    for (unsigned i = 8; i < 24; ++i) {
      if (rng.coin(0.5)) S |= Mask{1} << i;
    }
    std::vector<Int> v;
    Int t = 0;
    for (unsigned i = 0; i < 24; ++i) {
      v.emplace_back(1 + rng.below(u64{1} << 40));
      if ((S >> i) & 1) t += v.back();
    }
    for (auto& x : v) {
      if (x > t) x = t;
    }
    t = 0;
    for (unsigned i = 0; i < 24; ++i) {
      if ((S >> i) & 1) t += v[i];
    }
    // flipping to the complement side must work as well
    bool flip = rng.coin(0.5);
    Instance x = make_instance(v, t, 64);
    if (flip) x = make_instance(v, x.total() - t, 64);
    for (Engine e : {Engine::mitm, Engine::bitpack}) {
      SolveContext ctx(64, CostModel::circuit, rng.next());
      auto r = preprocess_unbalanced(x, Y, 0.1579L, e, ctx);
      REQUIRE(r.has_value());
      REQUIRE(testutil::consistent(x, *r));
      (void)y_mask;
    }
  }
}

// ---- quartersets -------------------------------------------------------------

TEST_CASE("near quartersets and collection") {
  CHECK(quarterset_bound(8, 0.2427L) == 2);
  CHECK(quarterset_bound(4, 0) == 1);
  const auto nq = near_quartersets(4, 1);
  CHECK(nq == std::vector<u64>{0, 1, 2, 4, 8});
  const QuartersetCollection Q = collection_over(4, 1, 101);
  REQUIRE(Q.size() == 5);
  // member 1 = {0} and member 2 = {1} are disjoint; member 1 is not disjoint from itself
  CHECK(Q.disjoint_pair(0b00010, 0b00100));
  CHECK_FALSE(Q.disjoint_pair(0b00010, 0b00010));
  CHECK(Q.disjoint_pair(0b00001, 0b00001));  // the empty set
  CHECK_THROWS_AS(collection_over(12, 6, 101), SizeError);
}

TEST_CASE("every split of a small solution part is represented") {
  for (unsigned c = 1; c <= 12; ++c) {
    const unsigned bound = quarterset_bound(c, 0.2427L);
    const auto nq = near_quartersets(c, bound);
    const std::set<u64> members(nq.begin(), nq.end());
    for (u64 sc = 0; sc < (u64{1} << c); ++sc) {
      if (2 * static_cast<unsigned>(std::popcount(sc)) > c) continue;
      for (u64 q1 = sc;; q1 = (q1 - 1) & sc) {
        const u64 q2 = sc ^ q1;
        if (std::popcount(q1) <= static_cast<int>(bound) && std::popcount(q2) <= static_cast<int>(bound)) {
          REQUIRE(members.count(q1));
          REQUIRE(members.count(q2));
        }
        if (q1 == 0) break;
      }
    }
  }
}

TEST_CASE("residue couple lists") {
  Rng rng(6);
  std::vector<Int> v;
  for (int i = 0; i < 14; ++i) v.emplace_back(1 + rng.below(10000));
  const Instance x = make_instance(v, Int(20000), 64);
  const std::vector<unsigned> c_idx{0, 1, 2, 3, 4, 5}, a_idx{6, 7, 8, 9, 10, 11, 12, 13};
  const u64 p = 97;
  auto LA = std::make_shared<SumList>(sorted_sum_enumeration(items_of(x, a_idx)));
  const ResidueSplit split(LA, p);

  // the empty set alone: R is the residue sublist with the singleton bitmap
  const QuartersetCollection Q0 = make_collection(x, c_idx, 0, p);
  REQUIRE(Q0.size() == 1);
  for (u64 r = 0; r < p; ++r) {
    const CollectionList R = residue_couple_list(split, Q0, r);
    const SumList sub = split.sublist(r);
    REQUIRE(R.size() == sub.size());
    for (std::size_t i = 0; i < R.size(); ++i) {
      REQUIRE(R[i].sum == sub.sums[i]);
      REQUIRE(R[i].collection == 1);
    }
  }

  const QuartersetCollection Q = make_collection(x, c_idx, 2, p);
  u64 couples = 0;
  for (u64 r = 0; r < p; ++r) {
    const CollectionList R = residue_couple_list(split, Q, r, nullptr, &couples);
    for (std::size_t i = 0; i < R.size(); ++i) {
      REQUIRE(mod_small(R[i].sum, p) == r);
      if (i) REQUIRE(R[i - 1].sum < R[i].sum);
      // each set bit names a member whose shift reaches this sum
      for (unsigned k = 0; k < Q.size(); ++k) {
        if ((R[i].collection >> k) & 1) {
          const Int a = R[i].sum - Q.sums[k];
          REQUIRE(std::binary_search(LA->sums.begin(), LA->sums.end(), a));
        }
      }
    }
  }
  CHECK(couples == LA->size() * Q.size());

  // an empty source list yields nothing
  auto E = std::make_shared<SumList>();
  const ResidueSplit es(E, p);
  CHECK(residue_couple_list(es, Q, 3).empty());
}

TEST_CASE("select C") {
  std::vector<Int> Y;
  for (int i = 1; i <= 100; ++i) Y.emplace_back(i);
  const auto pos = select_c(Y, 101, 3);
  REQUIRE(pos.size() == 3);
  std::vector<Int> C;
  for (auto i : pos) C.push_back(Y[i]);
  CHECK(residue_sumset_size(C, 101) == 8);
  CHECK(select_c(Y, 101, 0).empty());
  CHECK(residue_sumset_size({}, 101) == 1);
  CHECK_THROWS_AS(select_c({Int(101), Int(202), Int(303)}, 101, 2), Error);
}

TEST_CASE("select D") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const u64 p = 211;
    std::vector<Int> Y;
    const u64 r = rng.below(p);
    for (int i = 0; i < 12; ++i) Y.emplace_back(r + p * (1 + rng.below(1000)));
    const auto pos = select_d(Y, p, 6);
    std::vector<Int> D;
    for (auto i : pos) D.push_back(Y[i]);
    CHECK(residue_sumset_size(D, p) <= D.size() + 1);
  }
  for (int trial = 0; trial < 50; ++trial) {
    const u64 p = sample_prime(64, 1.1186L, rng);
    std::vector<Int> Y;
    for (int i = 0; i < 40; ++i) Y.emplace_back(1 + rng.below(u64{1} << 50));
    const unsigned size = 6;
    const auto pos = select_d(Y, p, size);
    std::vector<Int> D;
    for (auto i : pos) D.push_back(Y[i]);
    const u64 q = (Y.size() + size - 1) / size - 1;
    CHECK(residue_sumset_size(D, p) <= static_cast<double>(p) / q * size * size);
  }
  const auto one = select_d({Int(5), Int(9)}, 7, 1);
  REQUIRE(one.size() == 1);
  CHECK(residue_sumset_size({Int(one[0] == 0 ? 5 : 9)}, 7) == 2);
}

// ---- packed couple lists --------------------------------------------------------

TEST_CASE("sample packing") {
  Rng rng(8);
  const QuartersetCollection Q = collection_over(4, 1, 101);
  const PseudolinearHash h = draw_hash(64, 12, rng);
  CHECK(sample_packing({}, h, 5, 64).empty());

  const CollectionList one{{Int(42), 0b101}};
  const auto T1 = sample_packing(one, h, 5, 64);
  REQUIRE(T1.size() == 1);
  CHECK(T1[0].low_sum == T1[0].high_sum);

  const CollectionList R = random_collection_list(rng, 1000, 1u << 30, 5);
  const auto T = sample_packing(R, h, 5, 64);
  const CoupleLayout L{12, 5};
  std::size_t k = 0;
  for (const auto& tr : T) {
    REQUIRE(tr.first == k);
    REQUIRE(tr.low_sum == R[tr.first].sum);
    REQUIRE(tr.high_sum == R[tr.first + tr.count - 1].sum);
    for (unsigned i = 0; i < tr.count; ++i, ++k) {
      const u64 slot = tr.packed.slot(i);
      REQUIRE((slot >> L.bitmap_bits) == hash_eval(h, R[k].sum));
      REQUIRE((slot & 0b11111) == R[k].collection);
    }
  }
  CHECK(k == R.size());
  CHECK_THROWS_AS(sample_packing(R, h, 60, 64), Error);
}

TEST_CASE("sample searching fixed cases") {
  const QuartersetCollection Q = collection_over(4, 1, 101);
  Rng rng(9);
  const PseudolinearHash h = draw_hash(64, 12, rng);
  Machine M(64, CostModel::circuit);
  SolveStats st;
  const SearchContext sc{&Q, &h, &M, &st, nullptr};

  // member 1 = {0}, member 2 = {1}: disjoint
  const CollectionList A{{Int(3), 0b00010}, {Int(5), 0b00010}}, B{{Int(10), 0b00100}, {Int(20), 0b00010}};
  const auto HA = sample_packing(A, h, 5, 64), HB = sample_packing(B, h, 5, 64);
  auto hit = sample_searching(Int(15), A, B, HA, HB, sc);
  REQUIRE(hit.has_value());
  CHECK(A[hit->ia].sum + B[hit->ib].sum == 15);
  CHECK(hit->qa == 1);
  CHECK(hit->qb == 2);

  // 3 + 20 = 23 matches but both hold only {0}
  CHECK_FALSE(sample_searching(Int(23), A, B, HA, HB, sc).has_value());
  CHECK_FALSE(sample_searching(Int(15), {}, B, {}, HB, sc).has_value());
}

TEST_CASE("sample searching never misses") {
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const unsigned c = 4 + static_cast<unsigned>(rng.below(3));
    const QuartersetCollection Q = collection_over(c, 1, 101);
    const unsigned q = static_cast<unsigned>(Q.size());
    const CollectionList A = random_collection_list(rng, 40, 4000, q);
    const CollectionList B = random_collection_list(rng, 40, 4000, q);
    const Int t = A[rng.below(A.size())].sum + B[rng.below(B.size())].sum;
    const bool truth = reference_pair(A, B, t, Q);
    for (int s = 0; s < 20; ++s) {
      const unsigned ell = 32u << rng.below(3);
      const PseudolinearHash h = draw_hash(ell, std::min(default_hash_bits(ell), ell - q), rng);
      Machine M(ell, CostModel::circuit);
      SolveStats st;
      const SearchContext sc{&Q, &h, &M, &st, nullptr};
      const auto HA = sample_packing(A, h, q, ell), HB = sample_packing(B, h, q, ell);
      auto hit = sample_searching(t, A, B, HA, HB, sc);
      REQUIRE(hit.has_value() == truth);
      if (hit) {
        REQUIRE(A[hit->ia].sum + B[hit->ib].sum == t);
        REQUIRE(((A[hit->ia].collection >> hit->qa) & 1));
        REQUIRE(((B[hit->ib].collection >> hit->qb) & 1));
        REQUIRE((Q.local[hit->qa] & Q.local[hit->qb]) == 0);
      }
    }
  }
}

TEST_CASE("plain couple two-pointer against the reference") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const QuartersetCollection Q = collection_over(6, 2, 101);
    const unsigned q = static_cast<unsigned>(Q.size());
    const CollectionList A = random_collection_list(rng, 30, 2000, q);
    const CollectionList B = random_collection_list(rng, 30, 2000, q);
    const Int t = A[rng.below(A.size())].sum + B[rng.below(B.size())].sum;
    auto hit = couple_two_pointer(A, 0, A.size(), B, 0, B.size(), t, Q);
    REQUIRE(hit.has_value() == reference_pair(A, B, t, Q));
    const MemoTable* memo = ov_memo_for(Q);
    if (memo) {
      auto h2 = couple_two_pointer(A, 0, A.size(), B, 0, B.size(), t, Q, nullptr, memo);
      REQUIRE(h2.has_value() == hit.has_value());
    }
  }
}

// ---- solvers -----------------------------------------------------------------

TEST_CASE("representation solver with amplification finds planted solutions") {
  Rng rng(12);
  unsigned found = 0;
  const unsigned trials = 200;
  for (unsigned i = 0; i < trials; ++i) {
    Mask S;
    const Instance x = planted(rng, 26, 13, 40, &S);
    Verdict v = no_verdict();
    for (unsigned r = 0; r < 60 && !v.answer; ++r) {
      SolveContext ctx(x.word_len, CostModel::circuit, rng.next());
      v = representation_ov(x, ctx);
      REQUIRE(testutil::consistent(x, v));
      if (ctx.stats.exact) break;
    }
    found += v.answer;
  }
  CHECK(found >= 0.99 * trials);
}

TEST_CASE("representation main loop on its own") {
  Rng rng(13);
  RepOverrides ov;
  ov.skip_preprocessing = true;
  ov.c_size = 6;
  unsigned found = 0, single = 0;
  const unsigned trials = 60;
  for (unsigned i = 0; i < trials; ++i) {
    Mask S;
    const Instance x = planted(rng, 18, 9, 26, &S, 32);
    Verdict v = no_verdict();
    for (unsigned r = 0; r < 60 && !v.answer; ++r) {
      SolveContext ctx(32, r % 2 ? CostModel::word : CostModel::circuit, rng.next());
      ctx.planted = S;
      v = representation_ov(x, ov, ctx);
      REQUIRE(testutil::consistent(x, v));
      REQUIRE(ctx.stats.path == "main");
      single += (r == 0 && v.answer);
    }
    found += v.answer;
  }
  CHECK(found >= 0.95 * trials);
  CHECK(single >= trials / 3.0 - 0.1 * trials);
}

TEST_CASE("representation solvers never answer yes on no-instances") {
  Rng rng(14);
  RepOverrides main_only;
  main_only.skip_preprocessing = true;
  main_only.c_size = 6;
  for (int i = 0; i < 250; ++i) {
    const unsigned ell = i % 2 ? 16 : 32;
    const Instance x = no_instance(rng, 14, ell - 6, ell);
    for (const RepOverrides& ov : {RepOverrides{}, main_only}) {
      for (int s = 0; s < 2; ++s) {
        SolveContext a(ell, CostModel::circuit, rng.next());
        REQUIRE_FALSE(representation_ov(x, ov, a).answer);
        SolveContext b(ell, CostModel::circuit, rng.next());
        REQUIRE_FALSE(packed_representation_ov(x, ov, b).answer);
      }
    }
  }
}

TEST_CASE("couple budget is respected") {
  Rng rng(15);
  for (int i = 0; i < 20; ++i) {
    Mask S;
    const Instance x = planted(rng, 18, 9, 26, &S, 32);
    RepOverrides ov;
    ov.skip_preprocessing = true;
    ov.c_size = 6;
    ov.k = 50;
    ov.both_orientations = false;
    SolveContext ctx(32, CostModel::circuit, rng.next());
    representation_ov(x, ov, ctx);
    // one residue batch holds at most (|L_A| + |L_B|) * |collection| couples
    const u64 batch = (u64{1} << 6) * 2 * std::stoull(ctx.stats.notes.at("collection_size"));
    CHECK(ctx.stats.couples_created <= *ov.k + batch);
  }
}

TEST_CASE("self-reduction over the representation solver") {
  Rng rng(16);
  unsigned ok = 0;
  for (int i = 0; i < 20; ++i) {
    Mask S;
    const Instance x = planted(rng, 24, 12, 40, &S);
    const Decider d = [](const Instance& sub, u64 seed) {
      Verdict v = no_verdict();
      for (unsigned r = 0; r < 20 && !v.answer; ++r) {
        SolveContext ctx(sub.word_len, CostModel::circuit, mix_seed({seed, r}));
        v = representation_ov(sub, ctx);
        if (ctx.stats.exact) break;
      }
      return v;
    };
    Verdict v = decide_to_search(d, x, true, rng.next());
    ok += v.answer && witness_valid(x, v.witness->subset_mask);
  }
  CHECK(ok >= 19);
}

TEST_CASE("packed solver finds planted solutions") {
  Rng rng(17);
  unsigned found = 0;
  const unsigned trials = 200;
  for (unsigned i = 0; i < trials; ++i) {
    Mask S;
    const unsigned ell = i % 2 ? 16 : 32;
    const Instance x = planted(rng, ell == 16 ? 14 : 20, ell == 16 ? 7 : 10, ell - 6, &S, ell);
    Verdict v = no_verdict();
    for (unsigned r = 0; r < 120 && !v.answer; ++r) {
      SolveContext ctx(ell, CostModel::circuit, rng.next());
      v = packed_representation_ov(x, ctx);
      REQUIRE(testutil::consistent(x, v));
      if (ctx.stats.exact) break;
    }
    found += v.answer;
  }
  CHECK(found >= 0.99 * trials);
}

TEST_CASE("packed main loop in both cases") {
  Rng rng(18);
  for (int forced : {1, 2}) {
    for (CostModel model : {CostModel::circuit, CostModel::word}) {
      RepOverrides ov;
      ov.skip_preprocessing = true;
      ov.c_size = 6;
      ov.force_case = forced;
      unsigned found = 0;
      const unsigned trials = 12;
      for (unsigned i = 0; i < trials; ++i) {
        Mask S;
        const Instance x = planted(rng, 18, 9, 26, &S, 32);
        Verdict v = no_verdict();
        for (unsigned r = 0; r < 60 && !v.answer; ++r) {
          SolveContext ctx(32, model, rng.next());
          ctx.planted = S;
          v = packed_representation_ov(x, ov, ctx);
          REQUIRE(testutil::consistent(x, v));
          REQUIRE(ctx.stats.case_label == (forced == 1 ? "I" : "II"));
        }
        found += v.answer;
      }
      CHECK(found >= 0.9 * trials);
    }
  }
}

TEST_CASE("case split follows the residue count") {
  Rng rng(19);
  // spread-out values: many residues mod p, Case I
  {
    std::vector<Int> v;
    for (int i = 0; i < 24; ++i) v.emplace_back(1 + rng.below(1u << 20));
    Int t = 0;
    for (int i = 0; i < 12; ++i) t += v[i];
    const Instance x = make_instance(v, t, 32);
    SolveContext ctx(32, CostModel::circuit, 1);
    packed_representation_ov(x, ctx);
    CHECK(ctx.stats.case_label == "I");
    CHECK(std::stoul(ctx.stats.notes.at("residues")) > 24 / 5.0);
  }
  // three distinct values repeated: few residues, Case II
  {
    std::vector<Int> v;
    for (int i = 0; i < 24; ++i) v.emplace_back(1000 + 7 * (i % 3));
    Int t = 0;
    for (int i = 0; i < 12; ++i) t += v[i];
    const Instance x = make_instance(v, t, 32);
    SolveContext ctx(32, CostModel::circuit, 1);
    Verdict r = packed_representation_ov(x, ctx);
    CHECK(ctx.stats.case_label == "II");
    CHECK(std::stoul(ctx.stats.notes.at("residues")) <= 24 / 5.0);
    CHECK(testutil::consistent(x, r));
  }
  // sparse regime: bit packing alone
  {
    Mask S;
    const Instance x = planted(rng, 20, 10, 40, &S, 256);
    SolveContext ctx(256, CostModel::circuit, 1);
    packed_representation_ov(x, ctx);
    CHECK(ctx.stats.case_label == "bitpack");
  }
}
