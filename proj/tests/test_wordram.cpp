#include <doctest.h>

#include "ssum/wordram.hpp"
#include "ssum/random.hpp"

using namespace ssum;
using u64 = std::uint64_t;

namespace {

Int modpow2(const Int& v, unsigned w) { return v & ((Int(1) << w) - 1); }

Int random_int(Rng& rng, unsigned bits) {
  Int v = 0;
  for (unsigned i = 0; i < bits; i += 64) v = (v << 64) | Int(rng.next());
  return modpow2(v, bits);
}

u64 low_mask(unsigned b) { return b >= 64 ? ~u64{0} : (u64{1} << b) - 1; }

PackedWord random_packed(Rng& rng, unsigned slot, unsigned ell, unsigned count) {
  std::vector<u64> v(count);
  for (auto& x : v) x = rng.next() & low_mask(slot);
  return pack_word(v, slot, ell);
}

bool ref_hash_compare(const PackedWord& a, const PackedWord& b, u64 ht) {
  const unsigned m = a.slot_width;
  for (u64 x : unpack_word(a)) {
    for (u64 y : unpack_word(b)) {
      const u64 s = (x + y) & low_mask(m);
      if (s == (ht & low_mask(m)) || s == ((ht - 1) & low_mask(m))) return true;
    }
  }
  return false;
}

bool ref_ov(const PackedWord& a, const PackedWord& b) {
  for (u64 x : unpack_word(a)) {
    for (u64 y : unpack_word(b)) {
      if ((x & y) == 0) return true;
    }
  }
  return false;
}

bool ref_hash_ov(const PackedWord& a, const PackedWord& b, u64 ht, const CoupleLayout& L,
                 const std::vector<u64>& rows) {
  const u64 hm = low_mask(L.hash_bits), qm = low_mask(L.bitmap_bits);
  for (u64 x : unpack_word(a)) {
    for (u64 y : unpack_word(b)) {
      const u64 s = ((x >> L.bitmap_bits) + (y >> L.bitmap_bits)) & hm;
      if (s != (ht & hm) && s != ((ht - 1) & hm)) continue;
      const u64 ca = x & qm, cb = y & qm;
      for (unsigned k = 0; k < rows.size(); ++k) {
        if (((ca >> k) & 1) && (rows[k] & cb)) return true;
      }
    }
  }
  return false;
}

}  // namespace

TEST_CASE("SimWord arithmetic matches big integers mod 2^ell") {
  Rng rng(1);
  for (unsigned w : {1u, 7u, 16u, 63u, 64u, 65u, 130u, 256u, 512u}) {
    for (int trial = 0; trial < 300; ++trial) {
      const Int a = random_int(rng, w), b = random_int(rng, w);
      const SimWord x = SimWord::from_int(a, w), y = SimWord::from_int(b, w);
      const Int M = Int(1) << w;
      REQUIRE(x.to_int() == a);
      REQUIRE((x + y).to_int() == modpow2(a + b, w));
      REQUIRE((x - y).to_int() == modpow2(a + M - b, w));
      REQUIRE((x * y).to_int() == modpow2(a * b, w));
      REQUIRE((x & y).to_int() == (a & b));
      REQUIRE((x | y).to_int() == (a | b));
      REQUIRE((x ^ y).to_int() == (a ^ b));
      REQUIRE((~x).to_int() == M - 1 - a);
      const unsigned s = static_cast<unsigned>(rng.below(w + 1));
      REQUIRE((x << s).to_int() == modpow2(a << s, w));
      REQUIRE((x >> s).to_int() == (a >> s));
      REQUIRE(((x < y) == (a < b)));
      const u64 k = rng.next();
      REQUIRE(x.mul_small(k).to_int() == modpow2(a * Int(k), w));
    }
  }
}

TEST_CASE("SimWord fields") {
  SimWord w(100);
  w.set_field(60, 10, 0x3ff);
  CHECK(w.field(60, 10) == 0x3ff);
  CHECK(w.field(59, 1) == 0);
  CHECK(w.field(70, 1) == 0);
  CHECK(SimWord::low_ones(70, 100).to_int() == (Int(1) << 70) - 1);
  CHECK_THROWS(SimWord(8) + SimWord(16));
}

TEST_CASE("charged cost formula") {
  Machine c(256, CostModel::circuit);
  c.unit(3);
  c.mul(2);
  c.mem(4);
  c.ac0(100);
  CHECK(c.charged_cost() == 3 + 4 + 1 + 2 * 8);

  Machine w(256, CostModel::word);
  w.unit(3);
  w.mul(2);
  w.mem(4);
  w.ac0(100);        // bit loop: 100 unit steps
  w.ac0(100, true);  // memo lookup: one memory access
  CHECK(w.charged_cost() == 3 + 100 + 2 + 4 + 1);

  Machine off(64, CostModel::circuit, false);
  off.unit(10);
  CHECK(off.charged_cost() == 0);
}

TEST_CASE("cost ledger is additive") {
  Rng rng(3);
  for (CostModel model : {CostModel::circuit, CostModel::word}) {
    for (int trial = 0; trial < 100; ++trial) {
      auto ops = [&](Machine& m, u64 seed) {
        Rng r(seed);
        for (int i = 0; i < 20; ++i) {
          switch (r.below(4)) {
            case 0: m.unit(r.below(10)); break;
            case 1: m.mul(r.below(10)); break;
            case 2: m.mem(r.below(10)); break;
            default: m.ac0(r.below(10), r.coin(0.5)); break;
          }
        }
      };
      const u64 s1 = rng.next(), s2 = rng.next();
      Machine a(128, model), b(128, model), both(128, model);
      ops(a, s1);
      ops(b, s2);
      ops(both, s1);
      ops(both, s2);
      REQUIRE(both.charged_cost() == a.charged_cost() + b.charged_cost());
      RamCounter sum = a.counter();
      sum += b.counter();
      REQUIRE(sum.charged_cost() == both.charged_cost());
    }
  }
}

TEST_CASE("packing round trip keeps order") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const unsigned m = 1 + static_cast<unsigned>(rng.below(40));
    const unsigned ell = std::max(m, 8u << rng.below(6));
    const unsigned per = std::max(1u, ell / m);
    std::vector<u64> vals(rng.below(50));
    for (auto& v : vals) v = rng.next() & low_mask(m);
    std::sort(vals.begin(), vals.end());
    const auto words = pack_sequence(vals, m, ell, per);
    for (const auto& w : words) REQUIRE(w.count * w.slot_width <= ell);
    REQUIRE(unpack_sequence(words) == vals);
  }
  CHECK_THROWS_AS(pack_word(std::vector<u64>{1, 2, 3}, 8, 16), Error);
  CHECK_THROWS_AS(pack_word(std::vector<u64>{1}, 0, 16), Error);
}

TEST_CASE("packed hash comparison fixed cases") {
  const PackedWord a = pack_word(std::vector<u64>{5}, 3, 3);
  const PackedWord b = pack_word(std::vector<u64>{2}, 3, 3);
  CHECK(packed_hash_compare(a, b, 7));
  const PackedWord z = pack_word(std::vector<u64>{0}, 3, 3);
  CHECK_FALSE(packed_hash_compare(z, z, 5));
  CHECK_THROWS_AS(packed_hash_compare(a, pack_word(std::vector<u64>{1}, 4, 4), 1), Error);
}

TEST_CASE("packed hash comparison agrees with the double loop") {
  Rng rng(5);
  for (int trial = 0; trial < 10000; ++trial) {
    const unsigned m = 1 + static_cast<unsigned>(rng.below(12));
    const unsigned ell = 64u << rng.below(3);
    const unsigned cap = ell / m;
    const PackedWord a = random_packed(rng, m, ell, 1 + rng.below(cap));
    const PackedWord b = random_packed(rng, m, ell, 1 + rng.below(cap));
    const u64 ht = rng.next() & low_mask(m);
    REQUIRE(packed_hash_compare(a, b, ht) == ref_hash_compare(a, b, ht));
  }
}

TEST_CASE("ov word fixed cases and reference") {
  CHECK(ov_word(pack_word(std::vector<u64>{0b01, 0b11}, 2, 4), pack_word(std::vector<u64>{0b10}, 2, 4)));
  CHECK_FALSE(ov_word(pack_word(std::vector<u64>{0b11}, 2, 2), pack_word(std::vector<u64>{0b11}, 2, 2)));
  Rng rng(6);
  for (int trial = 0; trial < 10000; ++trial) {
    const unsigned c = 4 + 2 * static_cast<unsigned>(rng.below(3));
    const unsigned ell = 64;
    const PackedWord a = random_packed(rng, c, ell, 1 + rng.below(ell / c));
    const PackedWord b = random_packed(rng, c, ell, 1 + rng.below(ell / c));
    REQUIRE(ov_word(a, b) == ref_ov(a, b));
  }
}

TEST_CASE("hash ov word fixed cases") {
  const CoupleLayout L{3, 4};
  // Bitmaps over four singleton quartersets {0},{1},{2},{3}: bit k names member k.
  std::vector<u64> rows(4);
  for (unsigned k = 0; k < 4; ++k) rows[k] = 0b1111 & ~(u64{1} << k);
  const PackedWord u = pack_word(std::vector<u64>{L.encode(3, 0b0011)}, 7, 7);
  const PackedWord v = pack_word(std::vector<u64>{L.encode(4, 0b1100)}, 7, 7);
  CHECK(hash_ov_word(u, v, 7, L, rows));
  // Members that pairwise intersect: no row lists a disjoint partner.
  std::vector<u64> overlap(4, 0);
  const PackedWord v2 = pack_word(std::vector<u64>{L.encode(4, 0b0010)}, 7, 7);
  CHECK_FALSE(hash_ov_word(u, v2, 7, L, overlap));
}

TEST_CASE("hash ov word agrees with nested loops") {
  Rng rng(7);
  for (int trial = 0; trial < 10000; ++trial) {
    const unsigned m = 1 + static_cast<unsigned>(rng.below(8));
    const unsigned q = 1 + static_cast<unsigned>(rng.below(10));
    const CoupleLayout L{m, q};
    const unsigned ell = 128;
    const unsigned cap = ell / L.slot_width();
    std::vector<u64> rows(q);
    for (auto& r : rows) r = rng.next() & rng.next() & low_mask(q);
    const PackedWord a = random_packed(rng, L.slot_width(), ell, 1 + rng.below(cap));
    const PackedWord b = random_packed(rng, L.slot_width(), ell, 1 + rng.below(cap));
    const u64 ht = rng.next() & low_mask(m);
    REQUIRE(hash_ov_word(a, b, ht, L, rows) == ref_hash_ov(a, b, ht, L, rows));
  }
}

TEST_CASE("memo tables equal direct evaluation on the whole domain") {
  // ov over 6+6 bit single-slot words
  const MemoTable ov = build_memo(
      [](u64 a, u64 b) {
        return ov_word(pack_word(std::vector<u64>{a}, 6, 6), pack_word(std::vector<u64>{b}, 6, 6));
      },
      12);
  CHECK(ov.index_width() == 12);
  for (u64 a = 0; a < 64; ++a) {
    for (u64 b = 0; b < 64; ++b) REQUIRE(ov.lookup(a, b) == ((a & b) == 0));
  }

  const MemoTable empty = build_memo([](u64, u64) { return true; }, 0);
  CHECK(empty.lookup(0, 0));

  CHECK_THROWS_AS(build_memo([](u64, u64) { return false; }, 27), SizeError);

  // hash-difference tables up to 20 index bits, exhaustively
  for (auto [m, slots] : {std::pair{3u, 2u}, std::pair{5u, 2u}, std::pair{2u, 5u}, std::pair{10u, 1u}}) {
    const MemoTable& t = hash_difference_memo(m, slots);
    const unsigned w = m * slots;
    REQUIRE(t.index_width() == 2 * w);
    for (u64 a = 0; a < (u64{1} << w); ++a) {
      for (u64 c = 0; c < (u64{1} << w); ++c) {
        REQUIRE(t.lookup(a, c) == hash_difference_predicate(a, c, m, slots));
      }
    }
  }
}

TEST_CASE("hash-difference memo matches packed comparison") {
  Rng rng(8);
  const unsigned m = 3, slots = 2, w = m * slots;
  const MemoTable& t = hash_difference_memo(m, slots);
  for (int trial = 0; trial < 4096; ++trial) {
    const PackedWord a = random_packed(rng, m, w, slots);
    const PackedWord b = random_packed(rng, m, w, slots);
    const u64 ht = rng.below(8);
    const PackedWord c = complement_hashes(b, ht);
    REQUIRE(t.lookup(a.bits.low64(), c.bits.low64()) == packed_hash_compare(a, b, ht));
  }
}
