#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ssum/core.hpp"

namespace ssum {

/** An ell-bit machine word. All arithmetic wraps mod 2^ell. */
class SimWord {
 public:
  static constexpr unsigned kMaxLimbs = 16;
  static constexpr unsigned kMaxBits = 64 * kMaxLimbs;

  SimWord() : SimWord(64) {}
  explicit SimWord(unsigned width);

  static SimWord from_u64(std::uint64_t v, unsigned width);
  /** v mod 2^width; v must be non-negative. */
  static SimWord from_int(const Int& v, unsigned width);
  /** A word with the low `count` bits set. */
  static SimWord low_ones(unsigned count, unsigned width);

  Int to_int() const;
  unsigned width() const { return width_; }
  unsigned limbs() const { return nlimbs_; }
  std::uint64_t limb(unsigned i) const { return limbs_[i]; }
  std::uint64_t low64() const { return limbs_[0]; }

  bool is_zero() const;
  bool bit(unsigned i) const { return (limbs_[i / 64] >> (i % 64)) & 1; }
  /** Bits [pos, pos+len) as an integer; len <= 64. */
  std::uint64_t field(unsigned pos, unsigned len) const;
  void set_field(unsigned pos, unsigned len, std::uint64_t v);

  SimWord operator+(const SimWord& o) const;
  SimWord operator-(const SimWord& o) const;
  SimWord operator*(const SimWord& o) const;
  SimWord operator&(const SimWord& o) const;
  SimWord operator|(const SimWord& o) const;
  SimWord operator^(const SimWord& o) const;
  SimWord operator~() const;
  SimWord operator<<(unsigned s) const;
  SimWord operator>>(unsigned s) const;
  SimWord mul_small(std::uint64_t k) const;

  bool operator==(const SimWord& o) const;
  std::strong_ordering operator<=>(const SimWord& o) const;

 private:
  void trim();
  void require_same(const SimWord& o) const;

  unsigned width_;
  unsigned nlimbs_;
  std::array<std::uint64_t, kMaxLimbs> limbs_{};
};

enum class CostModel { circuit, word };

const char* to_string(CostModel m);
CostModel parse_cost_model(std::string_view s);

struct RamCounter {
  CostModel model = CostModel::circuit;
  unsigned word_len = 64;
  std::uint64_t unit_ops = 0;
  std::uint64_t mul_ops = 0;
  std::uint64_t ac0_ops = 0;
  std::uint64_t mem_ops = 0;

  std::uint64_t mul_cost() const;
  std::uint64_t ac0_cost() const;
  std::uint64_t charged_cost() const;
  RamCounter& operator+=(const RamCounter& o);
};

class MemoTable;

/** Cost ledger for one simulated run. Not shared between threads. */
class Machine {
 public:
  explicit Machine(unsigned word_len = 64, CostModel model = CostModel::circuit,
                   bool accounting = true);

  unsigned word_len() const { return counter_.word_len; }
  CostModel model() const { return counter_.model; }
  bool accounting() const { return accounting_; }

  void unit(std::uint64_t k = 1) {
    if (accounting_) counter_.unit_ops += k;
  }
  void mul(std::uint64_t k = 1) {
    if (accounting_) counter_.mul_ops += k;
  }
  void mem(std::uint64_t k = 1) {
    if (accounting_) counter_.mem_ops += k;
  }
  /**
   * One AC0 word operation. Circuit RAM: one atomic op. Word RAM: one table
   * lookup if memoized, otherwise the bit loop of `loop_ops` unit steps.
   */
  void ac0(std::uint64_t loop_ops, bool memoized = false);
  void memo_build(const MemoTable& t);

  const RamCounter& counter() const { return counter_; }
  std::uint64_t charged_cost() const { return counter_.charged_cost(); }

 private:
  RamCounter counter_;
  bool accounting_;
};

/** Fixed-width fields packed big-endian: slot 0 holds the highest bits. */
struct PackedWord {
  SimWord bits;
  unsigned slot_width = 1;
  unsigned count = 0;

  unsigned capacity() const { return bits.width() / slot_width; }
  /** Bit offset of the lowest bit of slot i. */
  unsigned slot_pos(unsigned i) const {
    return bits.width() - (i + 1) * slot_width;
  }
  std::uint64_t slot(unsigned i) const {
    return bits.field(slot_pos(i), slot_width);
  }
};

/**
 * Packs up to capacity values. Unused slots repeat the last value, so any
 * predicate of the form "some slot pair matches" is unchanged by padding.
 */
PackedWord pack_word(std::span<const std::uint64_t> vals, unsigned slot_width,
                     unsigned word_len);
std::vector<PackedWord> pack_sequence(std::span<const std::uint64_t> vals,
                                      unsigned slot_width, unsigned word_len,
                                      unsigned per_word);
std::vector<std::uint64_t> unpack_word(const PackedWord& w);
std::vector<std::uint64_t> unpack_sequence(const std::vector<PackedWord>& ws);

/** Some slot pair (x, y) has x + y in {ht, ht - 1} mod 2^m, m = slot width. */
bool packed_hash_compare(const PackedWord& wa, const PackedWord& wb,
                         std::uint64_t ht);

/** Some slot pair has bitwise AND zero. */
bool ov_word(const PackedWord& u, const PackedWord& v);

/** Slot layout for (hash, collection bitmap) couples; hash in the high bits. */
struct CoupleLayout {
  unsigned hash_bits = 0;
  unsigned bitmap_bits = 0;
  unsigned slot_width() const { return hash_bits + bitmap_bits; }
  std::uint64_t encode(std::uint64_t hash, std::uint64_t bitmap) const {
    return (hash << bitmap_bits) | bitmap;
  }
};

/**
 * Some couple pair passes the hash test of packed_hash_compare and holds
 * disjoint quartersets. disjoint_rows[k] is the bitmap of collection members
 * disjoint from member k.
 */
bool hash_ov_word(const PackedWord& u, const PackedWord& v, std::uint64_t ht,
                  const CoupleLayout& layout,
                  std::span<const std::uint64_t> disjoint_rows);

/** Slotwise (ht - b) mod 2^m over every slot, padding included. */
PackedWord complement_hashes(const PackedWord& wb, std::uint64_t ht);

/**
 * The table form of packed_hash_compare: strings of `slots` m-bit fields a
 * and c = complement_hashes(b, ht); true iff some x - y is 0 or -1 mod 2^m.
 */
bool hash_difference_predicate(std::uint64_t a, std::uint64_t c, unsigned m,
                               unsigned slots);

inline constexpr unsigned kMemoCap = 26;

class MemoTable {
 public:
  MemoTable() : MemoTable(0, 0) {}
  MemoTable(unsigned left_bits, unsigned right_bits);

  unsigned index_width() const { return left_bits_ + right_bits_; }
  unsigned left_bits() const { return left_bits_; }
  unsigned right_bits() const { return right_bits_; }
  std::uint64_t build_cost() const { return build_cost_; }
  bool lookup(std::uint64_t i, std::uint64_t j) const {
    const std::uint64_t k = (i << right_bits_) | j;
    return (table_[k >> 6] >> (k & 63)) & 1;
  }
  void set(std::uint64_t i, std::uint64_t j) {
    const std::uint64_t k = (i << right_bits_) | j;
    table_[k >> 6] |= std::uint64_t{1} << (k & 63);
  }
  void set_build_cost(std::uint64_t c) { build_cost_ = c; }

 private:
  unsigned left_bits_;
  unsigned right_bits_;
  std::vector<std::uint64_t> table_;
  std::uint64_t build_cost_ = 0;
};

/**
 * table[i || j] = fn(i, j), with i taking the upper ceil(w/2) index bits.
 * Throws SizeError above the cap.
 */
MemoTable build_memo(const std::function<bool(std::uint64_t, std::uint64_t)>& fn,
                     unsigned index_width, unsigned cap = kMemoCap);

/** Process-wide cache of hash-difference tables keyed by (m, slots). */
const MemoTable& hash_difference_memo(unsigned m, unsigned slots);

}  // namespace ssum
