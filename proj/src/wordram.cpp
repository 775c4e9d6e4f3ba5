#include "ssum/wordram.hpp"

#include <bit>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace ssum {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

SimWord::SimWord(unsigned width) : width_(width), nlimbs_((width + 63) / 64) {
  if (width == 0 || width > kMaxBits) {
    throw Error("word width " + std::to_string(width) + " out of range");
  }
}

SimWord SimWord::from_u64(u64 v, unsigned width) {
  SimWord w(width);
  w.limbs_[0] = v;
  w.trim();
  return w;
}

SimWord SimWord::from_int(const Int& v, unsigned width) {
  if (v < 0) throw Error("SimWord::from_int needs a non-negative value");
  SimWord w(width);
  const auto& be = v.backend();
  static_assert(sizeof(*be.limbs()) == 8, "expected 64-bit limbs");
  const unsigned n = std::min<unsigned>(static_cast<unsigned>(be.size()),
                                        w.nlimbs_);
  for (unsigned i = 0; i < n; ++i) w.limbs_[i] = be.limbs()[i];
  w.trim();
  return w;
}

SimWord SimWord::low_ones(unsigned count, unsigned width) {
  SimWord w(width);
  count = std::min(count, width);
  for (unsigned i = 0; i < count / 64; ++i) w.limbs_[i] = ~u64{0};
  if (count % 64) w.limbs_[count / 64] = (u64{1} << (count % 64)) - 1;
  return w;
}

Int SimWord::to_int() const {
  Int r = 0;
  for (unsigned i = nlimbs_; i-- > 0;) {
    r <<= 64;
    r |= limbs_[i];
  }
  return r;
}

void SimWord::trim() {
  const unsigned top = width_ % 64;
  if (top) limbs_[nlimbs_ - 1] &= (u64{1} << top) - 1;
}

void SimWord::require_same(const SimWord& o) const {
  if (o.width_ != width_) throw Error("SimWord width mismatch");
}

bool SimWord::is_zero() const {
  for (unsigned i = 0; i < nlimbs_; ++i) {
    if (limbs_[i]) return false;
  }
  return true;
}

u64 SimWord::field(unsigned pos, unsigned len) const {
  const unsigned li = pos / 64, off = pos % 64;
  u64 v = limbs_[li] >> off;
  if (off && off + len > 64 && li + 1 < nlimbs_) v |= limbs_[li + 1] << (64 - off);
  return len == 64 ? v : v & ((u64{1} << len) - 1);
}

void SimWord::set_field(unsigned pos, unsigned len, u64 v) {
  const u64 m = len == 64 ? ~u64{0} : (u64{1} << len) - 1;
  v &= m;
  const unsigned li = pos / 64, off = pos % 64;
  limbs_[li] = (limbs_[li] & ~(m << off)) | (v << off);
  if (off && off + len > 64 && li + 1 < nlimbs_) {
    const unsigned hi = off + len - 64;
    const u64 hm = (u64{1} << hi) - 1;
    limbs_[li + 1] = (limbs_[li + 1] & ~hm) | (v >> (64 - off));
  }
  trim();
}

SimWord SimWord::operator+(const SimWord& o) const {
  require_same(o);
  SimWord r(width_);
  u64 carry = 0;
  for (unsigned i = 0; i < nlimbs_; ++i) {
    const u128 s = static_cast<u128>(limbs_[i]) + o.limbs_[i] + carry;
    r.limbs_[i] = static_cast<u64>(s);
    carry = static_cast<u64>(s >> 64);
  }
  r.trim();
  return r;
}

SimWord SimWord::operator-(const SimWord& o) const {
  require_same(o);
  SimWord r(width_);
  u64 borrow = 0;
  for (unsigned i = 0; i < nlimbs_; ++i) {
    const u64 a = limbs_[i], b = o.limbs_[i];
    r.limbs_[i] = a - b - borrow;
    borrow = (a < b) || (a - b < borrow) ? 1 : 0;
  }
  r.trim();
  return r;
}

SimWord SimWord::operator*(const SimWord& o) const {
  require_same(o);
  SimWord r(width_);
  for (unsigned i = 0; i < nlimbs_; ++i) {
    if (!limbs_[i]) continue;
    u64 carry = 0;
    for (unsigned j = 0; i + j < nlimbs_; ++j) {
      const u128 t = static_cast<u128>(limbs_[i]) * o.limbs_[j] +
                     r.limbs_[i + j] + carry;
      r.limbs_[i + j] = static_cast<u64>(t);
      carry = static_cast<u64>(t >> 64);
    }
  }
  r.trim();
  return r;
}

SimWord SimWord::mul_small(u64 k) const {
  SimWord r(width_);
  u64 carry = 0;
  for (unsigned i = 0; i < nlimbs_; ++i) {
    const u128 t = static_cast<u128>(limbs_[i]) * k + carry;
    r.limbs_[i] = static_cast<u64>(t);
    carry = static_cast<u64>(t >> 64);
  }
  r.trim();
  return r;
}

#define SSUM_BITWISE(OP)                                  \
  SimWord SimWord::operator OP(const SimWord& o) const {  \
    require_same(o);                                      \
    SimWord r(width_);                                    \
    for (unsigned i = 0; i < nlimbs_; ++i)                \
      r.limbs_[i] = limbs_[i] OP o.limbs_[i];             \
    return r;                                             \
  }
SSUM_BITWISE(&)
SSUM_BITWISE(|)
SSUM_BITWISE(^)
#undef SSUM_BITWISE

SimWord SimWord::operator~() const {
  SimWord r(width_);
  for (unsigned i = 0; i < nlimbs_; ++i) r.limbs_[i] = ~limbs_[i];
  r.trim();
  return r;
}

SimWord SimWord::operator<<(unsigned s) const {
  SimWord r(width_);
  if (s >= width_) return r;
  const unsigned ls = s / 64, bs = s % 64;
  for (unsigned i = nlimbs_; i-- > ls;) {
    u64 v = limbs_[i - ls] << bs;
    if (bs && i - ls > 0) v |= limbs_[i - ls - 1] >> (64 - bs);
    r.limbs_[i] = v;
  }
  r.trim();
  return r;
}

SimWord SimWord::operator>>(unsigned s) const {
  SimWord r(width_);
  if (s >= width_) return r;
  const unsigned ls = s / 64, bs = s % 64;
  for (unsigned i = 0; i + ls < nlimbs_; ++i) {
    u64 v = limbs_[i + ls] >> bs;
    if (bs && i + ls + 1 < nlimbs_) v |= limbs_[i + ls + 1] << (64 - bs);
    r.limbs_[i] = v;
  }
  return r;
}

bool SimWord::operator==(const SimWord& o) const {
  if (o.width_ != width_) return false;
  for (unsigned i = 0; i < nlimbs_; ++i) {
    if (limbs_[i] != o.limbs_[i]) return false;
  }
  return true;
}

std::strong_ordering SimWord::operator<=>(const SimWord& o) const {
  require_same(o);
  for (unsigned i = nlimbs_; i-- > 0;) {
    if (limbs_[i] != o.limbs_[i]) return limbs_[i] <=> o.limbs_[i];
  }
  return std::strong_ordering::equal;
}

const char* to_string(CostModel m) {
  return m == CostModel::circuit ? "circuit" : "word";
}

CostModel parse_cost_model(std::string_view s) {
  if (s == "circuit") return CostModel::circuit;
  if (s == "word") return CostModel::word;
  throw Error("unknown cost model '" + std::string(s) + "'");
}

u64 RamCounter::mul_cost() const {
  if (model == CostModel::word) return 1;
  return std::bit_width(std::bit_ceil(std::max(word_len, 2u))) - 1;
}

u64 RamCounter::ac0_cost() const { return model == CostModel::circuit ? 1 : 0; }

u64 RamCounter::charged_cost() const {
  return unit_ops + mem_ops + ac0_cost() * ac0_ops + mul_cost() * mul_ops;
}

RamCounter& RamCounter::operator+=(const RamCounter& o) {
  unit_ops += o.unit_ops;
  mul_ops += o.mul_ops;
  ac0_ops += o.ac0_ops;
  mem_ops += o.mem_ops;
  return *this;
}

Machine::Machine(unsigned word_len, CostModel model, bool accounting)
    : accounting_(accounting) {
  counter_.word_len = word_len;
  counter_.model = model;
}

void Machine::ac0(u64 loop_ops, bool memoized) {
  if (!accounting_) return;
  if (counter_.model == CostModel::circuit) {
    ++counter_.ac0_ops;
  } else if (memoized) {
    ++counter_.mem_ops;
  } else {
    counter_.unit_ops += std::max<u64>(loop_ops, 1);
  }
}

void Machine::memo_build(const MemoTable& t) { unit(t.build_cost()); }

PackedWord pack_word(std::span<const u64> vals, unsigned slot_width,
                     unsigned word_len) {
  if (slot_width == 0 || slot_width > 64 || slot_width > word_len) {
    throw Error("slot width " + std::to_string(slot_width) + " invalid");
  }
  PackedWord w{SimWord(word_len), slot_width, 0};
  const unsigned cap = w.capacity();
  if (vals.size() > cap) throw Error("too many values for one packed word");
  w.count = static_cast<unsigned>(vals.size());
  for (unsigned i = 0; i < cap; ++i) {
    if (vals.empty()) break;
    const u64 v = i < vals.size() ? vals[i] : vals.back();
    w.bits.set_field(w.slot_pos(i), slot_width, v);
  }
  return w;
}

std::vector<PackedWord> pack_sequence(std::span<const u64> vals,
                                      unsigned slot_width, unsigned word_len,
                                      unsigned per_word) {
  if (per_word == 0 || per_word * slot_width > word_len) {
    throw Error("per-word slot count does not fit the word");
  }
  std::vector<PackedWord> out;
  for (std::size_t i = 0; i < vals.size(); i += per_word) {
    const std::size_t k = std::min<std::size_t>(per_word, vals.size() - i);
    out.push_back(pack_word(vals.subspan(i, k), slot_width, word_len));
  }
  return out;
}

std::vector<u64> unpack_word(const PackedWord& w) {
  std::vector<u64> out;
  for (unsigned i = 0; i < w.count; ++i) out.push_back(w.slot(i));
  return out;
}

std::vector<u64> unpack_sequence(const std::vector<PackedWord>& ws) {
  std::vector<u64> out;
  for (const PackedWord& w : ws) {
    for (unsigned i = 0; i < w.count; ++i) out.push_back(w.slot(i));
  }
  return out;
}

namespace {

// Per-field masks for a subfield [off, off+w) inside each occupied slot.
struct FieldMasks {
  SimWord ones;  // lowest bit of each subfield
  SimWord high;  // top bit of each subfield
  SimWord low;   // all but the top bit
};

const FieldMasks& field_masks(unsigned word_len, unsigned slot_width,
                              unsigned count, unsigned off, unsigned w) {
  thread_local std::unordered_map<u64, FieldMasks> cache;
  const u64 key = (u64{word_len} << 40) | (u64{slot_width} << 30) |
                  (u64{count} << 14) | (u64{off} << 7) | w;
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  FieldMasks fm{SimWord(word_len), SimWord(word_len), SimWord(word_len)};
  for (unsigned i = 0; i < count; ++i) {
    const unsigned base = word_len - (i + 1) * slot_width + off;
    fm.ones.set_field(base, 1, 1);
    fm.high.set_field(base + w - 1, 1, 1);
    if (w > 1) fm.low.set_field(base, w - 1, ~u64{0});
  }
  return cache.emplace(key, fm).first->second;
}

// Top bit of every zero subfield, nothing elsewhere.
SimWord zero_fields(const SimWord& e, const FieldMasks& fm) {
  const SimWord nz = ((e & fm.low) + fm.low) | e;
  return ~nz & fm.high;
}

// Top bit of every non-zero subfield.
SimWord nonzero_fields(const SimWord& e, const FieldMasks& fm) {
  return (((e & fm.low) + fm.low) | e) & fm.high;
}

SimWord field_add(const SimWord& x, const SimWord& y, const FieldMasks& fm) {
  return ((x & fm.low) + (y & fm.low)) ^ ((x ^ y) & fm.high);
}

void require_layout(const PackedWord& a, const PackedWord& b) {
  if (a.slot_width != b.slot_width || a.bits.width() != b.bits.width()) {
    throw Error("packed word layout mismatch");
  }
}

}  // namespace

bool packed_hash_compare(const PackedWord& wa, const PackedWord& wb, u64 ht) {
  require_layout(wa, wb);
  const unsigned m = wa.slot_width;
  const u64 mask = m == 64 ? ~u64{0} : (u64{1} << m) - 1;
  const FieldMasks& fm = field_masks(wb.bits.width(), m, wb.count, 0, m);
  const SimWord t0 = fm.ones.mul_small(ht & mask);
  const SimWord t1 = fm.ones.mul_small((ht - 1) & mask);
  for (unsigned i = 0; i < wa.count; ++i) {
    const SimWord x = fm.ones.mul_small(wa.slot(i));
    const SimWord s = field_add(x, wb.bits, fm);
    if (!(zero_fields(s ^ t0, fm) | zero_fields(s ^ t1, fm)).is_zero()) {
      return true;
    }
  }
  return false;
}

bool ov_word(const PackedWord& u, const PackedWord& v) {
  require_layout(u, v);
  const unsigned w = u.slot_width;
  const FieldMasks& fm = field_masks(v.bits.width(), w, v.count, 0, w);
  for (unsigned i = 0; i < u.count; ++i) {
    const SimWord x = fm.ones.mul_small(u.slot(i));
    if (!zero_fields(x & v.bits, fm).is_zero()) return true;
  }
  return false;
}

bool hash_ov_word(const PackedWord& u, const PackedWord& v, u64 ht,
                  const CoupleLayout& layout, std::span<const u64> rows) {
  require_layout(u, v);
  if (u.slot_width != layout.slot_width() || layout.hash_bits == 0 ||
      layout.bitmap_bits == 0 || rows.size() > layout.bitmap_bits) {
    throw Error("hash-collection layout mismatch");
  }
  const unsigned m = layout.hash_bits, q = layout.bitmap_bits;
  const unsigned W = v.bits.width(), sw = layout.slot_width();
  const FieldMasks& fh = field_masks(W, sw, v.count, q, m);
  const FieldMasks& fb = field_masks(W, sw, v.count, 0, q);
  const u64 hmask = m == 64 ? ~u64{0} : (u64{1} << m) - 1;
  const u64 qmask = q == 64 ? ~u64{0} : (u64{1} << q) - 1;
  const SimWord t0 = fh.ones.mul_small(ht & hmask);
  const SimWord t1 = fh.ones.mul_small((ht - 1) & hmask);
  for (unsigned i = 0; i < u.count; ++i) {
    const u64 x = u.slot(i);
    u64 bits = x & qmask, compat = 0;
    while (bits) {
      compat |= rows[std::countr_zero(bits)];
      bits &= bits - 1;
    }
    if (!compat) continue;
    const SimWord xw = fb.ones.mul_small(layout.encode(x >> q, compat));
    const SimWord s = field_add(xw, v.bits, fh);
    const SimWord hz = zero_fields(s ^ t0, fh) | zero_fields(s ^ t1, fh);
    const SimWord bz = nonzero_fields(xw & v.bits, fb);
    if (!((hz >> m) & bz).is_zero()) return true;
  }
  return false;
}

PackedWord complement_hashes(const PackedWord& wb, u64 ht) {
  PackedWord c = wb;
  const unsigned m = wb.slot_width;
  const u64 mask = m == 64 ? ~u64{0} : (u64{1} << m) - 1;
  for (unsigned i = 0; i < wb.capacity(); ++i) {
    c.bits.set_field(c.slot_pos(i), m, (ht - wb.slot(i)) & mask);
  }
  return c;
}

bool hash_difference_predicate(u64 a, u64 c, unsigned m, unsigned slots) {
  const u64 mask = m == 64 ? ~u64{0} : (u64{1} << m) - 1;
  for (unsigned i = 0; i < slots; ++i) {
    const u64 x = (a >> ((slots - 1 - i) * m)) & mask;
    for (unsigned j = 0; j < slots; ++j) {
      const u64 y = (c >> ((slots - 1 - j) * m)) & mask;
      const u64 d = (x - y) & mask;
      if (d == 0 || d == mask) return true;
    }
  }
  return false;
}

MemoTable::MemoTable(unsigned left_bits, unsigned right_bits)
    : left_bits_(left_bits),
      right_bits_(right_bits),
      table_(((u64{1} << (left_bits + right_bits)) + 63) / 64, 0) {}

MemoTable build_memo(const std::function<bool(u64, u64)>& fn,
                     unsigned index_width, unsigned cap) {
  if (index_width > cap) {
    throw SizeError("memo index width " + std::to_string(index_width) +
                    " exceeds cap " + std::to_string(cap));
  }
  const unsigned right = index_width / 2, left = index_width - right;
  MemoTable t(left, right);
  for (u64 i = 0; i < (u64{1} << left); ++i) {
    for (u64 j = 0; j < (u64{1} << right); ++j) {
      if (fn(i, j)) t.set(i, j);
    }
  }
  t.set_build_cost(u64{1} << index_width);
  return t;
}

const MemoTable& hash_difference_memo(unsigned m, unsigned slots) {
  static std::mutex mu;
  static std::map<std::pair<unsigned, unsigned>, std::unique_ptr<MemoTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{m, slots}];
  if (!slot) {
    const unsigned w = m * slots;
    if (2 * w > kMemoCap) throw SizeError("hash memo exceeds the index cap");
    // Operands are exactly w bits each; build over the split point w.
    MemoTable t(w, w);
    for (u64 i = 0; i < (u64{1} << w); ++i) {
      for (u64 j = 0; j < (u64{1} << w); ++j) {
        if (hash_difference_predicate(i, j, m, slots)) t.set(i, j);
      }
    }
    t.set_build_cost(u64{1} << (2 * w));
    slot = std::make_unique<MemoTable>(std::move(t));
  }
  return *slot;
}

}  // namespace ssum
