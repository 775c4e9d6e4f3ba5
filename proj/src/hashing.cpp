#include "ssum/hashing.hpp"

#include <algorithm>
#include <bit>

namespace ssum {

unsigned default_hash_bits(unsigned word_len) {
  const unsigned lg = std::bit_width(std::bit_ceil(std::max(word_len, 2u))) - 1;
  return std::clamp(3 * lg, 1u, std::min(word_len, 64u));
}

namespace {

void check_bits(unsigned word_len, unsigned m) {
  if (m < 1 || m > word_len || m > 64) {
    throw Error("hash width m=" + std::to_string(m) + " outside [1, " +
                std::to_string(std::min(word_len, 64u)) + "]");
  }
}

}  // namespace

PseudolinearHash draw_hash(unsigned word_len, unsigned m, Rng& rng) {
  check_bits(word_len, m);
  SimWord u(word_len);
  for (unsigned pos = 0; pos < word_len; pos += 64) {
    u.set_field(pos, std::min(64u, word_len - pos), rng.next());
  }
  u.set_field(0, 1, 1);
  return PseudolinearHash{u, m, word_len};
}

PseudolinearHash make_hash(const Int& u, unsigned m, unsigned word_len) {
  check_bits(word_len, m);
  SimWord w = SimWord::from_int(u, word_len);
  if (!w.bit(0)) throw Error("hash multiplier must be odd");
  return PseudolinearHash{w, m, word_len};
}

std::uint64_t hash_eval(const PseudolinearHash& h, const SimWord& y) {
  const SimWord p = h.u * y;
  return p.field(h.word_len - h.m, h.m);
}

std::uint64_t hash_eval(const PseudolinearHash& h, const Int& y,
                        Machine* machine) {
  if (machine) {
    machine->mul();
    machine->unit();
  }
  return hash_eval(h, SimWord::from_int(y, h.word_len));
}

}  // namespace ssum
