#pragma once

#include <cstdint>

#include "ssum/core.hpp"
#include "ssum/random.hpp"
#include "ssum/wordram.hpp"

namespace ssum {

/** y -> (u*y mod 2^ell) >> (ell - m), u odd. */
struct PseudolinearHash {
  SimWord u;
  unsigned m = 1;
  unsigned word_len = 64;
};

/** 3 * ceil(log2 ell), clamped to [1, min(ell, 64)]. */
unsigned default_hash_bits(unsigned word_len);

/** Uniform odd ell-bit multiplier. Requires 1 <= m <= min(ell, 64). */
PseudolinearHash draw_hash(unsigned word_len, unsigned m, Rng& rng);
PseudolinearHash make_hash(const Int& u, unsigned m, unsigned word_len);

std::uint64_t hash_eval(const PseudolinearHash& h, const SimWord& y);
/** Hashes y mod 2^ell; charges one multiplication when a machine is given. */
std::uint64_t hash_eval(const PseudolinearHash& h, const Int& y,
                        Machine* machine = nullptr);

}  // namespace ssum
