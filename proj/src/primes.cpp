#include <cmath>
#include <set>

#include "ssum/representation.hpp"

namespace ssum {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 pow_mod(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, b, m);
    b = mul_mod(b, b, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime(u64 v) {
  if (v < 2) return false;
  for (u64 q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (v % q == 0) return v == q;
  }
  u64 d = v - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These bases are a deterministic witness set below 2^64.
  for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    u64 x = pow_mod(a, d, v);
    if (x == 1 || x == v - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < s; ++i) {
      x = mul_mod(x, x, v);
      if (x == v - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::pair<u64, u64> prime_range(unsigned word_len, real beta) {
  const real lo = std::pow(static_cast<real>(word_len), 1 + beta / 2);
  if (!(lo < 0x1p62L)) throw Error("prime range not representable");
  const u64 a = static_cast<u64>(std::ceil(lo));
  const u64 b = static_cast<u64>(std::floor(2 * lo));
  return {a, b};
}

u64 sample_prime(unsigned word_len, real beta, Rng& rng) {
  const auto [a, b] = prime_range(word_len, beta);
  // Bertrand: [x, 2x] holds a prime for every x >= 1.
  for (;;) {
    const u64 v = rng.between(a, b);
    if (is_prime(v)) return v;
  }
}

double prime_residue_spread(const std::vector<Int>& Y, u64 p) {
  if (Y.empty()) return 1.0;
  std::set<u64> seen;
  for (const Int& y : Y) seen.insert(mod_small(y, p));
  return static_cast<double>(seen.size()) / static_cast<double>(Y.size());
}

}  // namespace ssum
