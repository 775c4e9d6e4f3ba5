#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace ssum {

using Int = boost::multiprecision::cpp_int;
using Mask = std::uint64_t;

/** Subset masks are 64-bit, so instances hold at most this many values. */
inline constexpr std::size_t kMaxItems = 64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** A configured size cap was exceeded. */
class SizeError : public Error {
 public:
  using Error::Error;
};

unsigned bit_length(const Int& v);

/** Smallest power of two >= max(n, bit_length(t), 64). */
unsigned default_word_len(std::size_t n, const Int& t);

std::uint64_t to_u64(const Int& v);
std::string to_string(const Int& v);
std::string mask_hex(Mask m);

struct Instance {
  std::vector<Int> values;
  Int target;
  unsigned word_len = 0;

  std::size_t size() const { return values.size(); }
  Int total() const;
  Int sum_of(Mask m) const;
  /** Same multiset and target with a different word length (validated). */
  Instance with_word_len(unsigned ell) const;
};

/**
 * Validating constructor. word_len == 0 picks default_word_len. Throws Error
 * if any invariant fails (1 <= v <= t, n >= 1, word_len >= n and >= bitlen t).
 */
Instance make_instance(std::vector<Int> values, Int target,
                       unsigned word_len = 0);

struct Solution {
  Mask subset_mask = 0;
};

struct Verdict {
  bool answer = false;
  std::optional<Solution> witness;
  std::uint64_t trials_used = 1;
  std::uint64_t rng_seed = 0;
};

bool witness_valid(const Instance& inst, Mask m);

/** Throws if a yes verdict lacks a valid witness. */
void check_verdict(const Instance& inst, const Verdict& v);

Verdict yes_verdict(Mask m, std::uint64_t seed = 0);
Verdict no_verdict(std::uint64_t seed = 0);

inline constexpr unsigned kBruteForceMaxN = 24;
inline constexpr std::uint64_t kDpMaxTarget = std::uint64_t{1} << 26;

Verdict brute_force(const Instance& inst, unsigned max_n = kBruteForceMaxN);
Verdict dp_bellman(const Instance& inst,
                   std::uint64_t max_target = kDpMaxTarget);

/** True when t <= 2^(exponent * n), the regime where dp_bellman wins. */
bool dp_preferred(const Instance& inst, double exponent = 0.499);

/** A decision procedure; the seed lets randomized deciders vary per call. */
using Decider = std::function<Verdict(const Instance&, std::uint64_t seed)>;

/**
 * Self-reduction: stage i asks the decider about the instance with the
 * i-th value removed. Randomized deciders are repeated i times at stage i.
 */
Verdict decide_to_search(const Decider& decider, const Instance& inst,
                         bool randomized = false, std::uint64_t seed = 0);

struct ParsedInstance {
  Instance instance;
  std::optional<Mask> planted;
};

std::string format_instance(const Instance& inst,
                            std::optional<Mask> planted = std::nullopt);
ParsedInstance parse_instance(std::string_view text, unsigned word_len = 0);
ParsedInstance read_instance_file(const std::string& path,
                                  unsigned word_len = 0);
void write_instance_file(const std::string& path, const Instance& inst,
                         std::optional<Mask> planted = std::nullopt);

}  // namespace ssum
