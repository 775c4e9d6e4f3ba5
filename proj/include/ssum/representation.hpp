#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssum/baseline.hpp"
#include "ssum/constants.hpp"
#include "ssum/enumeration.hpp"
#include "ssum/hashing.hpp"
#include "ssum/solver.hpp"

namespace ssum {

// ---- primes ----------------------------------------------------------------

/** Deterministic Miller-Rabin for 64-bit inputs. */
bool is_prime(std::uint64_t v);

/** [ceil(ell^(1+beta/2)), floor(2 ell^(1+beta/2))]. */
std::pair<std::uint64_t, std::uint64_t> prime_range(unsigned word_len,
                                                    real beta);

/** Uniform prime from prime_range by rejection sampling. */
std::uint64_t sample_prime(unsigned word_len, real beta, Rng& rng);

/** |Y mod p| / |Y| for distinct Y. */
double prime_residue_spread(const std::vector<Int>& Y, std::uint64_t p);

// ---- preprocessing ---------------------------------------------------------

/** Engine for the final two-list search of a preprocessing step. */
enum class Engine { mitm, bitpack };

/**
 * Solutions with |S n Y| below (1 - eps)|Y|/2, on the instance and on its
 * complement (X, Sigma(X) - t). Returns a yes verdict if one is found.
 */
std::optional<Verdict> preprocess_unbalanced(const Instance& inst,
                                             const std::vector<unsigned>& Y,
                                             real eps, Engine engine,
                                             SolveContext& ctx);

/** Largest |T n Y| the unbalanced step enumerates. */
unsigned unbalanced_max_size(std::size_t y_size, real eps);

/** True when the unbalanced step on both sides covers every |S n Y|. */
bool unbalanced_is_exhaustive(std::size_t y_size, real eps);

/**
 * Exact verdict when |W(Y)| <= 2^|Y| ell^-eps and |Y| fits; the larger half
 * then contains Y. Returns nullopt (declined) otherwise.
 */
std::optional<Verdict> preprocess_additive(const Instance& inst,
                                           const std::vector<unsigned>& Y,
                                           real eps, Engine engine,
                                           SolveContext& ctx);

// ---- quartersets and couple lists -------------------------------------------

/** floor((1 + e2) c / 4). */
unsigned quarterset_bound(unsigned c, real e2);

/** Masks over c bits with popcount <= bound, in increasing numeric order. */
std::vector<std::uint64_t> near_quartersets(unsigned c, unsigned bound);

/** The enumerated near-quartersets of C with their shifts. */
struct QuartersetCollection {
  std::vector<unsigned> c_idx;        // instance indices of C
  unsigned bound = 0;
  std::vector<std::uint64_t> local;   // masks over positions in c_idx
  std::vector<Mask> global;           // the same sets as instance masks
  std::vector<Int> sums;
  std::vector<std::uint64_t> sums_mod_p;
  /** disjoint_rows[k]: members disjoint from member k, as a bitmap. */
  std::vector<std::uint64_t> disjoint_rows;
  std::uint64_t p = 0;

  std::size_t size() const { return local.size(); }
  /** Some member of a is disjoint from some member of b. */
  bool disjoint_pair(std::uint64_t a, std::uint64_t b) const;
};

/** Throws SizeError if the collection exceeds 64 members. */
QuartersetCollection make_collection(const Instance& inst,
                                     std::vector<unsigned> c_idx,
                                     unsigned bound, std::uint64_t p,
                                     Machine* machine = nullptr);

/**
 * R_{A,r}: every (a + Sigma(Q), Q) with a in the split's source and
 * a + Sigma(Q) = r mod p, merged by sum and compressed to one entry per sum.
 * `couples` accumulates the uncompressed couple count.
 */
CollectionList residue_couple_list(const ResidueSplit& split,
                                   const QuartersetCollection& Q,
                                   std::uint64_t r, Machine* machine = nullptr,
                                   std::uint64_t* couples = nullptr);

/** Greedy C with |W(C) mod p| = 2^|C|; positions into Y. Throws on a stall. */
std::vector<std::size_t> select_c(const std::vector<Int>& Y, std::uint64_t p,
                                  unsigned target_size);

/**
 * D of the given size inside the fullest class of residues mod p taken
 * mod q; q = 0 picks ceil(|Y| / size) - 1. Positions into Y.
 */
std::vector<std::size_t> select_d(const std::vector<Int>& Y, std::uint64_t p,
                                  unsigned target_size, std::uint64_t q = 0);

/** |W(D) mod p| by direct enumeration. */
std::size_t residue_sumset_size(const std::vector<Int>& D, std::uint64_t p);

// ---- parameters ------------------------------------------------------------

/** Optional overrides of the computed parameters. */
struct RepOverrides {
  std::optional<unsigned> c_size;
  std::optional<unsigned> d_size;
  std::optional<unsigned> qbound;
  std::optional<std::uint64_t> p;
  std::optional<std::uint64_t> s;
  std::optional<std::uint64_t> k;
  double c_s = 4.0;
  double c_k = 4.0;
  /** The sample budget is capped at this multiple of p. */
  double s_ceiling = 2.0;
  bool skip_preprocessing = false;
  bool both_orientations = true;
  /** Packed variant only: 1 or 2 forces the case regardless of |X mod p|. */
  std::optional<int> force_case;
};

inline constexpr std::uint64_t kCoupleBudgetCap = std::uint64_t{1} << 26;

struct RepParams {
  std::uint64_t p = 0;
  unsigned c_size = 0;
  unsigned d_size = 0;
  unsigned qbound = 0;
  real e1 = 0, e2 = 0;
  real beta = 0, lambda = 0;
  std::uint64_t s_budget = 0;
  std::uint64_t k_cutoff = 0;
  double c_s = 4.0, c_k = 4.0;
  std::string case_label;
};

/** |C| = floor(beta log2(ell / (beta log2 ell))), at least 4. */
unsigned representation_c_size(unsigned word_len, real beta);

/** Sample and couple budgets of the plain algorithm. */
RepParams representation_params(const Instance& inst, const RepOverrides& ov,
                                Rng& rng);

// ---- solvers ---------------------------------------------------------------

Verdict representation_ov(const Instance& inst, const RepOverrides& ov,
                          SolveContext& ctx);
Verdict representation_ov(const Instance& inst, SolveContext& ctx);

// ---- packing of couple lists -------------------------------------------------

/** A packed run of hash-collection couples with its exact boundary sums. */
struct PackedTriple {
  Int low_sum;
  PackedWord packed;
  Int high_sum;
  std::size_t first = 0;  // index of the first packed entry in R
  unsigned count = 0;
};

/**
 * Packs R in order into words of `unit_bits` bits, as many couples per word
 * as fit. Throws Error if one couple is wider than the word.
 */
std::vector<PackedTriple> sample_packing(const CollectionList& R,
                                         const PseudolinearHash& h,
                                         unsigned bitmap_bits,
                                         unsigned unit_bits,
                                         Machine* machine = nullptr);

struct CouplePair {
  std::size_t ia = 0, ib = 0;  // entries of R_A and R_B
  unsigned qa = 0, qb = 0;     // members of the collection
};

/** Comparison backend for sample_searching. */
struct SearchContext {
  const QuartersetCollection* collection = nullptr;
  const PseudolinearHash* hash = nullptr;
  Machine* machine = nullptr;
  SolveStats* stats = nullptr;
  /** Table over (u, v shifted by -h(t'')) answering the packed test, or null. */
  const MemoTable* memo = nullptr;
};

/**
 * Packed two-pointer scan for a' + b' = t'' with disjoint quartersets. Every
 * firing word pair is verified on the unhashed entries.
 */
std::optional<CouplePair> sample_searching(const Int& t2,
                                           const CollectionList& RA,
                                           const CollectionList& RB,
                                           const std::vector<PackedTriple>& HA,
                                           const std::vector<PackedTriple>& HB,
                                           const SearchContext& sc);

/** Cached OV table over pairs of collection bitmaps, or null above the cap. */
const MemoTable* ov_memo_for(const QuartersetCollection& Q);

/** Plain two-pointer over sorted couple lists with the disjointness test. */
std::optional<CouplePair> couple_two_pointer(
    const CollectionList& RA, std::size_t a0, std::size_t a1,
    const CollectionList& RB, std::size_t b0, std::size_t b1, const Int& t,
    const QuartersetCollection& Q, Machine* machine = nullptr,
    const MemoTable* ov_memo = nullptr);

Verdict packed_representation_ov(const Instance& inst, const RepOverrides& ov,
                                 SolveContext& ctx);
Verdict packed_representation_ov(const Instance& inst, SolveContext& ctx);

}  // namespace ssum
