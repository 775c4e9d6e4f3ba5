#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssum/core.hpp"
#include "ssum/enumeration.hpp"
#include "ssum/hashing.hpp"
#include "ssum/solver.hpp"

namespace ssum {

struct Partition {
  std::vector<unsigned> a_idx, b_idx, c_idx, d_idx;
};

/** Indices in order; the first ceil(k/2) go to A. */
std::pair<std::vector<unsigned>, std::vector<unsigned>> split_halves(
    const std::vector<unsigned>& idx);

std::vector<unsigned> index_range(unsigned begin, unsigned end);

/**
 * Two-pointer scan of LA[a0, a1) ascending against LB[b0, b1) descending.
 * Returns positions (i, j) with LA[i] + LB[j] = t.
 */
std::optional<std::pair<std::size_t, std::size_t>> mitm_two_pointer(
    const SumList& LA, std::size_t a0, std::size_t a1, const SumList& LB,
    std::size_t b0, std::size_t b1, const Int& t, Machine* machine = nullptr);
std::optional<std::pair<std::size_t, std::size_t>> mitm_two_pointer(
    const SumList& LA, const SumList& LB, const Int& t,
    Machine* machine = nullptr);

Verdict meet_in_the_middle(const Instance& inst, SolveContext& ctx);
Verdict meet_in_the_middle(const Instance& inst);

struct BitPackConfig {
  unsigned m = 0;            // hash width
  unsigned d_size = 0;       // |D|
  unsigned per_word = 0;     // hashes per packed unit
  unsigned unit_bits = 0;    // width of a packed unit
  CostModel mode = CostModel::circuit;
  bool memoized = false;     // word-RAM table lookups for comparisons
  std::optional<double> cutoff_factor;
  bool keep_masks = true;
  unsigned effective_word_len = 0;  // ell, or the clamped ell' in word mode
};

/**
 * Defaults for word length ell and n values. Circuit RAM: m = 3 ceil(log ell),
 * |D| = round(log ell). Word RAM: the same formulas at a reduced length
 * ell' ~ 0.1 n, clamped so a comparison table fits the memo cap.
 */
BitPackConfig bitpack_config(unsigned word_len, std::size_t n,
                             CostModel mode = CostModel::circuit);

enum class Step { advance_a, retreat_b };

/** a_block_max + b_block_min < t moves A forward, otherwise B back. */
Step bit_packing_advance(const Int& a_block_max, const Int& b_block_min,
                         const Int& t);

/**
 * The packed scan over all t' in t - W(D). Returns the combined witness
 * mask. `cost_limit` halts the search once the ledger exceeds it.
 */
std::optional<Mask> bitpack_search(const SumList& LA, const SumList& LB,
                                   const SumList& WD, const Int& t,
                                   const BitPackConfig& cfg, SolveContext& ctx,
                                   std::optional<std::uint64_t> cost_limit =
                                       std::nullopt);

Verdict bit_packing(const Instance& inst, const BitPackConfig& cfg,
                    SolveContext& ctx);
Verdict bit_packing(const Instance& inst, SolveContext& ctx);

}  // namespace ssum
