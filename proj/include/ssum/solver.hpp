#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "ssum/core.hpp"
#include "ssum/random.hpp"
#include "ssum/wordram.hpp"

namespace ssum {

/** Diagnostics a solver run fills in for the report. */
struct SolveStats {
  std::uint64_t comparisons = 0;  // packed word-pair comparisons
  std::uint64_t descents = 0;     // comparisons that fired
  std::uint64_t collisions = 0;   // fired without a solution in the block
  std::string path;               // what produced the verdict
  std::string case_label;         // I, II, bitpack, fallback
  std::uint64_t p = 0;
  std::uint64_t s_used = 0;
  std::uint64_t couples_created = 0;
  std::optional<bool> good_residue_hit;
  bool budget_exhausted = false;
  /** The verdict is definitive (no one-sided error). */
  bool exact = false;
  std::map<std::string, std::string> notes;
};

/** Per-run state: cost ledger, random source, diagnostics. */
struct SolveContext {
  SolveContext(unsigned word_len, CostModel model, std::uint64_t seed,
               bool accounting = true)
      : machine(word_len, model, accounting), rng(seed), seed(seed) {}

  Machine machine;
  Rng rng;
  std::uint64_t seed;
  SolveStats stats;
  /** Known planted witness, used only for diagnostics. */
  std::optional<Mask> planted;
};

}  // namespace ssum
