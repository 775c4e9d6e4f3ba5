#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ssum/core.hpp"
#include "ssum/wordram.hpp"

namespace ssum {

/** A value together with its position in the instance. */
struct Item {
  Int value;
  unsigned index = 0;
};

std::vector<Item> items_of(const Instance& inst,
                           const std::vector<unsigned>& indices);

/**
 * Strictly increasing distinct subset sums. masks[i] is one generating
 * subset of sums[i] (instance-index bits) when masks are kept.
 */
struct SumList {
  std::vector<Int> sums;
  std::vector<Mask> masks;
  std::size_t source_size = 0;

  std::size_t size() const { return sums.size(); }
  bool has_masks() const { return masks.size() == sums.size(); }
};

inline constexpr unsigned kEnumerationCap = 30;

SumList sorted_sum_enumeration(std::span<const Item> items,
                               Machine* machine = nullptr,
                               unsigned cap = kEnumerationCap);
/** Plain multiset form; mask bit i refers to Y[i]. */
SumList sorted_sum_enumeration(const std::vector<Int>& Y);

/** The sumset base + W(items), built by continuing the enumeration. */
SumList extend_enumeration(SumList base, std::span<const Item> items,
                           Machine* machine = nullptr,
                           unsigned cap = kEnumerationCap);

/** Distinct sums of sub-multisets with at most max_size elements. */
SumList restricted_enumeration(std::span<const Item> items, unsigned max_size,
                               Machine* machine = nullptr);
SumList restricted_enumeration(const std::vector<Int>& Y, unsigned max_size);

std::uint64_t mod_small(const Int& v, std::uint64_t p);

/** Buckets of a sum list by residue mod p, each bucket in list order. */
class ResidueSplit {
 public:
  ResidueSplit(std::shared_ptr<const SumList> source, std::uint64_t p,
               Machine* machine = nullptr);

  std::uint64_t p() const { return p_; }
  const SumList& source() const { return *source_; }
  std::span<const std::uint32_t> bucket(std::uint64_t r) const {
    return {order_.data() + offsets_[r], order_.data() + offsets_[r + 1]};
  }
  std::uint64_t residue_of(std::size_t i) const { return residues_[i]; }
  SumList sublist(std::uint64_t r) const;

 private:
  std::shared_ptr<const SumList> source_;
  std::uint64_t p_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint64_t> residues_;
};

ResidueSplit residue_split(const SumList& L, std::uint64_t p,
                           Machine* machine = nullptr);

/** A shifted sum with a bitmap over an enumerated quarterset collection. */
struct CollectionEntry {
  Int sum;
  std::uint64_t collection = 0;
};
using CollectionList = std::vector<CollectionEntry>;

/**
 * Stable k-way merge by sum. With compress, equal sums collapse into one
 * entry whose collection is the union.
 */
CollectionList merge_sorted(const std::vector<CollectionList>& lists,
                            bool compress, Machine* machine = nullptr);

}  // namespace ssum
