#include "ssum/enumeration.hpp"

#include <algorithm>
#include <bit>
#include <queue>

namespace ssum {

std::vector<Item> items_of(const Instance& inst,
                           const std::vector<unsigned>& indices) {
  std::vector<Item> out;
  out.reserve(indices.size());
  for (unsigned i : indices) out.push_back(Item{inst.values.at(i), i});
  return out;
}

namespace {

// One step of the enumeration: merge L with L + y, dropping duplicates.
void add_item(SumList& L, const Item& y, Machine* machine) {
  const std::size_t n = L.size();
  const bool masks = L.has_masks();
  const Mask bit = Mask{1} << y.index;
  SumList out;
  out.sums.reserve(2 * n);
  if (masks) out.masks.reserve(2 * n);
  std::size_t i = 0, j = 0;
  Int shifted = n ? L.sums[0] + y.value : Int(0);
  while (i < n || j < n) {
    if (j == n || (i < n && L.sums[i] <= shifted)) {
      if (j < n && L.sums[i] == shifted) {
        ++j;
        if (j < n) shifted = L.sums[j] + y.value;
      }
      out.sums.push_back(L.sums[i]);
      if (masks) out.masks.push_back(L.masks[i]);
      ++i;
    } else {
      out.sums.push_back(shifted);
      if (masks) out.masks.push_back(L.masks[j] | bit);
      ++j;
      if (j < n) shifted = L.sums[j] + y.value;
    }
  }
  if (machine) machine->unit(2 * n + out.size());
  out.source_size = L.source_size + 1;
  L = std::move(out);
}

SumList singleton_zero() {
  SumList L;
  L.sums.push_back(0);
  L.masks.push_back(0);
  return L;
}

// Distinct-sum merge of two sorted lists, first list wins ties.
SumList merge_distinct(const SumList& a, const SumList& b) {
  SumList out;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a.sums[i] <= b.sums[j])) {
      if (j < b.size() && a.sums[i] == b.sums[j]) ++j;
      out.sums.push_back(a.sums[i]);
      out.masks.push_back(a.masks[i]);
      ++i;
    } else {
      out.sums.push_back(b.sums[j]);
      out.masks.push_back(b.masks[j]);
      ++j;
    }
  }
  return out;
}

std::vector<Item> as_items(const std::vector<Int>& Y) {
  std::vector<Item> items;
  for (unsigned i = 0; i < Y.size(); ++i) items.push_back(Item{Y[i], i});
  return items;
}

}  // namespace

SumList sorted_sum_enumeration(std::span<const Item> items, Machine* machine,
                               unsigned cap) {
  return extend_enumeration(singleton_zero(), items, machine, cap);
}

SumList sorted_sum_enumeration(const std::vector<Int>& Y) {
  const auto items = as_items(Y);
  return sorted_sum_enumeration(items);
}

SumList extend_enumeration(SumList base, std::span<const Item> items,
                           Machine* machine, unsigned cap) {
  const std::size_t free_bits =
      items.size() + (base.size() > 1 ? std::bit_width(base.size() - 1) : 0);
  if (free_bits > cap) {
    throw SizeError("enumeration of " + std::to_string(free_bits) +
                    " elements exceeds cap " + std::to_string(cap));
  }
  for (const Item& y : items) add_item(base, y, machine);
  return base;
}

SumList restricted_enumeration(std::span<const Item> items, unsigned max_size,
                               Machine* machine) {
  if (max_size > items.size()) max_size = static_cast<unsigned>(items.size());
  // by_size[c]: distinct sums of exactly c chosen items.
  std::vector<SumList> by_size(max_size + 1);
  by_size[0] = singleton_zero();
  for (std::size_t k = 0; k < items.size(); ++k) {
    const Item& y = items[k];
    const Mask bit = Mask{1} << y.index;
    const unsigned top = std::min<unsigned>(max_size, static_cast<unsigned>(k + 1));
    for (unsigned c = top; c >= 1; --c) {
      SumList shifted;
      for (std::size_t i = 0; i < by_size[c - 1].size(); ++i) {
        shifted.sums.push_back(by_size[c - 1].sums[i] + y.value);
        shifted.masks.push_back(by_size[c - 1].masks[i] | bit);
      }
      if (machine) machine->unit(shifted.size() + by_size[c].size());
      by_size[c] = merge_distinct(by_size[c], shifted);
    }
  }
  SumList out = by_size[0];
  for (unsigned c = 1; c <= max_size; ++c) {
    if (machine) machine->unit(out.size() + by_size[c].size());
    out = merge_distinct(out, by_size[c]);
  }
  out.source_size = items.size();
  return out;
}

SumList restricted_enumeration(const std::vector<Int>& Y, unsigned max_size) {
  const auto items = as_items(Y);
  return restricted_enumeration(items, max_size);
}

std::uint64_t mod_small(const Int& v, std::uint64_t p) {
  if (p == 0) throw Error("modulus must be positive");
  if (v < 0) throw Error("mod_small needs a non-negative value");
  const auto& be = v.backend();
  unsigned __int128 r = 0;
  for (std::size_t i = be.size(); i-- > 0;) {
    r = ((r << 64) | be.limbs()[i]) % p;
  }
  return static_cast<std::uint64_t>(r);
}

ResidueSplit::ResidueSplit(std::shared_ptr<const SumList> source,
                           std::uint64_t p, Machine* machine)
    : source_(std::move(source)), p_(p) {
  if (p == 0) throw Error("residue_split needs p >= 1");
  const SumList& L = *source_;
  residues_.resize(L.size());
  offsets_.assign(p + 1, 0);
  for (std::size_t i = 0; i < L.size(); ++i) {
    residues_[i] = mod_small(L.sums[i], p);
    ++offsets_[residues_[i] + 1];
  }
  for (std::uint64_t r = 0; r < p; ++r) offsets_[r + 1] += offsets_[r];
  order_.resize(L.size());
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < L.size(); ++i) {
    order_[fill[residues_[i]]++] = static_cast<std::uint32_t>(i);
  }
  // A residue computation is a modular division.
  if (machine) {
    machine->mul(L.size());
    machine->unit(L.size());
  }
}

SumList ResidueSplit::sublist(std::uint64_t r) const {
  SumList out;
  const SumList& L = *source_;
  for (std::uint32_t i : bucket(r)) {
    out.sums.push_back(L.sums[i]);
    if (L.has_masks()) out.masks.push_back(L.masks[i]);
  }
  out.source_size = L.source_size;
  return out;
}

ResidueSplit residue_split(const SumList& L, std::uint64_t p, Machine* machine) {
  return ResidueSplit(std::make_shared<const SumList>(L), p, machine);
}

CollectionList merge_sorted(const std::vector<CollectionList>& lists,
                            bool compress, Machine* machine) {
  struct Head {
    const Int* sum;
    std::size_t list, pos;
  };
  auto later = [](const Head& a, const Head& b) {
    if (*a.sum != *b.sum) return *a.sum > *b.sum;
    return a.list > b.list;
  };
  std::priority_queue<Head, std::vector<Head>, decltype(later)> heap(later);
  std::size_t total = 0;
  for (std::size_t k = 0; k < lists.size(); ++k) {
    total += lists[k].size();
    if (!lists[k].empty()) heap.push(Head{&lists[k][0].sum, k, 0});
  }
  CollectionList out;
  out.reserve(total);
  while (!heap.empty()) {
    Head h = heap.top();
    heap.pop();
    const CollectionEntry& e = lists[h.list][h.pos];
    if (compress && !out.empty() && out.back().sum == e.sum) {
      out.back().collection |= e.collection;
    } else {
      out.push_back(e);
    }
    if (h.pos + 1 < lists[h.list].size()) {
      heap.push(Head{&lists[h.list][h.pos + 1].sum, h.list, h.pos + 1});
    }
  }
  if (machine) {
    const std::uint64_t lg = lists.size() > 1 ? std::bit_width(lists.size() - 1) : 1;
    machine->unit(total * lg);
  }
  return out;
}

}  // namespace ssum
