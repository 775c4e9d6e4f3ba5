#include <algorithm>
#include <cmath>

#include "ssum/representation.hpp"

namespace ssum {

namespace {

std::vector<unsigned> complement_of(std::size_t n,
                                    const std::vector<unsigned>& Y) {
  std::vector<char> in(n, 0);
  for (unsigned i : Y) {
    if (i >= n || in[i]) throw Error("subset indices must be distinct and in range");
    in[i] = 1;
  }
  std::vector<unsigned> rest;
  for (unsigned i = 0; i < n; ++i) {
    if (!in[i]) rest.push_back(i);
  }
  return rest;
}

Mask full_mask(std::size_t n) {
  return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1;
}

struct Layout {
  std::vector<unsigned> a_extra, b_idx, d_idx;
};

// A = Y plus the first entries of the rest, D from the back of the rest.
Layout layout(const std::vector<unsigned>& rest, std::size_t y,
              std::size_t a_size, std::size_t d_size) {
  Layout L;
  std::vector<unsigned> r = rest;
  if (d_size) {
    L.d_idx.assign(r.end() - static_cast<long>(d_size), r.end());
    r.resize(r.size() - d_size);
  }
  const std::size_t extra = std::min(r.size(), a_size > y ? a_size - y : 0);
  L.a_extra.assign(r.begin(), r.begin() + static_cast<long>(extra));
  L.b_idx.assign(r.begin() + static_cast<long>(extra), r.end());
  return L;
}

}  // namespace

unsigned unbalanced_max_size(std::size_t y_size, real eps) {
  const real x = (1 - eps) * static_cast<real>(y_size) / 2;
  const long c = static_cast<long>(std::ceil(x - 1e-12L)) - 1;
  return static_cast<unsigned>(std::max<long>(0, c));
}

bool unbalanced_is_exhaustive(std::size_t y_size, real eps) {
  return y_size <= 2 * static_cast<std::size_t>(unbalanced_max_size(y_size, eps)) + 1;
}

std::optional<Verdict> preprocess_unbalanced(const Instance& inst,
                                             const std::vector<unsigned>& Y,
                                             real eps, Engine engine,
                                             SolveContext& ctx) {
  const std::size_t n = inst.size(), y = Y.size();
  if (y == 0 || eps <= 0 || eps >= 1) return std::nullopt;
  const std::vector<unsigned> rest = complement_of(n, Y);
  const unsigned max_size = unbalanced_max_size(y, eps);

  BitPackConfig cfg;
  std::size_t d = 0;
  if (engine == Engine::bitpack) {
    cfg = bitpack_config(inst.word_len, n, ctx.machine.model());
    d = std::min<std::size_t>(cfg.d_size, rest.size() > 0 ? rest.size() - 1 : 0);
    if (d == 0) engine = Engine::mitm;
  }
  const std::size_t n_eff = n - d;
  const real gain = (1 - entropy((1 - eps) / 2)) * static_cast<real>(y);
  std::size_t a_size = static_cast<std::size_t>(
      std::ceil((static_cast<real>(n_eff) + gain) / 2 - 1e-12L));
  a_size = std::clamp(a_size, y, n_eff);
  const Layout L = layout(rest, y, a_size, d);

  Machine* M = &ctx.machine;
  const SumList LY = restricted_enumeration(items_of(inst, Y), max_size, M);
  const SumList LA = extend_enumeration(LY, items_of(inst, L.a_extra), M);
  const SumList LB = sorted_sum_enumeration(items_of(inst, L.b_idx), M);
  SumList WD;
  if (engine == Engine::bitpack) {
    WD = sorted_sum_enumeration(items_of(inst, L.d_idx), M);
  }

  const Int total = inst.total();
  for (int side = 0; side < 2; ++side) {
    const Int target = side == 0 ? inst.target : total - inst.target;
    if (target < 0) continue;
    std::optional<Mask> hit;
    if (engine == Engine::mitm) {
      if (auto pr = mitm_two_pointer(LA, LB, target, M)) {
        hit = LA.masks[pr->first] | LB.masks[pr->second];
      }
    } else {
      hit = bitpack_search(LA, LB, WD, target, cfg, ctx);
    }
    if (hit) {
      const Mask m = side == 0 ? *hit : full_mask(n) ^ *hit;
      if (!witness_valid(inst, m)) throw Error("unbalanced step built a bad witness");
      ctx.stats.path = "preprocess-unbalanced";
      return yes_verdict(m, ctx.seed);
    }
  }
  return std::nullopt;
}

std::optional<Verdict> preprocess_additive(const Instance& inst,
                                           const std::vector<unsigned>& Y,
                                           real eps, Engine engine,
                                           SolveContext& ctx) {
  const std::size_t n = inst.size(), y = Y.size();
  const real lg = std::log2(static_cast<real>(inst.word_len));
  if (y == 0 || eps <= 0) return std::nullopt;
  const std::vector<unsigned> rest = complement_of(n, Y);

  BitPackConfig cfg;
  std::size_t d = 0;
  if (engine == Engine::bitpack) {
    cfg = bitpack_config(inst.word_len, n, ctx.machine.model());
    d = cfg.d_size;
    if (2 * y + d > n || d >= rest.size()) return std::nullopt;
  } else if (2 * y > n) {
    return std::nullopt;
  }

  Machine* M = &ctx.machine;
  const SumList WY = sorted_sum_enumeration(items_of(inst, Y), M);
  const real limit = std::exp2(static_cast<real>(y)) * std::pow(
      static_cast<real>(inst.word_len), -eps);
  if (static_cast<real>(WY.size()) > limit) return std::nullopt;

  const real a_real = engine == Engine::mitm
                          ? (static_cast<real>(n) + eps * lg) / 2
                          : (static_cast<real>(n) - (1 - eps) * lg) / 2;
  std::size_t a_size =
      static_cast<std::size_t>(std::max<real>(0, std::ceil(a_real - 1e-12L)));
  a_size = std::clamp(a_size, y, n - d);
  const Layout L = layout(rest, y, a_size, d);
  const SumList LA = extend_enumeration(WY, items_of(inst, L.a_extra), M);
  const SumList LB = sorted_sum_enumeration(items_of(inst, L.b_idx), M);

  std::optional<Mask> hit;
  if (engine == Engine::mitm) {
    if (auto pr = mitm_two_pointer(LA, LB, inst.target, M)) {
      hit = LA.masks[pr->first] | LB.masks[pr->second];
    }
  } else {
    const SumList WD = sorted_sum_enumeration(items_of(inst, L.d_idx), M);
    hit = bitpack_search(LA, LB, WD, inst.target, cfg, ctx);
  }
  ctx.stats.path = "preprocess-additive";
  ctx.stats.exact = true;
  if (hit) return yes_verdict(*hit, ctx.seed);
  return no_verdict(ctx.seed);
}

}  // namespace ssum
