#include "ssum/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ssum/random.hpp"

namespace ssum {

unsigned bit_length(const Int& v) {
  if (v <= 0) return 0;
  return static_cast<unsigned>(boost::multiprecision::msb(v)) + 1;
}

unsigned default_word_len(std::size_t n, const Int& t) {
  std::size_t need = std::max<std::size_t>({n, bit_length(t), 64});
  return static_cast<unsigned>(std::bit_ceil(need));
}

std::uint64_t to_u64(const Int& v) {
  if (v < 0 || bit_length(v) > 64) throw Error("value does not fit in 64 bits");
  return static_cast<std::uint64_t>(v);
}

std::string to_string(const Int& v) { return v.str(); }

std::string mask_hex(Mask m) {
  std::ostringstream os;
  os << std::hex << m;
  return os.str();
}

Int Instance::total() const {
  Int s = 0;
  for (const Int& v : values) s += v;
  return s;
}

Int Instance::sum_of(Mask m) const {
  Int s = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if ((m >> i) & 1) s += values[i];
  }
  return s;
}

Instance Instance::with_word_len(unsigned ell) const {
  return make_instance(values, target, ell);
}

Instance make_instance(std::vector<Int> values, Int target, unsigned word_len) {
  if (values.empty()) throw Error("instance needs at least one value");
  if (values.size() > kMaxItems) {
    throw SizeError("instance has " + std::to_string(values.size()) +
                    " values; masks support at most 64");
  }
  if (target < 1) throw Error("target must be positive");
  for (const Int& v : values) {
    if (v < 1) throw Error("values must be positive");
    if (v > target) throw Error("value " + v.str() + " exceeds target");
  }
  if (word_len == 0) word_len = default_word_len(values.size(), target);
  if (word_len < values.size() || word_len < bit_length(target)) {
    throw Error("word length " + std::to_string(word_len) +
                " below max(n, bitlen(t))");
  }
  Instance inst;
  inst.values = std::move(values);
  inst.target = std::move(target);
  inst.word_len = word_len;
  return inst;
}

bool witness_valid(const Instance& inst, Mask m) {
  if (inst.size() < 64 && (m >> inst.size()) != 0) return false;
  return inst.sum_of(m) == inst.target;
}

void check_verdict(const Instance& inst, const Verdict& v) {
  if (!v.answer) return;
  if (!v.witness || !witness_valid(inst, v.witness->subset_mask)) {
    throw Error("yes verdict without a valid witness");
  }
}

Verdict yes_verdict(Mask m, std::uint64_t seed) {
  Verdict v;
  v.answer = true;
  v.witness = Solution{m};
  v.rng_seed = seed;
  return v;
}

Verdict no_verdict(std::uint64_t seed) {
  Verdict v;
  v.rng_seed = seed;
  return v;
}

namespace {

// Gray-code walk: one add or subtract per subset.
template <class T>
std::optional<Mask> gray_search(const std::vector<T>& vals, const T& t) {
  const std::size_t n = vals.size();
  T sum = 0;
  Mask cur = 0;
  if (sum == t) return cur;
  for (std::uint64_t k = 1; k < (std::uint64_t{1} << n); ++k) {
    unsigned bit = static_cast<unsigned>(std::countr_zero(k));
    cur ^= Mask{1} << bit;
    if ((cur >> bit) & 1) {
      sum += vals[bit];
    } else {
      sum -= vals[bit];
    }
    if (sum == t) return cur;
  }
  return std::nullopt;
}

}  // namespace

Verdict brute_force(const Instance& inst, unsigned max_n) {
  if (inst.size() > max_n) {
    throw SizeError("brute_force: n=" + std::to_string(inst.size()) +
                    " exceeds cap " + std::to_string(max_n));
  }
  std::optional<Mask> hit;
  if (bit_length(inst.total()) < 63) {
    std::vector<std::uint64_t> v;
    for (const Int& x : inst.values) v.push_back(static_cast<std::uint64_t>(x));
    hit = gray_search(v, static_cast<std::uint64_t>(inst.target));
  } else {
    hit = gray_search(inst.values, inst.target);
  }
  return hit ? yes_verdict(*hit) : no_verdict();
}

Verdict dp_bellman(const Instance& inst, std::uint64_t max_target) {
  if (inst.target > max_target) {
    throw SizeError("dp_bellman: target " + inst.target.str() +
                    " exceeds cap " + std::to_string(max_target));
  }
  const std::uint64_t t = static_cast<std::uint64_t>(inst.target);
  // via[s] = 1 + index of the value that first reached s.
  std::vector<std::uint8_t> via(t + 1, 0);
  std::vector<bool> reach(t + 1, false);
  reach[0] = true;
  for (std::size_t i = 0; i < inst.size() && !reach[t]; ++i) {
    const std::uint64_t x = static_cast<std::uint64_t>(inst.values[i]);
    for (std::uint64_t s = t; s >= x; --s) {
      if (!reach[s] && reach[s - x]) {
        reach[s] = true;
        via[s] = static_cast<std::uint8_t>(i + 1);
      }
      if (s == x) break;
    }
  }
  if (!reach[t]) return no_verdict();
  Mask m = 0;
  std::uint64_t s = t;
  while (s > 0) {
    const std::size_t i = via[s] - 1u;
    m |= Mask{1} << i;
    s -= static_cast<std::uint64_t>(inst.values[i]);
  }
  return yes_verdict(m);
}

bool dp_preferred(const Instance& inst, double exponent) {
  const long double lg = std::log2(inst.target.convert_to<long double>());
  return lg <= static_cast<long double>(exponent) * inst.size();
}

Verdict decide_to_search(const Decider& decider, const Instance& inst,
                         bool randomized, std::uint64_t seed) {
  std::uint64_t calls = 0;
  std::optional<Mask> direct;
  auto ask = [&](const Instance& sub, unsigned reps, std::uint64_t stage) {
    for (unsigned r = 0; r < reps; ++r) {
      Verdict v = decider(sub, mix_seed({seed, stage, r}));
      ++calls;
      if (v.answer) {
        if (stage == 0 && v.witness) direct = v.witness->subset_mask;
        return true;
      }
    }
    return false;
  };

  if (!ask(inst, 1, 0)) {
    Verdict v = no_verdict(seed);
    v.trials_used = calls;
    return v;
  }

  const std::size_t n = inst.size();
  Int remaining = inst.target;
  Mask chosen = 0;
  for (std::size_t i = 0; i < n && remaining > 0; ++i) {
    const Int& x = inst.values[i];
    if (x > remaining) continue;
    std::vector<Int> later;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (inst.values[j] <= remaining) later.push_back(inst.values[j]);
    }
    bool without = false;
    if (!later.empty()) {
      Instance sub = make_instance(std::move(later), remaining, inst.word_len);
      without = ask(sub, randomized ? static_cast<unsigned>(i + 1) : 1, i + 1);
    }
    if (!without) {
      chosen |= Mask{1} << i;
      remaining -= x;
    }
  }

  Verdict v;
  if (remaining == 0 && witness_valid(inst, chosen)) {
    v = yes_verdict(chosen, seed);
  } else if (direct && witness_valid(inst, *direct)) {
    // A randomized stage missed; the first call still produced a witness.
    v = yes_verdict(*direct, seed);
  } else {
    v = no_verdict(seed);
  }
  v.trials_used = calls;
  return v;
}

std::string format_instance(const Instance& inst, std::optional<Mask> planted) {
  std::string out = std::to_string(inst.size()) + " " + inst.target.str() + "\n";
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (i) out += ' ';
    out += inst.values[i].str();
  }
  out += '\n';
  if (planted) out += "# mask=" + mask_hex(*planted) + "\n";
  return out;
}

ParsedInstance parse_instance(std::string_view text, unsigned word_len) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto parse_int = [](const std::string& tok) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
      throw Error("malformed integer '" + tok + "'");
    }
    return Int(tok);
  };
  if (!std::getline(in, line)) throw Error("instance file is empty");
  std::istringstream head(line);
  std::string ntok, ttok;
  if (!(head >> ntok >> ttok)) throw Error("first line must be 'n t'");
  const std::size_t n = static_cast<std::size_t>(to_u64(parse_int(ntok)));
  Int t = parse_int(ttok);
  if (!std::getline(in, line)) throw Error("missing value line");
  std::istringstream body(line);
  std::vector<Int> values;
  std::string tok;
  while (body >> tok) values.push_back(parse_int(tok));
  if (values.size() != n) {
    throw Error("expected " + std::to_string(n) + " values, found " +
                std::to_string(values.size()));
  }
  ParsedInstance out{make_instance(std::move(values), std::move(t), word_len),
                     std::nullopt};
  while (std::getline(in, line)) {
    const std::string key = "# mask=";
    if (line.rfind(key, 0) == 0) {
      std::string hex = line.substr(key.size());
      if (hex.rfind("0x", 0) == 0) hex = hex.substr(2);
      out.planted = std::stoull(hex, nullptr, 16);
    }
  }
  return out;
}

ParsedInstance read_instance_file(const std::string& path, unsigned word_len) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_instance(ss.str(), word_len);
}

void write_instance_file(const std::string& path, const Instance& inst,
                         std::optional<Mask> planted) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << format_instance(inst, planted);
}

}  // namespace ssum
