#include "moddiv/divisor_systems.hpp"

#include <algorithm>
#include <cctype>

#include "moddiv/error.hpp"

namespace moddiv {

namespace {

using u64 = std::uint64_t;
using SmallFactors = std::vector<std::pair<u64, unsigned>>;

SmallFactors small_factors(u64 n) {
  const Factorization f = factorize_u64(n);
  SmallFactors out;
  for (const auto& pp : f.pairs()) out.emplace_back(to_u64(pp.prime), pp.exponent);
  return out;
}

SmallFactors small_factors(const Factorization& f) {
  if (!f.value_u64()) throw CapacityError("divisor sets are limited to n < 2^64");
  SmallFactors out;
  for (const auto& pp : f.pairs()) out.emplace_back(to_u64(pp.prime), pp.exponent);
  return out;
}

u64 ipow(u64 p, unsigned e) {
  u64 r = 1;
  while (e--) r *= p;
  return r;
}

// Cartesian product of per-prime exponent choices, sorted.
std::vector<u64> expand(const SmallFactors& f,
                        const std::vector<std::vector<unsigned>>& allowed) {
  std::size_t size = 1;
  for (const auto& a : allowed) {
    if (a.empty()) return {};
    if (size > kMaxDivisorSetSize / a.size()) {
      throw CapacityError("divisor set too large to materialise");
    }
    size *= a.size();
  }
  std::vector<u64> out{1};
  out.reserve(size);
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::vector<u64> next;
    next.reserve(out.size() * allowed[i].size());
    for (unsigned c : allowed[i]) {
      const u64 pc = ipow(f[i].first, c);
      for (u64 m : out) next.push_back(m * pc);
    }
    out = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<u64> ordinary_divisors(const SmallFactors& f) {
  std::vector<std::vector<unsigned>> allowed;
  for (auto [p, a] : f) {
    std::vector<unsigned> cs;
    for (unsigned c = 0; c <= a; ++c) cs.push_back(c);
    allowed.push_back(std::move(cs));
  }
  return expand(f, allowed);
}

std::vector<u64> relation_set(const SmallFactors& f, DivisorRelation rel) {
  using Kind = DivisorRelation::Kind;
  std::vector<std::vector<unsigned>> allowed;
  for (auto [p, a] : f) {
    std::vector<unsigned> cs;
    switch (rel.kind) {
      case Kind::infinitary:
        for (unsigned c = 0; c <= a; ++c) {
          if (bits_subset(c, a)) cs.push_back(c);
        }
        break;
      case Kind::exponential:
        for (unsigned c = 1; c <= a; ++c) {
          if (a % c == 0) cs.push_back(c);
        }
        break;
      case Kind::e_infinitary:
        for (u64 c : infinitary_divisors(a)) cs.push_back(static_cast<unsigned>(c));
        break;
      default:
        for (unsigned c = 0; c <= a; ++c) cs.push_back(c);
        break;
    }
    allowed.push_back(std::move(cs));
  }
  return expand(f, allowed);
}

u64 value_of(const SmallFactors& f) {
  u64 v = 1;
  for (auto [p, a] : f) v *= ipow(p, a);
  return v;
}

std::vector<u64> divisor_set_impl(const SmallFactors& f, DivisorRelation rel) {
  if (rel.kind == DivisorRelation::Kind::k_ary) {
    if (rel.level > kMaxKaryLevel) throw UsageError("k-ary level must be <= 64");
    KaryDivisors cache;
    return cache.of(value_of(f), rel.level);
  }
  return relation_set(f, rel);
}

}  // namespace

DivisorRelation DivisorRelation::parse(const std::string& raw) {
  std::string name;
  for (char ch : raw) name.push_back(ch == '_' ? '-' : static_cast<char>(std::tolower(ch)));
  if (name == "ordinary") return ordinary();
  if (name == "unitary") return unitary();
  if (name == "bi-unitary") return bi_unitary();
  if (name == "tri-unitary") return k_ary(3);
  if (name == "infinitary") return infinitary();
  if (name == "exponential") return exponential();
  if (name == "e-infinitary") return e_infinitary();
  const std::string prefix = "k-ary:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string digits = name.substr(prefix.size());
    if (!digits.empty() && digits.size() <= 3 &&
        std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(c); })) {
      const unsigned level = static_cast<unsigned>(std::stoul(digits));
      if (level <= kMaxKaryLevel) return k_ary(level);
    }
  }
  throw UsageError("unknown divisor relation: " + raw);
}

std::string DivisorRelation::name() const {
  switch (kind) {
    case Kind::ordinary:
      return "ordinary";
    case Kind::k_ary:
      return "k-ary:" + std::to_string(level);
    case Kind::infinitary:
      return "infinitary";
    case Kind::exponential:
      return "exponential";
    case Kind::e_infinitary:
      return "e-infinitary";
  }
  return "?";
}

std::vector<std::uint64_t> divisor_set(std::uint64_t n, DivisorRelation rel) {
  if (n == 0) throw UsageError("divisor_set: n must be >= 1");
  return divisor_set_impl(small_factors(n), rel);
}

std::vector<std::uint64_t> divisor_set(const Factorization& n, DivisorRelation rel) {
  return divisor_set_impl(small_factors(n), rel);
}

bool divides(DivisorRelation rel, std::uint64_t m, std::uint64_t n) {
  if (m == 0 || n == 0) throw UsageError("divides: arguments must be >= 1");
  if (n % m != 0) return false;
  using Kind = DivisorRelation::Kind;
  const SmallFactors fn = small_factors(n);
  switch (rel.kind) {
    case Kind::ordinary:
      return true;
    case Kind::k_ary: {
      const auto set = divisor_set_impl(fn, rel);
      return std::binary_search(set.begin(), set.end(), m);
    }
    default:
      break;
  }
  u64 rest = m;
  for (auto [p, a] : fn) {
    unsigned c = 0;
    while (rest % p == 0) {
      rest /= p;
      ++c;
    }
    switch (rel.kind) {
      case Kind::infinitary:
        if (!bits_subset(c, a)) return false;
        break;
      case Kind::exponential:
        if (c == 0 || a % c != 0) return false;
        break;
      case Kind::e_infinitary:
        if (c == 0 || !infinitary_divides(c, a)) return false;
        break;
      default:
        break;
    }
  }
  return rest == 1;
}

bool infinitary_divides(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) throw UsageError("infinitary_divides: arguments must be >= 1");
  if (b % a != 0) return false;
  for (auto [q, e] : small_factors(b)) {
    unsigned c = 0;
    while (a % q == 0) {
      a /= q;
      ++c;
    }
    if (!bits_subset(c, e)) return false;
  }
  return a == 1;
}

std::vector<std::uint64_t> infinitary_divisors(std::uint64_t a) {
  if (a == 0) throw UsageError("infinitary_divisors: argument must be >= 1");
  return relation_set(small_factors(a), DivisorRelation::infinitary());
}

std::uint64_t tau_multi(std::span<const unsigned> exponents, std::uint64_t n) {
  if (exponents.empty()) throw UsageError("tau_multi: need at least one exponent");
  for (unsigned a : exponents) {
    if (a == 0) throw UsageError("tau_multi: exponents must be >= 1");
  }
  if (n == 0) throw UsageError("tau_multi: n must be >= 1");
  std::uint64_t total = 1;
  for (auto [p, e] : small_factors(n)) {
    // ways[s]: ordered choices of the processed variables with weighted sum s.
    std::vector<std::uint64_t> ways(e + 1, 0);
    ways[0] = 1;
    for (unsigned a : exponents) {
      std::vector<std::uint64_t> next(e + 1, 0);
      for (unsigned s = 0; s <= e; ++s) {
        if (!ways[s]) continue;
        for (unsigned t = s; t <= e; t += a) next[t] += ways[s];
      }
      ways = std::move(next);
    }
    total *= ways[e];
  }
  return total;
}

const std::vector<std::uint64_t>& KaryDivisors::of(std::uint64_t n, unsigned level) {
  const auto key = std::make_pair(n, level);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  std::vector<std::uint64_t> out;
  const auto all = ordinary_divisors(small_factors(n));
  if (level == 0) {
    out = all;
  } else {
    for (u64 m : all) {
      if (greatest_common(m, n / m, level - 1) == 1) out.push_back(m);
    }
  }
  return cache_.emplace(key, std::move(out)).first->second;
}

std::uint64_t KaryDivisors::greatest_common(std::uint64_t a, std::uint64_t b, unsigned level) {
  const std::vector<u64>& da = of(a, level);
  const std::vector<u64>& db = of(b, level);
  auto ia = da.rbegin();
  auto ib = db.rbegin();
  while (ia != da.rend() && ib != db.rend()) {
    if (*ia == *ib) return *ia;
    if (*ia > *ib) {
      ++ia;
    } else {
      ++ib;
    }
  }
  return 1;
}

}  // namespace moddiv
