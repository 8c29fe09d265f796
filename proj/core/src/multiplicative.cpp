#include "moddiv/multiplicative.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "moddiv/divisor_systems.hpp"
#include "moddiv/error.hpp"

namespace moddiv {

namespace {

using u64 = std::uint64_t;
using i64 = std::int64_t;

[[noreturn]] void overflow(const std::string& id) {
  throw CapacityError(id + ": value exceeds 64-bit range; use the arbitrary-precision path");
}

i64 checked_mul(i64 a, i64 b, const std::string& id) {
  i64 r;
  if (__builtin_mul_overflow(a, b, &r)) overflow(id);
  return r;
}

i64 checked_add(i64 a, i64 b, const std::string& id) {
  i64 r;
  if (__builtin_add_overflow(a, b, &r)) overflow(id);
  return r;
}

i64 checked_pow(u64 p, unsigned e, const std::string& id) {
  if (p > static_cast<u64>(INT64_MAX)) overflow(id);
  i64 r = 1;
  for (unsigned i = 0; i < e; ++i) r = checked_mul(r, static_cast<i64>(p), id);
  return r;
}

BigInt big_pow(const BigInt& p, unsigned e) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), p.get_mpz_t(), e);
  return r;
}

BigInt eval_poly(const PolyTerms& terms, const BigInt& p) {
  BigInt r = 0;
  for (const auto& [d, c] : terms) r += c * big_pow(p, d);
  return r;
}

i64 eval_poly_small(const PolyTerms& terms, u64 p, const std::string& id) {
  i64 r = 0;
  for (const auto& [d, c] : terms) {
    if (!c.fits_slong_p()) overflow(id);
    r = checked_add(r, checked_mul(c.get_si(), checked_pow(p, d, id), id), id);
  }
  return r;
}

PolyTerms normalise(std::map<unsigned, BigInt> acc) {
  PolyTerms out;
  for (auto& [d, c] : acc) {
    if (c != 0) out.emplace_back(d, std::move(c));
  }
  return out;
}

PolyTerms constant(const BigInt& v) {
  if (v == 0) return {};
  return {{0u, v}};
}

// Polynomial-form function: all three rules derive from `poly`.
MultiplicativeFunction from_poly(std::string id, PolyRule poly, GrowthClass growth) {
  const std::string name = id;
  BigRule big = [poly](const BigInt& p, unsigned a) { return eval_poly(poly(a), p); };
  SmallRule small = [poly, name](u64 p, unsigned a) { return eval_poly_small(poly(a), p, name); };
  return MultiplicativeFunction(std::move(id), std::move(big), std::move(small), poly, growth,
                                false);
}

// Prime-independent function given by a small-integer rule on the exponent.
MultiplicativeFunction from_exponent_rule(std::string id, std::function<i64(unsigned)> rule,
                                          GrowthClass growth) {
  BigRule big = [rule](const BigInt&, unsigned a) { return BigInt(static_cast<long>(rule(a))); };
  SmallRule small = [rule](u64, unsigned a) { return rule(a); };
  PolyRule poly = [rule](unsigned a) { return constant(BigInt(static_cast<long>(rule(a)))); };
  return MultiplicativeFunction(std::move(id), std::move(big), std::move(small), std::move(poly),
                                growth, true);
}

std::string canonical_key(std::string_view raw) {
  std::string key;
  for (char ch : raw) key.push_back(ch == '-' ? '_' : static_cast<char>(std::tolower(ch)));
  return key;
}

std::map<std::string, MultiplicativeFunction> build_registry() {
  std::map<std::string, MultiplicativeFunction> reg;
  auto add = [&reg](MultiplicativeFunction f) {
    std::string key = canonical_key(f.id());
    reg.emplace(std::move(key), std::move(f));
  };

  add(from_exponent_rule("one", [](unsigned) { return i64{1}; }, {1, 0, 0}));
  add(from_poly("id", [](unsigned a) { return PolyTerms{{a, BigInt(1)}}; }, {1, 0, 1}));
  add(from_exponent_rule("tau", [](unsigned a) { return i64{a} + 1; }, {2, 1, 0}));
  add(from_poly(
      "sigma",
      [](unsigned a) {
        PolyTerms t;
        for (unsigned d = 0; d <= a; ++d) t.emplace_back(d, BigInt(1));
        return t;
      },
      {2, 1, 1}));
  add(from_exponent_rule("mu", [](unsigned a) { return a == 1 ? i64{-1} : i64{0}; }, {1, 0, 0}));
  add(from_poly(
      "phi", [](unsigned a) { return PolyTerms{{a - 1, BigInt(-1)}, {a, BigInt(1)}}; },
      {2, 0, 1}));

  add(from_exponent_rule("tau_e", [](unsigned a) { return static_cast<i64>(tau_of(a)); },
                         {2, 1, 0}));
  add(from_poly(
      "sigma_e",
      [](unsigned a) {
        PolyTerms t;
        for (u64 d : divisors_of(a)) t.emplace_back(static_cast<unsigned>(d), BigInt(1));
        return t;
      },
      {2, 1, 1}));
  add(from_exponent_rule("mu_e", [](unsigned a) { return static_cast<i64>(mobius_of(a)); },
                         {1, 0, 0}));
  add(from_exponent_rule("E_sigma", [](unsigned a) { return static_cast<i64>(sigma_of(a)); },
                         {1, 2, 0}));
  add(from_poly(
      "frak_f_e",
      [](unsigned a) {
        std::map<unsigned, BigInt> acc;
        for (u64 d : divisors_of(a)) acc[static_cast<unsigned>(d)] += mobius_of(a / d);
        return normalise(std::move(acc));
      },
      {2, 1, 1}));

  add(from_exponent_rule("tau_inf", [](unsigned a) { return i64{1} << binary_ones(a); }, {2, 1, 0}));
  {
    // Closed form: product over the set bits i of a of (1 + p^(2^i)).
    const std::string name = "sigma_inf";
    BigRule big = [](const BigInt& p, unsigned a) {
      BigInt r = 1;
      for (unsigned i = 0; (a >> i) != 0; ++i) {
        if ((a >> i) & 1u) r *= 1 + big_pow(p, 1u << i);
      }
      return r;
    };
    SmallRule small = [name](u64 p, unsigned a) {
      i64 r = 1;
      for (unsigned i = 0; (a >> i) != 0; ++i) {
        if ((a >> i) & 1u) r = checked_mul(r, checked_add(1, checked_pow(p, 1u << i, name), name), name);
      }
      return r;
    };
    PolyRule poly = [](unsigned a) {
      PolyTerms t;
      for (unsigned c = 0; c <= a; ++c) {
        if (bits_subset(c, a)) t.emplace_back(c, BigInt(1));
      }
      return t;
    };
    add(MultiplicativeFunction(name, big, small, poly, GrowthClass{2, 1, 1}, false));
  }
  add(from_exponent_rule("tau_e_inf", [](unsigned a) { return static_cast<i64>(tau_inf_of(a)); },
                         {2, 1, 0}));
  add(from_poly(
      "sigma_e_inf",
      [](unsigned a) {
        PolyTerms t;
        for (u64 c : infinitary_divisors(a)) t.emplace_back(static_cast<unsigned>(c), BigInt(1));
        return t;
      },
      {2, 1, 1}));
  add(from_exponent_rule("E_tau_inf", [](unsigned a) { return static_cast<i64>(tau_inf_of(a)); },
                         {2, 1, 0}));
  return reg;
}

const std::map<std::string, MultiplicativeFunction>& registry() {
  static const std::map<std::string, MultiplicativeFunction> reg = build_registry();
  return reg;
}

}  // namespace

MultiplicativeFunction::MultiplicativeFunction(std::string id, BigRule big, SmallRule small,
                                               std::optional<PolyRule> poly,
                                               std::optional<GrowthClass> growth,
                                               bool prime_independent)
    : id_(std::move(id)),
      big_(std::move(big)),
      small_(std::move(small)),
      poly_(std::move(poly)),
      growth_(growth),
      prime_independent_(prime_independent) {}

BigInt MultiplicativeFunction::at_prime_power(const BigInt& p, unsigned a) const {
  if (a == 0) return 1;
  return big_(p, a);
}

std::int64_t MultiplicativeFunction::at_prime_power_small(std::uint64_t p, unsigned a) const {
  if (a == 0) return 1;
  return small_(p, a);
}

PolyTerms MultiplicativeFunction::poly(unsigned a) const {
  if (!poly_) throw UsageError(id_ + ": no polynomial form registered");
  if (a == 0) return constant(1);
  return (*poly_)(a);
}

BigInt MultiplicativeFunction::operator()(const Factorization& f) const {
  BigInt r = 1;
  for (const auto& pp : f.pairs()) {
    r *= at_prime_power(pp.prime, pp.exponent);
    if (r == 0) break;
  }
  return r;
}

BigInt MultiplicativeFunction::operator()(std::uint64_t n) const {
  if (n == 0) throw UsageError(id_ + ": argument must be >= 1");
  return (*this)(factorize_u64(n));
}

MultiplicativeFunction MultiplicativeFunction::renamed(std::string id) const {
  MultiplicativeFunction copy = *this;
  copy.id_ = std::move(id);
  return copy;
}

const MultiplicativeFunction& function_by_id(std::string_view id) {
  const auto& reg = registry();
  if (auto it = reg.find(canonical_key(id)); it != reg.end()) return it->second;
  throw UsageError("unknown function id: " + std::string(id));
}

std::vector<std::string> registered_function_ids() {
  std::vector<std::string> out;
  for (const auto& [key, f] : registry()) out.push_back(f.id());
  return out;
}

BigInt evaluate(std::string_view id, const Factorization& f) { return function_by_id(id)(f); }

MultiplicativeFunction E_operator(std::string id, ArithmeticFunction f) {
  const std::string name = id;
  BigRule big = [f](const BigInt&, unsigned a) { return f(a); };
  SmallRule small = [f, name](u64, unsigned a) {
    const BigInt v = f(a);
    if (!v.fits_slong_p()) overflow(name);
    return static_cast<i64>(v.get_si());
  };
  PolyRule poly = [f](unsigned a) { return constant(f(a)); };
  return MultiplicativeFunction(std::move(id), std::move(big), std::move(small), std::move(poly),
                                std::nullopt, true);
}

MultiplicativeFunction exponential_convolve(const MultiplicativeFunction& f,
                                            const MultiplicativeFunction& g, std::string id) {
  if (id.empty()) id = "(" + f.id() + ")o(" + g.id() + ")";
  const std::string name = id;
  BigRule big = [f, g](const BigInt& p, unsigned a) {
    BigInt r = 0;
    for (u64 d : divisors_of(a)) {
      r += f.at_prime_power(p, static_cast<unsigned>(d)) *
           g.at_prime_power(p, static_cast<unsigned>(a / d));
    }
    return r;
  };
  SmallRule small = [f, g, name](u64 p, unsigned a) {
    i64 r = 0;
    for (u64 d : divisors_of(a)) {
      r = checked_add(r,
                      checked_mul(f.at_prime_power_small(p, static_cast<unsigned>(d)),
                                  g.at_prime_power_small(p, static_cast<unsigned>(a / d)), name),
                      name);
    }
    return r;
  };
  std::optional<PolyRule> poly;
  if (f.has_poly() && g.has_poly()) {
    poly = [f, g](unsigned a) {
      std::map<unsigned, BigInt> acc;
      for (u64 d : divisors_of(a)) {
        for (const auto& [df, cf] : f.poly(static_cast<unsigned>(d))) {
          for (const auto& [dg, cg] : g.poly(static_cast<unsigned>(a / d))) acc[df + dg] += cf * cg;
        }
      }
      return normalise(std::move(acc));
    };
  }
  return MultiplicativeFunction(std::move(id), std::move(big), std::move(small), std::move(poly),
                                std::nullopt, f.prime_independent() && g.prime_independent());
}

MultiplicativeFunction squared(const MultiplicativeFunction& f) {
  const std::string name = f.id() + "_sq";
  BigRule big = [f](const BigInt& p, unsigned a) {
    const BigInt v = f.at_prime_power(p, a);
    return BigInt(v * v);
  };
  SmallRule small = [f, name](u64 p, unsigned a) {
    const i64 v = f.at_prime_power_small(p, a);
    return checked_mul(v, v, name);
  };
  std::optional<PolyRule> poly;
  if (f.has_poly()) {
    poly = [f](unsigned a) {
      std::map<unsigned, BigInt> acc;
      const PolyTerms t = f.poly(a);
      for (const auto& [d1, c1] : t) {
        for (const auto& [d2, c2] : t) acc[d1 + d2] += c1 * c2;
      }
      return normalise(std::move(acc));
    };
  }
  std::optional<GrowthClass> growth;
  if (f.growth()) {
    const GrowthClass g = *f.growth();
    growth = GrowthClass{g.coefficient * g.coefficient, 2 * g.degree, 2 * g.weight};
  }
  return MultiplicativeFunction(name, std::move(big), std::move(small), std::move(poly), growth,
                                f.prime_independent());
}

Sequence values_up_to(const MultiplicativeFunction& f, std::uint64_t n_max) {
  if (n_max == 0) throw UsageError("values_up_to: N must be >= 1");
  if (n_max > (u64{1} << 31)) throw CapacityError("values_up_to: N too large");
  const auto spf = smallest_prime_factors(static_cast<std::uint32_t>(n_max));
  Sequence out(n_max + 1);
  out[1] = 1;
  for (u64 n = 2; n <= n_max; ++n) {
    const u64 p = spf[n];
    u64 m = n;
    unsigned a = 0;
    while (m % p == 0) {
      m /= p;
      ++a;
    }
    out[n] = out[m] * f.at_prime_power(BigInt(static_cast<unsigned long>(p)), a);
  }
  return out;
}

Sequence dirichlet_convolve(const Sequence& f, const Sequence& g) {
  const std::size_t n = std::min(f.size(), g.size());
  if (n < 2) throw UsageError("dirichlet_convolve: N must be >= 1");
  Sequence out(n, BigInt(0));
  for (std::size_t d = 1; d < n; ++d) {
    if (f[d] == 0) continue;
    for (std::size_t m = 1; d * m < n; ++m) out[d * m] += f[d] * g[m];
  }
  return out;
}

Sequence dirichlet_convolve(const MultiplicativeFunction& f, const MultiplicativeFunction& g,
                            std::uint64_t n_max) {
  return dirichlet_convolve(values_up_to(f, n_max), values_up_to(g, n_max));
}

std::vector<std::uint64_t> divisors_of(std::uint64_t a) {
  if (a == 0) throw UsageError("divisors_of: argument must be >= 1");
  std::vector<u64> small, large;
  for (u64 d = 1; d * d <= a; ++d) {
    if (a % d == 0) {
      small.push_back(d);
      if (d * d != a) large.push_back(a / d);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

std::uint64_t sigma_of(std::uint64_t a) {
  u64 s = 0;
  for (u64 d : divisors_of(a)) s += d;
  return s;
}

std::uint64_t tau_of(std::uint64_t a) { return divisors_of(a).size(); }

int mobius_of(std::uint64_t a) {
  if (a == 0) throw UsageError("mobius_of: argument must be >= 1");
  int sign = 1;
  for (u64 p = 2; p * p <= a; ++p) {
    if (a % p != 0) continue;
    a /= p;
    if (a % p == 0) return 0;
    sign = -sign;
  }
  if (a > 1) sign = -sign;
  return sign;
}

std::uint64_t tau_inf_of(std::uint64_t a) {
  if (a == 0) throw UsageError("tau_inf_of: argument must be >= 1");
  unsigned bits = 0;
  for (u64 p = 2; p * p <= a; ++p) {
    unsigned e = 0;
    while (a % p == 0) {
      a /= p;
      ++e;
    }
    bits += binary_ones(e);
  }
  if (a > 1) bits += 1;
  return u64{1} << bits;
}

}  // namespace moddiv
