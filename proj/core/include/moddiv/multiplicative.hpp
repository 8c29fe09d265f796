#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "moddiv/arithmetic_core.hpp"

namespace moddiv {

// |f(p^a)| <= sum_d |c_{a,d}| p^d <= coefficient * a^degree * p^(weight*a).
// The bound on the coefficient sum of the polynomial form is what the
// Euler-product tail estimates consume.
struct GrowthClass {
  double coefficient = 1;
  int degree = 0;
  int weight = 0;
};

// f(p^a) written as a polynomial in p: sum of coef * p^power.
using PolyTerms = std::vector<std::pair<unsigned, BigInt>>;

using BigRule = std::function<BigInt(const BigInt& p, unsigned a)>;
// Machine-word evaluation; throws CapacityError on overflow.
using SmallRule = std::function<std::int64_t(std::uint64_t p, unsigned a)>;
using PolyRule = std::function<PolyTerms(unsigned a)>;

// A multiplicative function given by its value on prime powers. Value at 1
// is 1 and the value at any factorization is the product of prime-power
// values.
class MultiplicativeFunction {
 public:
  MultiplicativeFunction(std::string id, BigRule big, SmallRule small,
                         std::optional<PolyRule> poly, std::optional<GrowthClass> growth,
                         bool prime_independent);

  const std::string& id() const { return id_; }
  bool prime_independent() const { return prime_independent_; }
  const std::optional<GrowthClass>& growth() const { return growth_; }
  bool has_poly() const { return poly_.has_value(); }

  BigInt at_prime_power(const BigInt& p, unsigned a) const;
  std::int64_t at_prime_power_small(std::uint64_t p, unsigned a) const;
  // Throws UsageError when no polynomial form is registered.
  PolyTerms poly(unsigned a) const;

  BigInt operator()(const Factorization& f) const;
  BigInt operator()(std::uint64_t n) const;

  // Same function with a new id.
  MultiplicativeFunction renamed(std::string id) const;

 private:
  std::string id_;
  BigRule big_;
  SmallRule small_;
  std::optional<PolyRule> poly_;
  std::optional<GrowthClass> growth_;
  bool prime_independent_;
};

// Registered ids: one, id, tau, sigma, mu, phi, tau_e, sigma_e, mu_e,
// E_sigma, frak_f_e, tau_inf, sigma_inf, tau_e_inf, sigma_e_inf, E_tau_inf.
// Lookup accepts kebab-case aliases (sigma-e-inf, e-sigma, frak-f-e, ...).
const MultiplicativeFunction& function_by_id(std::string_view id);
std::vector<std::string> registered_function_ids();

BigInt evaluate(std::string_view id, const Factorization& f);

// ---------------------------------------------------------------------------
// Construction

// Arithmetic function on positive integers.
using ArithmeticFunction = std::function<BigInt(std::uint64_t)>;

// (Ef)(p^a) = f(a): the prime-independent multiplicative function built
// from f.
MultiplicativeFunction E_operator(std::string id, ArithmeticFunction f);

// (f . g)(p^a) = sum over d | a of f(p^d) g(p^(a/d)).
MultiplicativeFunction exponential_convolve(const MultiplicativeFunction& f,
                                            const MultiplicativeFunction& g,
                                            std::string id = {});

// n -> f(n)^2.
MultiplicativeFunction squared(const MultiplicativeFunction& f);

// ---------------------------------------------------------------------------
// Sequences indexed by n (element 0 unused and zero).

using Sequence = std::vector<BigInt>;

Sequence values_up_to(const MultiplicativeFunction& f, std::uint64_t n_max);

// (f * g)(n) = sum over d | n of f(d) g(n/d), by the divisor-pair double loop.
Sequence dirichlet_convolve(const Sequence& f, const Sequence& g);
Sequence dirichlet_convolve(const MultiplicativeFunction& f, const MultiplicativeFunction& g,
                            std::uint64_t n_max);

// ---------------------------------------------------------------------------
// Small arithmetic helpers shared by the rules.

std::uint64_t sigma_of(std::uint64_t a);
std::uint64_t tau_of(std::uint64_t a);
int mobius_of(std::uint64_t a);
// tau^inf(a) = 2^(total binary weight of the exponents of a).
std::uint64_t tau_inf_of(std::uint64_t a);
std::vector<std::uint64_t> divisors_of(std::uint64_t a);

}  // namespace moddiv
