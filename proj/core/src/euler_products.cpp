#include "moddiv/euler_products.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

#include "moddiv/arithmetic_core.hpp"
#include "moddiv/error.hpp"

namespace moddiv {

namespace {

using u64 = std::uint64_t;
using CR = CertifiedReal;

// B_0..B_n as exact rationals (B_1 = -1/2), cached across calls.
std::vector<mpq_class> bernoulli_numbers(std::size_t n) {
  static std::mutex mu;
  static std::vector<mpq_class> cache{mpq_class(1)};
  std::lock_guard lock(mu);
  while (cache.size() <= n) {
    const std::size_t m = cache.size();
    mpq_class acc = 0;
    for (std::size_t j = 0; j < m; ++j) {
      mpz_class binom;
      mpz_bin_uiui(binom.get_mpz_t(), m + 1, j);
      acc += mpq_class(binom) * cache[j];
    }
    mpq_class b = -acc / mpq_class(static_cast<long>(m + 1));
    b.canonicalize();
    cache.push_back(b);
  }
  return {cache.begin(), cache.begin() + static_cast<std::ptrdiff_t>(n + 1)};
}

mpz_class factorial(unsigned n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

mpz_class zpow(const mpz_class& b, unsigned long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

CR upper_point(const CR& x) { return x.upper(); }

bool below_epsilon(const CR& x, long bits) { return x.certainly_below_pow2(-bits); }

// sum_{j>=1} j^m x^j = sum_{k=0}^{m} k! S2(m,k) x^k / (1-x)^(k+1), exact.
mpq_class power_series_sum(unsigned m, const mpq_class& x) {
  // Stirling numbers of the second kind S2(m, k).
  std::vector<std::vector<mpz_class>> s2(m + 1, std::vector<mpz_class>(m + 1, 0));
  s2[0][0] = 1;
  for (unsigned i = 1; i <= m; ++i) {
    for (unsigned k = 1; k <= i; ++k) s2[i][k] = k * s2[i - 1][k] + s2[i - 1][k - 1];
  }
  mpq_class total = 0;
  const mpq_class one_minus = 1 - x;
  for (unsigned k = 0; k <= m; ++k) {
    mpq_class term = mpq_class(factorial(k) * s2[m][k]);
    for (unsigned i = 0; i < k; ++i) term *= x;
    for (unsigned i = 0; i <= k; ++i) term /= one_minus;
    total += term;
  }
  return total;
}

// Coefficients of (1 - w^kappa)^e up to degree J.
std::vector<mpz_class> zeta_factor_series(unsigned kappa, int e, unsigned J) {
  std::vector<mpz_class> c(J + 1, 0);
  const unsigned n = static_cast<unsigned>(std::abs(e));
  for (unsigned i = 0; static_cast<u64>(i) * kappa <= J; ++i) {
    mpz_class b;
    if (e >= 0) {
      if (i > n) break;
      mpz_bin_uiui(b.get_mpz_t(), n, i);
      if (i % 2) b = -b;
    } else {
      mpz_bin_uiui(b.get_mpz_t(), i + n - 1, i);
    }
    c[i * kappa] = b;
  }
  return c;
}

std::vector<mpz_class> multiply_series(const std::vector<mpz_class>& a,
                                       const std::vector<mpz_class>& b) {
  std::vector<mpz_class> out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; i + j < out.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

struct Plan {
  bool prime_independent = false;  // otherwise: integer s, polynomial form
  CR s;
  long s_int = 0;
  GrowthClass growth;
  std::vector<CR> f_values;  // prime-independent mode: f(p^a), a = 0..terms
  std::vector<long> kappas;  // polynomial mode: m s + shift
};

}  // namespace

CertifiedReal zeta(const CertifiedReal& s, long precision_bits) {
  const long prec = precision_bits + 16;
  CR sv = s;
  if (sv.precision() < prec) {
    CR widened(prec);
    widened += sv;
    sv = widened;
  }
  if (!certainly_less(CR::from_rational(mpq_class(1001, 1000), prec), sv)) {
    throw UsageError("zeta: s must exceed 1 + 1e-3");
  }
  const long N = std::max<long>(16, prec / 2);
  const long M = std::max<long>(8, prec / 4);
  const auto bern = bernoulli_numbers(static_cast<std::size_t>(2 * M + 2));

  CR sum = CR::from_int(0, prec);
  for (long n = 1; n < N; ++n) sum += exp(-sv * log(CR::from_int(n, prec)));
  const CR n_big = CR::from_int(N, prec);
  const CR n_pow = exp(-sv * log(n_big));  // N^-s
  const CR one = CR::from_int(1, prec);
  sum += n_big * n_pow / (sv - one);
  sum += n_pow / CR::from_int(2, prec);

  const CR inv_n2 = one / (n_big * n_big);
  CR rising = sv;             // s (s+1) ... (s+2k-2)
  CR power = n_pow / n_big;   // N^(-s-2k+1)
  CR last_term(prec);
  for (long k = 1; k <= M + 1; ++k) {
    const mpq_class coef = bern[2 * k] / mpq_class(factorial(static_cast<unsigned>(2 * k)));
    const CR term = CR::from_rational(coef, prec) * rising * power;
    if (k <= M) {
      sum += term;
    } else {
      last_term = term;
    }
    rising *= (sv + CR::from_int(2 * k - 1, prec)) * (sv + CR::from_int(2 * k, prec));
    power *= inv_n2;
  }
  const CR radius = upper_point(abs(last_term)) * CR::from_int(2, prec);
  return sum.widened(radius);
}

CertifiedReal zeta(double s, long precision_bits) {
  return zeta(CR::from_double(s, precision_bits + 16), precision_bits);
}

std::string ZetaFactorization::describe() const {
  std::ostringstream os;
  for (const auto& f : factors) {
    os << "zeta(";
    if (f.multiple != 1) os << f.multiple;
    os << 's';
    if (f.shift > 0) os << '+' << f.shift;
    if (f.shift < 0) os << f.shift;
    os << ')';
    if (f.power != 1) os << '^' << f.power;
    os << ' ';
  }
  os << name << "(s)";
  return os.str();
}

CertifiedReal correction_factor(const MultiplicativeFunction& f, const ZetaFactorization& zf,
                                double s, const EulerOptions& options) {
  if (options.prime_limit < 1000) throw UsageError("prime_limit must be >= 1000");
  if (options.terms < 4) throw UsageError("terms must be >= 4");
  if (!f.growth()) throw UsageError(f.id() + ": no growth class, cannot bound Euler tails");
  const long prec = options.precision_bits + 16;
  const unsigned J = options.terms;
  const GrowthClass growth = *f.growth();
  const mpq_class half(1, 2);

  Plan plan;
  plan.s = CR::from_double(s, prec);
  plan.growth = growth;
  const bool all_unshifted = std::all_of(zf.factors.begin(), zf.factors.end(),
                                         [](const ZetaFactor& z) { return z.shift == 0; });
  const bool integer_s = std::floor(s) == s && s >= 1 && s <= 1e6;
  if (f.prime_independent() && all_unshifted && growth.weight == 0) {
    plan.prime_independent = true;
    if (!(s > 0)) throw UsageError("correction factor: s must be positive");
    for (unsigned a = 0; a <= J; ++a) {
      plan.f_values.push_back(CR::from_bigint(f.at_prime_power(BigInt(2), a), prec));
    }
  } else if (integer_s && f.has_poly()) {
    plan.s_int = static_cast<long>(s);
    if (plan.s_int <= growth.weight) {
      throw UsageError("correction factor: local series diverge at this s");
    }
    for (const auto& z : zf.factors) {
      const long kappa = static_cast<long>(z.multiple) * plan.s_int + z.shift;
      if (kappa < 1) throw UsageError("correction factor: zeta argument must exceed 1");
      plan.kappas.push_back(kappa);
    }
  } else {
    throw UsageError(
        "correction factor needs a prime-independent function with unshifted zeta factors, "
        "or an integer s and a polynomial form");
  }

  // Exact series of the local factor in w (w = p^-s or w = 1/p).
  std::vector<mpz_class> series(J + 1, 0);
  series[0] = 1;
  if (plan.prime_independent) {
    for (unsigned a = 1; a <= J; ++a) series[a] = f.at_prime_power(BigInt(2), a);
  } else {
    for (unsigned a = 1; a <= J; ++a) {
      for (const auto& [d, coef] : f.poly(a)) {
        if (static_cast<long>(d) > static_cast<long>(growth.weight) * a) {
          throw UsageError(f.id() + ": polynomial degree exceeds its growth class");
        }
        const long j = static_cast<long>(a) * plan.s_int - static_cast<long>(d);
        if (j <= static_cast<long>(J)) series[static_cast<std::size_t>(j)] += coef;
      }
    }
  }
  for (std::size_t i = 0; i < zf.factors.size(); ++i) {
    const long kappa = plan.prime_independent ? zf.factors[i].multiple : plan.kappas[i];
    if (kappa < 1) throw UsageError("correction factor: zeta multiples must be >= 1");
    series = multiply_series(series,
                             zeta_factor_series(static_cast<unsigned>(kappa), zf.factors[i].power, J));
  }
  unsigned k = J + 1;
  for (unsigned j = 1; j <= J; ++j) {
    if (series[j] != 0) {
      k = j;
      break;
    }
  }
  // Each prime p > P contributes |L_p - 1| <= K' p^(-nu k).
  const CR nu = plan.prime_independent ? plan.s : CR::from_int(1, prec);
  const CR nuk = nu * CR::from_int(k, prec);
  const CR one = CR::from_int(1, prec);
  if (!certainly_less(one, nuk)) {
    throw UsageError("Euler product of the correction factor does not converge at s");
  }

  // Direct product over p <= P, in fixed blocks combined in order.
  const std::vector<u64> primes = sieve_primes(options.prime_limit);
  const auto local_factor = [&](u64 p) {
    const CR logp = log(CR::from_int(static_cast<long>(p), prec));
    CR w(prec), q(prec);  // q bounds the ratio p^(weight - s)
    if (plan.prime_independent) {
      w = exp(-plan.s * logp);
      q = upper_point(w);
    } else {
      const mpz_class pz = to_bigint(p);
      w = CR::from_rational(mpq_class(1, zpow(pz, static_cast<unsigned long>(plan.s_int))), prec);
      q = CR::from_rational(
          mpq_class(1, zpow(pz, static_cast<unsigned long>(plan.s_int - growth.weight))), prec);
    }
    CR sum = one;
    CR wpow = one;
    CR qpow = one;
    bool tail_done = false;
    for (unsigned a = 1; a <= J; ++a) {
      wpow *= w;
      qpow *= q;
      if (plan.prime_independent) {
        sum += plan.f_values[a] * wpow;
      } else {
        sum += CR::from_bigint(f.at_prime_power(to_bigint(p), a), prec) * wpow;
      }
      // Tail a' > a: terms <= c a'^r q^a', ratio <= ((a+2)/(a+1))^r q.
      const CR next = CR::from_int(a + 1, prec);
      const CR ratio = pow(CR::from_rational(mpq_class(a + 2, a + 1), prec), growth.degree) * q;
      if (!certainly_less(ratio, one)) continue;
      const CR tail = CR::from_double(growth.coefficient, prec) * pow(next, growth.degree) *
                      qpow * q / (one - ratio);
      if (a == J || below_epsilon(tail, prec + 8)) {
        sum = sum.widened(upper_point(tail));
        tail_done = true;
        break;
      }
    }
    if (!tail_done) throw UsageError("local series does not converge within the term cap");
    for (std::size_t i = 0; i < zf.factors.size(); ++i) {
      const int e = zf.factors[i].power;
      if (plan.prime_independent) {
        const CR kappa = plan.s * CR::from_int(zf.factors[i].multiple, prec);
        sum *= pow(one - exp(-kappa * logp), e);
      } else {
        const mpq_class base =
            1 - mpq_class(1, zpow(to_bigint(p), static_cast<unsigned long>(plan.kappas[i])));
        sum *= pow(CR::from_rational(base, prec), e);
      }
    }
    return sum;
  };

  const std::size_t blocks = std::min<std::size_t>(64, primes.size());
  std::vector<CR> partial(blocks, one);
  const WorkerPool& pool = options.pool ? *options.pool : WorkerPool::serial();
  pool.run(blocks, [&](std::size_t b) {
    const std::size_t lo = primes.size() * b / blocks;
    const std::size_t hi = primes.size() * (b + 1) / blocks;
    CR prod = one;
    for (std::size_t i = lo; i < hi; ++i) prod *= local_factor(primes[i]);
    partial[b] = prod;
  });
  CR product = one;
  for (const auto& b : partial) product *= b;

  // Tail over p > P.
  const CR big_p = CR::from_int(static_cast<long>(options.prime_limit), prec);
  const CR p_nu = exp(-nu * log(big_p));  // P^-nu
  CR kprime = CR::from_int(0, prec);
  CR p_pow = one;
  for (unsigned j = k; j <= J; ++j) {
    kprime += CR::from_bigint(abs(series[j]), prec) * p_pow;
    p_pow *= p_nu;
  }
  // Majorant of the coefficients beyond J, evaluated at rho = 1/2.
  mpq_class g = 1 + mpq_class(growth.coefficient) *
                        power_series_sum(static_cast<unsigned>(growth.degree + 1), half);
  for (std::size_t i = 0; i < zf.factors.size(); ++i) {
    const long kappa = plan.prime_independent ? zf.factors[i].multiple : plan.kappas[i];
    const int e = zf.factors[i].power;
    const mpq_class rk = mpq_class(1, zpow(2, static_cast<unsigned long>(kappa)));
    const mpq_class base = e >= 0 ? mpq_class(1 + rk) : mpq_class(1 - rk);
    for (int t = 0; t < std::abs(e); ++t) g = e >= 0 ? mpq_class(g * base) : mpq_class(g / base);
  }
  if (k <= J) {
    kprime += CR::from_rational(g, prec) * pow(CR::from_int(2, prec), J + 1) *
              pow(p_nu, static_cast<long>(J + 1 - k));
  } else {
    kprime += CR::from_rational(g, prec) * pow(CR::from_int(2, prec), J + 1);
  }
  const CR delta_max = kprime * exp(-nuk * log(big_p));
  if (!certainly_less(delta_max, CR::from_rational(half, prec))) {
    throw UsageError("prime_limit too small for the analytic tail bound");
  }
  const CR tail_sum = big_p * exp(-nuk * log(big_p)) / (nuk - one);
  const CR t = upper_point(kprime * tail_sum / (one - delta_max));
  const CR tail_factor = exp(-t).hull(exp(t));
  return product * tail_factor;
}

CertifiedReal prime_zeta_tail(unsigned k, std::uint64_t q, long precision_bits) {
  if (k < 2) throw UsageError("prime zeta needs k >= 2");
  if (q < 2) throw UsageError("prime zeta tail needs q >= 2");
  const long prec = precision_bits + 32;
  const std::vector<u64> small = sieve_primes(q);
  const CR one = CR::from_int(1, prec);
  const CR qr = CR::from_int(static_cast<long>(q), prec);
  const CR q_inv_k = exp(-CR::from_int(k, prec) * log(qr));
  CR total = CR::from_int(0, prec);
  for (unsigned j = 1;; ++j) {
    const long s = static_cast<long>(j) * k;
    // 0 <= log zeta_q(s) <= sum_{n>q} n^-s <= q^(1-s)/(s-1).
    const CR bound = qr * exp(-CR::from_int(s, prec) * log(qr)) / CR::from_int(s - 1, prec);
    if (below_epsilon(bound, prec)) {
      const CR rest = upper_point(bound / (one - q_inv_k));
      return total.widened(rest);
    }
    const int mu = mobius_of(j);
    if (mu == 0) continue;
    CR z = zeta(static_cast<double>(s), prec);
    for (u64 p : small) {
      z *= one - exp(-CR::from_int(s, prec) * log(CR::from_int(static_cast<long>(p), prec)));
    }
    const CR term = log(z) / CR::from_int(j, prec);
    if (mu > 0) total += term;
    else total -= term;
  }
}

CertifiedReal prime_zeta(unsigned k, long precision_bits, std::uint64_t head_limit) {
  const u64 q = head_limit;
  const long prec = precision_bits + 32;
  CR head = CR::from_int(0, prec);
  for (u64 p : sieve_primes(q)) {
    head += pow(CR::from_rational(mpq_class(1, to_bigint(p)), prec), static_cast<long>(k));
  }
  return head + prime_zeta_tail(k, q, precision_bits);
}

CertifiedReal mertens_constant(long precision_bits) {
  const u64 q = 1000;
  const long prec = precision_bits + 32;
  const CR one = CR::from_int(1, prec);
  CR total = CR::euler_gamma(prec);
  for (u64 p : sieve_primes(q)) {
    const CR inv = CR::from_rational(mpq_class(1, to_bigint(p)), prec);
    total += log1p(-inv) + inv;
  }
  // sum_{p>q} (log(1-1/p) + 1/p) = -sum_{m>=2} P_{>q}(m) / m.
  const CR qr = CR::from_int(static_cast<long>(q), prec);
  for (unsigned m = 2;; ++m) {
    const CR bound = qr * exp(-CR::from_int(m, prec) * log(qr)) /
                     CR::from_int(static_cast<long>(m - 1) * m, prec);
    if (below_epsilon(bound, prec)) {
      return total.widened(upper_point(bound / (one - one / qr)));
    }
    total -= prime_zeta_tail(m, q, precision_bits) / CR::from_int(m, prec);
  }
}

namespace {

struct TargetSpec {
  std::string formula;
  std::function<MultiplicativeFunction()> function;
  ZetaFactorization zf;
  double s;
  std::function<CR(long prec)> zeta_part;
};

const std::map<std::string, TargetSpec>& target_table() {
  static const std::map<std::string, TargetSpec> table = [] {
    std::map<std::string, TargetSpec> t;
    t["one"] = {"1 (F = zeta(s))", [] { return function_by_id("one"); }, {{{1, 0, 1}}, "H"}, 1.0,
                [](long prec) { return CR::from_int(1, prec); }};
    t["E_sigma"] = {"C1 = zeta(2)^2 zeta(3) H(1)", [] { return function_by_id("E_sigma"); },
                    {{{1, 0, 1}, {2, 0, 2}, {3, 0, 1}}, "H"}, 1.0, [](long prec) {
                      return pow(zeta(2.0, prec), 2) * zeta(3.0, prec);
                    }};
    t["E_sigma_sq"] = {"D = zeta(2)^8 G(1)",
                       [] { return squared(function_by_id("E_sigma")); },
                       {{{1, 0, 1}, {2, 0, 8}}, "G"}, 1.0,
                       [](long prec) { return pow(zeta(2.0, prec), 8); }};
    t["tau_inf_log"] = {"D1 = zeta(3)^2 / zeta(2) G(1)",
                        [] { return function_by_id("tau_inf"); },
                        {{{1, 0, 2}, {3, 0, 2}, {2, 0, -1}}, "G"}, 1.0, [](long prec) {
                          return pow(zeta(3.0, prec), 2) / zeta(2.0, prec);
                        }};
    t["frak_f_e"] = {"C = zeta(4) / (2 zeta(3)) G(2)",
                     [] { return function_by_id("frak_f_e"); },
                     {{{1, -1, 1}, {3, -2, 1}, {2, -1, -1}}, "G"}, 2.0, [](long prec) {
                       return zeta(4.0, prec) / (CR::from_int(2, prec) * zeta(3.0, prec));
                     }};
    t["E_tau_inf"] = {"A = zeta(2) / zeta(4) H(1)", [] { return function_by_id("E_tau_inf"); },
                      {{{1, 0, 1}, {2, 0, 1}, {4, 0, -1}}, "H"}, 1.0,
                      [](long prec) { return zeta(2.0, prec) / zeta(4.0, prec); }};
    t["tau_inf_sq_lead"] = {"H(1) / (6 zeta(2)^6)",
                            [] { return squared(function_by_id("tau_inf")); },
                            {{{1, 0, 4}, {2, 0, -6}}, "H"}, 1.0, [](long prec) {
                              return CR::from_int(1, prec) /
                                     (CR::from_int(6, prec) * pow(zeta(2.0, prec), 6));
                            }};
    return t;
  }();
  return table;
}

std::string canonical_target(std::string_view raw) {
  std::string key;
  for (char ch : raw) key.push_back(ch == '-' ? '_' : ch);
  for (const auto& [name, spec] : target_table()) {
    if (name.size() != key.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < key.size() && same; ++i) {
      same = std::tolower(static_cast<unsigned char>(name[i])) ==
             std::tolower(static_cast<unsigned char>(key[i]));
    }
    if (same) return name;
  }
  throw UsageError("unknown leading-constant target: " + std::string(raw));
}

}  // namespace

LeadingConstant leading_constant(std::string_view target, const LeadingConstantOptions& options) {
  const std::string name = canonical_target(target);
  const TargetSpec& spec = target_table().at(name);
  const long prec = options.precision_bits;
  CR value = spec.zeta_part(prec);
  if (!options.force_unit_correction) {
    value *= correction_factor(spec.function(), spec.zf, spec.s, options);
  }
  LeadingConstant out{name, spec.formula, value, options.prime_limit, options.terms,
                      options.precision_bits};
  if (options.force_unit_correction) out.formula += " with correction forced to 1";
  return out;
}

std::vector<std::string> leading_constant_targets() {
  std::vector<std::string> out;
  for (const auto& [name, spec] : target_table()) out.push_back(name);
  return out;
}

}  // namespace moddiv
