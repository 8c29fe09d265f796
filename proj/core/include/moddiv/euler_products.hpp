#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "moddiv/certified_real.hpp"
#include "moddiv/multiplicative.hpp"
#include "moddiv/worker_pool.hpp"

namespace moddiv {

// Interval containing zeta(s) for real s > 1 + 10^-3, by Euler-Maclaurin
// summation. The remainder is bounded by twice the first omitted term.
CertifiedReal zeta(const CertifiedReal& s, long precision_bits = kDefaultPrecisionBits);
CertifiedReal zeta(double s, long precision_bits = kDefaultPrecisionBits);

// zeta(multiple * s + shift)^power.
struct ZetaFactor {
  int multiple = 1;
  int shift = 0;
  int power = 1;
};

// F(s) = prod zeta(m s + shift)^e * H(s); `name` labels H.
struct ZetaFactorization {
  std::vector<ZetaFactor> factors;
  std::string name = "H";

  std::string describe() const;
};

struct EulerOptions {
  // Primes up to this bound are multiplied individually; the rest are
  // bounded analytically. Must be >= 1000.
  std::uint64_t prime_limit = 100'000;
  // Cap on the number of prime-power terms per local factor, and the
  // degree of the exact series used for the tail.
  unsigned terms = 64;
  long precision_bits = kDefaultPrecisionBits;
  const WorkerPool* pool = nullptr;
};

// Interval containing H(s) = prod_p L_p(s) with
//   L_p(s) = (sum_a f(p^a) p^(-a s)) * prod (1 - p^(-(m s + shift)))^e.
// Each local series is truncated with a geometric tail bound from f's
// growth class; primes above prime_limit contribute an analytic factor
// exp([-T, T]). Needs either a prime-independent f with all shifts zero
// (any real s) or an integer s and a polynomial form. Throws UsageError
// when the configuration does not converge.
CertifiedReal correction_factor(const MultiplicativeFunction& f, const ZetaFactorization& zf,
                                double s, const EulerOptions& options = {});

// sum over primes p > q of p^(-k), for integer k >= 2, via
// sum_j mu(j)/j * log zeta_q(j k) with the Euler factors for p <= q removed.
CertifiedReal prime_zeta_tail(unsigned k, std::uint64_t q,
                              long precision_bits = kDefaultPrecisionBits);
// sum over all primes of p^(-k); primes <= head_limit are summed directly.
CertifiedReal prime_zeta(unsigned k, long precision_bits = kDefaultPrecisionBits,
                         std::uint64_t head_limit = 100);
// Meissel-Mertens constant B = gamma + sum_p (log(1 - 1/p) + 1/p).
CertifiedReal mertens_constant(long precision_bits = kDefaultPrecisionBits);

struct LeadingConstantOptions : EulerOptions {
  // Replace the correction factor by exactly 1 (isolates the zeta part).
  bool force_unit_correction = false;
};

struct LeadingConstant {
  std::string target;
  std::string formula;
  CertifiedReal value;
  std::uint64_t prime_limit = 0;
  unsigned terms = 0;
  long precision_bits = 0;
};

// Targets:
//   one              1                              (self-test, F = zeta(s))
//   E_sigma          zeta(2)^2 zeta(3) H(1)         sum of E sigma ~ C1 x
//   E_sigma_sq       zeta(2)^8 G(1)                 sum of (E sigma)^2 ~ D x
//   tau_inf_log      zeta(3)^2 / zeta(2) G(1)       sum of tau_inf ~ D1 x log x
//   frak_f_e         zeta(4) / (2 zeta(3)) G(2)     sum of f^(e) ~ C x^2
//   E_tau_inf        zeta(2) / zeta(4) H(1)         sum of E tau_inf ~ A x
//   tau_inf_sq_lead  H(1) / (6 zeta(2)^6)           sum of tau_inf^2 ~ c x log^3 x
LeadingConstant leading_constant(std::string_view target,
                                 const LeadingConstantOptions& options = {});
std::vector<std::string> leading_constant_targets();

}  // namespace moddiv
