#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "moddiv/arithmetic_core.hpp"
#include "moddiv/certified_real.hpp"
#include "moddiv/worker_pool.hpp"

namespace moddiv {

// Inputs of the explicit lower bound f(n) = f^(e)(n) llog n / n >= C e^-gamma
// for n > 44100.
struct ExplicitBoundConfig {
  mpq_class C{993957, 1000000};
  CertifiedReal gamma_const;
  CertifiedReal mertens_B;
  CertifiedReal c_cubic;  // 8 log 2 - 5
  std::uint64_t x0 = 10'544'111;
  long precision_bits = kDefaultPrecisionBits;

  static ExplicitBoundConfig standard(long precision_bits = kDefaultPrecisionBits);
  // C e^-gamma.
  CertifiedReal threshold() const;
};

// ---------------------------------------------------------------------------
// E sigma limsup structure

struct SigmaSupReport {
  // log sigma(n) / n for n = 1..6.
  std::vector<CertifiedReal> small_values;
  unsigned argmax = 0;  // certified maximiser over n <= 6, 0 if undecided
  bool max_is_log3_over_2 = false;
  // Majorant g(n) = (log 2.59 + log n + lllog n) / n.
  CertifiedReal g7;
  bool g7_below_log3_over_2 = false;
  std::uint64_t grid_last = 0;
  bool decreasing = false;  // g(n+1) < g(n) certified for 7 <= n < grid_last
  std::optional<std::uint64_t> first_non_decrease;

  bool passed() const {
    return argmax == 2 && max_is_log3_over_2 && g7_below_log3_over_2 && decreasing;
  }
};

SigmaSupReport verify_sigma_sup(std::uint64_t grid_last = 1'000'000,
                                const WorkerPool* pool = nullptr);

// R(x) = log E sigma(N) llog N / log N for N = prod_{p <= x} p^2; here
// E sigma(N) = 3^pi(x) and log N = 2 theta(x).
struct RecordPoint {
  std::uint64_t x = 0;
  std::uint64_t prime_count = 0;
  CertifiedReal R;
};
std::vector<RecordPoint> esigma_record_curve(const std::vector<std::uint64_t>& xs,
                                             long precision_bits = kDefaultPrecisionBits);

// ---------------------------------------------------------------------------
// Explicit bound pipeline for f^(e)

struct ProofConstants {
  CertifiedReal C1;     // prod_p exp(-p^-2/2 - c p^-3)
  CertifiedReal C2;     // exp(-B - 1/(10 log^2 x0) - 4/(15 log^3 x0))
  CertifiedReal ratio;  // C1 C2 / e^-gamma
  // exp(-y - y^2/2 - c y^3) <= 1 - y on the grid y = i/(2 grid), 0 < i < grid,
  // with equality certified at y = 0 and y = 1/2.
  bool identity_holds = false;
  std::size_t grid_points = 0;
};
ProofConstants mertens_proof_constants(const ExplicitBoundConfig& config,
                                       std::uint64_t head_limit = 100,
                                       std::size_t grid_points = 10'000);

struct PrefixReport {
  std::vector<std::uint64_t> failures;  // primes x where f(prod_{p<=x} p^2) < C e^-gamma
  std::uint64_t primes_checked = 0;
  std::uint64_t last_prime = 0;
  CertifiedReal f_last;       // f at the last prime
  CertifiedReal margin_last;  // f_last - threshold
  // Smallest certified margin over primes x >= 11 and where it occurs.
  double min_margin_from_11 = 0;
  std::uint64_t min_margin_at = 0;
};
// Throws PrecisionError when some comparison cannot be decided.
PrefixReport phie_prefix_verification(const ExplicitBoundConfig& config,
                                      std::uint64_t limit = 10'544'111,
                                      std::uint64_t chunk_size = 1 << 14,
                                      const WorkerPool* pool = nullptr);

// f(n) = f^(e)(n) llog n / n as an interval (n >= 3).
CertifiedReal phie_ratio(const Factorization& n, long precision_bits = kDefaultPrecisionBits);

struct SquarefullException {
  std::uint64_t k = 0;
  unsigned s = 0;  // number of primes whose square divides k
  double f = 0;
};
// Square-full k <= limit with s(k) <= s_max and f(k) < C e^-gamma, ascending.
std::vector<SquarefullException> squarefull_exception_scan(const ExplicitBoundConfig& config,
                                                           std::uint64_t limit = 1'000'000,
                                                           unsigned s_max = 4);

struct SuspiciousNumber {
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  std::uint64_t l = 0;
  double f = 0;
  bool below_threshold = false;
};
struct SuspiciousReport {
  std::vector<SuspiciousNumber> set;  // ascending by n
  std::uint64_t max = 0;
  bool max_within_44100 = false;
  std::uint64_t audit_from = 44'101;
  std::uint64_t audit_to = 0;
  std::uint64_t audit_failures = 0;
  std::optional<std::uint64_t> first_failure;
  double min_margin = 0;
  std::uint64_t min_margin_at = 0;

  bool passed() const { return max_within_44100 && audit_failures == 0; }
};
// Builds {k l : k in exceptions, l in {1,2,3,5}, gcd(k,l) = 1} and audits
// f(n) >= C e^-gamma for every 44100 < n <= audit_limit.
SuspiciousReport suspicious_set_check(const ExplicitBoundConfig& config,
                                      const std::vector<std::uint64_t>& exceptions,
                                      std::uint64_t audit_limit = 10'000'000,
                                      const WorkerPool* pool = nullptr);

struct DusartPoint {
  std::uint64_t x = 0;
  CertifiedReal reciprocal_sum;  // sum_{p<=x} 1/p
  CertifiedReal reciprocal_bound;  // llog x + B + 1/(10 log^2 x) + 4/(15 log^3 x)
  bool reciprocal_holds = false;
  CertifiedReal theta;        // sum_{p<=x} log p
  CertifiedReal theta_bound;  // x (1 - 0.006788 / log x)
  bool theta_holds = false;
};
// Sample points must lie in [x0, 10^8].
std::vector<DusartPoint> dusart_check(const ExplicitBoundConfig& config,
                                      std::vector<std::uint64_t> points,
                                      const WorkerPool* pool = nullptr);

}  // namespace moddiv
