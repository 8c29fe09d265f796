#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "moddiv/arithmetic_core.hpp"
#include "moddiv/certified_real.hpp"
#include "moddiv/worker_pool.hpp"

namespace moddiv {

// sigma^(e)inf(2^tau) / 2^tau, exact for tau = 1..6, and the bound
// 1 + 2^(1 - tau/2) valid for every tau >= 6.
struct BTable {
  std::vector<ExactRatio> exact_ratios;  // index tau - 1, tau = 1..6

  const ExactRatio& exact(unsigned tau) const;
  static CertifiedReal tail_bound(unsigned tau, long precision_bits = kDefaultPrecisionBits);
};
BTable b_table();

// Upper bound for b(t) = max over tau >= t of sigma^(e)inf(2^tau)/2^tau:
// exact ratios for tau <= 6, the tail bound beyond. t >= 1.
CertifiedReal b_upper(unsigned t, long precision_bits = kDefaultPrecisionBits);
// The same bound as an exact rational for t <= 6, where an exact ratio
// dominates the tail; throws UsageError for t > 6.
ExactRatio b_upper_exact(unsigned t);

// Exact audits of the prime-power lemma:
//   sigma^(e)inf(p^a)/p^a <= 1 + 2 p^(-a/2) for a >= 6,
//   sigma^(e)inf(p^a)/p^a <= 1 + p^(-2)     for a >= 3,
// plus b_upper nonincreasing for 3 <= t <= t_max.
struct LemmaAudit {
  std::uint64_t checks = 0;
  std::uint64_t failures = 0;
  bool b_monotone = false;
  bool passed() const { return failures == 0 && b_monotone; }
};
LemmaAudit lemma_audit(std::uint64_t prime_limit = 100, unsigned a_max = 64,
                       unsigned t_max = 64);

// f(p) = (1 + 1/p) / (1 + 1/p^2) = p (p + 1) / (p^2 + 1).
ExactRatio f_ratio_exact(std::uint64_t p);
CertifiedReal f_ratio(std::uint64_t p, long precision_bits = kDefaultPrecisionBits);

enum class ThresholdVariant { base, refined };
std::string to_string(ThresholdVariant v);
ThresholdVariant parse_threshold_variant(const std::string& text);

// base = 10 pi^2 / 54; refined = 10 pi^2 (1 + 23^-2) / 54.
CertifiedReal threshold(ThresholdVariant v, long precision_bits = kDefaultPrecisionBits);

struct ClassCounts {
  unsigned t2 = 0;
  unsigned t4 = 0;
  unsigned t8 = 0;

  // t2 + 2 t4 + 3 t8 + 1, the exponent of 2.
  unsigned weight() const { return t2 + 2 * t4 + 3 * t8 + 1; }
  bool operator==(const ClassCounts&) const = default;
};

struct OptimizerOptions {
  long precision_bits = kDefaultPrecisionBits;
  ClassCounts box{300, 150, 150};
  const WorkerPool* pool = nullptr;
  // Replaces the variant's threshold (diagnostics and tests).
  std::optional<ExactRatio> threshold_override;
};

struct OptimizerResult {
  ThresholdVariant variant = ThresholdVariant::base;
  ClassCounts counts;
  // 2^weight * prod over the first t_j members of each class of p^2.
  BigInt objective;
  CertifiedReal log10_bound;  // log10(objective)
  ClassCounts box;            // box actually scanned (after enlargements)
  unsigned enlargements = 0;
  // No triple outside the box can beat the optimum: the objective is
  // increasing in each count, and the smallest objective with one count past
  // the box already exceeds the optimum.
  bool box_sufficient = false;
  std::uint64_t feasible_count = 0;
  // Feasible triples whose every one-step decrease is infeasible.
  std::uint64_t frontier_size = 0;
  // Optimum of the monotone (first feasible t2 per (t4, t8)) search agrees
  // with the full scan.
  bool pruned_search_agrees = false;
};

// Minimises 2^w prod p_{j,k}^2 subject to
//   threshold <= b_upper(w) * prod f(p_{j,k}),  w = t2 + 2 t4 + 3 t8 + 1,
// over the first t_j primes of each class. A triple is declared infeasible
// only when the certified right side lies strictly below the threshold, so
// rounding can only enlarge the feasible set and lower the minimum; an
// undecided comparison throws PrecisionError. Ties resolve to the
// lexicographically smallest (t2, t4, t8).
OptimizerResult solve(ThresholdVariant variant, const OptimizerOptions& options = {});

struct FinalBound {
  OptimizerResult base;
  OptimizerResult refined;
  // log10((5 * 11 * 17 * 23)^3 * 2^4): the factor forced when 5, 11, 17 and
  // 23 all divide n to exponents >= 3 and the power of 2 grows by 4.
  CertifiedReal case_b_increment;
  CertifiedReal case_b;  // base + increment
  CertifiedReal log10_bound;  // min(refined, case_b)
  bool case_b_is_min = false;
};
FinalBound final_bound(const OptimizerOptions& options = {});

}  // namespace moddiv
