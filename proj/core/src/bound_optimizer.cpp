#include "moddiv/bound_optimizer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "moddiv/error.hpp"
#include "moddiv/multiplicative.hpp"

namespace moddiv {

namespace {

using u64 = std::uint64_t;
using CR = CertifiedReal;

// Decisions and comparisons that clear this margin in double precision are
// taken from the double evaluation; accumulated rounding in the sums below
// stays under 1e-12.
constexpr double kMargin = 1e-9;
constexpr unsigned kMaxEnlargements = 4;

ExactRatio ratio(const BigInt& num, const BigInt& den) {
  ExactRatio r(num, den);
  r.canonicalize();
  return r;
}

BigInt pow_u(u64 p, unsigned a) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), p, a);
  return r;
}

// max over t <= tau <= 6 of the exact ratios.
ExactRatio exact_max(const BTable& table, unsigned t) {
  ExactRatio m = table.exact(t);
  for (unsigned tau = t + 1; tau <= 6; ++tau) m = std::max(m, table.exact(tau));
  return m;
}

const WorkerPool& pool_or_serial(const WorkerPool* pool) {
  return pool ? *pool : WorkerPool::serial();
}

// Per-class data for the first `count` members: certified prefix sums of
// log f, and double prefix sums of log f and of 2 log p.
struct ClassTables {
  std::vector<u64> primes;
  std::vector<CR> log_f;
  std::vector<double> log_f_d;
  std::vector<double> log_p2_d;
};

ClassTables class_tables(PrimeClass c, unsigned count, long prec) {
  ClassTables t;
  t.primes = classed_primes(c, count);
  t.log_f.push_back(CR::from_int(0, prec));
  t.log_f_d.push_back(0);
  t.log_p2_d.push_back(0);
  for (u64 p : t.primes) {
    t.log_f.push_back(t.log_f.back() + log(f_ratio(p, prec)));
    t.log_f_d.push_back(t.log_f.back().mid());
    t.log_p2_d.push_back(t.log_p2_d.back() + 2 * std::log(static_cast<double>(p)));
  }
  return t;
}

BigInt objective_of(const ClassCounts& c, const ClassTables& t2, const ClassTables& t4,
                    const ClassTables& t8) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, c.weight());
  const auto mul = [&r](const ClassTables& t, unsigned k) {
    for (unsigned i = 0; i < k; ++i) r *= pow_u(t.primes[i], 2);
  };
  mul(t2, c.t2);
  mul(t4, c.t4);
  mul(t8, c.t8);
  return r;
}

bool lex_less(const ClassCounts& a, const ClassCounts& b) {
  return std::tie(a.t2, a.t4, a.t8) < std::tie(b.t2, b.t4, b.t8);
}

CR log10_of(const BigInt& v, long prec) {
  const long wp = prec + 64;
  return (log(CR::from_bigint(v, wp)) / log(CR::from_int(10, wp))).rounded(prec);
}

}  // namespace

const ExactRatio& BTable::exact(unsigned tau) const {
  if (tau < 1 || tau > exact_ratios.size()) {
    throw UsageError("BTable: exact ratios cover tau = 1..6");
  }
  return exact_ratios[tau - 1];
}

CertifiedReal BTable::tail_bound(unsigned tau, long precision_bits) {
  const CR exponent =
      CR::from_rational(mpq_class(2 - static_cast<long>(tau), 2), precision_bits);
  return CR::from_int(1, precision_bits) + exp(CR::log2(precision_bits) * exponent);
}

BTable b_table() {
  BTable t;
  const auto& sigma = function_by_id("sigma_e_inf");
  for (unsigned tau = 1; tau <= 6; ++tau) {
    t.exact_ratios.push_back(ratio(sigma.at_prime_power(BigInt(2), tau), pow_u(2, tau)));
  }
  return t;
}

CertifiedReal b_upper(unsigned t, long precision_bits) {
  if (t == 0) throw UsageError("b_upper: t must be >= 1");
  if (t > 6) return BTable::tail_bound(t, precision_bits);
  const CR m = CR::from_rational(exact_max(b_table(), t), precision_bits);
  const CR tail = BTable::tail_bound(7, precision_bits);
  return certainly_less(tail, m) ? m : m.hull(tail);
}

ExactRatio b_upper_exact(unsigned t) {
  if (t == 0 || t > 6) throw UsageError("b_upper_exact: t must lie in 1..6");
  const ExactRatio m = exact_max(b_table(), t);
  if (!certainly_less(BTable::tail_bound(7), CR::from_rational(m))) {
    throw PrecisionError("b_upper_exact: tail bound not separated from exact ratios");
  }
  return m;
}

LemmaAudit lemma_audit(std::uint64_t prime_limit, unsigned a_max, unsigned t_max) {
  LemmaAudit audit;
  const auto& sigma = function_by_id("sigma_e_inf");
  for (u64 p : sieve_primes(prime_limit)) {
    const BigInt bp = to_bigint(p);
    for (unsigned a = 3; a <= a_max; ++a) {
      const BigInt s = sigma.at_prime_power(bp, a);
      const BigInt pa = pow_u(p, a);
      // s / p^a <= 1 + p^-2
      ++audit.checks;
      if (s * bp * bp > pa * (bp * bp + 1)) ++audit.failures;
      if (a >= 6) {
        // s / p^a <= 1 + 2 p^(-a/2)  <=>  (s - p^a)^2 <= 4 p^a
        ++audit.checks;
        const BigInt excess = s - pa;
        if (excess * excess > 4 * pa) ++audit.failures;
      }
    }
  }
  audit.b_monotone = true;
  for (unsigned t = 3; t < t_max; ++t) {
    if (!certainly_less_equal(b_upper(t + 1), b_upper(t))) audit.b_monotone = false;
  }
  return audit;
}

ExactRatio f_ratio_exact(std::uint64_t p) {
  if (p < 5 || !is_prime_u64(p)) throw UsageError("f_ratio: p must be a prime >= 5");
  const BigInt bp = to_bigint(p);
  return ratio(bp * (bp + 1), bp * bp + 1);
}

CertifiedReal f_ratio(std::uint64_t p, long precision_bits) {
  return CR::from_rational(f_ratio_exact(p), precision_bits);
}

std::string to_string(ThresholdVariant v) {
  return v == ThresholdVariant::base ? "base" : "refined";
}

ThresholdVariant parse_threshold_variant(const std::string& text) {
  std::string s = text;
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "base") return ThresholdVariant::base;
  if (s == "refined") return ThresholdVariant::refined;
  throw UsageError("unknown threshold variant '" + text + "' (expected base or refined)");
}

CertifiedReal threshold(ThresholdVariant v, long precision_bits) {
  const CR pi = CR::pi(precision_bits);
  CR t = CR::from_int(10, precision_bits) * pi * pi / CR::from_int(54, precision_bits);
  if (v == ThresholdVariant::refined) t *= CR::from_rational(mpq_class(530, 529), precision_bits);
  return t;
}

OptimizerResult solve(ThresholdVariant variant, const OptimizerOptions& options) {
  const long prec = options.precision_bits;
  const long wp = prec + 64;
  const CR thr = options.threshold_override
                     ? CR::from_rational(*options.threshold_override, wp)
                     : threshold(variant, wp);
  if (!certainly_positive(thr)) throw UsageError("optimizer threshold must be positive");
  const CR log_thr = log(thr);
  const double log_thr_d = log_thr.mid();
  const double log2_d = std::log(2.0);

  OptimizerResult res;
  res.variant = variant;
  ClassCounts box = options.box;
  for (;; ++res.enlargements) {
    if (res.enlargements > kMaxEnlargements) {
      throw CapacityError("optimizer search box could not be certified sufficient");
    }
    const ClassTables c2 = class_tables(PrimeClass::P2, box.t2 + 1, wp);
    const ClassTables c4 = class_tables(PrimeClass::P4, box.t4 + 1, wp);
    const ClassTables c8 = class_tables(PrimeClass::P8, box.t8 + 1, wp);
    const unsigned w_max = box.weight();
    std::vector<CR> log_b(w_max + 1);
    std::vector<double> log_b_d(w_max + 1, 0);
    for (unsigned w = 1; w <= w_max; ++w) {
      log_b[w] = log(b_upper(w, wp));
      log_b_d[w] = log_b[w].mid();
    }

    const std::size_t n2 = box.t2 + 1, n4 = box.t4 + 1;
    const auto index = [&](unsigned t2, unsigned t4, unsigned t8) {
      return (static_cast<std::size_t>(t8) * n4 + t4) * n2 + t2;
    };
    std::vector<std::uint8_t> feasible(index(0, 0, box.t8 + 1), 0);
    pool_or_serial(options.pool).run(box.t8 + 1, [&](std::size_t t8i) {
      const unsigned t8 = static_cast<unsigned>(t8i);
      for (unsigned t4 = 0; t4 <= box.t4; ++t4) {
        for (unsigned t2 = 0; t2 <= box.t2; ++t2) {
          const unsigned w = ClassCounts{t2, t4, t8}.weight();
          const double d = log_b_d[w] + c2.log_f_d[t2] + c4.log_f_d[t4] + c8.log_f_d[t8] - log_thr_d;
          bool ok;
          if (d > kMargin) {
            ok = true;
          } else if (d < -kMargin) {
            ok = false;
          } else {
            const CR rhs = log_b[w] + c2.log_f[t2] + c4.log_f[t4] + c8.log_f[t8];
            if (certainly_less(rhs, log_thr)) {
              ok = false;
            } else if (certainly_less_equal(log_thr, rhs)) {
              ok = true;
            } else {
              throw PrecisionError("optimizer: feasibility undecided at (" + std::to_string(t2) +
                                   "," + std::to_string(t4) + "," + std::to_string(t8) + ")");
            }
          }
          feasible[index(t2, t4, t8)] = ok;
        }
      }
    });

    const auto log_obj = [&](const ClassCounts& c) {
      return c.weight() * log2_d + c2.log_p2_d[c.t2] + c4.log_p2_d[c.t4] + c8.log_p2_d[c.t8];
    };
    // Exact minimisation over a candidate list: doubles shortlist, integers decide.
    const auto exact_best = [&](const std::vector<ClassCounts>& cands) {
      double best_d = std::numeric_limits<double>::infinity();
      for (const auto& c : cands) best_d = std::min(best_d, log_obj(c));
      std::optional<std::pair<ClassCounts, BigInt>> best;
      for (const auto& c : cands) {
        if (log_obj(c) > best_d + kMargin) continue;
        BigInt v = objective_of(c, c2, c4, c8);
        if (!best || v < best->second || (v == best->second && lex_less(c, best->first))) {
          best.emplace(c, std::move(v));
        }
      }
      return best;
    };

    std::vector<ClassCounts> all_feasible, pruned;
    res.feasible_count = 0;
    res.frontier_size = 0;
    double best_any = std::numeric_limits<double>::infinity();
    for (unsigned t8 = 0; t8 <= box.t8; ++t8) {
      for (unsigned t4 = 0; t4 <= box.t4; ++t4) {
        bool first = true;
        for (unsigned t2 = 0; t2 <= box.t2; ++t2) {
          if (!feasible[index(t2, t4, t8)]) continue;
          ++res.feasible_count;
          const ClassCounts c{t2, t4, t8};
          if (first) {
            pruned.push_back(c);
            first = false;
          }
          const bool minimal = (t2 == 0 || !feasible[index(t2 - 1, t4, t8)]) &&
                               (t4 == 0 || !feasible[index(t2, t4 - 1, t8)]) &&
                               (t8 == 0 || !feasible[index(t2, t4, t8 - 1)]);
          if (minimal) ++res.frontier_size;
          const double lo = log_obj(c);
          if (lo <= best_any + kMargin) {
            best_any = std::min(best_any, lo);
            all_feasible.push_back(c);
          }
        }
      }
    }
    if (all_feasible.empty()) {
      // Nothing feasible: the box is too small, or the problem is empty.
      box = ClassCounts{box.t2 * 2 + 1, box.t4 * 2 + 1, box.t8 * 2 + 1};
      continue;
    }
    const auto best = exact_best(all_feasible);
    const auto best_pruned = exact_best(pruned);
    res.counts = best->first;
    res.objective = best->second;
    res.pruned_search_agrees = best_pruned && best_pruned->first == res.counts;
    res.box = box;

    // Smallest objective with one count beyond the box.
    const double best_log = log_obj(res.counts);
    const bool ok2 = log_obj({box.t2 + 1, 0, 0}) > best_log + kMargin;
    const bool ok4 = log_obj({0, box.t4 + 1, 0}) > best_log + kMargin;
    const bool ok8 = log_obj({0, 0, box.t8 + 1}) > best_log + kMargin;
    if (ok2 && ok4 && ok8) {
      res.box_sufficient = true;
      break;
    }
    box = ClassCounts{ok2 ? box.t2 : box.t2 * 2, ok4 ? box.t4 : box.t4 * 2,
                      ok8 ? box.t8 : box.t8 * 2};
  }
  res.log10_bound = log10_of(res.objective, prec);
  return res;
}

FinalBound final_bound(const OptimizerOptions& options) {
  FinalBound fb;
  fb.base = solve(ThresholdVariant::base, options);
  fb.refined = solve(ThresholdVariant::refined, options);
  const long prec = options.precision_bits;
  BigInt factor = BigInt(5 * 11 * 17 * 23);
  factor = factor * factor * factor * 16;
  fb.case_b_increment = log10_of(factor, prec);
  fb.case_b = fb.base.log10_bound + fb.case_b_increment;
  fb.log10_bound = fb.refined.log10_bound.min_with(fb.case_b);
  fb.case_b_is_min = certainly_less(fb.case_b, fb.refined.log10_bound);
  return fb;
}

}  // namespace moddiv
