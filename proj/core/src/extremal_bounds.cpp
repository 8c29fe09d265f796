#include "moddiv/extremal_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

#include "moddiv/error.hpp"
#include "moddiv/euler_products.hpp"
#include "moddiv/multiplicative.hpp"
#include "moddiv/summatory.hpp"

namespace moddiv {

namespace {

using u64 = std::uint64_t;
using CR = CertifiedReal;

const WorkerPool& pool_or_serial(const WorkerPool* pool) {
  return pool ? *pool : WorkerPool::serial();
}

CR cr_u64(u64 v, long prec) { return CR::from_bigint(to_bigint(v), prec); }

// Accumulates log of a product of primes, taking one logarithm per ~16k
// bits of exact product.
class LogProduct {
 public:
  explicit LogProduct(long prec) : prec_(prec), sum_(CR::from_int(0, prec)) {}

  void add(u64 p) {
    product_ *= to_bigint(p);
    if (mpz_sizeinbase(product_.get_mpz_t(), 2) > (1u << 14)) flush();
  }
  CR value() {
    flush();
    return sum_;
  }

 private:
  void flush() {
    if (product_ == 1) return;
    sum_ += log(CR::from_bigint(product_, prec_));
    product_ = 1;
  }

  long prec_;
  CR sum_;
  BigInt product_ = 1;
};

// Decides x >= t, x < t, or throws when undecidable.
bool certainly_at_least(const CR& x, const CR& t, const char* what) {
  if (certainly_less_equal(t, x)) return true;
  if (certainly_less(x, t)) return false;
  throw PrecisionError(std::string(what) + ": comparison undecided at this precision");
}

// Outward rounding onto the binary grid of the reported precision: a
// recomputation at higher internal precision lands in the same grid cell.
CR reporting_guard(const CR& x, long bits) { return x.rounded(bits); }

// f^(e)(p^a) / p^a as a double.
double frak_ratio_double(u64 p, unsigned a) {
  double total = 0;
  for (u64 d : divisors_of(a)) {
    const int mu = mobius_of(a / d);
    if (mu) total += mu * std::pow(static_cast<double>(p), static_cast<double>(d) - a);
  }
  return total;
}

}  // namespace

ExplicitBoundConfig ExplicitBoundConfig::standard(long precision_bits) {
  ExplicitBoundConfig c;
  c.precision_bits = precision_bits;
  c.gamma_const = CR::euler_gamma(precision_bits);
  c.mertens_B = mertens_constant(precision_bits);
  c.c_cubic = CR::from_int(8, precision_bits) * CR::log2(precision_bits) -
              CR::from_int(5, precision_bits);
  return c;
}

CertifiedReal ExplicitBoundConfig::threshold() const {
  return CR::from_rational(C, precision_bits) * exp(-gamma_const);
}

SigmaSupReport verify_sigma_sup(std::uint64_t grid_last, const WorkerPool* pool) {
  if (grid_last < 8) throw UsageError("sigma-sup grid must extend past 7");
  const long prec = kDefaultPrecisionBits;
  SigmaSupReport r;
  for (u64 n = 1; n <= 6; ++n) {
    r.small_values.push_back(log(cr_u64(sigma_of(n), prec)) / cr_u64(n, prec));
  }
  for (unsigned i = 0; i < 6; ++i) {
    bool dominates = true;
    for (unsigned j = 0; j < 6; ++j) {
      if (j != i && !certainly_less(r.small_values[j], r.small_values[i])) dominates = false;
    }
    if (dominates) r.argmax = i + 1;
  }
  const CR log3_2 = log(CR::from_int(3, prec)) / CR::from_int(2, prec);
  r.max_is_log3_over_2 = r.argmax != 0 && r.small_values[r.argmax - 1].overlaps(log3_2) &&
                         r.small_values[r.argmax - 1].width() < 1e-30;

  const long gprec = 96;
  const CR log259 = log(CR::from_rational(mpq_class(259, 100), gprec));
  const auto g = [&](u64 n) {
    const CR x = cr_u64(n, gprec);
    const CR ln = log(x);
    return (log259 + ln + log(log(ln))) / x;
  };
  r.g7 = g(7);
  r.g7_below_log3_over_2 = certainly_less(r.g7, log3_2);

  r.grid_last = grid_last;
  const u64 chunk = 1 << 14;
  const u64 count = grid_last - 7;  // comparisons g(n+1) < g(n), n = 7..grid_last-1
  const u64 chunks = (count + chunk - 1) / chunk;
  std::vector<std::optional<u64>> first_bad(chunks);
  // Double evaluation carries a relative error far below 1e-12, while
  // consecutive values differ by a relative ~1/n >= 1e-8 on this range;
  // pairs whose double gap falls under the margin are decided by intervals.
  const double log259_d = std::log(2.59);
  const auto gd = [&](u64 n) {
    const double x = static_cast<double>(n);
    const double ln = std::log(x);
    return (log259_d + ln + std::log(std::log(ln))) / x;
  };
  constexpr double kMargin = 1e-12;
  pool_or_serial(pool).run(chunks, [&](std::size_t c) {
    const u64 lo = 7 + c * chunk;
    const u64 hi = std::min(grid_last - 1, lo + chunk - 1);
    double prev = gd(lo);
    for (u64 n = lo; n <= hi; ++n) {
      const double next = gd(n + 1);
      if (next >= prev * (1 - kMargin) && !certainly_less(g(n + 1), g(n))) {
        first_bad[c] = n;
        return;
      }
      prev = next;
    }
  });
  for (const auto& b : first_bad) {
    if (b) {
      r.first_non_decrease = b;
      break;
    }
  }
  r.decreasing = !r.first_non_decrease;
  return r;
}

std::vector<RecordPoint> esigma_record_curve(const std::vector<std::uint64_t>& xs,
                                             long precision_bits) {
  if (xs.empty()) return {};
  std::vector<u64> order = xs;
  std::sort(order.begin(), order.end());
  if (order.front() < 2) throw UsageError("record curve needs x >= 2");
  if (order.back() > 1'000'000) throw CapacityError("record curve limited to x <= 10^6");
  const long prec = precision_bits;
  const auto primes = sieve_primes(order.back());
  LogProduct theta(prec);
  std::size_t idx = 0;
  std::vector<RecordPoint> sorted_points;
  const CR log3 = log(CR::from_int(3, prec));
  for (u64 x : order) {
    while (idx < primes.size() && primes[idx] <= x) theta.add(primes[idx++]);
    const CR log_n = CR::from_int(2, prec) * theta.value();
    RecordPoint pt;
    pt.x = x;
    pt.prime_count = idx;
    pt.R = cr_u64(idx, prec) * log3 * log(log_n) / log_n;
    sorted_points.push_back(pt);
  }
  std::vector<RecordPoint> out;
  for (u64 x : xs) {
    out.push_back(*std::find_if(sorted_points.begin(), sorted_points.end(),
                                [x](const RecordPoint& p) { return p.x == x; }));
  }
  return out;
}

ProofConstants mertens_proof_constants(const ExplicitBoundConfig& config,
                                       std::uint64_t head_limit, std::size_t grid_points) {
  if (grid_points < 2) throw UsageError("identity grid needs at least 2 points");
  const long prec = config.precision_bits + 64;
  const CR c = CR::from_int(8, prec) * CR::log2(prec) - CR::from_int(5, prec);
  const CR two = CR::from_int(2, prec);
  const CR p2 = prime_zeta(2, prec, head_limit);
  const CR p3 = prime_zeta(3, prec, head_limit);
  ProofConstants out;
  out.C1 = exp(-(p2 / two) - c * p3);
  const CR B = mertens_constant(prec);
  const CR L = log(cr_u64(config.x0, prec));
  out.C2 = exp(-B - CR::from_int(1, prec) / (CR::from_int(10, prec) * pow(L, 2)) -
               CR::from_int(4, prec) / (CR::from_int(15, prec) * pow(L, 3)));
  out.ratio = out.C1 * out.C2 / exp(-CR::euler_gamma(prec));
  out.C1 = reporting_guard(out.C1, config.precision_bits);
  out.C2 = reporting_guard(out.C2, config.precision_bits);
  out.ratio = reporting_guard(out.ratio, config.precision_bits);

  bool ok = true;
  const auto lhs = [&](const mpq_class& yq) {
    const CR y = CR::from_rational(yq, prec);
    return exp(-y - y * y / two - c * y * y * y);
  };
  for (std::size_t i = 1; i < grid_points && ok; ++i) {
    const mpq_class y(static_cast<unsigned long>(i), 2 * static_cast<unsigned long>(grid_points));
    ok = certainly_less_equal(lhs(y), CR::from_rational(1 - y, prec));
  }
  // Equality at both ends: the interval must contain the common value.
  ok = ok && lhs(mpq_class(0)).contains(mpq_class(1)) &&
       lhs(mpq_class(1, 2)).contains(mpq_class(1, 2));
  out.identity_holds = ok;
  out.grid_points = grid_points;
  return out;
}

PrefixReport phie_prefix_verification(const ExplicitBoundConfig& config, std::uint64_t limit,
                                      std::uint64_t chunk_size, const WorkerPool* pool) {
  if (limit < 2) throw UsageError("prefix verification needs limit >= 2");
  if (chunk_size == 0) throw UsageError("chunk size must be >= 1");
  const long prec = config.precision_bits;
  const auto primes = sieve_primes(limit);
  const std::size_t n = primes.size();
  const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
  const CR one = CR::from_int(1, prec);
  const CR thr = config.threshold();

  // Pass 1: per-chunk totals of prod (1 - 1/p) and theta.
  std::vector<CR> chunk_prod(chunks, one), chunk_theta(chunks, CR::from_int(0, prec));
  const WorkerPool& workers = pool_or_serial(pool);
  workers.run(chunks, [&](std::size_t c) {
    const std::size_t lo = c * chunk_size, hi = std::min(n, lo + chunk_size);
    CR prod = one;
    LogProduct theta(prec);
    for (std::size_t i = lo; i < hi; ++i) {
      prod *= CR::from_rational(mpq_class(primes[i] - 1, primes[i]), prec);
      theta.add(primes[i]);
    }
    chunk_prod[c] = prod;
    chunk_theta[c] = theta.value();
  });
  std::vector<CR> start_prod(chunks, one), start_theta(chunks, CR::from_int(0, prec));
  for (std::size_t c = 1; c < chunks; ++c) {
    start_prod[c] = start_prod[c - 1] * chunk_prod[c - 1];
    start_theta[c] = start_theta[c - 1] + chunk_theta[c - 1];
  }

  // Pass 2: every prefix point.
  struct ChunkOut {
    std::vector<u64> failures;
    double min_margin = std::numeric_limits<double>::infinity();
    u64 min_at = 0;
    std::optional<CR> f_last;
  };
  std::vector<ChunkOut> outs(chunks);
  const CR two = CR::from_int(2, prec);
  workers.run(chunks, [&](std::size_t c) {
    const std::size_t lo = c * chunk_size, hi = std::min(n, lo + chunk_size);
    CR prod = start_prod[c];
    CR theta = start_theta[c];
    ChunkOut& o = outs[c];
    for (std::size_t i = lo; i < hi; ++i) {
      const u64 p = primes[i];
      prod *= CR::from_rational(mpq_class(p - 1, p), prec);
      theta += log(cr_u64(p, prec));
      const CR f = prod * log(two * theta);
      if (!certainly_at_least(f, thr, "prefix verification")) {
        o.failures.push_back(p);
      } else if (p >= 11) {
        const double m = (f - thr).lo();
        if (m < o.min_margin) {
          o.min_margin = m;
          o.min_at = p;
        }
      }
      if (i + 1 == n) o.f_last = f;
    }
  });

  PrefixReport r;
  r.primes_checked = n;
  r.last_prime = n ? primes.back() : 0;
  r.min_margin_from_11 = std::numeric_limits<double>::infinity();
  for (auto& o : outs) {
    r.failures.insert(r.failures.end(), o.failures.begin(), o.failures.end());
    if (o.min_margin < r.min_margin_from_11) {
      r.min_margin_from_11 = o.min_margin;
      r.min_margin_at = o.min_at;
    }
    if (o.f_last) {
      r.f_last = *o.f_last;
      r.margin_last = *o.f_last - thr;
    }
  }
  return r;
}

CertifiedReal phie_ratio(const Factorization& n, long precision_bits) {
  if (n.value() < 2) throw UsageError("f(n) needs n >= 2");
  const BigInt frak = function_by_id("frak_f_e")(n);
  const CR ratio = CR::from_rational(mpq_class(frak, n.value()), precision_bits);
  return ratio * log(log(CR::from_bigint(n.value(), precision_bits)));
}

std::vector<SquarefullException> squarefull_exception_scan(const ExplicitBoundConfig& config,
                                                           std::uint64_t limit, unsigned s_max) {
  const CR thr = config.threshold();
  const double thr_d = thr.mid();
  std::vector<SquarefullException> out;
  SquarefullEnumerator(limit).visit_all([&](const SquarefullVisit& v) {
    const unsigned s = static_cast<unsigned>(v.factors.size());
    if (s > s_max) return;
    double ratio = 1;
    for (auto [p, a] : v.factors) ratio *= frak_ratio_double(p, a);
    double f = ratio * std::log(std::log(static_cast<double>(v.value)));
    bool below;
    if (std::fabs(f - thr_d) > 1e-9 * thr_d) {
      below = f < thr_d;
    } else {
      const CR fc = phie_ratio(Factorization::from_small(v.factors), config.precision_bits);
      below = !certainly_at_least(fc, thr, "square-full scan");
      f = fc.mid();
    }
    if (below) out.push_back({v.value, s, f});
  });
  std::sort(out.begin(), out.end(),
            [](const SquarefullException& a, const SquarefullException& b) { return a.k < b.k; });
  return out;
}

SuspiciousReport suspicious_set_check(const ExplicitBoundConfig& config,
                                      const std::vector<std::uint64_t>& exceptions,
                                      std::uint64_t audit_limit, const WorkerPool* pool) {
  const CR thr = config.threshold();
  const double thr_d = thr.mid();
  SuspiciousReport r;
  for (u64 k : exceptions) {
    for (u64 l : {1, 2, 3, 5}) {
      if (std::gcd(k, l) != 1) continue;
      const u64 n = k * l;
      const CR f = phie_ratio(factorize_u64(n), config.precision_bits);
      const bool below = !certainly_at_least(f, thr, "suspicious set");
      r.set.push_back({n, k, l, f.mid(), below});
    }
  }
  std::sort(r.set.begin(), r.set.end(),
            [](const SuspiciousNumber& a, const SuspiciousNumber& b) { return a.n < b.n; });
  r.set.erase(std::unique(r.set.begin(), r.set.end(),
                          [](const SuspiciousNumber& a, const SuspiciousNumber& b) {
                            return a.n == b.n;
                          }),
              r.set.end());
  r.max = r.set.empty() ? 0 : r.set.back().n;
  r.max_within_44100 = r.max <= 44100;

  r.audit_to = audit_limit;
  r.min_margin = std::numeric_limits<double>::infinity();
  if (audit_limit > 44100) {
    BulkOptions opts;
    opts.pool = pool;
    opts.max_x = std::max<u64>(opts.max_x, audit_limit);
    bulk_evaluate(
        function_by_id("frak_f_e"), audit_limit,
        [&](u64 first, std::span<const std::int64_t> values) {
          for (std::size_t i = 0; i < values.size(); ++i) {
            const u64 n = first + i;
            if (n <= 44100) continue;
            const double x = static_cast<double>(n);
            const double f = static_cast<double>(values[i]) * std::log(std::log(x)) / x;
            double margin = f - thr_d;
            if (std::fabs(margin) <= 1e-9 * thr_d) {
              const CR fc = phie_ratio(factorize_u64(n), config.precision_bits);
              margin = certainly_at_least(fc, thr, "audit") ? (fc - thr).lo() : -1;
            }
            if (margin < 0) {
              ++r.audit_failures;
              if (!r.first_failure) r.first_failure = n;
            }
            if (margin < r.min_margin) {
              r.min_margin = margin;
              r.min_margin_at = n;
            }
          }
        },
        opts);
  }
  return r;
}

std::vector<DusartPoint> dusart_check(const ExplicitBoundConfig& config,
                                      std::vector<std::uint64_t> points, const WorkerPool* pool) {
  if (points.empty()) throw UsageError("dusart check needs at least one point");
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.front() < config.x0 || points.back() > 100'000'000) {
    throw UsageError("dusart sample points must lie in [x0, 10^8]");
  }
  const long prec = config.precision_bits;
  const auto primes = sieve_primes(points.back());
  const std::size_t block = 1 << 16;
  const std::size_t blocks = (primes.size() + block - 1) / block;

  const auto sums = [&](std::size_t lo, std::size_t hi) {
    CR recip = CR::from_int(0, prec);
    LogProduct theta(prec);
    for (std::size_t i = lo; i < hi; ++i) {
      recip += CR::from_rational(mpq_class(1UL, primes[i]), prec);
      theta.add(primes[i]);
    }
    return std::make_pair(recip, theta.value());
  };
  std::vector<std::pair<CR, CR>> block_sums(blocks);
  pool_or_serial(pool).run(blocks, [&](std::size_t b) {
    block_sums[b] = sums(b * block, std::min(primes.size(), (b + 1) * block));
  });

  std::vector<DusartPoint> out;
  for (u64 x : points) {
    const std::size_t idx =
        static_cast<std::size_t>(std::upper_bound(primes.begin(), primes.end(), x) - primes.begin());
    CR recip = CR::from_int(0, prec);
    CR theta = CR::from_int(0, prec);
    const std::size_t full = idx / block;
    for (std::size_t b = 0; b < full; ++b) {
      recip += block_sums[b].first;
      theta += block_sums[b].second;
    }
    const auto part = sums(full * block, idx);
    recip += part.first;
    theta += part.second;

    DusartPoint pt;
    pt.x = x;
    const CR X = cr_u64(x, prec);
    const CR L = log(X);
    pt.reciprocal_sum = recip;
    pt.reciprocal_bound = log(L) + config.mertens_B +
                          CR::from_int(1, prec) / (CR::from_int(10, prec) * pow(L, 2)) +
                          CR::from_int(4, prec) / (CR::from_int(15, prec) * pow(L, 3));
    pt.reciprocal_holds = certainly_less_equal(pt.reciprocal_sum, pt.reciprocal_bound);
    pt.theta = theta;
    pt.theta_bound =
        X * (CR::from_int(1, prec) - CR::from_rational(mpq_class(6788, 1000000), prec) / L);
    pt.theta_holds = certainly_less_equal(pt.theta_bound, pt.theta);
    out.push_back(pt);
  }
  return out;
}

}  // namespace moddiv
