#include "moddiv/summatory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "moddiv/error.hpp"

namespace moddiv {

namespace {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using i128 = __int128;

BigInt to_big(i128 v) {
  const bool negative = v < 0;
  unsigned __int128 m = negative ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  BigInt r = to_bigint(static_cast<u64>(m >> 64));
  r <<= 64;
  r += to_bigint(static_cast<u64>(m));
  return negative ? BigInt(-r) : r;
}

u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && static_cast<unsigned __int128>(r) * r > n) --r;
  while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Everything a chunk needs, shared read-only across workers.
class Sieve {
 public:
  Sieve(const MultiplicativeFunction& f, u64 x) : f_(f), x_(x) {
    primes_ = sieve_primes(isqrt(x));
    tables_.reserve(primes_.size());
    for (u64 p : primes_) {
      std::vector<i64> t{1};
      u64 pa = 1;
      for (unsigned a = 1; pa <= x / p; ++a) {
        pa *= p;
        t.push_back(f.at_prime_power_small(p, a));
      }
      tables_.push_back(std::move(t));
    }
    if (f.prime_independent()) {
      prime_constant_ = f.at_prime_power_small(2, 1);
    } else if (f.has_poly()) {
      for (const auto& [d, c] : f.poly(1)) {
        if (!c.fits_slong_p()) throw CapacityError(f.id() + ": coefficient exceeds 64-bit range");
        linear_terms_.emplace_back(d, c.get_si());
      }
    }
  }

  // Fills out[i] = f(first + i) for i < out.size(); rem is scratch space of
  // the same size.
  void run(u64 first, std::span<i64> out, std::span<u64> rem) const {
    const u64 last = first + out.size() - 1;
    for (std::size_t i = 0; i < out.size(); ++i) {
      rem[i] = first + i;
      out[i] = 1;
    }
    for (std::size_t k = 0; k < primes_.size(); ++k) {
      const u64 p = primes_[k];
      if (p > last / p) break;
      const auto& table = tables_[k];
      u64 m = (first + p - 1) / p * p;
      for (; m <= last; m += p) {
        const std::size_t i = m - first;
        u64 r = rem[i] / p;
        unsigned a = 1;
        while (r % p == 0) {
          r /= p;
          ++a;
        }
        rem[i] = r;
        out[i] = mul(out[i], table[a]);
      }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (rem[i] > 1) out[i] = mul(out[i], at_prime(rem[i]));
    }
  }

 private:
  i64 mul(i64 a, i64 b) const {
    i64 r;
    if (__builtin_mul_overflow(a, b, &r)) {
      throw CapacityError(f_.id() + ": value exceeds 64-bit range in bulk evaluation");
    }
    return r;
  }

  i64 at_prime(u64 q) const {
    if (prime_constant_) return *prime_constant_;
    if (linear_terms_.empty() && !f_.has_poly()) return f_.at_prime_power_small(q, 1);
    i128 v = 0;
    for (const auto& [d, c] : linear_terms_) {
      i128 term = c;
      for (unsigned j = 0; j < d; ++j) term *= static_cast<i128>(q);
      v += term;
    }
    if (v > std::numeric_limits<i64>::max() || v < std::numeric_limits<i64>::min()) {
      throw CapacityError(f_.id() + ": value exceeds 64-bit range in bulk evaluation");
    }
    return static_cast<i64>(v);
  }

  const MultiplicativeFunction& f_;
  u64 x_;
  std::vector<u64> primes_;
  std::vector<std::vector<i64>> tables_;
  std::optional<i64> prime_constant_;
  std::vector<std::pair<unsigned, i64>> linear_terms_;
};

void check_x(u64 x, const BulkOptions& options) {
  if (x > options.max_x) {
    throw CapacityError("x = " + std::to_string(x) + " exceeds the configured ceiling " +
                        std::to_string(options.max_x));
  }
  if (options.chunk_size == 0) throw UsageError("chunk size must be >= 1");
}

const WorkerPool& pool_of(const BulkOptions& options) {
  return options.pool ? *options.pool : WorkerPool::serial();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void bulk_evaluate(const MultiplicativeFunction& f, std::uint64_t x, const BulkConsumer& consumer,
                   const BulkOptions& options) {
  check_x(x, options);
  if (x == 0) return;
  const Sieve sieve(f, x);
  const WorkerPool& pool = pool_of(options);
  const u64 chunk = options.chunk_size;
  const u64 chunks = (x + chunk - 1) / chunk;
  const u64 batch = std::max<u64>(1, pool.size());
  std::vector<std::vector<i64>> values(batch);
  std::vector<std::vector<u64>> scratch(batch);
  for (u64 start = 0; start < chunks; start += batch) {
    const u64 count = std::min(batch, chunks - start);
    pool.run(count, [&](std::size_t j) {
      const u64 first = (start + j) * chunk + 1;
      const u64 len = std::min(chunk, x - first + 1);
      values[j].resize(len);
      scratch[j].resize(len);
      sieve.run(first, values[j], scratch[j]);
    });
    for (u64 j = 0; j < count; ++j) consumer((start + j) * chunk + 1, values[j]);
  }
}

std::vector<std::int64_t> bulk_values(const MultiplicativeFunction& f, std::uint64_t x,
                                      const BulkOptions& options) {
  std::vector<i64> out;
  out.reserve(x);
  bulk_evaluate(
      f, x, [&out](u64, std::span<const i64> v) { out.insert(out.end(), v.begin(), v.end()); },
      options);
  return out;
}

SummatoryReport summatory(const MultiplicativeFunction& f, std::vector<std::uint64_t> checkpoints,
                          const BulkOptions& options) {
  if (checkpoints.empty()) throw UsageError("summatory: need at least one checkpoint");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] == 0 || (i && checkpoints[i] <= checkpoints[i - 1])) {
      throw UsageError("checkpoints must be positive and strictly increasing");
    }
  }
  const u64 x = checkpoints.back();
  check_x(x, options);
  const Sieve sieve(f, x);
  const WorkerPool& pool = pool_of(options);
  const u64 chunk = options.chunk_size;
  const u64 chunks = (x + chunk - 1) / chunk;

  struct ChunkResult {
    i128 total = 0;
    std::vector<std::pair<std::size_t, i128>> partial;  // checkpoint index, sum inside chunk
  };
  std::vector<ChunkResult> results(chunks);
  pool.run(chunks, [&](std::size_t j) {
    const u64 first = j * chunk + 1;
    const u64 len = std::min(chunk, x - first + 1);
    std::vector<i64> values(len);
    std::vector<u64> scratch(len);
    sieve.run(first, values, scratch);
    auto cp = std::lower_bound(checkpoints.begin(), checkpoints.end(), first);
    ChunkResult& r = results[j];
    for (u64 i = 0; i < len; ++i) {
      r.total += values[i];
      while (cp != checkpoints.end() && *cp == first + i) {
        r.partial.emplace_back(static_cast<std::size_t>(cp - checkpoints.begin()), r.total);
        ++cp;
      }
    }
  });

  SummatoryReport report;
  report.function_id = f.id();
  report.checkpoints = std::move(checkpoints);
  report.sums.resize(report.checkpoints.size());
  BigInt running = 0;
  for (const auto& r : results) {
    for (const auto& [idx, partial] : r.partial) report.sums[idx] = running + to_big(partial);
    running += to_big(r.total);
  }
  return report;
}

SummatoryReport second_moment(const MultiplicativeFunction& f,
                              std::vector<std::uint64_t> checkpoints,
                              const BulkOptions& options) {
  return summatory(squared(f), std::move(checkpoints), options);
}

std::string MainTermSpec::describe() const {
  auto coef = [](const Coefficient& c, const char* name) {
    return c.is_fit() ? std::string(name) + "(fit)" : fmt(c.value->mid());
  };
  switch (shape) {
    case Shape::linear:
      return coef(A, "A") + "*x";
    case Shape::linear_plus_fitted:
      return coef(A, "A") + "*x + c1(fit)*x^(1/2)*log(x) + c2(fit)*x^(1/2)";
    case Shape::x_log_x:
      return coef(A, "A") + "*x*log(x) + " + coef(B, "B") + "*x";
    case Shape::quadratic:
      return coef(A, "A") + "*x^2";
  }
  return "?";
}

SummatoryReport residual_analysis(SummatoryReport report, const MainTermSpec& spec) {
  using Shape = MainTermSpec::Shape;
  struct Column {
    std::string name;
    std::optional<double> known;
    std::function<long double(long double)> basis;
  };
  const auto known = [](const Coefficient& c) -> std::optional<double> {
    if (c.is_fit()) return std::nullopt;
    return c.value->mid();
  };
  std::vector<Column> cols;
  switch (spec.shape) {
    case Shape::linear:
      cols.push_back({"A", known(spec.A), [](long double x) { return x; }});
      break;
    case Shape::linear_plus_fitted:
      cols.push_back({"A", known(spec.A), [](long double x) { return x; }});
      cols.push_back({"c1", std::nullopt, [](long double x) { return std::sqrt(x) * std::log(x); }});
      cols.push_back({"c2", std::nullopt, [](long double x) { return std::sqrt(x); }});
      break;
    case Shape::x_log_x:
      cols.push_back({"A", known(spec.A), [](long double x) { return x * std::log(x); }});
      cols.push_back({"B", known(spec.B), [](long double x) { return x; }});
      break;
    case Shape::quadratic:
      cols.push_back({"A", known(spec.A), [](long double x) { return x * x; }});
      break;
  }

  const std::size_t n = report.checkpoints.size();
  std::vector<std::size_t> unknown;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (!cols[c].known) unknown.push_back(c);
  }
  if (!unknown.empty() && n < 3) {
    throw UsageError("fitting main-term constants needs at least 3 checkpoints");
  }

  std::vector<long double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = static_cast<long double>(report.checkpoints[i]);
    ys[i] = static_cast<long double>(report.sums[i].get_d());
  }
  // Target for the fit: S minus the known part of the main term.
  std::vector<long double> target = ys;
  for (const auto& col : cols) {
    if (!col.known) continue;
    for (std::size_t i = 0; i < n; ++i) target[i] -= *col.known * col.basis(xs[i]);
  }

  std::vector<long double> coef(cols.size(), 0);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].known) coef[c] = *cols[c].known;
  }
  std::vector<long double> std_err(unknown.size(), 0);
  if (!unknown.empty()) {
    // Normal equations on unit-norm columns, solved by Gauss-Jordan
    // elimination; the inverse gives the covariance.
    const std::size_t k = unknown.size();
    std::vector<std::vector<long double>> X(n, std::vector<long double>(k));
    std::vector<long double> norm(k, 0);
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        X[i][j] = cols[unknown[j]].basis(xs[i]);
        norm[j] += X[i][j] * X[i][j];
      }
      norm[j] = std::sqrt(norm[j]);
      for (std::size_t i = 0; i < n; ++i) X[i][j] /= norm[j];
    }
    std::vector<std::vector<long double>> M(k, std::vector<long double>(2 * k + 1, 0));
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        for (std::size_t i = 0; i < n; ++i) M[a][b] += X[i][a] * X[i][b];
      }
      M[a][k + a] = 1;
      for (std::size_t i = 0; i < n; ++i) M[a][2 * k] += X[i][a] * target[i];
    }
    for (std::size_t col = 0; col < k; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < k; ++r) {
        if (std::fabs(M[r][col]) > std::fabs(M[piv][col])) piv = r;
      }
      if (std::fabs(M[piv][col]) < 1e-300L) throw UsageError("main-term fit is singular");
      std::swap(M[col], M[piv]);
      const long double d = M[col][col];
      for (auto& v : M[col]) v /= d;
      for (std::size_t r = 0; r < k; ++r) {
        if (r == col) continue;
        const long double factor = M[r][col];
        for (std::size_t c = 0; c <= 2 * k; ++c) M[r][c] -= factor * M[col][c];
      }
    }
    long double rss = 0;
    std::vector<long double> beta(k);
    for (std::size_t j = 0; j < k; ++j) beta[j] = M[j][2 * k];
    for (std::size_t i = 0; i < n; ++i) {
      long double fit = 0;
      for (std::size_t j = 0; j < k; ++j) fit += X[i][j] * beta[j];
      rss += (target[i] - fit) * (target[i] - fit);
    }
    const long double s2 = n > k ? rss / static_cast<long double>(n - k)
                                 : std::numeric_limits<long double>::quiet_NaN();
    for (std::size_t j = 0; j < k; ++j) {
      coef[unknown[j]] = beta[j] / norm[j];
      std_err[j] = std::sqrt(s2 * M[j][k + j]) / norm[j];
    }
  }

  report.main_term = spec.describe();
  report.main.assign(n, 0);
  report.residual.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    long double m = 0;
    for (std::size_t c = 0; c < cols.size(); ++c) m += coef[c] * cols[c].basis(xs[i]);
    report.main[i] = static_cast<double>(m);
    // Residual against the exact sum, so an exact main term leaves 0.
    const mpq_class exact_s(report.sums[i]);
    const mpq_class main_q(static_cast<double>(m));
    report.residual[i] = mpq_class(exact_s - main_q).get_d();
  }
  report.fitted.clear();
  for (std::size_t j = 0; j < unknown.size(); ++j) {
    report.fitted.push_back({cols[unknown[j]].name, static_cast<double>(coef[unknown[j]]),
                             static_cast<double>(std_err[j])});
  }

  // Slope of log|residual| over checkpoints in [X/10, X].
  report.fitted_exponent.reset();
  std::vector<std::pair<double, double>> pts;
  const double top = static_cast<double>(report.checkpoints.back());
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(report.checkpoints[i]);
    if (x >= top / 10 && report.residual[i] != 0) {
      pts.emplace_back(std::log(x), std::log(std::fabs(report.residual[i])));
    }
  }
  if (pts.size() >= 2) {
    double mx = 0, my = 0;
    for (auto [a, b] : pts) {
      mx += a;
      my += b;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxy = 0, sxx = 0;
    for (auto [a, b] : pts) {
      sxy += (a - mx) * (b - my);
      sxx += (a - mx) * (a - mx);
    }
    if (sxx > 0) report.fitted_exponent = sxy / sxx;
  }
  return report;
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t first, std::uint64_t last,
                                                 std::size_t count) {
  if (first == 0 || last <= first || count < 2) {
    throw UsageError("geometric checkpoints need 1 <= A < B and at least 2 points");
  }
  std::vector<u64> out;
  const long double ratio = std::log(static_cast<long double>(last) / first);
  for (std::size_t i = 0; i < count; ++i) {
    u64 v;
    if (i == 0) {
      v = first;
    } else if (i + 1 == count) {
      v = last;
    } else {
      v = static_cast<u64>(std::llround(first * std::exp(ratio * i / (count - 1))));
    }
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

std::vector<std::uint64_t> parse_checkpoints(std::string_view text) {
  const std::string s(text);
  std::vector<u64> out;
  if (s.rfind("pow10:", 0) == 0) {
    const std::string range = s.substr(6);
    const auto dots = range.find("..");
    if (dots == std::string::npos) throw UsageError("expected pow10:A..B");
    const u64 a = parse_u64(range.substr(0, dots));
    const u64 b = parse_u64(range.substr(dots + 2));
    if (a > b || b > 19) throw UsageError("pow10 exponents must satisfy A <= B <= 19");
    u64 v = 1;
    for (u64 e = 0; e <= b; ++e) {
      if (e >= a) out.push_back(v);
      if (e < b) v *= 10;
    }
    return out;
  }
  if (s.rfind("geom:", 0) == 0) {
    const std::string rest = s.substr(5);
    const auto dots = rest.find("..");
    const auto colon = rest.rfind(':');
    if (dots == std::string::npos || colon == std::string::npos || colon < dots) {
      throw UsageError("expected geom:A..B:k");
    }
    const u64 a = parse_u64(rest.substr(0, dots));
    const u64 b = parse_u64(rest.substr(dots + 2, colon - dots - 2));
    const u64 k = parse_u64(rest.substr(colon + 1));
    return geometric_checkpoints(a, b, k);
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw UsageError("empty checkpoint in list");
    const u64 v = parse_u64(item);
    if (v == 0 || (!out.empty() && v <= out.back())) {
      throw UsageError("checkpoints must be positive and strictly increasing");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("no checkpoints given");
  return out;
}

std::string report_csv(const SummatoryReport& report) {
  std::ostringstream os;
  os << "x,S,main,residual\n";
  for (std::size_t i = 0; i < report.checkpoints.size(); ++i) {
    os << report.checkpoints[i] << ',' << report.sums[i].get_str() << ',';
    if (i < report.main.size()) os << fmt(report.main[i]) << ',' << fmt(report.residual[i]);
    else os << ',';
    os << '\n';
  }
  return os.str();
}

}  // namespace moddiv
