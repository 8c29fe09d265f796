#include "moddiv/arithmetic_core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "moddiv/error.hpp"

namespace moddiv {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 isqrt_u64(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && (u128)r * r > n) --r;
  while ((u128)(r + 1) * (r + 1) <= n) ++r;
  return r;
}

u64 icbrt_u64(u64 n) {
  u64 r = static_cast<u64>(std::cbrt(static_cast<long double>(n)));
  while (r > 0 && (u128)r * r * r > n) --r;
  while ((u128)(r + 1) * (r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Plain sieve of Eratosthenes for the base primes of a segmented sieve.
std::vector<u64> small_primes(u64 limit) {
  std::vector<u64> out;
  if (limit < 2) return out;
  std::vector<bool> composite(limit + 1, false);
  for (u64 i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

// Primes in [lo, hi] (inclusive), ascending.
void sieve_range(u64 lo, u64 hi, u64 segment_size, const std::vector<u64>& base,
                 const std::function<void(std::span<const u64>)>& consumer) {
  if (hi < 2 || lo > hi) return;
  lo = std::max<u64>(lo, 2);
  segment_size = std::max<u64>(segment_size, 1024);
  std::vector<unsigned char> composite;
  std::vector<u64> found;
  for (u64 seg_lo = lo; seg_lo <= hi;) {
    const u64 seg_hi = std::min(hi, seg_lo + segment_size - 1);
    composite.assign(seg_hi - seg_lo + 1, 0);
    for (u64 p : base) {
      if (p * p > seg_hi) break;
      u64 start = std::max(p * p, (seg_lo + p - 1) / p * p);
      for (u64 m = start; m <= seg_hi; m += p) composite[m - seg_lo] = 1;
    }
    found.clear();
    for (u64 v = seg_lo; v <= seg_hi; ++v) {
      if (!composite[v - seg_lo]) found.push_back(v);
    }
    if (!found.empty()) consumer(found);
    if (seg_hi == hi) break;
    seg_lo = seg_hi + 1;
  }
}

u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>((u128)a * b % m); }

u64 pow_mod(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, b, m);
    b = mul_mod(b, b, m);
    e >>= 1;
  }
  return r;
}

constexpr u64 kTrialBound = 1 << 16;

const std::vector<u64>& trial_primes() {
  static const std::vector<u64> primes = small_primes(kTrialBound);
  return primes;
}

// Pollard-Brent on 64-bit words. Returns a nontrivial factor of the odd
// composite n, or 0 when the seed schedule is exhausted.
u64 rho_u64(u64 n) {
  for (u64 c = 1; c < 200; ++c) {
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    const u64 m = 128;
    auto f = [&](u64 v) { return static_cast<u64>(((u128)v * v + c) % n); };
    for (u64 r = 1; g == 1; r <<= 1) {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      for (u64 k = 0; k < r && g == 1; k += m) {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
      }
      if (r > (u64{1} << 40)) break;
    }
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n && g != 1) return g;
  }
  return 0;
}

BigInt rho_big(const BigInt& n) {
  for (unsigned long c = 1; c < 200; ++c) {
    BigInt y = 2, x = 2, g = 1, q = 1, ys = 2, diff;
    const unsigned long m = 128;
    auto f = [&](BigInt& v) {
      v = v * v + c;
      mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    };
    for (unsigned long r = 1; g == 1; r <<= 1) {
      x = y;
      for (unsigned long i = 0; i < r; ++i) f(y);
      for (unsigned long k = 0; k < r && g == 1; k += m) {
        ys = y;
        for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
          f(y);
          diff = abs(x - y);
          q = q * diff;
          mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      }
      if (r > (1ul << 34)) break;
    }
    if (g == n) {
      do {
        f(ys);
        diff = abs(x - ys);
        mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n && g != 1) return g;
  }
  return 0;
}

// Returns (root, k) with root^k == n and k maximal, or (n, 1).
std::pair<BigInt, unsigned> perfect_power(const BigInt& n) {
  const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
  for (unsigned long k = bits; k >= 2; --k) {
    BigInt root;
    if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k) != 0 && root > 1) {
      return {root, static_cast<unsigned>(k)};
    }
  }
  return {n, 1};
}

void split_composite(const BigInt& n, unsigned multiplicity,
                     std::map<BigInt, unsigned>& acc) {
  if (n == 1) return;
  if (is_probable_prime(n)) {
    acc[n] += multiplicity;
    return;
  }
  auto [root, k] = perfect_power(n);
  if (k > 1) {
    split_composite(root, multiplicity * k, acc);
    return;
  }
  BigInt d;
  if (mpz_fits_ulong_p(n.get_mpz_t())) {
    d = to_bigint(rho_u64(n.get_ui()));
  } else {
    d = rho_big(n);
  }
  if (d == 0) {
    throw IncompleteFactorization("Pollard rho failed to split cofactor", n.get_str());
  }
  split_composite(d, multiplicity, acc);
  split_composite(BigInt(n / d), multiplicity, acc);
}

}  // namespace

// ---------------------------------------------------------------------------

BigInt to_bigint(std::uint64_t v) {
  BigInt r;
  mpz_import(r.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return r;
}

std::uint64_t to_u64(const BigInt& v) {
  if (v < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 64) {
    throw CapacityError("value " + v.get_str() + " does not fit in 64 bits");
  }
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, 1, sizeof(out), 0, 0, v.get_mpz_t());
  return out;
}

BigInt parse_integer(std::string_view text) {
  const std::string s(text);
  const auto bad = [&s]() { return UsageError("not a nonnegative integer: '" + s + "'"); };
  const std::size_t e = s.find_first_of("eE");
  const std::string mantissa = s.substr(0, e);
  std::string digits;
  long scale = 0;
  bool seen_point = false;
  for (char ch : mantissa) {
    if (ch == '.' && !seen_point) {
      seen_point = true;
    } else if (ch >= '0' && ch <= '9') {
      digits.push_back(ch);
      if (seen_point) --scale;
    } else {
      throw bad();
    }
  }
  if (digits.empty()) throw bad();
  if (e != std::string::npos) {
    const std::string exp = s.substr(e + 1);
    if (exp.empty() || exp.size() > 6) throw bad();
    std::size_t i = (exp[0] == '+') ? 1 : 0;
    if (i == exp.size()) throw bad();
    for (std::size_t j = i; j < exp.size(); ++j) {
      if (exp[j] < '0' || exp[j] > '9') throw bad();
    }
    scale += std::stol(exp.substr(i));
  } else if (seen_point) {
    throw bad();
  }
  BigInt v(digits, 10);
  BigInt ten_power;
  if (scale >= 0) {
    mpz_ui_pow_ui(ten_power.get_mpz_t(), 10, static_cast<unsigned long>(scale));
    return v * ten_power;
  }
  mpz_ui_pow_ui(ten_power.get_mpz_t(), 10, static_cast<unsigned long>(-scale));
  if (v % ten_power != 0) throw bad();
  return v / ten_power;
}

std::uint64_t parse_u64(std::string_view text) { return to_u64(parse_integer(text)); }

Factorization::Factorization(std::vector<PrimePower> pairs) : pairs_(std::move(pairs)) {
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (pairs_[i].exponent == 0) throw UsageError("factorization exponent must be >= 1");
    if (pairs_[i].prime < 2) throw UsageError("factorization prime must be >= 2");
    if (i > 0 && !(pairs_[i - 1].prime < pairs_[i].prime)) {
      throw UsageError("factorization primes must be strictly increasing");
    }
    BigInt pw;
    mpz_pow_ui(pw.get_mpz_t(), pairs_[i].prime.get_mpz_t(), pairs_[i].exponent);
    value_ *= pw;
  }
}

Factorization Factorization::from_small(
    std::span<const std::pair<std::uint64_t, unsigned>> pairs) {
  std::vector<PrimePower> out;
  out.reserve(pairs.size());
  for (auto [p, a] : pairs) out.push_back({to_bigint(p), a});
  return Factorization(std::move(out));
}

std::optional<std::uint64_t> Factorization::value_u64() const {
  if (mpz_sizeinbase(value_.get_mpz_t(), 2) > 64) return std::nullopt;
  return to_u64(value_);
}

std::string Factorization::to_string() const {
  if (pairs_.empty()) return "1";
  std::ostringstream os;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (i) os << " * ";
    os << pairs_[i].prime.get_str();
    if (pairs_[i].exponent > 1) os << '^' << pairs_[i].exponent;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

void for_each_prime_segment(
    std::uint64_t limit, std::uint64_t segment_size,
    const std::function<void(std::span<const std::uint64_t>)>& consumer) {
  if (limit < 2) return;
  const auto base = small_primes(isqrt_u64(limit));
  sieve_range(2, limit, segment_size, base, consumer);
}

std::vector<std::uint64_t> sieve_primes(std::uint64_t limit, const SieveOptions& options) {
  if (limit > options.max_limit) {
    throw CapacityError("sieve limit " + std::to_string(limit) + " exceeds ceiling " +
                        std::to_string(options.max_limit));
  }
  std::vector<std::uint64_t> out;
  if (limit < 2) return out;
  // pi(x) < 1.26 x / log x for x > 1.
  const double lg = std::log(static_cast<double>(std::max<u64>(limit, 17)));
  const double estimate = 1.26 * static_cast<double>(limit) / lg + 16;
  if (estimate * sizeof(u64) > static_cast<double>(options.memory_limit_bytes)) {
    throw CapacityError("prime list up to " + std::to_string(limit) +
                        " exceeds the memory ceiling");
  }
  out.reserve(static_cast<std::size_t>(estimate));
  for_each_prime_segment(limit, options.segment_size,
                         [&](std::span<const u64> seg) { out.insert(out.end(), seg.begin(), seg.end()); });
  return out;
}

std::vector<std::uint32_t> smallest_prime_factors(std::uint32_t limit) {
  std::vector<std::uint32_t> spf(static_cast<std::size_t>(limit) + 1, 0);
  std::vector<std::uint32_t> primes;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (spf[i] == 0) {
      spf[i] = static_cast<std::uint32_t>(i);
      primes.push_back(static_cast<std::uint32_t>(i));
    }
    for (std::uint32_t p : primes) {
      const std::uint64_t m = i * p;
      if (p > spf[i] || m > limit) break;
      spf[m] = p;
    }
  }
  return spf;
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr u64 kSmall[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 p : kSmall) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These bases are a proof of primality for every n < 3.3e24.
  for (u64 a : kSmall) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

bool is_probable_prime(const BigInt& n) {
  if (n < 2) return false;
  if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 64) return is_prime_u64(to_u64(n));
  return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0;
}

Factorization factorize_u64(std::uint64_t n) {
  if (n == 0) throw UsageError("factorize: n must be >= 1");
  std::vector<std::pair<u64, unsigned>> out;
  for (u64 p : trial_primes()) {
    if (p * p > n) break;
    if (n % p) continue;
    unsigned a = 0;
    while (n % p == 0) {
      n /= p;
      ++a;
    }
    out.emplace_back(p, a);
  }
  if (n > 1) {
    if (n < kTrialBound * kTrialBound || is_prime_u64(n)) {
      out.emplace_back(n, 1);
    } else {
      std::map<BigInt, unsigned> acc;
      split_composite(to_bigint(n), 1, acc);
      for (auto& [p, a] : acc) out.emplace_back(to_u64(p), a);
    }
  }
  return Factorization::from_small(out);
}

Factorization factorize(const BigInt& n, FactorEffort effort) {
  if (n < 1) throw UsageError("factorize: n must be >= 1");
  if (effort == FactorEffort::full && mpz_sizeinbase(n.get_mpz_t(), 2) <= 64) {
    return factorize_u64(to_u64(n));
  }
  std::map<BigInt, unsigned> acc;
  BigInt rest = n;
  for (u64 p : trial_primes()) {
    if (rest == 1) break;
    if (!mpz_divisible_ui_p(rest.get_mpz_t(), p)) continue;
    unsigned a = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
      ++a;
    }
    acc[to_bigint(p)] = a;
  }
  if (rest > 1) {
    const BigInt bound = BigInt(kTrialBound) * kTrialBound;
    if (rest < bound || is_probable_prime(rest)) {
      acc[rest] += 1;
    } else if (effort == FactorEffort::trial_only) {
      throw IncompleteFactorization(
          "incomplete factorization: composite cofactor left after trial division",
          rest.get_str());
    } else {
      split_composite(rest, 1, acc);
    }
  }
  std::vector<PrimePower> pairs;
  pairs.reserve(acc.size());
  for (auto& [p, a] : acc) pairs.push_back({p, a});
  return Factorization(std::move(pairs));
}

// ---------------------------------------------------------------------------

SquarefullEnumerator::SquarefullEnumerator(std::uint64_t limit) : limit_(limit) {
  if (limit > std::uint64_t{1'000'000'000'000'000}) {
    throw CapacityError("square-full enumeration limit exceeds 1e15");
  }
  max_b_ = icbrt_u64(limit);
  spf_ = smallest_prime_factors(static_cast<std::uint32_t>(std::max<u64>(isqrt_u64(limit), 2)));
}

void SquarefullEnumerator::visit_b_range(
    std::uint64_t b_first, std::uint64_t b_last,
    const std::function<void(const SquarefullVisit&)>& fn) const {
  if (limit_ < 4) return;
  b_last = std::min(b_last, max_b_);
  std::vector<std::pair<u64, unsigned>> b_factors, merged;
  for (u64 b = std::max<u64>(b_first, 1); b <= b_last; ++b) {
    b_factors.clear();
    bool squarefree = true;
    for (u64 r = b; r > 1;) {
      const u64 p = spf_[r];
      r /= p;
      if (r % p == 0) {
        squarefree = false;
        break;
      }
      b_factors.emplace_back(p, 1);
    }
    if (!squarefree) continue;
    const u64 b3 = b * b * b;
    const u64 max_a = isqrt_u64(limit_ / b3);
    for (u64 a = 1; a <= max_a; ++a) {
      if (a == 1 && b == 1) continue;
      merged.clear();
      std::size_t bi = 0;
      for (u64 r = a; r > 1;) {
        const u64 p = spf_[r];
        unsigned e = 0;
        while (r % p == 0) {
          r /= p;
          ++e;
        }
        while (bi < b_factors.size() && b_factors[bi].first < p) {
          merged.emplace_back(b_factors[bi].first, 3);
          ++bi;
        }
        if (bi < b_factors.size() && b_factors[bi].first == p) {
          merged.emplace_back(p, 2 * e + 3);
          ++bi;
        } else {
          merged.emplace_back(p, 2 * e);
        }
      }
      for (; bi < b_factors.size(); ++bi) merged.emplace_back(b_factors[bi].first, 3);
      fn(SquarefullVisit{a * a * b3, a, b, merged});
    }
  }
}

std::vector<std::uint64_t> squarefull_enumerate(std::uint64_t limit) {
  if (limit < 4) throw UsageError("squarefull_enumerate: limit must be >= 4");
  std::vector<std::uint64_t> out;
  SquarefullEnumerator(limit).visit_all([&](const SquarefullVisit& v) { out.push_back(v.value); });
  return out;
}

std::uint64_t squarefull_count(std::uint64_t limit) {
  if (limit < 4) return 0;
  SquarefullEnumerator e(limit);
  std::vector<std::uint32_t> spf = smallest_prime_factors(
      static_cast<std::uint32_t>(std::max<u64>(e.max_b(), 2)));
  std::uint64_t count = 0;
  for (u64 b = 1; b <= e.max_b(); ++b) {
    bool squarefree = true;
    for (u64 r = b; r > 1;) {
      const u64 p = spf[r];
      r /= p;
      if (r % p == 0) {
        squarefree = false;
        break;
      }
    }
    if (squarefree) count += isqrt_u64(limit / (b * b * b));
  }
  return count - 1;  // drop n = 1
}

SquarefullSplit squarefull_split(const Factorization& f) {
  std::vector<PrimePower> full, free;
  for (const auto& pp : f.pairs()) {
    (pp.exponent >= 2 ? full : free).push_back(pp);
  }
  return {Factorization(std::move(full)), Factorization(std::move(free))};
}

// ---------------------------------------------------------------------------

PrimeClass prime_class_of(std::uint64_t p) {
  switch ((p + 1) % 8) {
    case 0:
      return PrimeClass::P8;
    case 4:
      return PrimeClass::P4;
    default:
      return PrimeClass::P2;
  }
}

std::string to_string(PrimeClass c) {
  switch (c) {
    case PrimeClass::P2:
      return "P2";
    case PrimeClass::P4:
      return "P4";
    case PrimeClass::P8:
      return "P8";
  }
  return "?";
}

ClassedPrimeStream::ClassedPrimeStream(PrimeClass c) : class_(c) {}

void ClassedPrimeStream::refill() {
  buffer_.clear();
  cursor_ = 0;
  while (buffer_.empty()) {
    const u64 lo = sieved_to_ + 1;
    const u64 hi = std::max<u64>(sieved_to_ * 2, 1 << 16);
    const auto base = small_primes(isqrt_u64(hi));
    sieve_range(lo, hi, 1 << 18, base, [&](std::span<const u64> seg) {
      for (u64 p : seg) {
        if (p >= 5 && p % 6 == 1 && prime_class_of(p) == class_) buffer_.push_back(p);
      }
    });
    sieved_to_ = hi;
  }
}

std::uint64_t ClassedPrimeStream::next() {
  if (cursor_ >= buffer_.size()) refill();
  return buffer_[cursor_++];
}

std::vector<std::uint64_t> classed_primes(PrimeClass c, std::size_t count) {
  ClassedPrimeStream stream(c);
  std::vector<std::uint64_t> out;
  out.reserve(count);
  while (out.size() < count) out.push_back(stream.next());
  return out;
}

}  // namespace moddiv
