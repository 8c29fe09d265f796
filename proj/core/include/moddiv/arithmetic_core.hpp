#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "moddiv/worker_pool.hpp"

namespace moddiv {

using BigInt = mpz_class;
// Reduced arbitrary-precision rational; equality is exact.
using ExactRatio = mpq_class;

struct PrimePower {
  BigInt prime;
  unsigned exponent = 0;

  bool operator==(const PrimePower&) const = default;
};

// Canonical prime-exponent list of a positive integer. Primes are strictly
// increasing, exponents are >= 1, and the empty list represents 1.
class Factorization {
 public:
  Factorization() = default;

  // Validates ordering and exponents (primality is the caller's contract).
  explicit Factorization(std::vector<PrimePower> pairs);

  // Same as above for machine-word primes.
  static Factorization from_small(
      std::span<const std::pair<std::uint64_t, unsigned>> pairs);

  const std::vector<PrimePower>& pairs() const { return pairs_; }
  const BigInt& value() const { return value_; }
  std::optional<std::uint64_t> value_u64() const;

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  // "2^2 * 3^2" style; "1" for the empty factorization.
  std::string to_string() const;

  bool operator==(const Factorization& other) const { return pairs_ == other.pairs_; }

 private:
  std::vector<PrimePower> pairs_;
  BigInt value_ = 1;
};

BigInt to_bigint(std::uint64_t v);
// Throws CapacityError when v does not fit.
std::uint64_t to_u64(const BigInt& v);

// Parses a nonnegative integer literal: plain digits ("60000000000") or
// scientific notation denoting an integer ("6e10", "5.5e10"). Throws
// UsageError for anything else.
BigInt parse_integer(std::string_view text);
std::uint64_t parse_u64(std::string_view text);

// ---------------------------------------------------------------------------
// Primes

struct SieveOptions {
  std::uint64_t max_limit = std::uint64_t{1} << 40;
  // Upper bound on the bytes the returned prime list may occupy.
  std::uint64_t memory_limit_bytes = std::uint64_t{4} << 30;
  std::uint64_t segment_size = std::uint64_t{1} << 19;
};

// All primes <= limit, ascending. limit < 2 gives an empty list.
std::vector<std::uint64_t> sieve_primes(std::uint64_t limit,
                                        const SieveOptions& options = {});

// Streams primes <= limit in ascending order, one sieve segment at a time,
// without materialising the whole list.
void for_each_prime_segment(
    std::uint64_t limit, std::uint64_t segment_size,
    const std::function<void(std::span<const std::uint64_t>)>& consumer);

// Smallest-prime-factor table for 0..limit (spf[0] = spf[1] = 0).
std::vector<std::uint32_t> smallest_prime_factors(std::uint32_t limit);

// Deterministic for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n);
// Deterministic below 2^64; BPSW plus extra Miller-Rabin rounds above.
bool is_probable_prime(const BigInt& n);

enum class FactorEffort { trial_only, full };

// Trial division first; under `full`, composite cofactors are split with
// Pollard-Brent rho from a fixed seed schedule, so results (and work done)
// are reproducible. Under `trial_only` an unsplit composite cofactor throws
// IncompleteFactorization.
Factorization factorize(const BigInt& n, FactorEffort effort = FactorEffort::full);
Factorization factorize_u64(std::uint64_t n);

// ---------------------------------------------------------------------------
// Square-full numbers

// Every square-full n > 1 is uniquely a^2 * b^3 with b squarefree. The
// enumeration visits b ascending and, for each b, a ascending; values are
// therefore NOT globally sorted. Each n in [4, limit] is emitted once.
struct SquarefullVisit {
  std::uint64_t value;
  std::uint64_t a;
  std::uint64_t b;
  // (prime, exponent) ascending by prime.
  std::span<const std::pair<std::uint64_t, unsigned>> factors;
};

class SquarefullEnumerator {
 public:
  explicit SquarefullEnumerator(std::uint64_t limit);

  std::uint64_t limit() const { return limit_; }
  // Largest b with b^3 <= limit.
  std::uint64_t max_b() const { return max_b_; }

  // Visits every square-full number whose b lies in [b_first, b_last].
  void visit_b_range(std::uint64_t b_first, std::uint64_t b_last,
                     const std::function<void(const SquarefullVisit&)>& fn) const;

  void visit_all(const std::function<void(const SquarefullVisit&)>& fn) const {
    visit_b_range(1, max_b_, fn);
  }

 private:
  std::uint64_t limit_;
  std::uint64_t max_b_;
  std::vector<std::uint32_t> spf_;  // up to sqrt(limit)
};

// Convenience: all square-full values in [4, limit], in enumeration order.
std::vector<std::uint64_t> squarefull_enumerate(std::uint64_t limit);
std::uint64_t squarefull_count(std::uint64_t limit);

struct SquarefullSplit {
  Factorization squarefull;  // product of p^a with a >= 2
  Factorization squarefree;  // product of p with a == 1
};
SquarefullSplit squarefull_split(const Factorization& f);

// ---------------------------------------------------------------------------
// Classed prime streams: primes p >= 5 with p = 1 (mod 6), split by (p+1) mod 8.

enum class PrimeClass { P2, P4, P8 };

PrimeClass prime_class_of(std::uint64_t p);
std::string to_string(PrimeClass c);

// Lazily extends an internal segmented sieve as members are requested.
class ClassedPrimeStream {
 public:
  explicit ClassedPrimeStream(PrimeClass c);

  PrimeClass class_id() const { return class_; }
  std::uint64_t next();

 private:
  void refill();

  PrimeClass class_;
  std::uint64_t sieved_to_ = 0;
  std::vector<std::uint64_t> buffer_;
  std::size_t cursor_ = 0;
};

std::vector<std::uint64_t> classed_primes(PrimeClass c, std::size_t count);

// ---------------------------------------------------------------------------
// Bits

inline unsigned binary_ones(std::uint64_t a) {
  return static_cast<unsigned>(__builtin_popcountll(a));
}

// Every set bit of a is set in b.
inline bool bits_subset(std::uint64_t a, std::uint64_t b) { return (a & ~b) == 0; }

}  // namespace moddiv
