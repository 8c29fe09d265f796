#pragma once

// Brute-force reference implementations used as test oracles. They follow
// the definitions literally and share no code with the library.

#include <cstdint>
#include <numeric>
#include <vector>

namespace moddiv::oracle {

inline bool is_prime_trial(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline std::vector<std::uint64_t> plain_divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 1; d <= n; ++d) {
    if (n % d == 0) out.push_back(d);
  }
  return out;
}

// Exponent of prime p in n.
inline unsigned valuation(std::uint64_t n, std::uint64_t p) {
  unsigned v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

inline std::vector<std::uint64_t> prime_support(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p <= n; ++p) {
    if (n % p == 0 && is_prime_trial(p)) out.push_back(p);
  }
  return out;
}

inline bool bit_subset(std::uint64_t a, std::uint64_t b) {
  for (int i = 0; i < 64; ++i) {
    if (((a >> i) & 1) && !((b >> i) & 1)) return false;
  }
  return true;
}

// Integer infinitary divisibility a |^inf b: for every prime, the binary
// digits of its exponent in a are a subset of those in b.
inline bool integer_infinitary_divides(std::uint64_t a, std::uint64_t b) {
  if (b % a != 0) return false;
  for (std::uint64_t p : prime_support(b)) {
    if (!bit_subset(valuation(a, p), valuation(b, p))) return false;
  }
  return true;
}

enum class Relation { ordinary, unitary, bi_unitary, infinitary, exponential, e_infinitary };

// m in relation with n, decided per prime straight from the definitions.
inline bool related(Relation r, std::uint64_t m, std::uint64_t n) {
  switch (r) {
    case Relation::ordinary:
      return n % m == 0;
    case Relation::unitary:
      return n % m == 0 && std::gcd(m, n / m) == 1;
    case Relation::bi_unitary: {
      if (n % m != 0) return false;
      // Greatest common unitary divisor of m and n/m must be 1.
      const std::uint64_t k = n / m;
      for (std::uint64_t d = 2; d <= std::min(m, k); ++d) {
        if (m % d == 0 && k % d == 0 && std::gcd(d, m / d) == 1 && std::gcd(d, k / d) == 1) {
          return false;
        }
      }
      return true;
    }
    case Relation::infinitary:
      return integer_infinitary_divides(m, n);
    case Relation::exponential:
    case Relation::e_infinitary: {
      if (n % m != 0 || prime_support(m) != prime_support(n)) return false;
      if (n == 1) return m == 1;
      for (std::uint64_t p : prime_support(n)) {
        const std::uint64_t a = valuation(m, p), b = valuation(n, p);
        if (r == Relation::exponential ? b % a != 0 : !integer_infinitary_divides(a, b)) return false;
      }
      return true;
    }
  }
  return false;
}

inline std::vector<std::uint64_t> related_set(Relation r, std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d : plain_divisors(n)) {
    if (related(r, d, n)) out.push_back(d);
  }
  return out;
}

}  // namespace moddiv::oracle
