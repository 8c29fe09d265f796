#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "moddiv/arithmetic_core.hpp"

namespace moddiv {

// One of the divisor relations. k_ary(0) is ordinary division, k_ary(1)
// unitary, k_ary(2) bi-unitary, and so on.
struct DivisorRelation {
  enum class Kind { ordinary, k_ary, infinitary, exponential, e_infinitary };

  Kind kind = Kind::ordinary;
  unsigned level = 0;  // only meaningful for k_ary

  static DivisorRelation ordinary() { return {Kind::ordinary, 0}; }
  static DivisorRelation k_ary(unsigned level) {
    return level == 0 ? ordinary() : DivisorRelation{Kind::k_ary, level};
  }
  static DivisorRelation unitary() { return k_ary(1); }
  static DivisorRelation bi_unitary() { return k_ary(2); }
  static DivisorRelation infinitary() { return {Kind::infinitary, 0}; }
  static DivisorRelation exponential() { return {Kind::exponential, 0}; }
  static DivisorRelation e_infinitary() { return {Kind::e_infinitary, 0}; }

  // Accepts "ordinary", "unitary", "bi-unitary", "tri-unitary", "k-ary:L",
  // "infinitary", "exponential", "e-infinitary" (underscores allowed).
  static DivisorRelation parse(const std::string& name);
  std::string name() const;

  bool operator==(const DivisorRelation&) const = default;
};

inline constexpr unsigned kMaxKaryLevel = 64;
// divisor_set refuses to materialise more divisors than this.
inline constexpr std::size_t kMaxDivisorSetSize = std::size_t{1} << 24;

// Sorted set of all m with m in relation `rel` to n.
//
// exponential and e_infinitary divisors share the prime support of n, so 1
// belongs to those sets only when n == 1.
std::vector<std::uint64_t> divisor_set(std::uint64_t n, DivisorRelation rel);
std::vector<std::uint64_t> divisor_set(const Factorization& n, DivisorRelation rel);

bool divides(DivisorRelation rel, std::uint64_t m, std::uint64_t n);

// Infinitary divisibility of plain integers: a |^inf b.
bool infinitary_divides(std::uint64_t a, std::uint64_t b);
// Infinitary divisors of a small integer, ascending.
std::vector<std::uint64_t> infinitary_divisors(std::uint64_t a);

// Number of ordered k-tuples (d_1..d_k) with d_1^{a_1} ... d_k^{a_k} = n.
std::uint64_t tau_multi(std::span<const unsigned> exponents, std::uint64_t n);

// Memoised k-ary divisor sets, following the recursive definition: m is a
// level-L divisor of n iff m | n and the greatest common level-(L-1)
// divisor of m and n/m is 1. Not thread-safe; use one instance per thread.
class KaryDivisors {
 public:
  const std::vector<std::uint64_t>& of(std::uint64_t n, unsigned level);
  std::uint64_t greatest_common(std::uint64_t a, std::uint64_t b, unsigned level);

 private:
  std::map<std::pair<std::uint64_t, unsigned>, std::vector<std::uint64_t>> cache_;
};

}  // namespace moddiv
