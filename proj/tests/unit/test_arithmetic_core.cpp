#include <algorithm>
#include <bitset>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "moddiv/arithmetic_core.hpp"
#include "moddiv/error.hpp"
#include "oracle_values.hpp"
#include "oracles.hpp"

namespace moddiv {
namespace {

using u64 = std::uint64_t;

TEST(SievePrimes, SmallLimits) {
  EXPECT_EQ(sieve_primes(10), (std::vector<u64>{2, 3, 5, 7}));
  EXPECT_TRUE(sieve_primes(1).empty());
  EXPECT_TRUE(sieve_primes(0).empty());
  EXPECT_EQ(sieve_primes(2), (std::vector<u64>{2}));
}

TEST(SievePrimes, CountUpToX0MatchesIndependentSieve) {
  EXPECT_EQ(sieve_primes(10'544'111).size(), oracle::kPrimeCountX0);
}

TEST(SievePrimes, AgreesWithTrialDivisionOracle) {
  const auto primes = sieve_primes(100'000);
  std::vector<u64> expected;
  for (u64 n = 2; n <= 100'000; ++n) {
    if (oracle::is_prime_trial(n)) expected.push_back(n);
  }
  EXPECT_EQ(primes, expected);
}

TEST(SievePrimes, SegmentSizeDoesNotMatter) {
  SieveOptions small;
  small.segment_size = 4096;
  EXPECT_EQ(sieve_primes(2'000'000, small), sieve_primes(2'000'000));
}

TEST(SievePrimes, CeilingIsCapacityError) {
  SieveOptions o;
  o.max_limit = 1000;
  EXPECT_THROW(sieve_primes(1001, o), CapacityError);
  SieveOptions mem;
  mem.memory_limit_bytes = 64;
  EXPECT_THROW(sieve_primes(1'000'000, mem), CapacityError);
}

TEST(SievePrimes, SegmentStreamCoversSameList) {
  std::vector<u64> streamed;
  for_each_prime_segment(1'000'000, 1 << 14, [&](std::span<const u64> seg) {
    streamed.insert(streamed.end(), seg.begin(), seg.end());
  });
  EXPECT_EQ(streamed, sieve_primes(1'000'000));
}

TEST(Primality, SmallAndLarge) {
  EXPECT_FALSE(is_prime_u64(0));
  EXPECT_FALSE(is_prime_u64(1));
  EXPECT_TRUE(is_prime_u64(2));
  EXPECT_TRUE(is_prime_u64(18446744073709551557ULL));  // largest 64-bit prime
  EXPECT_FALSE(is_prime_u64(3215031751ULL));           // strong pseudoprime to 2,3,5,7
  EXPECT_TRUE(is_probable_prime(BigInt("170141183460469231731687303715884105727")));  // 2^127-1
  EXPECT_FALSE(is_probable_prime(BigInt("170141183460469231731687303715884105729")));
}

TEST(Factorize, Examples) {
  EXPECT_EQ(factorize(BigInt(36)).to_string(), "2^2 * 3^2");
  EXPECT_TRUE(factorize(BigInt(1)).empty());
  EXPECT_EQ(factorize(BigInt(1)).value(), 1);
  EXPECT_THROW(factorize(BigInt(0)), UsageError);
}

TEST(Factorize, FortyDigitExampleMatchesIndependentFactorization) {
  const BigInt n(oracle::kBigPerfect);
  const Factorization f = factorize(n, FactorEffort::full);
  std::vector<std::pair<u64, unsigned>> got;
  for (const auto& pp : f.pairs()) got.emplace_back(to_u64(pp.prime), pp.exponent);
  EXPECT_EQ(got, oracle::kBigPerfectFactors);
  EXPECT_EQ(f.value(), n);
}

TEST(Factorize, TrialOnlyReportsIncompleteFactorization) {
  // Product of two primes far above the trial-division bound.
  const BigInt p("1000000000039");
  const BigInt q("1000000000061");
  try {
    factorize(p * q, FactorEffort::trial_only);
    FAIL() << "expected IncompleteFactorization";
  } catch (const IncompleteFactorization& e) {
    EXPECT_EQ(e.cofactor(), BigInt(p * q).get_str());
  }
  const Factorization full = factorize(p * q, FactorEffort::full);
  ASSERT_EQ(full.size(), 2u);
  EXPECT_EQ(full.pairs()[0].prime, p);
  EXPECT_EQ(full.pairs()[1].prime, q);
}

TEST(Factorize, DeterministicAcrossCalls) {
  const BigInt n("600851475143000000000000000000001");
  EXPECT_EQ(factorize(n), factorize(n));
}

TEST(Factorization, RejectsInvalidPairs) {
  EXPECT_THROW(Factorization({{BigInt(3), 1}, {BigInt(2), 1}}), UsageError);
  EXPECT_THROW(Factorization({{BigInt(2), 0}}), UsageError);
  EXPECT_THROW(Factorization({{BigInt(2), 1}, {BigInt(2), 1}}), UsageError);
}

TEST(ParseInteger, PlainAndScientific) {
  EXPECT_EQ(parse_integer("60000000000"), BigInt("60000000000"));
  EXPECT_EQ(parse_integer("6e10"), BigInt("60000000000"));
  EXPECT_EQ(parse_integer("5.5e10"), BigInt("55000000000"));
  EXPECT_THROW(parse_integer("1.5"), UsageError);
  EXPECT_THROW(parse_integer("-3"), UsageError);
  EXPECT_THROW(parse_integer("abc"), UsageError);
  EXPECT_THROW(parse_u64("1e30"), CapacityError);
}

TEST(Squarefull, Examples) {
  auto v = squarefull_enumerate(50);
  std::sort(v.begin(), v.end());
  EXPECT_EQ(v, (std::vector<u64>{4, 8, 9, 16, 25, 27, 32, 36, 49}));
  EXPECT_EQ(squarefull_enumerate(4), (std::vector<u64>{4}));
  EXPECT_THROW(squarefull_enumerate(3), UsageError);
}

TEST(Squarefull, CountMatchesDoubleLoopOracle) {
  EXPECT_EQ(squarefull_count(100'000), oracle::kSquarefullCount1e5);
  EXPECT_EQ(squarefull_count(55'000'000'000ULL), oracle::kSquarefullCount55e9);
}

TEST(Squarefull, VisitFactorsReconstructValue) {
  SquarefullEnumerator en(1'000'000);
  std::uint64_t visits = 0;
  en.visit_all([&](const SquarefullVisit& v) {
    u64 prod = 1;
    for (auto [p, a] : v.factors) {
      EXPECT_GE(a, 2u);
      for (unsigned i = 0; i < a; ++i) prod *= p;
    }
    EXPECT_EQ(prod, v.value);
    EXPECT_EQ(v.a * v.a * v.b * v.b * v.b, v.value);
    ++visits;
  });
  EXPECT_EQ(visits, squarefull_count(1'000'000));
}

TEST(SquarefullSplit, Examples) {
  const auto s12 = squarefull_split(factorize_u64(12));
  EXPECT_EQ(s12.squarefull.value(), 4);
  EXPECT_EQ(s12.squarefree.value(), 3);
  const auto s36 = squarefull_split(factorize_u64(36));
  EXPECT_EQ(s36.squarefull.value(), 36);
  EXPECT_EQ(s36.squarefree.value(), 1);
  const auto s30 = squarefull_split(factorize_u64(30));
  EXPECT_EQ(s30.squarefull.value(), 1);
  EXPECT_EQ(s30.squarefree.value(), 30);
}

TEST(ClassedPrimes, Examples) {
  EXPECT_EQ(classed_primes(PrimeClass::P8, 2), (std::vector<u64>{7, 31}));
  EXPECT_EQ(classed_primes(PrimeClass::P4, 2), (std::vector<u64>{19, 43}));
  EXPECT_EQ(classed_primes(PrimeClass::P2, 2), (std::vector<u64>{13, 37}));
  EXPECT_TRUE(classed_primes(PrimeClass::P2, 0).empty());
}

TEST(Bits, Examples) {
  EXPECT_EQ(binary_ones(6), 2u);
  EXPECT_TRUE(bits_subset(2, 3));
  EXPECT_FALSE(bits_subset(1, 2));
  EXPECT_TRUE(bits_subset(0, 0));
}

// --- properties -----------------------------------------------------------

TEST(ArithmeticCoreProperty, FactorizeReconstructsAllNUpTo1e6) {
  for (u64 n = 1; n <= 1'000'000; ++n) {
    const Factorization f = factorize_u64(n);
    ASSERT_EQ(f.value(), n);
    for (const auto& pp : f.pairs()) ASSERT_TRUE(is_probable_prime(pp.prime)) << n;
  }
}

TEST(ArithmeticCoreProperty, BigFactorizationsReconstruct) {
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 200; ++i) {
    BigInt n = 1;
    const int k = 1 + static_cast<int>(rng() % 4);
    for (int j = 0; j < k; ++j) n *= to_bigint(rng() >> (20 + rng() % 30));
    if (n < 1) continue;
    const Factorization f = factorize(n);
    ASSERT_EQ(f.value(), n);
    for (std::size_t j = 0; j < f.size(); ++j) {
      ASSERT_TRUE(is_probable_prime(f.pairs()[j].prime));
      if (j > 0) {
        ASSERT_LT(f.pairs()[j - 1].prime, f.pairs()[j].prime);
      }
    }
  }
}

TEST(ArithmeticCoreProperty, ClassedStreamsPartitionPrimesOneModSix) {
  std::vector<u64> expected;
  for (u64 p : sieve_primes(1'000'000)) {
    if (p >= 5 && p % 6 == 1) expected.push_back(p);
  }
  std::vector<u64> merged;
  for (PrimeClass c : {PrimeClass::P2, PrimeClass::P4, PrimeClass::P8}) {
    ClassedPrimeStream s(c);
    for (u64 p = s.next(); p <= 1'000'000; p = s.next()) {
      const u64 r = (p + 1) % 8;
      if (c == PrimeClass::P8) {
        ASSERT_EQ(r, 0u);
      }
      if (c == PrimeClass::P4) {
        ASSERT_EQ(r, 4u);
      }
      if (c == PrimeClass::P2) {
        ASSERT_TRUE(r != 0 && r != 4);
      }
      merged.push_back(p);
    }
  }
  std::sort(merged.begin(), merged.end());
  EXPECT_EQ(merged, expected);
}

TEST(ArithmeticCoreProperty, SquarefullSetEqualsFilteredRange) {
  const u64 X = 100'000;
  auto got = squarefull_enumerate(X);
  const std::set<u64> unique(got.begin(), got.end());
  EXPECT_EQ(unique.size(), got.size()) << "duplicates emitted";
  std::set<u64> expected;
  for (u64 n = 2; n <= X; ++n) {
    if (squarefull_split(factorize_u64(n)).squarefree.value() == 1) expected.insert(n);
  }
  EXPECT_EQ(unique, expected);
}

TEST(ArithmeticCoreProperty, SplitIsCoprimeAndMultiplies) {
  for (u64 n = 1; n <= 20'000; ++n) {
    const auto s = squarefull_split(factorize_u64(n));
    ASSERT_EQ(s.squarefull.value() * s.squarefree.value(), n);
    ASSERT_EQ(gcd(s.squarefull.value(), s.squarefree.value()), 1);
  }
}

TEST(ArithmeticCoreProperty, BitsSubsetMatchesDefinition) {
  for (u64 a = 0; a < 128; ++a) {
    for (u64 b = 0; b < 128; ++b) {
      bool subset = true;
      for (int i = 0; i < 7; ++i) {
        if (((a >> i) & 1) && !((b >> i) & 1)) subset = false;
      }
      ASSERT_EQ(bits_subset(a, b), subset);
    }
    ASSERT_EQ(binary_ones(a), static_cast<unsigned>(std::bitset<64>(a).count()));
  }
}

}  // namespace
}  // namespace moddiv
