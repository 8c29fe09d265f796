#include <numeric>

#include <gtest/gtest.h>

#include "moddiv/arithmetic_core.hpp"
#include "moddiv/divisor_systems.hpp"
#include "moddiv/error.hpp"
#include "moddiv/multiplicative.hpp"
#include "oracles.hpp"

namespace moddiv {
namespace {

using u64 = std::uint64_t;

BigInt pp(const char* id, u64 p, unsigned a) {
  return function_by_id(id).at_prime_power(to_bigint(p), a);
}

BigInt ipow(u64 p, unsigned a) {
  BigInt r = 1;
  for (unsigned i = 0; i < a; ++i) r *= to_bigint(p);
  return r;
}

TEST(Evaluate, PrimePowerExamples) {
  for (u64 p : {2, 3, 5, 97}) {
    EXPECT_EQ(pp("E_sigma", p, 4), 7);
    EXPECT_EQ(pp("frak_f_e", p, 2), ipow(p, 2) - ipow(p, 1));
    EXPECT_EQ(pp("frak_f_e", p, 4), ipow(p, 4) - ipow(p, 2));
    EXPECT_EQ(pp("frak_f_e", p, 6), ipow(p, 6) - ipow(p, 3) - ipow(p, 2) + ipow(p, 1));
  }
  EXPECT_EQ(pp("sigma_e_inf", 2, 6), 78);
  EXPECT_EQ(pp("sigma_e_inf", 2, 3), 10);
  EXPECT_EQ(function_by_id("tau_inf")(u64{12}), 4);
  EXPECT_EQ(evaluate("sigma-e-inf", factorize_u64(36)), 72);
}

TEST(Evaluate, ValueAtOneIsOne) {
  for (const auto& id : registered_function_ids()) {
    EXPECT_EQ(function_by_id(id)(Factorization{}), 1) << id;
  }
}

TEST(Evaluate, UnknownIdIsUsageError) {
  EXPECT_THROW(function_by_id("nope"), UsageError);
  EXPECT_THROW(evaluate("phi_e", factorize_u64(4)), UsageError);
}

TEST(Evaluate, KebabAliases) {
  EXPECT_EQ(function_by_id("sigma-e-inf").id(), "sigma_e_inf");
  EXPECT_EQ(function_by_id("e-sigma").id(), "E_sigma");
  EXPECT_EQ(function_by_id("frak-f-e").id(), "frak_f_e");
}

TEST(Evaluate, ClassicalFunctionsMatchDefinitions) {
  for (u64 n = 1; n <= 2000; ++n) {
    const auto divs = oracle::plain_divisors(n);
    u64 sum = 0;
    for (u64 d : divs) sum += d;
    u64 phi = 0;
    for (u64 k = 1; k <= n; ++k) phi += std::gcd(k, n) == 1;
    ASSERT_EQ(function_by_id("tau")(n), static_cast<unsigned long>(divs.size()));
    ASSERT_EQ(function_by_id("sigma")(n), static_cast<unsigned long>(sum));
    ASSERT_EQ(function_by_id("phi")(n), static_cast<unsigned long>(phi));
    ASSERT_EQ(function_by_id("id")(n), static_cast<unsigned long>(n));
  }
}

TEST(Evaluate, BigArgumentsUseArbitraryPrecision) {
  const Factorization f = factorize(BigInt("1307484087615221689700651798824550400000"));
  EXPECT_EQ(function_by_id("sigma_e_inf")(f), 2 * f.value());
  EXPECT_EQ(function_by_id("sigma_e")(f), 2 * f.value());
}

TEST(DirichletConvolve, Examples) {
  const auto& one = function_by_id("one");
  const auto& mu = function_by_id("mu");
  const auto& id = function_by_id("id");
  const Sequence tau = dirichlet_convolve(one, one, 12);
  EXPECT_EQ(tau[6], 4);
  const Sequence e = dirichlet_convolve(one, mu, 12);
  EXPECT_EQ(e[1], 1);
  for (u64 n = 2; n <= 12; ++n) EXPECT_EQ(e[n], 0) << n;
  EXPECT_EQ(dirichlet_convolve(mu, id, 12)[12], 4);
}

TEST(ExponentialConvolve, Examples) {
  const auto& one = function_by_id("one");
  const auto& mu_e = function_by_id("mu_e");
  const auto& id = function_by_id("id");
  const auto tau_e = exponential_convolve(one, one);
  EXPECT_EQ(tau_e.at_prime_power(BigInt(7), 4), 3);
  // 1 (.) mu^(e) is the identity of exponential convolution: 1 at p, 0 at p^a for a >= 2.
  const auto ident = exponential_convolve(one, mu_e);
  for (u64 p : {2, 3, 5}) {
    for (unsigned a = 1; a <= 12; ++a) EXPECT_EQ(ident.at_prime_power(to_bigint(p), a), a == 1 ? 1 : 0);
  }
  const auto back = exponential_convolve(exponential_convolve(id, mu_e), one);
  for (unsigned a = 1; a <= 12; ++a) EXPECT_EQ(back.at_prime_power(BigInt(5), a), ipow(5, a));
  const auto frak = exponential_convolve(mu_e, id);
  EXPECT_EQ(frak.at_prime_power(BigInt(5), 2), 20);
  for (unsigned a = 1; a <= 20; ++a) {
    EXPECT_EQ(frak.at_prime_power(BigInt(3), a), pp("frak_f_e", 3, a)) << a;
  }
}

TEST(EOperator, Examples) {
  const auto Etau = E_operator("E_tau", [](u64 a) { return BigInt(static_cast<unsigned long>(tau_of(a))); });
  for (unsigned a = 1; a <= 20; ++a) {
    EXPECT_EQ(Etau.at_prime_power(BigInt(11), a), pp("tau_e", 11, a));
  }
  EXPECT_TRUE(Etau.prime_independent());
  const auto Esigma = E_operator("E_s", [](u64 a) { return BigInt(static_cast<unsigned long>(sigma_of(a))); });
  EXPECT_EQ(Esigma.at_prime_power(BigInt(2), 2), 3);
  const auto Emu = E_operator("E_mu", [](u64 a) { return BigInt(mobius_of(a)); });
  EXPECT_EQ(Emu.at_prime_power(BigInt(2), 4), 0);
}

TEST(Helpers, SmallArithmetic) {
  EXPECT_EQ(sigma_of(12), 28u);
  EXPECT_EQ(tau_of(12), 6u);
  EXPECT_EQ(mobius_of(30), -1);
  EXPECT_EQ(mobius_of(12), 0);
  EXPECT_EQ(tau_inf_of(12), 4u);  // 2^u(2) * 2^u(1)
  EXPECT_EQ(tau_inf_of(8), 4u);   // 2^u(3)
}

// --- properties -----------------------------------------------------------

TEST(MultiplicativeProperty, FormulaEqualsSetEnumeration) {
  struct Pair {
    const char* tau;
    const char* sigma;
    DivisorRelation rel;
  };
  const std::vector<Pair> pairs = {
      {"tau", "sigma", DivisorRelation::ordinary()},
      {"tau_e", "sigma_e", DivisorRelation::exponential()},
      {"tau_inf", "sigma_inf", DivisorRelation::infinitary()},
      {"tau_e_inf", "sigma_e_inf", DivisorRelation::e_infinitary()},
  };
  for (u64 n = 1; n <= 10'000; ++n) {
    const Factorization f = factorize_u64(n);
    for (const auto& p : pairs) {
      const auto set = divisor_set(f, p.rel);
      BigInt sum = 0;
      for (u64 d : set) sum += to_bigint(d);
      ASSERT_EQ(function_by_id(p.tau)(f), static_cast<unsigned long>(set.size())) << p.tau << " " << n;
      ASSERT_EQ(function_by_id(p.sigma)(f), sum) << p.sigma << " " << n;
    }
  }
}

TEST(MultiplicativeProperty, FrakMobiusInversionOnExponents) {
  for (u64 p : {2, 3, 5}) {
    for (unsigned a = 1; a <= 64; ++a) {
      BigInt s = 0;
      for (u64 d : divisors_of(a)) s += pp("frak_f_e", p, static_cast<unsigned>(d));
      ASSERT_EQ(s, ipow(p, a)) << p << "^" << a;
    }
  }
}

TEST(MultiplicativeProperty, SigmaVariantsOrdered) {
  for (u64 p : {2, 3, 5}) {
    for (unsigned a = 1; a <= 64; ++a) {
      const BigInt einf = pp("sigma_e_inf", p, a), e = pp("sigma_e", p, a), s = pp("sigma", p, a);
      ASSERT_LE(einf, e);
      ASSERT_LE(e, s);
    }
  }
}

TEST(MultiplicativeProperty, TauInfAtMostAPlusOne) {
  const auto& t = function_by_id("tau_inf");
  for (unsigned a = 1; a <= 1'000'000; ++a) {
    ASSERT_LE(t.at_prime_power_small(2, a), static_cast<std::int64_t>(a) + 1) << a;
  }
}

TEST(MultiplicativeProperty, FrakRatioDependsOnlyOnSquarefullPart) {
  const auto& f = function_by_id("frak_f_e");
  for (u64 n = 1; n <= 10'000; ++n) {
    const Factorization fac = factorize_u64(n);
    const Factorization k = squarefull_split(fac).squarefull;
    mpq_class lhs(f(fac), fac.value()), rhs(f(k), k.value());
    lhs.canonicalize();
    rhs.canonicalize();
    ASSERT_EQ(lhs, rhs) << n;
  }
}

TEST(MultiplicativeProperty, SigmaEInfEvenForOddPrimePowers) {
  for (u64 p = 3; p <= 97; p += 2) {
    if (!oracle::is_prime_trial(p)) continue;
    for (unsigned a = 2; a <= 32; ++a) {
      ASSERT_TRUE(mpz_even_p(pp("sigma_e_inf", p, a).get_mpz_t())) << p << "^" << a;
    }
  }
}

TEST(MultiplicativeProperty, SmallPathAgreesWithBigPath) {
  for (const auto& id : registered_function_ids()) {
    const auto& f = function_by_id(id);
    for (u64 p : {2, 3, 7, 101}) {
      for (unsigned a = 1; a <= 8; ++a) {
        ASSERT_EQ(BigInt(static_cast<long>(f.at_prime_power_small(p, a))), f.at_prime_power(to_bigint(p), a))
            << id << " " << p << "^" << a;
      }
    }
  }
}

TEST(MultiplicativeProperty, PolyFormEvaluatesToRule) {
  for (const auto& id : registered_function_ids()) {
    const auto& f = function_by_id(id);
    if (!f.has_poly()) continue;
    for (unsigned a = 1; a <= 12; ++a) {
      for (u64 p : {2, 5, 13}) {
        BigInt v = 0;
        for (const auto& [power, coef] : f.poly(a)) v += coef * ipow(p, power);
        ASSERT_EQ(v, f.at_prime_power(to_bigint(p), a)) << id;
      }
    }
  }
}

TEST(MultiplicativeProperty, DirichletConvolutionIdentities) {
  const u64 N = 3000;
  const Sequence tau = values_up_to(function_by_id("tau"), N);
  const Sequence sigma = values_up_to(function_by_id("sigma"), N);
  const Sequence one_one = dirichlet_convolve(function_by_id("one"), function_by_id("one"), N);
  const Sequence one_id = dirichlet_convolve(function_by_id("one"), function_by_id("id"), N);
  const Sequence phi = values_up_to(function_by_id("phi"), N);
  const Sequence mu_id = dirichlet_convolve(function_by_id("mu"), function_by_id("id"), N);
  for (u64 n = 1; n <= N; ++n) {
    ASSERT_EQ(one_one[n], tau[n]);
    ASSERT_EQ(one_id[n], sigma[n]);
    ASSERT_EQ(mu_id[n], phi[n]);
  }
}

TEST(MultiplicativeProperty, SquaredIsPointwiseSquare) {
  const auto sq = squared(function_by_id("E_sigma"));
  for (u64 n = 1; n <= 500; ++n) {
    const BigInt v = function_by_id("E_sigma")(n);
    ASSERT_EQ(sq(n), v * v);
  }
}

}  // namespace
}  // namespace moddiv
