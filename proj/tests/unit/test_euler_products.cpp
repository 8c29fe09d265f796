#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "moddiv/certified_real.hpp"
#include "moddiv/error.hpp"
#include "moddiv/euler_products.hpp"
#include "moddiv/multiplicative.hpp"
#include "decimal_window.hpp"
#include "oracle_values.hpp"

namespace moddiv {
namespace {

using CR = CertifiedReal;


TEST(CertifiedReal, EnclosesExactValues) {
  const CR third = CR::from_int(1) / CR::from_int(3);
  EXPECT_TRUE(third.contains(mpq_class(1, 3)));
  EXPECT_LT(third.width(), 1e-35);
  const CR s = sqrt(CR::from_int(2));
  EXPECT_TRUE(oracle::agrees_with(s, "1.41421356237309504880168872420969807856967187537694"));
  EXPECT_TRUE(oracle::agrees_with(CR::pi(), "3.14159265358979323846264338327950288419716939937510"));
  EXPECT_TRUE(oracle::agrees_with(CR::euler_gamma(), "0.57721566490153286060651209008240243104215933593992"));
  EXPECT_TRUE(oracle::agrees_with(exp(CR::from_int(1)), "2.71828182845904523536028747135266249775724709369995"));
  EXPECT_TRUE(oracle::agrees_with(log(CR::from_int(3)) / CR::from_int(2), "0.54930614433405484569762261846126285232374110"));
}

TEST(CertifiedReal, ComparisonsAreCertain) {
  const CR a = CR::from_bounds(1.0, 2.0);
  const CR b = CR::from_bounds(1.5, 3.0);
  EXPECT_FALSE(certainly_less(a, b));
  EXPECT_TRUE(certainly_less(a, CR::from_int(3)));
  EXPECT_TRUE(a.overlaps(b));
  EXPECT_THROW(a.intersect(CR::from_int(5)), PrecisionError);
}

TEST(CertifiedReal, RoundedNestsOutward) {
  const CR x = log(CR::from_int(10, 256));
  const CR r = x.rounded(64);
  EXPECT_TRUE(r.contains(x));
  EXPECT_EQ(r.precision(), 64);
}

TEST(CertifiedReal, HigherPrecisionNarrows) {
  const CR a = log(CR::from_int(7, 64));
  const CR b = log(CR::from_int(7, 256));
  EXPECT_TRUE(a.contains(b));
  EXPECT_LT(b.width(), a.width());
}

TEST(Zeta, ClassicalValues) {
  const CR pi = CR::pi(256);
  const CR z2 = zeta(2.0);
  EXPECT_TRUE(z2.overlaps(pi * pi / CR::from_int(6, 256)));
  const CR pi4 = pi * pi * pi * pi;
  EXPECT_TRUE(zeta(4.0).overlaps(pi4 / CR::from_int(90, 256)));
  EXPECT_TRUE(oracle::agrees_with(zeta(3.0), oracle::kZeta3));
  EXPECT_LT(zeta(3.0).width(), 1e-30);
  EXPECT_THROW(zeta(1.0005), UsageError);
}

TEST(Zeta, DoubledPrecisionNests) {
  const CR a = zeta(3.0, 128);
  const CR b = zeta(3.0, 256);
  EXPECT_TRUE(a.overlaps(b));
  EXPECT_LT(b.width(), a.width());
}

TEST(CorrectionFactor, ExactCancellations) {
  const ZetaFactorization z1{{{1, 0, 1}}, "H"};
  for (double s : {1.5, 2.0, 3.0}) {
    EXPECT_TRUE(correction_factor(function_by_id("one"), z1, s).contains(1.0)) << s;
  }
  const ZetaFactorization z2{{{1, 0, 2}}, "H"};
  EXPECT_TRUE(correction_factor(function_by_id("tau"), z2, 2.0).contains(1.0));
}

TEST(CorrectionFactor, ESigmaAtOneMatchesIndependentProduct) {
  const ZetaFactorization zf{{{1, 0, 1}, {2, 0, 2}, {3, 0, 1}}, "H"};
  const CR H = correction_factor(function_by_id("E_sigma"), zf, 1.0);
  EXPECT_LT(H.width(), 1e-6);
  EXPECT_TRUE(oracle::agrees_with(H, oracle::kHEsigma));
  EXPECT_GT(H.lo(), 0.0);
  EXPECT_LT(H.hi(), 1.5);
}

TEST(CorrectionFactor, RejectsBadConfigurations) {
  const ZetaFactorization zf{{{1, 0, 1}}, "H"};
  EulerOptions o;
  o.prime_limit = 999;
  EXPECT_THROW(correction_factor(function_by_id("one"), zf, 2.0, o), UsageError);
  // Local series of sigma at s = 1 diverge (sigma(p^a) p^-a does not decay).
  EXPECT_THROW(correction_factor(function_by_id("sigma"), zf, 1.0), UsageError);
}

TEST(PrimeZeta, MatchesIndependentValues) {
  EXPECT_TRUE(oracle::agrees_with(mertens_constant(), oracle::kMertensB));
  EXPECT_TRUE(oracle::agrees_with(prime_zeta(2), oracle::kPrimeZeta2));
  const CR tail = prime_zeta_tail(2, 100);
  CR head = CR::from_int(0);
  for (long p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97}) {
    head += CR::from_int(1) / CR::from_int(p * p);
  }
  EXPECT_TRUE((head + tail).overlaps(prime_zeta(2)));
}

TEST(LeadingConstant, Examples) {
  LeadingConstantOptions unit;
  unit.force_unit_correction = true;
  const CR c = leading_constant("frak_f_e", unit).value;
  EXPECT_TRUE(oracle::agrees_with(c, oracle::kZeta4Over2Zeta3));
  EXPECT_TRUE(leading_constant("one").value.contains(1.0));
  EXPECT_THROW(leading_constant("nope"), UsageError);
}

TEST(LeadingConstant, MatchIndependentEulerProducts) {
  EXPECT_TRUE(oracle::agrees_with(leading_constant("E_sigma").value, oracle::kC1Esigma));
  EXPECT_TRUE(oracle::agrees_with(leading_constant("E_tau_inf").value, oracle::kAEtauInf));
  EXPECT_TRUE(oracle::agrees_with(leading_constant("tau_inf_log").value, oracle::kD1TauInf));
  EXPECT_NEAR(leading_constant("frak_f_e").value.mid(), oracle::kCFrakDouble, 1e-12);
}

TEST(LeadingConstant, TargetsListed) {
  const auto t = leading_constant_targets();
  for (const char* name : {"one", "E_sigma", "E_sigma_sq", "tau_inf_log", "frak_f_e", "E_tau_inf", "tau_inf_sq_lead"}) {
    EXPECT_NE(std::find(t.begin(), t.end(), name), t.end()) << name;
  }
}

// --- properties -----------------------------------------------------------

TEST(EulerProductsProperty, RefinementNeverWidens) {
  const ZetaFactorization zf{{{1, 0, 1}, {2, 0, 2}, {3, 0, 1}}, "H"};
  const auto& f = function_by_id("E_sigma");
  EulerOptions base;
  base.prime_limit = 10'000;
  const CR a = correction_factor(f, zf, 1.0, base);
  EulerOptions more = base;
  more.prime_limit = 100'000;
  const CR b = correction_factor(f, zf, 1.0, more);
  EulerOptions prec = base;
  prec.precision_bits = 256;
  const CR c = correction_factor(f, zf, 1.0, prec);
  EXPECT_LE(b.width(), a.width());
  EXPECT_LE(c.width(), a.width());
  EXPECT_TRUE(a.overlaps(b));
  EXPECT_TRUE(a.overlaps(c));
}

TEST(EulerProductsProperty, ThreadCountDoesNotChangeResult) {
  WorkerPool one(1), three(3);
  LeadingConstantOptions a, b;
  a.pool = &one;
  b.pool = &three;
  const CR x = leading_constant("E_tau_inf", a).value;
  const CR y = leading_constant("E_tau_inf", b).value;
  EXPECT_EQ(x.lo_string(30), y.lo_string(30));
  EXPECT_EQ(x.hi_string(30), y.hi_string(30));
}

}  // namespace
}  // namespace moddiv
