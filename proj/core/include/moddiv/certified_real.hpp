#pragma once

#include <string>

#include <gmpxx.h>
#include <mpfr.h>

namespace moddiv {

inline constexpr long kDefaultPrecisionBits = 128;

// Closed interval [lo, hi] of MPFR floats. Every operation rounds lo toward
// -inf and hi toward +inf, so the true value is always enclosed. Operations
// on two operands take the larger precision.
class CertifiedReal {
 public:
  explicit CertifiedReal(long precision_bits = kDefaultPrecisionBits);
  CertifiedReal(const CertifiedReal& other);
  CertifiedReal(CertifiedReal&& other) noexcept;
  CertifiedReal& operator=(const CertifiedReal& other);
  CertifiedReal& operator=(CertifiedReal&& other) noexcept;
  ~CertifiedReal();

  static CertifiedReal from_int(long v, long precision_bits = kDefaultPrecisionBits);
  static CertifiedReal from_bigint(const mpz_class& v, long precision_bits = kDefaultPrecisionBits);
  static CertifiedReal from_rational(const mpq_class& v, long precision_bits = kDefaultPrecisionBits);
  // Decimal string such as "0.993957", enclosed exactly.
  static CertifiedReal from_decimal(const std::string& s, long precision_bits = kDefaultPrecisionBits);
  // The double is taken as an exact binary value.
  static CertifiedReal from_double(double v, long precision_bits = kDefaultPrecisionBits);
  static CertifiedReal from_bounds(double lo, double hi, long precision_bits = kDefaultPrecisionBits);

  static CertifiedReal pi(long precision_bits = kDefaultPrecisionBits);
  static CertifiedReal euler_gamma(long precision_bits = kDefaultPrecisionBits);
  static CertifiedReal log2(long precision_bits = kDefaultPrecisionBits);

  long precision() const { return static_cast<long>(mpfr_get_prec(lo_)); }

  // Endpoints rounded outward to double.
  double lo() const;
  double hi() const;
  double mid() const;
  double width() const;
  const mpfr_t& lo_mpfr() const { return lo_; }
  const mpfr_t& hi_mpfr() const { return hi_; }

  bool contains(double v) const;
  bool contains(const mpq_class& v) const;
  bool contains(const CertifiedReal& inner) const;
  bool overlaps(const CertifiedReal& other) const;

  // Decimal endpoints with `digits` significant digits, rounded outward.
  std::string lo_string(int digits = 20) const;
  std::string hi_string(int digits = 20) const;
  std::string to_string(int digits = 20) const;

  CertifiedReal& operator+=(const CertifiedReal& b);
  CertifiedReal& operator-=(const CertifiedReal& b);
  CertifiedReal& operator*=(const CertifiedReal& b);
  CertifiedReal& operator/=(const CertifiedReal& b);

  friend CertifiedReal operator+(CertifiedReal a, const CertifiedReal& b) { return a += b; }
  friend CertifiedReal operator-(CertifiedReal a, const CertifiedReal& b) { return a -= b; }
  friend CertifiedReal operator*(CertifiedReal a, const CertifiedReal& b) { return a *= b; }
  friend CertifiedReal operator/(CertifiedReal a, const CertifiedReal& b) { return a /= b; }
  CertifiedReal operator-() const;

  // Point interval [hi, hi]: turns an enclosure of a bound into the bound.
  CertifiedReal upper() const;
  // Outward rounding of both endpoints to `bits` bits of precision.
  CertifiedReal rounded(long bits) const;
  // True when hi < 2^exponent.
  bool certainly_below_pow2(long exponent) const;

  // Widens by [-r, +r] for r >= 0 (an error bound).
  CertifiedReal widened(const CertifiedReal& radius) const;
  // Smallest interval containing both.
  CertifiedReal hull(const CertifiedReal& other) const;
  // Nonempty intersection; throws PrecisionError if disjoint.
  CertifiedReal intersect(const CertifiedReal& other) const;
  // Interval of min(x, y) over x in *this, y in other.
  CertifiedReal min_with(const CertifiedReal& other) const;

  friend CertifiedReal exp(const CertifiedReal& x);
  friend CertifiedReal log(const CertifiedReal& x);
  friend CertifiedReal log1p(const CertifiedReal& x);
  friend CertifiedReal sqrt(const CertifiedReal& x);
  friend CertifiedReal abs(const CertifiedReal& x);
  friend CertifiedReal pow(const CertifiedReal& x, long n);
  // x^y for x > 0 as exp(y log x).
  friend CertifiedReal pow(const CertifiedReal& x, const CertifiedReal& y);

  // Certain comparisons: true only when every point of a relates to every
  // point of b.
  friend bool certainly_less(const CertifiedReal& a, const CertifiedReal& b);
  friend bool certainly_less_equal(const CertifiedReal& a, const CertifiedReal& b);
  friend bool certainly_positive(const CertifiedReal& a);

 private:
  mpfr_t lo_;
  mpfr_t hi_;
};

}  // namespace moddiv
