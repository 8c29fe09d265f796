#include "moddiv/certified_real.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "moddiv/error.hpp"

namespace moddiv {

namespace {

constexpr mpfr_rnd_t kDown = MPFR_RNDD;
constexpr mpfr_rnd_t kUp = MPFR_RNDU;

long max_prec(const CertifiedReal& a, const CertifiedReal& b) {
  return std::max(a.precision(), b.precision());
}

// Scratch value with RAII cleanup.
struct Scratch {
  mpfr_t v;
  explicit Scratch(long prec) { mpfr_init2(v, prec); }
  ~Scratch() { mpfr_clear(v); }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;
};

std::string endpoint_string(const mpfr_t v, int digits, mpfr_rnd_t rnd) {
  if (mpfr_nan_p(v)) return "nan";
  if (mpfr_inf_p(v)) return mpfr_sgn(v) > 0 ? "inf" : "-inf";
  std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
  const char* fmt = rnd == kDown ? "%.*RDe" : "%.*RUe";
  mpfr_snprintf(buf.data(), buf.size(), fmt, digits - 1, v);
  return std::string(buf.data());
}

}  // namespace

CertifiedReal::CertifiedReal(long precision_bits) {
  if (precision_bits < MPFR_PREC_MIN || precision_bits > 1 << 20) {
    throw UsageError("precision_bits out of range");
  }
  mpfr_init2(lo_, precision_bits);
  mpfr_init2(hi_, precision_bits);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

CertifiedReal::CertifiedReal(const CertifiedReal& other) {
  mpfr_init2(lo_, mpfr_get_prec(other.lo_));
  mpfr_init2(hi_, mpfr_get_prec(other.hi_));
  mpfr_set(lo_, other.lo_, kDown);
  mpfr_set(hi_, other.hi_, kUp);
}

CertifiedReal::CertifiedReal(CertifiedReal&& other) noexcept {
  mpfr_init2(lo_, mpfr_get_prec(other.lo_));
  mpfr_init2(hi_, mpfr_get_prec(other.hi_));
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
}

CertifiedReal& CertifiedReal::operator=(const CertifiedReal& other) {
  if (this != &other) {
    mpfr_set_prec(lo_, mpfr_get_prec(other.lo_));
    mpfr_set_prec(hi_, mpfr_get_prec(other.hi_));
    mpfr_set(lo_, other.lo_, kDown);
    mpfr_set(hi_, other.hi_, kUp);
  }
  return *this;
}

CertifiedReal& CertifiedReal::operator=(CertifiedReal&& other) noexcept {
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
  return *this;
}

CertifiedReal::~CertifiedReal() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

CertifiedReal CertifiedReal::from_int(long v, long precision_bits) {
  CertifiedReal r(precision_bits);
  mpfr_set_si(r.lo_, v, kDown);
  mpfr_set_si(r.hi_, v, kUp);
  return r;
}

CertifiedReal CertifiedReal::from_bigint(const mpz_class& v, long precision_bits) {
  CertifiedReal r(precision_bits);
  mpfr_set_z(r.lo_, v.get_mpz_t(), kDown);
  mpfr_set_z(r.hi_, v.get_mpz_t(), kUp);
  return r;
}

CertifiedReal CertifiedReal::from_rational(const mpq_class& v, long precision_bits) {
  CertifiedReal r(precision_bits);
  mpfr_set_q(r.lo_, v.get_mpq_t(), kDown);
  mpfr_set_q(r.hi_, v.get_mpq_t(), kUp);
  return r;
}

CertifiedReal CertifiedReal::from_decimal(const std::string& s, long precision_bits) {
  CertifiedReal r(precision_bits);
  if (mpfr_set_str(r.lo_, s.c_str(), 10, kDown) != 0 ||
      mpfr_set_str(r.hi_, s.c_str(), 10, kUp) != 0) {
    throw UsageError("invalid decimal literal: " + s);
  }
  return r;
}

CertifiedReal CertifiedReal::from_double(double v, long precision_bits) {
  return from_bounds(v, v, precision_bits);
}

CertifiedReal CertifiedReal::from_bounds(double lo, double hi, long precision_bits) {
  if (!(lo <= hi)) throw UsageError("interval bounds out of order");
  CertifiedReal r(std::max<long>(precision_bits, 53));
  mpfr_set_d(r.lo_, lo, kDown);
  mpfr_set_d(r.hi_, hi, kUp);
  return r;
}

CertifiedReal CertifiedReal::pi(long precision_bits) {
  CertifiedReal r(precision_bits);
  mpfr_const_pi(r.lo_, kDown);
  mpfr_const_pi(r.hi_, kUp);
  return r;
}

CertifiedReal CertifiedReal::euler_gamma(long precision_bits) {
  CertifiedReal r(precision_bits);
  mpfr_const_euler(r.lo_, kDown);
  mpfr_const_euler(r.hi_, kUp);
  return r;
}

CertifiedReal CertifiedReal::log2(long precision_bits) {
  CertifiedReal r(precision_bits);
  mpfr_const_log2(r.lo_, kDown);
  mpfr_const_log2(r.hi_, kUp);
  return r;
}

double CertifiedReal::lo() const { return mpfr_get_d(lo_, kDown); }
double CertifiedReal::hi() const { return mpfr_get_d(hi_, kUp); }

double CertifiedReal::mid() const {
  Scratch m(precision() + 1);
  mpfr_add(m.v, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m.v, m.v, 1, MPFR_RNDN);
  return mpfr_get_d(m.v, MPFR_RNDN);
}

double CertifiedReal::width() const {
  Scratch w(precision());
  mpfr_sub(w.v, hi_, lo_, kUp);
  return mpfr_get_d(w.v, kUp);
}

bool CertifiedReal::contains(double v) const {
  return mpfr_cmp_d(lo_, v) <= 0 && mpfr_cmp_d(hi_, v) >= 0;
}

bool CertifiedReal::contains(const mpq_class& v) const {
  return mpfr_cmp_q(lo_, v.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, v.get_mpq_t()) >= 0;
}

bool CertifiedReal::contains(const CertifiedReal& inner) const {
  return mpfr_lessequal_p(lo_, inner.lo_) && mpfr_greaterequal_p(hi_, inner.hi_);
}

bool CertifiedReal::overlaps(const CertifiedReal& other) const {
  return mpfr_lessequal_p(lo_, other.hi_) && mpfr_lessequal_p(other.lo_, hi_);
}

std::string CertifiedReal::lo_string(int digits) const { return endpoint_string(lo_, digits, kDown); }
std::string CertifiedReal::hi_string(int digits) const { return endpoint_string(hi_, digits, kUp); }
std::string CertifiedReal::to_string(int digits) const {
  return "[" + lo_string(digits) + ", " + hi_string(digits) + "]";
}

CertifiedReal& CertifiedReal::operator+=(const CertifiedReal& b) {
  const long prec = max_prec(*this, b);
  mpfr_prec_round(lo_, prec, kDown);
  mpfr_prec_round(hi_, prec, kUp);
  mpfr_add(lo_, lo_, b.lo_, kDown);
  mpfr_add(hi_, hi_, b.hi_, kUp);
  return *this;
}

CertifiedReal& CertifiedReal::operator-=(const CertifiedReal& b) {
  const long prec = max_prec(*this, b);
  mpfr_prec_round(lo_, prec, kDown);
  mpfr_prec_round(hi_, prec, kUp);
  mpfr_sub(lo_, lo_, b.hi_, kDown);
  mpfr_sub(hi_, hi_, b.lo_, kUp);
  return *this;
}

CertifiedReal& CertifiedReal::operator*=(const CertifiedReal& b) {
  const long prec = max_prec(*this, b);
  Scratch c[4] = {Scratch(prec), Scratch(prec), Scratch(prec), Scratch(prec)};
  // Lower candidates rounded down, upper candidates rounded up.
  Scratch d[4] = {Scratch(prec), Scratch(prec), Scratch(prec), Scratch(prec)};
  const mpfr_t* xs[2] = {&lo_, &hi_};
  const mpfr_t* ys[2] = {&b.lo_, &b.hi_};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      mpfr_mul(c[i * 2 + j].v, *xs[i], *ys[j], kDown);
      mpfr_mul(d[i * 2 + j].v, *xs[i], *ys[j], kUp);
    }
  }
  mpfr_set_prec(lo_, prec);
  mpfr_set_prec(hi_, prec);
  mpfr_set(lo_, c[0].v, kDown);
  mpfr_set(hi_, d[0].v, kUp);
  for (int k = 1; k < 4; ++k) {
    mpfr_min(lo_, lo_, c[k].v, kDown);
    mpfr_max(hi_, hi_, d[k].v, kUp);
  }
  return *this;
}

CertifiedReal& CertifiedReal::operator/=(const CertifiedReal& b) {
  if (mpfr_sgn(b.lo_) <= 0 && mpfr_sgn(b.hi_) >= 0) {
    throw PrecisionError("interval division by an interval containing zero");
  }
  const long prec = max_prec(*this, b);
  CertifiedReal inv(prec);
  mpfr_ui_div(inv.lo_, 1, b.hi_, kDown);
  mpfr_ui_div(inv.hi_, 1, b.lo_, kUp);
  return *this *= inv;
}

CertifiedReal CertifiedReal::operator-() const {
  CertifiedReal r(precision());
  mpfr_neg(r.lo_, hi_, kDown);
  mpfr_neg(r.hi_, lo_, kUp);
  return r;
}

CertifiedReal CertifiedReal::widened(const CertifiedReal& radius) const {
  CertifiedReal r(*this);
  const long prec = max_prec(*this, radius);
  mpfr_prec_round(r.lo_, prec, kDown);
  mpfr_prec_round(r.hi_, prec, kUp);
  mpfr_sub(r.lo_, r.lo_, radius.hi_, kDown);
  mpfr_add(r.hi_, r.hi_, radius.hi_, kUp);
  return r;
}

CertifiedReal CertifiedReal::hull(const CertifiedReal& other) const {
  CertifiedReal r(max_prec(*this, other));
  mpfr_min(r.lo_, lo_, other.lo_, kDown);
  mpfr_max(r.hi_, hi_, other.hi_, kUp);
  return r;
}

CertifiedReal CertifiedReal::intersect(const CertifiedReal& other) const {
  if (!overlaps(other)) throw PrecisionError("intersection of disjoint intervals");
  CertifiedReal r(max_prec(*this, other));
  mpfr_max(r.lo_, lo_, other.lo_, kDown);
  mpfr_min(r.hi_, hi_, other.hi_, kUp);
  return r;
}

CertifiedReal CertifiedReal::min_with(const CertifiedReal& other) const {
  CertifiedReal r(max_prec(*this, other));
  mpfr_min(r.lo_, lo_, other.lo_, kDown);
  mpfr_min(r.hi_, hi_, other.hi_, kUp);
  return r;
}

CertifiedReal exp(const CertifiedReal& x) {
  CertifiedReal r(x.precision());
  mpfr_exp(r.lo_, x.lo_, kDown);
  mpfr_exp(r.hi_, x.hi_, kUp);
  return r;
}

CertifiedReal log(const CertifiedReal& x) {
  if (mpfr_sgn(x.lo_) <= 0) throw PrecisionError("log of an interval reaching <= 0");
  CertifiedReal r(x.precision());
  mpfr_log(r.lo_, x.lo_, kDown);
  mpfr_log(r.hi_, x.hi_, kUp);
  return r;
}

CertifiedReal log1p(const CertifiedReal& x) {
  if (mpfr_cmp_si(x.lo_, -1) <= 0) throw PrecisionError("log1p of an interval reaching <= -1");
  CertifiedReal r(x.precision());
  mpfr_log1p(r.lo_, x.lo_, kDown);
  mpfr_log1p(r.hi_, x.hi_, kUp);
  return r;
}

CertifiedReal sqrt(const CertifiedReal& x) {
  if (mpfr_sgn(x.lo_) < 0) throw PrecisionError("sqrt of an interval reaching < 0");
  CertifiedReal r(x.precision());
  mpfr_sqrt(r.lo_, x.lo_, kDown);
  mpfr_sqrt(r.hi_, x.hi_, kUp);
  return r;
}

CertifiedReal abs(const CertifiedReal& x) {
  if (mpfr_sgn(x.lo_) >= 0) return x;
  if (mpfr_sgn(x.hi_) <= 0) return -x;
  CertifiedReal r(x.precision());
  mpfr_set_zero(r.lo_, 1);
  mpfr_neg(r.hi_, x.lo_, kUp);
  mpfr_max(r.hi_, r.hi_, x.hi_, kUp);
  return r;
}

CertifiedReal CertifiedReal::upper() const {
  CertifiedReal r(precision());
  mpfr_set(r.lo_, hi_, kDown);
  mpfr_set(r.hi_, hi_, kUp);
  return r;
}

CertifiedReal CertifiedReal::rounded(long bits) const {
  CertifiedReal r(bits);
  mpfr_set(r.lo_, lo_, kDown);
  mpfr_set(r.hi_, hi_, kUp);
  return r;
}

bool CertifiedReal::certainly_below_pow2(long exponent) const {
  if (mpfr_sgn(hi_) <= 0) return true;
  return mpfr_get_exp(hi_) <= exponent;
}

CertifiedReal pow(const CertifiedReal& x, long n) {
  if (n < 0) return CertifiedReal::from_int(1, x.precision()) / pow(x, -n);
  CertifiedReal result = CertifiedReal::from_int(1, x.precision());
  CertifiedReal base = x;
  // Even powers of a sign-straddling interval must stay >= 0.
  if (n % 2 == 0 && mpfr_sgn(x.lo_) < 0) base = abs(x);
  while (n) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n) base *= base;
  }
  return result;
}

CertifiedReal pow(const CertifiedReal& x, const CertifiedReal& y) { return exp(y * log(x)); }

bool certainly_less(const CertifiedReal& a, const CertifiedReal& b) {
  return mpfr_less_p(a.hi_, b.lo_);
}

bool certainly_less_equal(const CertifiedReal& a, const CertifiedReal& b) {
  return mpfr_lessequal_p(a.hi_, b.lo_);
}

bool certainly_positive(const CertifiedReal& a) { return mpfr_sgn(a.lo_) > 0; }

}  // namespace moddiv
