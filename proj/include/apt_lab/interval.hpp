#pragma once

#include <string>

#include <gmpxx.h>
#include <mpfr.h>

namespace apt_lab {

inline constexpr mpfr_prec_t kDefaultPrecision = 256;

/// Owning MPFR value.
class Real {
 public:
  explicit Real(mpfr_prec_t prec = kDefaultPrecision) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

 private:
  mpfr_t v_;
};

/// Closed interval [lo, hi] with outward rounding on every operation.
class Interval {
 public:
  explicit Interval(mpfr_prec_t prec = kDefaultPrecision);
  static Interval point(const mpq_class& q, mpfr_prec_t prec = kDefaultPrecision);
  static Interval hull(const mpq_class& a, const mpq_class& b, mpfr_prec_t prec = kDefaultPrecision);
  /// [6/pi^2] enclosure.
  static Interval six_over_pi_squared(mpfr_prec_t prec = kDefaultPrecision);

  const Real& lo() const { return lo_; }
  const Real& hi() const { return hi_; }
  Real& lo() { return lo_; }
  Real& hi() { return hi_; }
  mpfr_prec_t precision() const { return lo_.precision(); }

  Interval operator+(const Interval& o) const;
  Interval operator-(const Interval& o) const;
  Interval operator*(const Interval& o) const;
  /// Throws std::domain_error when the divisor contains 0.
  Interval operator/(const Interval& o) const;
  Interval operator-() const;
  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }

  /// Adds [0, e] for a nonnegative error e.
  Interval widen_up(const Interval& e) const;
  /// Throws std::logic_error when disjoint.
  Interval intersect(const Interval& o) const;

  bool contains(const mpq_class& q) const;
  bool certainly_ge(const mpq_class& q) const;  // lo >= q
  bool certainly_gt(const mpq_class& q) const;  // lo > q
  bool certainly_lt(const Interval& o) const;   // hi < o.lo
  bool certainly_le(const Interval& o) const;   // hi <= o.lo

  double width() const;
  double midpoint() const;
  /// Midpoint rendered with `digits` significant decimals.
  std::string decimal(int digits = 40) const;
  /// Upper bound on |x - midpoint| for x in the interval, as a short decimal.
  std::string radius_string() const;

 private:
  Real lo_, hi_;
};

}  // namespace apt_lab
