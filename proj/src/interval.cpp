#include "apt_lab/interval.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace apt_lab {

Interval::Interval(mpfr_prec_t prec) : lo_(prec), hi_(prec) {}

Interval Interval::point(const mpq_class& q, mpfr_prec_t prec) { return hull(q, q, prec); }

Interval Interval::hull(const mpq_class& a, const mpq_class& b, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_q(r.lo_.get(), (a < b ? a : b).get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_.get(), (a < b ? b : a).get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval Interval::six_over_pi_squared(mpfr_prec_t prec) {
  Interval r(prec);
  Real pi(prec);
  // lo: 6 / (pi_hi)^2
  mpfr_const_pi(pi.get(), MPFR_RNDU);
  mpfr_sqr(pi.get(), pi.get(), MPFR_RNDU);
  mpfr_ui_div(r.lo_.get(), 6, pi.get(), MPFR_RNDD);
  mpfr_const_pi(pi.get(), MPFR_RNDD);
  mpfr_sqr(pi.get(), pi.get(), MPFR_RNDD);
  mpfr_ui_div(r.hi_.get(), 6, pi.get(), MPFR_RNDU);
  return r;
}

Interval Interval::operator+(const Interval& o) const {
  Interval r(precision());
  mpfr_add(r.lo_.get(), lo_.get(), o.lo_.get(), MPFR_RNDD);
  mpfr_add(r.hi_.get(), hi_.get(), o.hi_.get(), MPFR_RNDU);
  return r;
}

Interval Interval::operator-(const Interval& o) const {
  Interval r(precision());
  mpfr_sub(r.lo_.get(), lo_.get(), o.hi_.get(), MPFR_RNDD);
  mpfr_sub(r.hi_.get(), hi_.get(), o.lo_.get(), MPFR_RNDU);
  return r;
}

Interval Interval::operator-() const {
  Interval r(precision());
  mpfr_neg(r.lo_.get(), hi_.get(), MPFR_RNDD);
  mpfr_neg(r.hi_.get(), lo_.get(), MPFR_RNDU);
  return r;
}

Interval Interval::operator*(const Interval& o) const {
  Interval r(precision());
  Real t(precision());
  const Real* xs[2] = {&lo_, &hi_};
  const Real* ys[2] = {&o.lo_, &o.hi_};
  bool first = true;
  for (auto* x : xs) {
    for (auto* y : ys) {
      mpfr_mul(t.get(), x->get(), y->get(), MPFR_RNDD);
      if (first || mpfr_less_p(t.get(), r.lo_.get())) mpfr_set(r.lo_.get(), t.get(), MPFR_RNDD);
      mpfr_mul(t.get(), x->get(), y->get(), MPFR_RNDU);
      if (first || mpfr_greater_p(t.get(), r.hi_.get())) mpfr_set(r.hi_.get(), t.get(), MPFR_RNDU);
      first = false;
    }
  }
  return r;
}

Interval Interval::operator/(const Interval& o) const {
  if (mpfr_sgn(o.lo_.get()) <= 0 && mpfr_sgn(o.hi_.get()) >= 0) {
    throw std::domain_error("interval division by an interval containing 0");
  }
  Interval inv(precision());
  mpfr_ui_div(inv.lo_.get(), 1, o.hi_.get(), MPFR_RNDD);
  mpfr_ui_div(inv.hi_.get(), 1, o.lo_.get(), MPFR_RNDU);
  return *this * inv;
}

Interval Interval::widen_up(const Interval& e) const {
  Interval r = *this;
  mpfr_add(r.hi_.get(), hi_.get(), e.hi_.get(), MPFR_RNDU);
  return r;
}

Interval Interval::intersect(const Interval& o) const {
  Interval r(precision());
  mpfr_max(r.lo_.get(), lo_.get(), o.lo_.get(), MPFR_RNDD);
  mpfr_min(r.hi_.get(), hi_.get(), o.hi_.get(), MPFR_RNDU);
  if (mpfr_greater_p(r.lo_.get(), r.hi_.get())) throw std::logic_error("disjoint enclosures");
  return r;
}

bool Interval::contains(const mpq_class& q) const {
  return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_.get(), q.get_mpq_t()) >= 0;
}

bool Interval::certainly_ge(const mpq_class& q) const { return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) >= 0; }
bool Interval::certainly_gt(const mpq_class& q) const { return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) > 0; }
bool Interval::certainly_lt(const Interval& o) const { return mpfr_less_p(hi_.get(), o.lo_.get()); }
bool Interval::certainly_le(const Interval& o) const { return mpfr_lessequal_p(hi_.get(), o.lo_.get()); }

double Interval::width() const {
  Real w(precision());
  mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
  return mpfr_get_d(w.get(), MPFR_RNDU);
}

double Interval::midpoint() const {
  Real m(precision());
  mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
  mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
  return mpfr_get_d(m.get(), MPFR_RNDN);
}

std::string Interval::decimal(int digits) const {
  Real m(precision());
  mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
  mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
  std::vector<char> buf(static_cast<std::size_t>(digits) + 32);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, m.get());
  return buf.data();
}

std::string Interval::radius_string() const {
  Real w(precision());
  mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
  mpfr_div_2ui(w.get(), w.get(), 1, MPFR_RNDU);
  char buf[64];
  mpfr_snprintf(buf, sizeof buf, "%.3RUe", w.get());
  return buf;
}

}  // namespace apt_lab
