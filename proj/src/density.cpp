#include "apt_lab/density.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace apt_lab {

namespace {

int moebius(unsigned n) {
  int mu = 1;
  for (unsigned p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  if (n > 1) mu = -mu;
  return mu;
}

/// [0, 3 * 2^{-e}] : bound for zeta(e) - 1 and for log zeta(e), e >= 2.
Interval zeta_excess_bound(unsigned e, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_ui_2exp(r.hi().get(), 3, -static_cast<long>(e), MPFR_RNDU);
  return r;
}

Interval log_zeta(unsigned m, mpfr_prec_t prec) {
  Interval r(prec);
  Real z(prec);
  mpfr_zeta_ui(z.get(), m, MPFR_RNDD);
  mpfr_log(r.lo().get(), z.get(), MPFR_RNDD);
  mpfr_zeta_ui(z.get(), m, MPFR_RNDU);
  mpfr_log(r.hi().get(), z.get(), MPFR_RNDU);
  if (mpfr_sgn(r.lo().get()) < 0) mpfr_set_zero(r.lo().get(), 1);
  return r;
}

Interval abs_hull(const Interval& e) {
  // [-e.hi, e.hi]
  Interval r = e;
  mpfr_neg(r.lo().get(), e.hi().get(), MPFR_RNDD);
  return r;
}

mpq_class x_of(Prime p) {
  mpz_class pp = static_cast<unsigned long>(p);
  return mpq_class(1, pp * pp - 1);
}

void require_antichain(std::span<const PrimeSet> sets) {
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = 0; j < sets.size(); ++j) {
      if (i != j && sets[i].is_subset_of(sets[j])) {
        throw double_counting_error(sets[i].to_string() + " is contained in " + sets[j].to_string() +
                                    " (double counting)");
      }
    }
  }
}

}  // namespace

mpq_class c_rational(const PrimeSet& primes) {
  mpz_class den = 1;
  for (Prime p : primes.primes()) {
    mpz_class pp = static_cast<unsigned long>(p);
    den *= pp * pp - 1;
  }
  return mpq_class(1, den);
}

DensityValue c_of(const PrimeSet& primes) {
  DensityValue v;
  v.rational_part = c_rational(primes);
  v.value = Interval::six_over_pi_squared() * Interval::point(*v.rational_part);
  return v;
}

Interval prime_zeta(unsigned s, mpfr_prec_t prec) {
  if (s < 2) throw std::invalid_argument("prime_zeta needs s >= 2");
  static std::mutex mu;
  static std::map<std::pair<unsigned, mpfr_prec_t>, Interval> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find({s, prec}); it != cache.end()) return it->second;
  Interval sum(prec);
  const unsigned nmax = static_cast<unsigned>(prec) / s + 8;
  for (unsigned n = 1; n <= nmax; ++n) {
    int mu = moebius(n);
    if (mu == 0) continue;
    sum += Interval::point(mpq_class(mu, n), prec) * log_zeta(n * s, prec);
  }
  // sum_{n > nmax} |mu(n)/n log zeta(ns)| <= 2 * 3 * 2^{-(nmax+1) s}
  sum += abs_hull(zeta_excess_bound((nmax + 1) * s - 1, prec));
  cache.emplace(std::make_pair(s, prec), sum);
  return sum;
}

Interval prime_power_sum(unsigned j, Prime cutoff, mpfr_prec_t prec) {
  if (j < 1) throw std::invalid_argument("power sums start at j = 1");
  if (cutoff < 2) throw std::invalid_argument("cutoff must be >= 2");

  // Direct: primes <= cutoff, then sum_{n > X} (n^2-1)^{-j} <= (1/2)(1/X + 1/(X+1)) X^{-2(j-1)}.
  Interval direct(prec);
  Real t(prec);
  for (Prime p : primes_up_to(cutoff)) {
    const unsigned long pp = static_cast<unsigned long>(p);
    // (p^2 - 1)^{-j}, rounded each way
    mpfr_set_ui(t.get(), pp, MPFR_RNDN);
    mpfr_sqr(t.get(), t.get(), MPFR_RNDU);
    mpfr_sub_ui(t.get(), t.get(), 1, MPFR_RNDU);
    mpfr_pow_ui(t.get(), t.get(), j, MPFR_RNDU);
    mpfr_ui_div(t.get(), 1, t.get(), MPFR_RNDD);
    mpfr_add(direct.lo().get(), direct.lo().get(), t.get(), MPFR_RNDD);
    mpfr_set_ui(t.get(), pp, MPFR_RNDN);
    mpfr_sqr(t.get(), t.get(), MPFR_RNDD);
    mpfr_sub_ui(t.get(), t.get(), 1, MPFR_RNDD);
    mpfr_pow_ui(t.get(), t.get(), j, MPFR_RNDD);
    mpfr_ui_div(t.get(), 1, t.get(), MPFR_RNDU);
    mpfr_add(direct.hi().get(), direct.hi().get(), t.get(), MPFR_RNDU);
  }
  mpz_class x = static_cast<unsigned long>(cutoff);
  mpq_class tele = mpq_class(1, 2) * (mpq_class(1, x) + mpq_class(1, x + 1));
  mpz_class scale;
  mpz_pow_ui(scale.get_mpz_t(), x.get_mpz_t(), 2 * (j - 1));
  tele /= scale;
  direct = direct.widen_up(Interval::point(tele, prec));

  // Zeta side: (p^2-1)^{-j} = sum_{i >= 0} C(i+j-1, j-1) p^{-2(i+j)}.
  const unsigned imax = static_cast<unsigned>(prec) / 2 + 2 * j + 8;
  Interval zeta_side(prec);
  mpz_class binom;
  for (unsigned i = 0; i <= imax; ++i) {
    mpz_bin_uiui(binom.get_mpz_t(), i + j - 1, j - 1);
    zeta_side += Interval::point(mpq_class(binom), prec) * prime_zeta(2 * (i + j), prec);
  }
  // Consecutive terms shrink by (i+j)/(4(i+1)) <= 1/2 here, so the tail is at most twice the next term.
  mpz_bin_uiui(binom.get_mpz_t(), imax + j, j - 1);
  Interval tail = Interval::point(mpq_class(2 * binom), prec) * zeta_excess_bound(2 * (imax + 1 + j), prec);
  zeta_side = zeta_side.widen_up(tail);

  return direct.intersect(zeta_side);
}

std::vector<Interval> elementary_sums(unsigned kmax, Prime cutoff, mpfr_prec_t prec) {
  static std::mutex mu;
  static std::map<std::tuple<unsigned, Prime, mpfr_prec_t>, Interval> power_cache;
  std::vector<Interval> p(kmax + 1, Interval(prec));
  for (unsigned j = 1; j <= kmax; ++j) {
    std::lock_guard lock(mu);
    auto key = std::make_tuple(j, cutoff, prec);
    auto it = power_cache.find(key);
    if (it == power_cache.end()) it = power_cache.emplace(key, prime_power_sum(j, cutoff, prec)).first;
    p[j] = it->second;
  }
  std::vector<Interval> e(kmax + 1, Interval(prec));
  e[0] = Interval::point(1, prec);
  for (unsigned k = 1; k <= kmax; ++k) {
    Interval acc(prec);
    for (unsigned i = 1; i <= k; ++i) {
      Interval term = e[k - i] * p[i];
      if (i % 2) acc += term;
      else acc -= term;
    }
    e[k] = acc / Interval::point(mpq_class(k), prec);
  }
  return e;
}

Interval prime_tail(unsigned k, Prime cutoff, double tolerance) {
  Interval e = elementary_sums(k, cutoff).back();
  if (e.width() > tolerance) {
    throw std::runtime_error("enclosure of e_" + std::to_string(k) + " is wider than " +
                             std::to_string(tolerance) + "; use a larger cutoff");
  }
  return e;
}

DensityValue upper_bound(std::span<const PrimeSet> known_prims) {
  require_antichain(known_prims);
  mpq_class sum = 0;
  for (const auto& p : known_prims) sum += c_rational(p);
  DensityValue v;
  v.constant = 1;
  v.rational_part = -sum;
  v.value = Interval::point(1) - Interval::six_over_pi_squared() * Interval::point(sum);
  return v;
}

ClassificationData classification_from_sets(std::span<const PrimeSet> sets, std::set<unsigned> certified) {
  ClassificationData d;
  for (const auto& p : sets) {
    if (p.size() == 5) d.prim5.push_back(p);
    else if (p.size() == 6) d.prim6.push_back(p);
    else if (p.size() == 7 && !p.contains(3)) d.prim7_without_3.push_back(p);
  }
  d.certified = std::move(certified);
  return d;
}

DensityValue lower_bound(const ClassificationData& d) {
  static const std::set<std::set<unsigned>> allowed = {{}, {5}, {5, 6}, {5, 6, 7}};
  if (!allowed.count(d.certified)) {
    throw std::invalid_argument("inconsistent certified strata: expected none, {5}, {5,6} or {5,6,7}");
  }
  for (const auto& p : d.prim5) {
    if (p.size() != 5) throw std::invalid_argument("prim5 entry " + p.to_string() + " has wrong size");
  }
  for (const auto& p : d.prim6) {
    if (p.size() != 6) throw std::invalid_argument("prim6 entry " + p.to_string() + " has wrong size");
  }
  for (const auto& p : d.prim7_without_3) {
    if (p.size() != 7 || p.contains(3)) {
      throw std::invalid_argument("prim7 entry " + p.to_string() + " must have 7 primes without 3");
    }
  }
  std::vector<PrimeSet> all = d.prim5;
  all.insert(all.end(), d.prim6.begin(), d.prim6.end());
  all.insert(all.end(), d.prim7_without_3.begin(), d.prim7_without_3.end());
  require_antichain(all);

  const unsigned top = d.certified.empty() ? 4 : *d.certified.rbegin();
  const unsigned full = std::min(top, 6u);
  const bool with7 = top == 7;
  if (with7) {
    for (const auto& p : d.prim5) {
      if (!p.contains(3)) {
        throw std::invalid_argument("stratum 7 needs 3 in every 5-element primitive set; " + p.to_string() +
                                    " lacks it");
      }
    }
  }

  auto e = elementary_sums(7, d.cutoff);
  Interval positive(kDefaultPrecision);
  for (unsigned k = 0; k <= full; ++k) positive += e[k];
  if (with7) {
    // e_k without the prime 3: e'_k = e_k - x_3 e'_{k-1}
    const Interval x3 = Interval::point(x_of(3));
    Interval prev = e[0];
    for (unsigned k = 1; k <= 7; ++k) prev = e[k] - x3 * prev;
    positive += prev;
  }

  mpq_class removed = 0;
  if (full >= 5) for (const auto& p : d.prim5) removed += c_rational(p);
  if (full >= 6) for (const auto& p : d.prim6) removed += c_rational(p);
  if (with7) for (const auto& p : d.prim7_without_3) removed += c_rational(p);

  const Interval s1 = elementary_sums(1, d.cutoff)[1];
  Interval extensions(kDefaultPrecision);
  if (full >= 6) {
    for (const auto& p : d.prim5) {
      mpq_class inside = 0;
      for (Prime q : p.primes()) inside += x_of(q);
      extensions += Interval::point(c_rational(p)) * (s1 - Interval::point(inside));
    }
  }
  if (with7) {
    for (const auto& p : d.prim6) {
      if (p.contains(3)) continue;
      mpq_class inside = x_of(3);
      for (Prime q : p.primes()) inside += x_of(q);
      extensions += Interval::point(c_rational(p)) * (s1 - Interval::point(inside));
    }
  }

  DensityValue v;
  v.value = Interval::six_over_pi_squared() * (positive - Interval::point(removed) - extensions);
  return v;
}

Json density_to_json(const DensityValue& v, const std::string& quantity) {
  Json j;
  j["quantity"] = quantity;
  if (v.rational_part) {
    j["constant"] = {{"numerator", big_to_string(v.constant.get_num())},
                     {"denominator", big_to_string(v.constant.get_den())}};
    j["rational_part"] = {{"numerator", big_to_string(v.rational_part->get_num())},
                          {"denominator", big_to_string(v.rational_part->get_den())}};
  } else {
    j["rational_part"] = nullptr;
  }
  j["value"] = v.value.decimal(40);
  j["error_bound"] = v.value.radius_string();
  std::vector<char> buf(128);
  mpfr_snprintf(buf.data(), buf.size(), "%.40RDg", v.value.lo().get());
  std::string lo = buf.data();
  mpfr_snprintf(buf.data(), buf.size(), "%.40RUg", v.value.hi().get());
  j["enclosure"] = {{"lo", lo}, {"hi", std::string(buf.data())}};
  return j;
}

}  // namespace apt_lab
