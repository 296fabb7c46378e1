#include <cmath>
#include <fstream>

#include "doctest.h"

#include "apt_lab/catalog.hpp"
#include "apt_lab/density.hpp"

using namespace apt_lab;

namespace {

std::vector<PrimeSet> table3_sets() {
  std::vector<PrimeSet> out;
  auto cat = load_catalog(std::string(APT_LAB_DATA_DIR) + "/table3.jsonl");
  for (const auto& e : cat.entries()) {
    out.push_back(e.primes);
  }
  return out;
}

/// Exact rational from a decimal string such as "0.9999".
mpq_class dec(const std::string& digits) {
  auto dot = digits.find('.');
  std::string frac = digits.substr(dot + 1);
  mpq_class q(mpz_class(digits.substr(0, dot) + frac, 10), mpz_class("1" + std::string(frac.size(), '0'), 10));
  q.canonicalize();
  return q;
}

/// Plain long-double sums over primes <= bound.
struct DirectSums {
  long double s1 = 0, s2 = 0, zeta2 = 0;
};

DirectSums direct(Prime bound) {
  DirectSums d;
  for (Prime p : primes_up_to(bound)) {
    long double q = static_cast<long double>(p);
    long double x = 1.0L / (q * q - 1.0L);
    d.s1 += x;
    d.s2 += x * x;
    d.zeta2 += 1.0L / (q * q);
  }
  return d;
}

}  // namespace

TEST_SUITE("density") {
  TEST_CASE("c of the empty set is 6/pi^2") {
    auto v = c_of({});
    const long double ref = 6.0L / (M_PIl * M_PIl);
    CHECK(std::fabs(static_cast<long double>(v.value.midpoint()) - ref) < 1e-12L);
    CHECK(v.value.width() < 1e-60);
    CHECK(v.value.decimal(20).rfind("0.607927101854", 0) == 0);
  }

  TEST_CASE("exact rationals") {
    CHECK(c_rational({2, 3}) == mpq_class(1, 24));
    CHECK(c_rational({2, 3, 5, 7, 19}) == mpq_class(1, 9953280));
    CHECK(c_rational({2, 3, 5, 13, 17}) == mpq_class(1, 27869184));
    // Independent product of (p^2 - 1).
    mpz_class den = 1;
    for (unsigned long p : {2ul, 3ul, 5ul, 7ul, 19ul}) den *= p * p - 1;
    CHECK(den == 9953280);
    auto c = c_of({2, 3, 5, 7, 19});
    REQUIRE(c.rational_part);
    CHECK(*c.rational_part == mpq_class(1, 9953280));
  }

  TEST_CASE("prime zeta agrees with direct summation") {
    const Prime bound = 2'000'000;
    auto d = direct(bound);
    auto pz = prime_zeta(2);
    // 0 <= P(2) - partial <= sum_{n > bound} 1/n^2 < 1/bound
    CHECK(pz.midpoint() >= static_cast<double>(d.zeta2) - 1e-12);
    CHECK(pz.midpoint() <= static_cast<double>(d.zeta2) + 1.0 / bound);
    CHECK(std::fabs(pz.midpoint() - 0.45224742004106549850) < 1e-15);
    CHECK(pz.width() < 1e-50);
  }

  TEST_CASE("power sums respect the telescoping tail") {
    const Prime bound = 2'000'000;
    auto d = direct(bound);
    auto s1 = prime_power_sum(1);
    // sum_{n > X} 1/(n^2 - 1) = (1/X + 1/(X+1)) / 2
    const long double tail = 0.5L * (1.0L / bound + 1.0L / (bound + 1));
    CHECK(s1.midpoint() >= static_cast<double>(d.s1) - 1e-12);
    CHECK(s1.midpoint() <= static_cast<double>(d.s1 + tail) + 1e-12);
    CHECK(std::fabs(s1.midpoint() - 0.5516932976569991844) < 1e-15);
    auto s2 = prime_power_sum(2);
    CHECK(std::fabs(s2.midpoint() - static_cast<double>(d.s2)) < 1e-12);
  }

  TEST_CASE("prime tails are narrow and consistent with Newton's identities") {
    auto e = elementary_sums(9);
    REQUIRE(e.size() == 10);
    CHECK(e[0].contains(1));
    auto p1 = prime_power_sum(1), p2 = prime_power_sum(2);
    // e_2 = (p_1^2 - p_2) / 2
    Interval two = Interval::point(2);
    Interval e2 = (p1 * p1 - p2) / two;
    CHECK_NOTHROW(e2.intersect(e[2]));
    for (unsigned k = 1; k <= 7; ++k) CHECK(prime_tail(k).width() < 1e-10);
  }

  TEST_CASE("the densities of all finite sets sum to 1") {
    // (6/pi^2) prod_p p^2/(p^2 - 1) = (6/pi^2) zeta(2) = 1
    auto e = elementary_sums(12);
    Interval total(kDefaultPrecision);
    for (const auto& ek : e) total += ek;
    total = total * Interval::six_over_pi_squared();
    CHECK(total.midpoint() <= 1.0 + 1e-15);
    CHECK(total.certainly_gt(dec("0.99999999999999")));
  }

  TEST_CASE("upper bound from the catalogue") {
    auto sets = table3_sets();
    auto u = upper_bound(sets);
    // 0.99999991529... as displayed; the rounded-up 0.9999999153 lies above it.
    CHECK(u.value.certainly_ge(dec("0.99999991529")));
    CHECK(u.value.certainly_lt(Interval::point(dec("0.9999999153"))));
    CHECK(u.value.decimal(20).rfind("0.9999999152965083419", 0) == 0);
    mpq_class sum = 0;
    for (const auto& p : sets) {
      mpz_class den = 1;
      for (Prime q : p.primes()) den *= mpz_class(static_cast<unsigned long>(q * q - 1));
      sum += mpq_class(1, den);
    }
    sum.canonicalize();
    REQUIRE(u.rational_part);
    CHECK(*u.rational_part == -sum);
    CHECK(u.constant == 1);
    std::vector<PrimeSet> clash{{2, 3, 5, 7, 19}, {2, 3, 5, 7, 19, 23}};
    CHECK_THROWS_AS(upper_bound(clash), double_counting_error);
  }

  TEST_CASE("lower bounds increase with the certified strata") {
    auto sets = table3_sets();
    auto upper = upper_bound(sets).value;
    auto l0 = lower_bound(classification_from_sets(sets, {})).value;
    auto l5 = lower_bound(classification_from_sets(sets, {5})).value;
    auto l56 = lower_bound(classification_from_sets(sets, {5, 6})).value;
    CHECK(l0.certainly_lt(l5));
    CHECK(l5.certainly_lt(l56));
    CHECK(l56.certainly_gt(dec("0.999999")));
    CHECK(l56.certainly_lt(upper));
    CHECK_THROWS(lower_bound(classification_from_sets(sets, {6})));
    ClassificationData no3;
    no3.prim5 = {PrimeSet{2, 5, 7, 11, 13}};
    no3.certified = {5, 6, 7};
    CHECK_THROWS(lower_bound(no3));
  }

  TEST_CASE("JSON rendering") {
    auto j = density_to_json(c_of({2, 3}), "c");
    CHECK(j["rational_part"]["numerator"] == "1");
    CHECK(j["rational_part"]["denominator"] == "24");
    CHECK(j["value"].get<std::string>().rfind("0.02533", 0) == 0);
  }
}
