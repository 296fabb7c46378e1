#include <random>
#include <set>

#include "doctest.h"

#include "apt_lab/apt_core.hpp"
#include "apt_lab/symbolic.hpp"

using namespace apt_lab;

namespace {

/// Every state reachable from the r-prime roots within `rounds` expansions.
std::vector<SymbolicState> reachable(std::size_t r, std::size_t rounds) {
  std::vector<SymbolicState> all, frontier;
  for (auto& s : initial_states(r)) frontier.push_back(canonicalize(s));
  for (std::size_t i = 0; i <= rounds && !frontier.empty(); ++i) {
    std::vector<SymbolicState> next;
    for (const auto& s : frontier) {
      all.push_back(s);
      if (i < rounds) {
        for (auto& c : expand_state(s)) next.push_back(std::move(c));
      }
    }
    frontier = std::move(next);
  }
  return all;
}

mpz_class eval(const SymbolicForm& f, const mpz_class& x, const mpz_class& y) {
  return mpz_class(std::to_string(f.alpha)) * x + mpz_class(std::to_string(f.beta)) * y;
}

}  // namespace

TEST_SUITE("symbolic") {
  TEST_CASE("initial states") {
    CHECK(initial_states(1).empty());
    CHECK(initial_states(2).size() == 1);
    CHECK(initial_states(3).size() == 2);
    CHECK(initial_states(4).size() == 4);
    for (const auto& s : initial_states(5)) CHECK(invariant_violation(s).empty());
  }

  TEST_CASE("form arithmetic") {
    CHECK(add_forms({1, 2}, {3, 5}) == SymbolicForm{4, 7});
    CHECK(form_det({1, 0}, {0, 1}) == 1);
    CHECK(form_det({2, 1}, {1, 1}) == 1);
    CHECK_THROWS_AS(add_forms({std::int64_t{1} << 62, 0}, {std::int64_t{1} << 62, 0}), std::overflow_error);
  }

  TEST_CASE("divisibility status") {
    SymbolicState s = initial_states(2).front();  // a: {p1}, b: {p2}
    CHECK(std::holds_alternative<AlreadyDivisible>(divisibility_status(s, kFormA)));
    // det(a, a+b) = 1: nothing divides, nothing can be forced.
    CHECK(std::holds_alternative<RequiresNewPrime>(divisibility_status(s, {1, 1})));
    // det(a, a+2b) = 2: p1 can be forced to 2; det(b, a+2b) = -1.
    auto st = divisibility_status(s, {1, 2});
    REQUIRE(std::holds_alternative<Forcible>(st));
    CHECK(std::get<Forcible>(st).options == std::vector<std::pair<std::size_t, Prime>>{{0, 2}});
    s.cor[0] = 2;
    CHECK(std::holds_alternative<AlreadyDivisible>(divisibility_status(s, {1, 2})));
  }

  TEST_CASE("L_2, L_3, L_4") {
    auto r2 = classify(2, 20);
    CHECK(r2.exact);
    CHECK(r2.l_r == 1);
    CHECK(r2.survivors.empty());
    auto r3 = classify(3, 20);
    CHECK(r3.exact);
    CHECK(r3.l_r == 3);
    CHECK(r3.survivors.empty());
    auto r4 = classify(4, 30, 2);
    CHECK(r4.exact);
    CHECK(r4.l_r == 8);
    CHECK(r4.survivors.empty());
    CHECK(r4.infinite_sets.empty());
  }

  TEST_CASE("classification is stable under a larger limit and worker count") {
    auto a = classify(3, 20, 1);
    auto b = classify(3, 40, 3);
    CHECK(a.l_r == b.l_r);
    CHECK(a.states_per_round == std::vector<std::size_t>(b.states_per_round.begin(),
                                                         b.states_per_round.begin() + a.states_per_round.size()));
  }

  TEST_CASE("reachable states are canonical and satisfy every invariant") {
    for (const auto& s : reachable(4, 6)) {
      REQUIRE(invariant_violation(s).empty());
      REQUIRE(canonicalize(s) == s);
      for (const auto& [f, g] : s.path) REQUIRE(form_det(f, g) == 1);
    }
  }

  TEST_CASE("replay over the integers reproduces the recorded divisibility") {
    std::mt19937_64 rng(11);
    auto states = reachable(4, 7);
    const std::vector<Prime> pool{101, 103, 107, 109, 113, 127, 131, 137};
    std::size_t checked = 0;
    for (const auto& s : states) {
      std::vector<Prime> values(s.rank());
      std::set<Prime> used;
      for (std::size_t id = 0; id < s.rank(); ++id) {
        if (s.cor[id]) used.insert(values[id] = *s.cor[id]);
      }
      std::size_t next = rng() % 3;
      for (std::size_t id = 0; id < s.rank(); ++id) {
        if (s.cor[id]) continue;
        while (used.count(pool[next])) ++next;
        used.insert(values[id] = pool[next]);
      }
      PrimeSet primes(values);
      auto [x, y] = crt_root(s, values);
      for (const auto& [anchor, ids] : s.pair) {
        for (std::size_t id : ids) {
          for (const auto& [f, g] : s.path) {
            for (const auto& form : {f, g}) {
              bool divides = mpz_divisible_ui_p(eval(form, x, y).get_mpz_t(), values[id]) != 0;
              __int128 d = form_det(anchor, form);
              bool predicted = d % static_cast<__int128>(values[id]) == 0;
              REQUIRE(divides == predicted);
            }
          }
        }
      }
      NodePair cur(x, y);
      for (std::size_t i = 0; i + 1 < s.path.size(); ++i) {
        REQUIRE(branch_eligible(cur, primes));
        Step step_taken = s.path[i + 1].first == s.path[i].first ? Step::L : Step::R;
        cur = step(cur, step_taken);
        REQUIRE(cur.x == eval(s.path[i + 1].first, x, y));
        REQUIRE(cur.y == eval(s.path[i + 1].second, x, y));
      }
      REQUIRE(branch_eligible(cur, primes));
      ++checked;
    }
    CHECK(checked == states.size());
  }

  TEST_CASE("state JSON round trip") {
    for (const auto& s : reachable(3, 4)) {
      auto j = state_to_json(s);
      REQUIRE(state_from_json(j) == s);
      REQUIRE(j.contains("cor"));
      REQUIRE(j.contains("pair"));
      REQUIRE(j.contains("path"));
    }
    auto j = state_to_json(initial_states(2).front());
    j["path"] = Json::array();
    CHECK_THROWS(state_from_json(j));
  }

  TEST_CASE("minimality") {
    std::vector<PrimeSet> none;
    CHECK(minimality_check({2, 3, 5, 7, 19}, none));
    std::vector<PrimeSet> known{{2, 3, 5, 13, 17}};
    CHECK_FALSE(minimality_check({2, 3, 5, 13, 17, 19}, known));
    CHECK_THROWS_AS(minimality_check({2, 3, 5, 7, 11, 13}, none, 1024), minimality_unresolved);
  }

  TEST_CASE("fully forced states") {
    SymbolicState s = initial_states(2).front();
    CHECK_FALSE(fully_forced(s));
    s.cor = {2, 3};
    CHECK(fully_forced(s) == PrimeSet{2, 3});
  }
}
