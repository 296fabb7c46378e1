#include <functional>
#include <numeric>

#include "doctest.h"

#include "apt_lab/manin.hpp"

using namespace apt_lab;

namespace {

/// Recursive three-colour DFS over eligible pairs mod n.
bool brute_acyclic(std::uint64_t n, std::uint64_t np) {
  auto elig = [&](std::uint64_t u, std::uint64_t v) {
    return std::gcd(std::gcd(u, v), n) == 1 && std::gcd(u, np) > 1 && std::gcd(v, np) > 1;
  };
  std::vector<int> colour(n * n, 0);
  std::function<bool(std::uint64_t, std::uint64_t)> visit = [&](std::uint64_t u, std::uint64_t v) {
    int& c = colour[u * n + v];
    if (c == 1) return false;
    if (c == 2) return true;
    c = 1;
    std::uint64_t s = (u + v) % n;
    for (auto [a, b] : {std::pair{u, s}, std::pair{s, v}}) {
      if (elig(a, b) && !visit(a, b)) return false;
    }
    colour[u * n + v] = 2;
    return true;
  };
  for (std::uint64_t u = 0; u < n; ++u) {
    for (std::uint64_t v = 0; v < n; ++v) {
      if (elig(u, v) && !visit(u, v)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("manin") {
  TEST_CASE("context validation") {
    CHECK_THROWS(ManinContext(3, 36, {2, 3}));
    CHECK_THROWS(ManinContext(0, 36, {2, 3}));
    CHECK_THROWS(ManinContext(2, 36, {2}));
    CHECK_THROWS(ManinContext(2, 12, {2, 3}));
    ManinContext ctx(2, 36, {2, 3});
    CHECK(ctx.canon(-1) == 35);
    CHECK(ctx.neg(0) == 0);
    CHECK(ctx.eligible(2, 3));
    CHECK_FALSE(ctx.eligible(2, 4));
    CHECK_FALSE(ctx.eligible(1, 6));
    CHECK(eligible_mod(38, 3, 36, {2, 3}));
  }

  TEST_CASE("acyclicity matches a brute-force DFS") {
    CHECK(std::holds_alternative<Acyclic>(acyclic(36, {2, 3})));
    CHECK(std::holds_alternative<Acyclic>(acyclic(900, {2, 3, 5})));
    CHECK(brute_acyclic(36, 6));
    CHECK(brute_acyclic(900, 30));
    CHECK(std::holds_alternative<Undecided>(acyclic(900, {2, 3, 5}, 16)));
  }

  TEST_CASE("small sweep: N = prod p^2 with N(P) <= 100") {
    std::vector<Prime> ps{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
    std::size_t checked = 0;
    for (std::size_t mask = 1; mask < (std::size_t{1} << ps.size()); ++mask) {
      std::vector<Prime> chosen;
      std::uint64_t np = 1;
      for (std::size_t i = 0; i < ps.size() && np <= 100; ++i) {
        if (mask >> i & 1) chosen.push_back(ps[i]), np *= ps[i];
      }
      if (np > 100) continue;
      PrimeSet p(chosen);
      std::uint64_t n = np * np;
      bool fast = std::holds_alternative<Acyclic>(acyclic(n, p));
      REQUIRE(fast);
      REQUIRE(fast == brute_acyclic(n, np));
      ++checked;
    }
    CHECK(checked > 20);
  }

  TEST_CASE("reduce at k = 2, N = 36") {
    ManinContext ctx(2, 36, {2, 3});
    FormalSum expected;
    expected.add({0, 5, 3}, 1);
    expected.add({0, 2, 5}, 1);
    Reducer r(ctx);
    CHECK(r.reduce({0, 2, 3}) == expected);
    CHECK(reduce_unmemoized(ctx, {0, 2, 3}) == expected);
    auto j = formal_sum_to_json(expected);
    CHECK(j.dump() == R"({"terms":[{"j":0,"u":2,"v":5,"c":"1"},{"j":0,"u":5,"v":3,"c":"1"}]})");
    // Terminal symbols reduce to themselves.
    CHECK(r.reduce({0, 1, 6}) == FormalSum({0, 1, 6}, 1));
  }

  TEST_CASE("reduction output is terminal with binomial total weight") {
    ManinContext ctx(4, 900, {2, 3, 5});
    Reducer r(ctx);
    for (std::uint64_t u = 0; u < 900; u += 7) {
      for (std::uint64_t v = 0; v < 900; v += 11) {
        if (!ctx.eligible(u, v)) continue;
        auto sum = r.reduce({1, u, v});
        for (const auto& [s, c] : sum.terms()) {
          REQUIRE_FALSE(ctx.eligible(s.u, s.v));
          REQUIRE(s.j <= 2);
        }
        REQUIRE(sum == reduce_unmemoized(ctx, {1, u, v}));
      }
    }
  }

  TEST_CASE("relations are involutive for even k") {
    for (unsigned k : {2u, 4u, 6u}) {
      ManinContext ctx(k, 36, {2, 3});
      for (unsigned j = 0; j <= k - 2; ++j) {
        XiSymbol s{j, 4, 9};
        FormalSum one(s, 1);
        auto twice41 = apply_termwise(apply_termwise(one, [&](const XiSymbol& x) { return relation_41(ctx, x); }),
                                      [&](const XiSymbol& x) { return relation_41(ctx, x); });
        CHECK(twice41 == relation_43(ctx, s));
        auto twice43 = apply_termwise(relation_43(ctx, s), [&](const XiSymbol& x) { return relation_43(ctx, x); });
        CHECK(twice43 == one);
      }
    }
  }

  TEST_CASE("oracle agrees with the reduction") {
    CHECK(oracle_check(2, 36, {2, 3}, 5));
    CHECK(oracle_check(4, 36, {2, 3}, 3));
    auto rep = oracle_report(2, 36, {2, 3}, 2);
    CHECK(rep.ok);
    CHECK(rep.rank + rep.nullity == rep.variables);
  }

  TEST_CASE("a sign-mutated reduction fails the oracle") {
    ManinContext ctx(2, 36, {2, 3});
    OracleOptions opts;
    opts.reducer = [ctx](const XiSymbol& s) {
      FormalSum out;
      auto reduced = Reducer(ctx).reduce(s);
      for (const auto& [sym, c] : reduced.terms()) {
        out.add(sym, sym.u < sym.v ? mpz_class(-c) : c);
      }
      return out;
    };
    CHECK_FALSE(oracle_report(2, 36, {2, 3}, 5, opts).ok);
  }
}
