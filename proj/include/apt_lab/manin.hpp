#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "apt_lab/decide.hpp"
#include "apt_lab/json_util.hpp"
#include "apt_lab/primes.hpp"

namespace apt_lab {

/// Weight k (even, >= 2), level N and the prime set P whose squares divide N.
class ManinContext {
 public:
  /// Throws std::invalid_argument unless k is even and >= 2 and the primes p with
  /// p^2 | N are exactly P.
  ManinContext(unsigned k, std::uint64_t n, PrimeSet primes);

  unsigned k() const { return k_; }
  std::uint64_t level() const { return n_; }
  const PrimeSet& primes() const { return primes_; }
  std::uint64_t np() const { return np_; }

  std::uint64_t canon(std::int64_t r) const;
  std::uint64_t neg(std::uint64_t r) const { return r == 0 ? 0 : n_ - r; }
  bool in_e_n(std::uint64_t u, std::uint64_t v) const;
  /// gcd(u, v, N) = 1, gcd(u, N(P)) > 1 and gcd(v, N(P)) > 1.
  bool eligible(std::uint64_t u, std::uint64_t v) const;

 private:
  unsigned k_;
  std::uint64_t n_;
  PrimeSet primes_;
  std::uint64_t np_;
};

bool eligible_mod(std::uint64_t u, std::uint64_t v, std::uint64_t n, const PrimeSet& primes);

struct XiSymbol {
  unsigned j = 0;
  std::uint64_t u = 0;
  std::uint64_t v = 0;

  friend auto operator<=>(const XiSymbol&, const XiSymbol&) = default;
  friend bool operator==(const XiSymbol&, const XiSymbol&) = default;
};

/// Exact integer combination of symbols; zero coefficients are never stored.
class FormalSum {
 public:
  FormalSum() = default;
  FormalSum(const XiSymbol& s, mpz_class c) { add(s, std::move(c)); }

  void add(const XiSymbol& s, const mpz_class& c);
  void add_scaled(const FormalSum& other, const mpz_class& c);
  const std::map<XiSymbol, mpz_class>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  friend bool operator==(const FormalSum&, const FormalSum&) = default;

 private:
  std::map<XiSymbol, mpz_class> terms_;
};

/// xi(j; u, v) = -(-1)^j xi(k-2-j; v, -u)
FormalSum relation_41(const ManinContext& ctx, const XiSymbol& s);
/// xi(j; u, v) = (-1)^{k-2} xi(j; -u, -v)
FormalSum relation_43(const ManinContext& ctx, const XiSymbol& s);
/// Applies a symbol rewrite termwise.
FormalSum apply_termwise(const FormalSum& sum, const std::function<FormalSum(const XiSymbol&)>& rel);

struct Acyclic {};
struct ResidueCycle {
  std::vector<ResiduePair> cycle;
};
using AcyclicResult = std::variant<Acyclic, ResidueCycle, Undecided>;

AcyclicResult acyclic(std::uint64_t n, const PrimeSet& primes, std::size_t memory_cap = kDefaultMemoryCap);

class reduce_cycle_error : public std::runtime_error {
 public:
  reduce_cycle_error(const std::string& what, std::vector<XiSymbol> cycle)
      : std::runtime_error(what), cycle_(std::move(cycle)) {}
  const std::vector<XiSymbol>& cycle() const { return cycle_; }

 private:
  std::vector<XiSymbol> cycle_;
};

/// One rewrite step of an eligible symbol: (coefficient, child) pairs.
std::vector<std::pair<mpz_class, XiSymbol>> reduce_step(const ManinContext& ctx, const XiSymbol& s);

/// Rewrites `s` into terminal symbols (some coordinate coprime to N(P)).
class Reducer {
 public:
  explicit Reducer(ManinContext ctx) : ctx_(std::move(ctx)) {}
  const ManinContext& context() const { return ctx_; }
  /// Memoized, iterative; throws reduce_cycle_error on a cycle.
  FormalSum reduce(const XiSymbol& s);
  std::size_t memo_size() const { return memo_.size(); }

 private:
  ManinContext ctx_;
  std::map<XiSymbol, FormalSum> memo_;
};

/// Plain recursion without memoization (reference implementation).
FormalSum reduce_unmemoized(const ManinContext& ctx, const XiSymbol& s);

using ReduceFn = std::function<FormalSum(const XiSymbol&)>;

struct OracleOptions {
  std::size_t symbols_per_vector = 20;
  std::uint64_t seed = 20240601;
  /// Defaults to a memoized Reducer.
  ReduceFn reducer;
};

struct OracleReport {
  bool ok = false;
  std::size_t variables = 0;     // symbol classes after the sign and swap identities
  std::size_t zero_classes = 0;  // classes forced to 0 by a sign clash
  std::size_t rank = 0;
  std::size_t nullity = 0;
  std::size_t checks = 0;
  std::string failure;
};

/// Builds all sign, swap and three-term relations over symbols xi(j; u, v), (u, v) in E_N,
/// solves them over F_p (p = 2^31 - 1), samples `trials` random solutions and checks
/// xi(s) = sum beta xi(terminal) for random eligible s.
OracleReport oracle_report(unsigned k, std::uint64_t n, const PrimeSet& primes, std::size_t trials,
                           const OracleOptions& opts = {});
bool oracle_check(unsigned k, std::uint64_t n, const PrimeSet& primes, std::size_t trials);

Json formal_sum_to_json(const FormalSum& sum);

}  // namespace apt_lab
