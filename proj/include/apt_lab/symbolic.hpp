#pragma once

#include <cstddef>
#include <cstdint>
#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "apt_lab/decide.hpp"
#include "apt_lab/json_util.hpp"
#include "apt_lab/primes.hpp"

namespace apt_lab {

/// The linear form alpha*a + beta*b in the root indeterminates.
struct SymbolicForm {
  std::int64_t alpha = 0;
  std::int64_t beta = 0;

  friend auto operator<=>(const SymbolicForm&, const SymbolicForm&) = default;
  friend bool operator==(const SymbolicForm&, const SymbolicForm&) = default;
};

inline constexpr SymbolicForm kFormA{1, 0};
inline constexpr SymbolicForm kFormB{0, 1};

/// f + g; throws std::overflow_error once coefficients leave 62 bits.
SymbolicForm add_forms(const SymbolicForm& f, const SymbolicForm& g);
/// f.alpha * g.beta - f.beta * g.alpha
__int128 form_det(const SymbolicForm& f, const SymbolicForm& g);

using FormPair = std::pair<SymbolicForm, SymbolicForm>;

/// One node of the symbolic search. Prime ids are indices into `cor`; nullopt
/// marks a Free prime. Each paired id is anchored at exactly one form, and a
/// prime anchored at f divides a form g exactly when it divides det(f, g).
struct SymbolicState {
  std::vector<std::optional<Prime>> cor;
  std::map<SymbolicForm, std::vector<std::size_t>> pair;
  std::vector<FormPair> path;

  std::size_t rank() const { return cor.size(); }
  std::vector<std::size_t> unused_ids() const;

  friend bool operator==(const SymbolicState&, const SymbolicState&) = default;
};

struct AlreadyDivisible {
  std::size_t by;
};
struct Forcible {
  std::vector<std::pair<std::size_t, Prime>> options;
};
struct RequiresNewPrime {};
using Divisibility = std::variant<AlreadyDivisible, Forcible, RequiresNewPrime>;

/// Root assignments {a: S_a, b: S_b} with |S_a| >= |S_b| >= 1, |S_a| + |S_b| <= r,
/// ids consecutive from 0; empty when r < 2.
std::vector<SymbolicState> initial_states(std::size_t r);

Divisibility divisibility_status(const SymbolicState& state, const SymbolicForm& form);

/// Relabels ids: anchors in form order, Forced ids (by value) before Free ones,
/// unused ids last.
SymbolicState canonicalize(SymbolicState state);
std::string canonical_key(const SymbolicState& state);

/// Empty when every invariant holds, otherwise the first violation.
std::string invariant_violation(const SymbolicState& state);

/// All canonical children of one state; empty means the state dies.
std::vector<SymbolicState> expand_state(const SymbolicState& state);

/// The concrete set when every prime id is Forced.
std::optional<PrimeSet> fully_forced(const SymbolicState& state);

struct ClassifyResult {
  /// States alive after the last round, plus fully Forced states whose set is of
  /// infinite type (those stop expanding as soon as they appear).
  std::vector<SymbolicState> survivors;
  std::vector<PrimeSet> infinite_sets;
  /// L_r when `exact` (no undecided state remains), otherwise a lower bound
  /// taken over dead states only.
  std::size_t l_r = 0;
  bool exact = false;
  std::optional<SymbolicState> longest_dead;
  std::vector<std::size_t> states_per_round;
};

ClassifyResult classify(std::size_t r, std::size_t limit, unsigned jobs = 1);

/// Default round limits: 20/20/30/60/150 for r = 2..6.
std::size_t default_classify_limit(std::size_t r);

struct InstantiateOptions {
  Prime prime_bound = 10000;
  std::size_t max_assignments = 2000;
  std::size_t depth_cap = 0;  // 0: twice the path length, at least 40
  std::size_t node_cap = 2'000'000;
};

/// Integer root (x, y) realising the state's pairings for the concrete values.
std::pair<mpz_class, mpz_class> crt_root(const SymbolicState& state,
                                         const std::vector<Prime>& values);

/// Concrete prime sets for the state whose CRT root admits a certificate.
std::vector<PrimeSet> instantiate(const SymbolicState& state, const InstantiateOptions& opts = {});

class minimality_unresolved : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// True iff no proper subset of `primes` is of infinite type. Sets of size <= 4
/// are finite; larger maximal subsets are checked against `known_infinite` and then
/// decided on residues.
bool minimality_check(const PrimeSet& primes, std::span<const PrimeSet> known_infinite,
                      std::size_t memory_cap = kDefaultMemoryCap);

Json state_to_json(const SymbolicState& state);
SymbolicState state_from_json(const Json& j);

}  // namespace apt_lab
