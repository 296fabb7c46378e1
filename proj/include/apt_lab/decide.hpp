#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "apt_lab/primes.hpp"
#include "apt_lab/residue_graph.hpp"

namespace apt_lab {

inline constexpr std::size_t kDefaultMemoryCap = std::size_t{1} << 30;

/// Reads APT_LAB_MEMORY_CAP (bytes, optional K/M/G suffix); falls back to the default.
std::size_t memory_cap_from_env();

struct FiniteType {
  /// L(P): the longest path in any tree over P.
  std::uint32_t longest_walk = 0;
  /// An eligible residue pair mod N(P) whose tree attains longest_walk.
  std::optional<ResiduePair> witness;
};

struct InfiniteType {
  /// Eligible residue pairs mod N(P) forming a directed cycle.
  std::vector<ResiduePair> cycle;
};

struct Undecided {
  std::string reason;
};

using TypeDecision = std::variant<FiniteType, InfiniteType, Undecided>;

/// Finite type holds exactly when the eligible residue graph modulo N(P) has no
/// directed cycle; every eligible residue pair lifts to an integer root, so the
/// longest walk equals L(P).
TypeDecision finite_type_decide(const PrimeSet& primes,
                                std::size_t memory_cap = kDefaultMemoryCap);

/// Acyclicity only (one byte per vertex); longest_walk is not computed.
TypeDecision finite_type_check(const PrimeSet& primes,
                               std::size_t memory_cap = kDefaultMemoryCap);

class infinite_type_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// C(P): the longest run of fixed-first-coordinate moves (x, y) -> (x, x + y)
/// through eligible pairs. Throws infinite_type_error when such a run is unbounded
/// or when P is not of finite type; Undecided propagates as std::runtime_error.
std::uint64_t longest_chain(const PrimeSet& primes, std::size_t memory_cap = kDefaultMemoryCap);

}  // namespace apt_lab
