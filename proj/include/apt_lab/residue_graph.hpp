#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "apt_lab/primes.hpp"

namespace apt_lab {

using Residue = std::uint64_t;
using ResiduePair = std::pair<Residue, Residue>;

/// Branching structure of additive prime trees reduced modulo N.
///
/// A residue pair (u, v) is eligible when gcd(u, v, N) = 1 and both
/// gcd(u, N(P)) > 1 and gcd(v, N(P)) > 1. Its out-edges go to
/// (u, u + v) and (u + v, v); an ineligible target is a leaf.
/// Every prime of P must divide N.
class ResidueGraph {
 public:
  ResidueGraph(std::uint64_t modulus, const PrimeSet& primes);

  std::uint64_t modulus() const { return modulus_; }
  const PrimeSet& primes() const { return primes_; }

  bool eligible(Residue u, Residue v) const {
    std::uint64_t mu = masks_[u];
    std::uint64_t mv = masks_[v];
    return (mu & mv) == 0 && (mu & p_mask_) != 0 && (mv & p_mask_) != 0;
  }
  /// gcd(u, v, N) = 1.
  bool coprime_pair(Residue u, Residue v) const { return (masks_[u] & masks_[v]) == 0; }

  Residue add(Residue a, Residue b) const {
    Residue s = a + b;
    return s >= modulus_ ? s - modulus_ : s;
  }

  std::size_t vertex_count() const { return static_cast<std::size_t>(modulus_) * modulus_; }

 private:
  std::uint64_t modulus_;
  PrimeSet primes_;
  std::uint64_t p_mask_ = 0;
  std::vector<std::uint64_t> masks_;  // bit i set iff the i-th prime of N divides the residue
};

struct WalkSearchOptions {
  bool want_longest_walk = true;
  std::size_t memory_cap_bytes = std::size_t{1} << 30;
};

struct WalkSearchResult {
  enum class Kind { Acyclic, Cycle, Undecided } kind = Kind::Undecided;
  /// Longest walk (edge count, leaf edge included) from any eligible pair.
  std::uint32_t longest_walk = 0;
  /// An eligible pair whose walk attains longest_walk (absent if nothing is eligible).
  std::optional<ResiduePair> longest_start;
  /// For Kind::Cycle: v_0 -> v_1 -> ... -> v_{k-1} -> v_0.
  std::vector<ResiduePair> cycle;
  std::string reason;
};

std::size_t walk_search_bytes(std::uint64_t modulus, bool want_longest_walk);

/// Depth-first search over all eligible residue pairs. Reports a directed
/// cycle as soon as one is found.
WalkSearchResult search_walks(const ResidueGraph& graph, const WalkSearchOptions& options);

/// Longest run of consecutive (u, v) -> (u, u + v) moves through eligible pairs.
/// Returns nullopt when some run never ends (a cycle of fixed-first-coordinate moves).
std::optional<std::uint64_t> longest_fixed_first_run(const ResidueGraph& graph);

}  // namespace apt_lab
