#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "apt_lab/primes.hpp"

namespace apt_lab {

class integrity_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A vertex of an additive prime tree. Both coordinates are >= 1.
struct NodePair {
  mpz_class x;
  mpz_class y;

  NodePair() : x(1), y(1) {}
  NodePair(mpz_class x_, mpz_class y_);
  NodePair(unsigned long x_, unsigned long y_) : NodePair(mpz_class(x_), mpz_class(y_)) {}

  /// Parses "2,3".
  static NodePair parse(const std::string& text);

  std::string to_string() const;  // "(2,3)"

  friend bool operator==(const NodePair& a, const NodePair& b) {
    return a.x == b.x && a.y == b.y;
  }
};

struct NodePairHash {
  std::size_t operator()(const NodePair& p) const noexcept;
};

/// LStep: (X, Y) -> (X, X + Y).  RStep: (X, Y) -> (X + Y, Y).
enum class Step : char { L = 'L', R = 'R' };

using StepWord = std::vector<Step>;

StepWord parse_word(std::string_view text);
std::string word_to_string(const StepWord& word);

/// 2x2 matrix acting on row vectors from the right:
/// (x, y) * M = (a x + b y, c x + d y), stored as [[a, c], [b, d]].
struct Matrix2 {
  mpz_class a{1}, c{0};
  mpz_class b{0}, d{1};

  static Matrix2 identity() { return {}; }
  static Matrix2 elementary(Step s);

  Matrix2 operator*(const Matrix2& rhs) const;
  NodePair apply(const NodePair& p) const;
  mpz_class determinant() const { return a * d - b * c; }
  mpz_class max_entry() const;

  friend bool operator==(const Matrix2&, const Matrix2&) = default;
};

/// N_P(a) = gcd(a, N(P)).
mpz_class n_p(const mpz_class& a, const PrimeSet& primes);

/// gcd(X, Y, N(P)) = 1 and some p in P divides X and some p' in P divides Y.
bool branch_eligible(const NodePair& pair, const PrimeSet& primes);

/// ((X, X + Y), (X + Y, Y)): the LStep child first.
std::pair<NodePair, NodePair> children(const NodePair& pair);

NodePair step(const NodePair& pair, Step s);

Matrix2 path_matrix(const StepWord& word);

/// Fibonacci numbers with F_0 = F_1 = 1.
mpz_class fibonacci(std::size_t j);

enum class TreeStatus { Exhausted, Truncated };

struct ExpandLimits {
  std::size_t node_cap = 1'000'000;
  std::size_t depth_cap = 10'000;
};

/// Breadth-first closure of a root under the branching rule.
/// Nodes are stored in BFS order with the LStep child before the RStep child.
struct TreeResult {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  struct Node {
    NodePair pair;
    std::size_t parent = npos;
    std::size_t depth = 0;
    std::optional<Step> via;  // letter on the incoming edge
    std::size_t l_child = npos;
    std::size_t r_child = npos;
  };

  PrimeSet primes;
  std::vector<Node> nodes;
  TreeStatus status = TreeStatus::Exhausted;
  std::string truncation_reason;

  const NodePair& root() const { return nodes.front().pair; }
  std::size_t edge_count() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  bool exhausted() const { return status == TreeStatus::Exhausted; }
};

TreeResult expand(const PrimeSet& primes, const NodePair& root, ExpandLimits limits = {});

struct TreeStats {
  std::size_t longest_path = 0;   // L(P; x, y)
  std::size_t longest_chain = 0;  // C(P; x, y)
};

/// Throws std::invalid_argument on a truncated tree.
TreeStats tree_stats(const TreeResult& tree);

std::string export_dot(const TreeResult& tree);
std::string export_tree_json(const TreeResult& tree);

}  // namespace apt_lab
