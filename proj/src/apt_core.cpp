#include "apt_lab/apt_core.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_set>

#include "apt_lab/json_util.hpp"

namespace apt_lab {

namespace {

std::size_t hash_mpz(const mpz_class& v, std::size_t seed) {
  const auto* raw = v.get_mpz_t();
  std::size_t n = mpz_size(raw);
  for (std::size_t i = 0; i < n; ++i) {
    seed ^= static_cast<std::size_t>(mpz_getlimbn(raw, i)) + 0x9e3779b97f4a7c15ULL +
            (seed << 6) + (seed >> 2);
  }
  return seed ^ n;
}

mpz_class parse_positive(const std::string& token) {
  mpz_class v;
  if (token.empty() || v.set_str(token, 10) != 0 || v < 1) {
    throw std::invalid_argument("expected a positive integer, got '" + token + "'");
  }
  return v;
}

}  // namespace

NodePair::NodePair(mpz_class x_, mpz_class y_) : x(std::move(x_)), y(std::move(y_)) {
  if (x < 1 || y < 1) throw std::invalid_argument("node coordinates must be >= 1");
}

NodePair NodePair::parse(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](char c) { return c == '(' || c == ')' || ::isspace(c); }),
          s.end());
  auto comma = s.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("expected 'x,y', got " + text);
  return NodePair(parse_positive(s.substr(0, comma)), parse_positive(s.substr(comma + 1)));
}

std::string NodePair::to_string() const {
  return "(" + x.get_str() + "," + y.get_str() + ")";
}

std::size_t NodePairHash::operator()(const NodePair& p) const noexcept {
  return hash_mpz(p.y, hash_mpz(p.x, 0));
}

StepWord parse_word(std::string_view text) {
  StepWord word;
  word.reserve(text.size());
  for (char ch : text) {
    if (ch == 'L') word.push_back(Step::L);
    else if (ch == 'R') word.push_back(Step::R);
    else throw std::invalid_argument("step word letters must be L or R");
  }
  return word;
}

std::string word_to_string(const StepWord& word) {
  std::string out;
  out.reserve(word.size());
  for (Step s : word) out.push_back(static_cast<char>(s));
  return out;
}

Matrix2 Matrix2::elementary(Step s) {
  Matrix2 m;
  if (s == Step::L) m.c = 1;  // (x, y) -> (x, x + y)
  else m.b = 1;               // (x, y) -> (x + y, y)
  return m;
}

Matrix2 Matrix2::operator*(const Matrix2& rhs) const {
  Matrix2 out;
  out.a = a * rhs.a + c * rhs.b;
  out.c = a * rhs.c + c * rhs.d;
  out.b = b * rhs.a + d * rhs.b;
  out.d = b * rhs.c + d * rhs.d;
  return out;
}

NodePair Matrix2::apply(const NodePair& p) const {
  return NodePair(a * p.x + b * p.y, c * p.x + d * p.y);
}

mpz_class Matrix2::max_entry() const {
  mpz_class m = a;
  for (const mpz_class* v : {&b, &c, &d}) {
    if (*v > m) m = *v;
  }
  return m;
}

mpz_class n_p(const mpz_class& a, const PrimeSet& primes) {
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), primes.product().get_mpz_t());
  return g;
}

bool branch_eligible(const NodePair& pair, const PrimeSet& primes) {
  if (primes.empty()) return false;
  bool x_hit = false;
  bool y_hit = false;
  for (Prime p : primes.primes()) {
    bool dx = mpz_divisible_ui_p(pair.x.get_mpz_t(), p) != 0;
    bool dy = mpz_divisible_ui_p(pair.y.get_mpz_t(), p) != 0;
    if (dx && dy) return false;
    x_hit |= dx;
    y_hit |= dy;
  }
  return x_hit && y_hit;
}

std::pair<NodePair, NodePair> children(const NodePair& pair) {
  mpz_class sum = pair.x + pair.y;
  return {NodePair(pair.x, sum), NodePair(sum, pair.y)};
}

NodePair step(const NodePair& pair, Step s) {
  mpz_class sum = pair.x + pair.y;
  return s == Step::L ? NodePair(pair.x, std::move(sum)) : NodePair(std::move(sum), pair.y);
}

Matrix2 path_matrix(const StepWord& word) {
  Matrix2 m;
  for (Step s : word) m = m * Matrix2::elementary(s);
  return m;
}

mpz_class fibonacci(std::size_t j) {
  mpz_class prev = 1, cur = 1;
  for (std::size_t i = 1; i < j; ++i) {
    mpz_class next = prev + cur;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

TreeResult expand(const PrimeSet& primes, const NodePair& root, ExpandLimits limits) {
  if (limits.node_cap == 0) throw std::invalid_argument("node_cap must be >= 1");

  TreeResult tree;
  tree.primes = primes;
  tree.nodes.push_back({root, TreeResult::npos, 0, std::nullopt});

  std::unordered_set<NodePair, NodePairHash> seen;
  seen.insert(root);

  auto truncate = [&](std::string reason) {
    if (tree.status == TreeStatus::Exhausted) {
      tree.status = TreeStatus::Truncated;
      tree.truncation_reason = std::move(reason);
    }
  };

  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (!branch_eligible(tree.nodes[i].pair, primes)) continue;
    if (tree.nodes[i].depth >= limits.depth_cap) {
      truncate("depth cap " + std::to_string(limits.depth_cap) + " reached");
      continue;
    }
    if (tree.nodes.size() + 2 > limits.node_cap) {
      truncate("node cap " + std::to_string(limits.node_cap) + " reached");
      break;
    }
    auto [left, right] = children(tree.nodes[i].pair);
    std::size_t depth = tree.nodes[i].depth + 1;
    for (auto [child, letter] : {std::pair{std::move(left), Step::L},
                                 std::pair{std::move(right), Step::R}}) {
      if (!seen.insert(child).second) {
        throw integrity_error("pair " + child.to_string() + " reached twice while expanding " +
                              root.to_string());
      }
      std::size_t idx = tree.nodes.size();
      (letter == Step::L ? tree.nodes[i].l_child : tree.nodes[i].r_child) = idx;
      tree.nodes.push_back({std::move(child), i, depth, letter});
    }
  }
  return tree;
}

TreeStats tree_stats(const TreeResult& tree) {
  if (!tree.exhausted()) {
    throw std::invalid_argument("tree statistics are undefined on a truncated tree");
  }
  TreeStats stats;
  for (const auto& n : tree.nodes) stats.longest_path = std::max(stats.longest_path, n.depth);
  std::size_t cur = 0;
  while (tree.nodes[cur].l_child != TreeResult::npos) {
    cur = tree.nodes[cur].l_child;
    ++stats.longest_chain;
  }
  return stats;
}

std::string export_dot(const TreeResult& tree) {
  std::ostringstream out;
  out << "digraph apt {\n";
  out << "  node [shape=box];\n";
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    out << "  n" << i << " [label=\"" << tree.nodes[i].pair.to_string() << "\"];\n";
  }
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    out << "  n" << tree.nodes[i].parent << " -> n" << i << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string export_tree_json(const TreeResult& tree) {
  Json j;
  j["primes"] = primes_to_json(tree.primes);
  j["root"] = pair_to_json(tree.root());
  Json nodes = Json::array();
  Json edges = Json::array();
  for (const auto& n : tree.nodes) nodes.push_back(pair_to_json(n.pair));
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    edges.push_back(Json::array(
        {pair_to_json(tree.nodes[tree.nodes[i].parent].pair), pair_to_json(tree.nodes[i].pair)}));
  }
  j["nodes"] = std::move(nodes);
  j["edges"] = std::move(edges);
  j["status"] = tree.exhausted() ? "exhausted" : "truncated";
  return j.dump();
}

}  // namespace apt_lab
