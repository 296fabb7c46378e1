#include "apt_lab/residue_graph.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace apt_lab {

ResidueGraph::ResidueGraph(std::uint64_t modulus, const PrimeSet& primes)
    : modulus_(modulus), primes_(primes) {
  if (modulus == 0) throw std::invalid_argument("modulus must be positive");
  if (modulus > (std::uint64_t{1} << 32)) throw std::invalid_argument("modulus too large");
  auto n_primes = prime_divisors(modulus);
  if (n_primes.size() > 64) throw std::invalid_argument("modulus has too many prime factors");
  for (Prime p : primes.primes()) {
    auto it = std::find(n_primes.begin(), n_primes.end(), p);
    if (it == n_primes.end()) {
      throw std::invalid_argument("prime " + std::to_string(p) + " does not divide modulus " +
                                  std::to_string(modulus));
    }
    p_mask_ |= std::uint64_t{1} << (it - n_primes.begin());
  }
  masks_.assign(modulus, 0);
  for (std::size_t i = 0; i < n_primes.size(); ++i) {
    for (std::uint64_t r = 0; r < modulus; r += n_primes[i]) masks_[r] |= std::uint64_t{1} << i;
  }
}

std::size_t walk_search_bytes(std::uint64_t modulus, bool want_longest_walk) {
  auto vertices = static_cast<long double>(modulus) * static_cast<long double>(modulus);
  long double per = want_longest_walk ? sizeof(std::uint32_t) : sizeof(std::uint8_t);
  long double total = vertices * per;
  if (total > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 2)) {
    return std::numeric_limits<std::size_t>::max() / 2;
  }
  return static_cast<std::size_t>(total);
}

namespace {

// Per-vertex state. Colour mode: 0 unvisited, 1 on stack, 2 done.
// Value mode: 0 unvisited, kOnStack on stack, otherwise longest walk + 1.
template <class Cell>
struct StateCodec;

template <>
struct StateCodec<std::uint8_t> {
  static constexpr std::uint8_t kOnStack = 1;
  static std::uint8_t done(std::uint32_t) { return 2; }
  static std::uint32_t value(std::uint8_t) { return 0; }
};

template <>
struct StateCodec<std::uint32_t> {
  static constexpr std::uint32_t kOnStack = std::numeric_limits<std::uint32_t>::max();
  static std::uint32_t done(std::uint32_t longest) { return longest + 1; }
  static std::uint32_t value(std::uint32_t cell) { return cell - 1; }
};

struct Frame {
  Residue u;
  Residue v;
  std::uint32_t best;
  std::uint8_t next;
};

template <class Cell>
WalkSearchResult run_dfs(const ResidueGraph& g) {
  using Codec = StateCodec<Cell>;
  const std::uint64_t n = g.modulus();
  std::vector<Cell> state(static_cast<std::size_t>(n) * n, 0);
  std::vector<Frame> stack;

  WalkSearchResult result;
  result.kind = WalkSearchResult::Kind::Acyclic;

  auto index = [n](Residue u, Residue v) { return static_cast<std::size_t>(u) * n + v; };

  for (Residue u0 = 0; u0 < n; ++u0) {
    for (Residue v0 = 0; v0 < n; ++v0) {
      if (!g.eligible(u0, v0) || state[index(u0, v0)] != 0) continue;
      state[index(u0, v0)] = Codec::kOnStack;
      stack.push_back({u0, v0, 0, 0});

      while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.next < 2) {
          Residue s = g.add(top.u, top.v);
          Residue cu = top.next == 0 ? top.u : s;
          Residue cv = top.next == 0 ? s : top.v;
          ++top.next;
          if (!g.eligible(cu, cv)) {
            top.best = std::max<std::uint32_t>(top.best, 1);
            continue;
          }
          Cell cell = state[index(cu, cv)];
          if (cell == Codec::kOnStack) {
            auto it = std::find_if(stack.begin(), stack.end(), [&](const Frame& f) {
              return f.u == cu && f.v == cv;
            });
            for (; it != stack.end(); ++it) result.cycle.emplace_back(it->u, it->v);
            result.kind = WalkSearchResult::Kind::Cycle;
            result.longest_start.reset();
            result.longest_walk = 0;
            return result;
          }
          if (cell != 0) {
            top.best = std::max(top.best, Codec::value(cell) + 1);
            continue;
          }
          state[index(cu, cv)] = Codec::kOnStack;
          stack.push_back({cu, cv, 0, 0});
          continue;
        }
        Frame done = top;
        stack.pop_back();
        state[index(done.u, done.v)] = Codec::done(done.best);
        if (!result.longest_start || done.best > result.longest_walk) {
          result.longest_walk = done.best;
          result.longest_start = ResiduePair{done.u, done.v};
        }
        if (!stack.empty()) stack.back().best = std::max(stack.back().best, done.best + 1);
      }
    }
  }
  return result;
}

}  // namespace

WalkSearchResult search_walks(const ResidueGraph& graph, const WalkSearchOptions& options) {
  std::size_t bytes = walk_search_bytes(graph.modulus(), options.want_longest_walk);
  if (bytes > options.memory_cap_bytes) {
    WalkSearchResult r;
    r.kind = WalkSearchResult::Kind::Undecided;
    r.reason = "modulus too large: residue graph needs " + std::to_string(bytes) +
               " bytes, memory cap is " + std::to_string(options.memory_cap_bytes);
    return r;
  }
  WalkSearchResult r = options.want_longest_walk ? run_dfs<std::uint32_t>(graph)
                                                 : run_dfs<std::uint8_t>(graph);
  if (!options.want_longest_walk) {
    r.longest_walk = 0;
    r.longest_start.reset();
  }
  return r;
}

std::optional<std::uint64_t> longest_fixed_first_run(const ResidueGraph& g) {
  const std::uint64_t n = g.modulus();
  std::uint64_t best = 0;
  for (Residue u = 0; u < n; ++u) {
    std::uint64_t eligible_count = 0;
    std::uint64_t covered = 0;
    Residue back = (n - u % n) % n;  // -u
    for (Residue v = 0; v < n; ++v) {
      if (!g.eligible(u, v)) continue;
      ++eligible_count;
      if (g.eligible(u, g.add(v, back))) continue;  // not the start of a run
      std::uint64_t len = 0;
      Residue w = v;
      while (g.eligible(u, w) && len <= n) {
        ++len;
        w = g.add(w, u);
      }
      if (len > n) return std::nullopt;
      covered += len;
      best = std::max(best, len);
    }
    // Eligible pairs not reached from any run start sit on a closed orbit.
    if (covered != eligible_count) return std::nullopt;
  }
  return best;
}

}  // namespace apt_lab
