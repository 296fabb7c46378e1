#include "apt_lab/manin.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "apt_lab/residue_graph.hpp"

namespace apt_lab {

ManinContext::ManinContext(unsigned k, std::uint64_t n, PrimeSet primes)
    : k_(k), n_(n), primes_(std::move(primes)), np_(1) {
  if (k < 2 || k % 2) throw std::invalid_argument("weight k must be even and >= 2");
  if (n < 1) throw std::invalid_argument("level N must be positive");
  if (n > (std::uint64_t{1} << 32)) throw std::invalid_argument("level N too large");
  std::vector<Prime> square;
  for (Prime p : prime_divisors(n)) {
    if ((n / p) % p == 0) square.push_back(p);
  }
  if (square != primes_.values()) {
    throw std::invalid_argument("the primes whose squares divide N are " + PrimeSet(square).to_string() +
                                ", not " + primes_.to_string());
  }
  np_ = primes_.size() ? primes_.product_u64() : 1;
}

std::uint64_t ManinContext::canon(std::int64_t r) const {
  std::int64_t m = static_cast<std::int64_t>(n_);
  r %= m;
  return static_cast<std::uint64_t>(r < 0 ? r + m : r);
}

bool ManinContext::in_e_n(std::uint64_t u, std::uint64_t v) const {
  return std::gcd(std::gcd(u, v), n_) == 1;
}

bool ManinContext::eligible(std::uint64_t u, std::uint64_t v) const {
  return in_e_n(u, v) && std::gcd(u, np_) > 1 && std::gcd(v, np_) > 1;
}

bool eligible_mod(std::uint64_t u, std::uint64_t v, std::uint64_t n, const PrimeSet& primes) {
  ManinContext ctx(2, n, primes);
  return ctx.eligible(u % n, v % n);
}

void FormalSum::add(const XiSymbol& s, const mpz_class& c) {
  if (c == 0) return;
  auto [it, fresh] = terms_.try_emplace(s, c);
  if (fresh) return;
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

void FormalSum::add_scaled(const FormalSum& other, const mpz_class& c) {
  for (const auto& [s, v] : other.terms_) add(s, v * c);
}

FormalSum relation_41(const ManinContext& ctx, const XiSymbol& s) {
  mpz_class c = (s.j % 2 == 0) ? -1 : 1;
  return FormalSum({ctx.k() - 2 - s.j, s.v, ctx.neg(s.u)}, c);
}

FormalSum relation_43(const ManinContext& ctx, const XiSymbol& s) {
  // (-1)^{k-2} = 1 for even k
  return FormalSum({s.j, ctx.neg(s.u), ctx.neg(s.v)}, 1);
}

FormalSum apply_termwise(const FormalSum& sum, const std::function<FormalSum(const XiSymbol&)>& rel) {
  FormalSum out;
  for (const auto& [s, c] : sum.terms()) out.add_scaled(rel(s), c);
  return out;
}

AcyclicResult acyclic(std::uint64_t n, const PrimeSet& primes, std::size_t memory_cap) {
  ManinContext ctx(2, n, primes);
  if (walk_search_bytes(n, false) > memory_cap) {
    return Undecided{"N^2 residue pairs exceed the memory cap"};
  }
  ResidueGraph graph(n, primes);
  auto r = search_walks(graph, {false, memory_cap});
  switch (r.kind) {
    case WalkSearchResult::Kind::Acyclic: return Acyclic{};
    case WalkSearchResult::Kind::Cycle: return ResidueCycle{std::move(r.cycle)};
    case WalkSearchResult::Kind::Undecided: break;
  }
  return Undecided{r.reason};
}

std::vector<std::pair<mpz_class, XiSymbol>> reduce_step(const ManinContext& ctx, const XiSymbol& s) {
  const unsigned k = ctx.k();
  const std::uint64_t n = ctx.level();
  const std::uint64_t w = (s.u + s.v) % n;
  std::vector<std::pair<mpz_class, XiSymbol>> out;
  mpz_class b;
  for (unsigned i = 0; i <= k - 2 - s.j; ++i) {
    mpz_bin_uiui(b.get_mpz_t(), k - 2 - s.j, i);
    out.emplace_back(b, XiSymbol{k - 2 - i, w, s.v});
  }
  for (unsigned i = k - 2 - s.j; i <= k - 2; ++i) {
    mpz_bin_uiui(b.get_mpz_t(), s.j, i - (k - 2 - s.j));
    out.emplace_back(b, XiSymbol{k - 2 - i, s.u, w});
  }
  return out;
}

FormalSum Reducer::reduce(const XiSymbol& start) {
  if (start.j > ctx_.k() - 2 || start.u >= ctx_.level() || start.v >= ctx_.level()) {
    throw std::invalid_argument("symbol outside 0 <= j <= k-2, 0 <= u, v < N");
  }
  if (!ctx_.in_e_n(start.u, start.v)) throw std::invalid_argument("symbol not in E_N");
  if (!ctx_.eligible(start.u, start.v)) return FormalSum(start, 1);
  if (auto it = memo_.find(start); it != memo_.end()) return it->second;

  struct Frame {
    XiSymbol sym;
    std::vector<std::pair<mpz_class, XiSymbol>> children;
    std::size_t next = 0;
    FormalSum acc;
  };
  std::vector<Frame> stack;
  std::set<XiSymbol> on_stack;
  stack.push_back({start, reduce_step(ctx_, start), 0, {}});
  on_stack.insert(start);
  while (true) {
    Frame& top = stack.back();
    if (top.next == top.children.size()) {
      FormalSum done = std::move(top.acc);
      XiSymbol sym = top.sym;
      on_stack.erase(sym);
      stack.pop_back();
      auto& stored = memo_.emplace(sym, std::move(done)).first->second;
      if (stack.empty()) return stored;
      Frame& parent = stack.back();
      parent.acc.add_scaled(stored, parent.children[parent.next].first);
      ++parent.next;
      continue;
    }
    const auto& [coef, child] = top.children[top.next];
    if (!ctx_.eligible(child.u, child.v)) {
      top.acc.add(child, coef);
      ++top.next;
      continue;
    }
    if (auto it = memo_.find(child); it != memo_.end()) {
      top.acc.add_scaled(it->second, coef);
      ++top.next;
      continue;
    }
    if (on_stack.count(child)) {
      std::vector<XiSymbol> cycle;
      bool in = false;
      for (const auto& f : stack) {
        if (f.sym == child) in = true;
        if (in) cycle.push_back(f.sym);
      }
      throw reduce_cycle_error("reduction revisits (" + std::to_string(child.j) + "; " +
                                   std::to_string(child.u) + ", " + std::to_string(child.v) + ")",
                               std::move(cycle));
    }
    XiSymbol next = child;
    on_stack.insert(next);
    stack.push_back({next, reduce_step(ctx_, next), 0, {}});
  }
}

namespace {

FormalSum reduce_plain(const ManinContext& ctx, const XiSymbol& s, std::vector<XiSymbol>& path) {
  if (!ctx.eligible(s.u, s.v)) return FormalSum(s, 1);
  if (std::find(path.begin(), path.end(), s) != path.end()) {
    auto from = std::find(path.begin(), path.end(), s);
    throw reduce_cycle_error("reduction revisits a symbol", std::vector<XiSymbol>(from, path.end()));
  }
  path.push_back(s);
  FormalSum out;
  for (const auto& [c, child] : reduce_step(ctx, s)) out.add_scaled(reduce_plain(ctx, child, path), c);
  path.pop_back();
  return out;
}

constexpr std::uint64_t kOracleField = 2147483647;  // 2^31 - 1

std::uint64_t fmod_mul(std::uint64_t a, std::uint64_t b) { return a * b % kOracleField; }

std::uint64_t fmod_inv(std::uint64_t a) { return pow_mod(a, kOracleField - 2, kOracleField); }

std::uint64_t fmod_of(const mpz_class& c) { return mpz_fdiv_ui(c.get_mpz_t(), kOracleField); }

// Union-find over symbol ids with a sign relative to the root.
class SignedClasses {
 public:
  explicit SignedClasses(std::size_t n) : parent_(n), flip_(n, 0), zero_(n, false) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::pair<std::size_t, int> find(std::size_t x) {
    int sign = 0;
    std::size_t r = x;
    while (parent_[r] != r) {
      sign ^= flip_[r];
      r = parent_[r];
    }
    // path compression
    std::size_t cur = x;
    int acc = sign;
    while (parent_[cur] != cur) {
      std::size_t next = parent_[cur];
      int f = flip_[cur];
      parent_[cur] = r;
      flip_[cur] = static_cast<std::uint8_t>(acc);
      acc ^= f;
      cur = next;
    }
    return {r, sign};
  }

  // x = (-1)^neg * y
  void unite(std::size_t x, std::size_t y, int neg) {
    auto [rx, sx] = find(x);
    auto [ry, sy] = find(y);
    if (rx == ry) {
      if ((sx ^ sy) != neg) zero_[rx] = true;
      return;
    }
    parent_[rx] = ry;
    flip_[rx] = static_cast<std::uint8_t>(sx ^ sy ^ neg);
    if (zero_[rx]) zero_[ry] = true;
  }

  bool zero(std::size_t root) const { return zero_[root]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> flip_;
  std::vector<bool> zero_;
};

}  // namespace

FormalSum reduce_unmemoized(const ManinContext& ctx, const XiSymbol& s) {
  if (!ctx.in_e_n(s.u, s.v)) throw std::invalid_argument("symbol not in E_N");
  std::vector<XiSymbol> path;
  return reduce_plain(ctx, s, path);
}

OracleReport oracle_report(unsigned k, std::uint64_t n, const PrimeSet& primes, std::size_t trials,
                           const OracleOptions& opts) {
  ManinContext ctx(k, n, primes);
  if (n > 4096) throw std::invalid_argument("oracle level too large to enumerate");
  OracleReport rep;
  const std::size_t nn = n * n;
  auto id = [&](unsigned j, std::uint64_t u, std::uint64_t v) { return j * nn + u * n + v; };
  const std::size_t total = (k - 1) * nn;

  SignedClasses classes(total);
  for (unsigned j = 0; j <= k - 2; ++j) {
    for (std::uint64_t u = 0; u < n; ++u) {
      for (std::uint64_t v = 0; v < n; ++v) {
        if (!ctx.in_e_n(u, v)) continue;
        XiSymbol s{j, u, v};
        for (const auto& rel : {relation_41(ctx, s), relation_43(ctx, s)}) {
          const auto& [t, c] = *rel.terms().begin();
          classes.unite(id(j, u, v), id(t.j, t.u, t.v), c < 0 ? 1 : 0);
        }
      }
    }
  }
  std::vector<std::int64_t> column(total, -1);
  std::size_t ncols = 0;
  for (unsigned j = 0; j <= k - 2; ++j) {
    for (std::uint64_t u = 0; u < n; ++u) {
      for (std::uint64_t v = 0; v < n; ++v) {
        if (!ctx.in_e_n(u, v)) continue;
        auto [r, sign] = classes.find(id(j, u, v));
        if (classes.zero(r)) continue;
        if (column[r] < 0) column[r] = static_cast<std::int64_t>(ncols++);
      }
    }
  }
  for (std::size_t i = 0; i < total; ++i) {
    auto [r, sign] = classes.find(i);
    if (r == i && classes.zero(r)) ++rep.zero_classes;
  }
  rep.variables = ncols;

  // value of a symbol as (column, sign) or nothing when it is 0
  auto var = [&](const XiSymbol& s) -> std::pair<std::int64_t, int> {
    auto [r, sign] = classes.find(id(s.j, s.u, s.v));
    if (classes.zero(r)) return {-1, 0};
    return {column[r], sign};
  };

  // Three-term rows, eliminated incrementally into echelon form.
  std::vector<std::vector<std::uint64_t>> pivots;  // row data
  std::vector<std::size_t> pivot_col;
  std::vector<std::int64_t> pivot_of(ncols, -1);
  std::vector<std::uint64_t> row(ncols);
  mpz_class b;
  for (unsigned j = 0; j <= k - 2; ++j) {
    for (std::uint64_t u = 0; u < n; ++u) {
      for (std::uint64_t v = 0; v < n; ++v) {
        if (!ctx.in_e_n(u, v)) continue;
        std::fill(row.begin(), row.end(), 0);
        auto put = [&](const XiSymbol& s, std::int64_t coef) {
          auto [col, sign] = var(s);
          if (col < 0) return;
          if (sign) coef = -coef;
          std::uint64_t c = static_cast<std::uint64_t>((coef % static_cast<std::int64_t>(kOracleField) +
                                                        static_cast<std::int64_t>(kOracleField)) %
                                                       static_cast<std::int64_t>(kOracleField));
          row[col] = (row[col] + c) % kOracleField;
        };
        const std::uint64_t muv = ctx.neg((u + v) % n);
        put({j, u, v}, 1);
        for (unsigned i = 0; i <= k - 2 - j; ++i) {
          mpz_bin_uiui(b.get_mpz_t(), k - 2 - j, i);
          put({i, v, muv}, ((k - 2 - i) % 2 ? -1 : 1) * b.get_si());
        }
        for (unsigned i = k - 2 - j; i <= k - 2; ++i) {
          mpz_bin_uiui(b.get_mpz_t(), j, i - (k - 2 - j));
          put({i, muv, u}, (i % 2 ? -1 : 1) * b.get_si());
        }
        for (std::size_t c = 0; c < ncols; ++c) {
          if (row[c] == 0) continue;
          if (pivot_of[c] >= 0) {
            const auto& p = pivots[static_cast<std::size_t>(pivot_of[c])];
            std::uint64_t f = row[c];  // pivot rows are normalised to 1
            for (std::size_t d = c; d < ncols; ++d) {
              if (p[d]) row[d] = (row[d] + kOracleField - fmod_mul(f, p[d])) % kOracleField;
            }
            continue;
          }
          std::uint64_t inv = fmod_inv(row[c]);
          for (std::size_t d = c; d < ncols; ++d) row[d] = fmod_mul(row[d], inv);
          pivot_of[c] = static_cast<std::int64_t>(pivots.size());
          pivots.push_back(row);
          pivot_col.push_back(c);
          break;
        }
      }
    }
  }
  rep.rank = pivots.size();
  rep.nullity = ncols - rep.rank;

  std::vector<XiSymbol> eligible_syms;
  for (unsigned j = 0; j <= k - 2; ++j) {
    for (std::uint64_t u = 0; u < n; ++u) {
      for (std::uint64_t v = 0; v < n; ++v) {
        if (ctx.eligible(u, v)) eligible_syms.push_back({j, u, v});
      }
    }
  }
  Reducer default_reducer(ctx);
  ReduceFn reducer = opts.reducer ? opts.reducer : [&](const XiSymbol& s) { return default_reducer.reduce(s); };

  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::uint64_t> field(0, kOracleField - 1);
  std::vector<std::uint64_t> x(ncols);
  auto value = [&](const XiSymbol& s) -> std::uint64_t {
    auto [col, sign] = var(s);
    if (col < 0) return 0;
    std::uint64_t val = x[static_cast<std::size_t>(col)];
    return sign ? (kOracleField - val) % kOracleField : val;
  };
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t c = 0; c < ncols; ++c) x[c] = pivot_of[c] < 0 ? field(rng) : 0;
    for (std::size_t col = ncols; col-- > 0;) {
      if (pivot_of[col] < 0) continue;
      const std::size_t r = static_cast<std::size_t>(pivot_of[col]);
      const auto& p = pivots[r];
      std::uint64_t acc = 0;
      for (std::size_t d = pivot_col[r] + 1; d < ncols; ++d) {
        if (p[d]) acc = (acc + fmod_mul(p[d], x[d])) % kOracleField;
      }
      x[pivot_col[r]] = (kOracleField - acc) % kOracleField;
    }
    if (eligible_syms.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, eligible_syms.size() - 1);
    for (std::size_t q = 0; q < opts.symbols_per_vector; ++q) {
      const XiSymbol s = eligible_syms[pick(rng)];
      FormalSum red = reducer(s);
      std::uint64_t rhs = 0;
      for (const auto& [term, c] : red.terms()) rhs = (rhs + fmod_mul(fmod_of(c), value(term))) % kOracleField;
      ++rep.checks;
      if (rhs != value(s)) {
        rep.failure = "mismatch at (" + std::to_string(s.j) + "; " + std::to_string(s.u) + ", " +
                      std::to_string(s.v) + ") in trial " + std::to_string(t);
        return rep;
      }
    }
  }
  rep.ok = true;
  return rep;
}

bool oracle_check(unsigned k, std::uint64_t n, const PrimeSet& primes, std::size_t trials) {
  return oracle_report(k, n, primes, trials).ok;
}

Json formal_sum_to_json(const FormalSum& sum) {
  Json terms = Json::array();
  for (const auto& [s, c] : sum.terms()) {
    terms.push_back({{"j", s.j}, {"u", s.u}, {"v", s.v}, {"c", big_to_string(c)}});
  }
  Json j;
  j["terms"] = terms;
  return j;
}

}  // namespace apt_lab
