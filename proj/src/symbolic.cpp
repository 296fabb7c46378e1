#include "apt_lab/symbolic.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "apt_lab/apt_core.hpp"
#include "apt_lab/certificate.hpp"

namespace apt_lab {

namespace {

constexpr std::int64_t kCoeffLimit = std::int64_t{1} << 62;

std::uint64_t abs_u64(__int128 v) {
  if (v < 0) v = -v;
  if (v > static_cast<__int128>(UINT64_MAX)) throw std::overflow_error("determinant exceeds 64 bits");
  return static_cast<std::uint64_t>(v);
}

bool form_divisible(const SymbolicState& st, const SymbolicForm& g) {
  for (const auto& [anchor, ids] : st.pair) {
    if (anchor == g) return true;
    std::uint64_t d = abs_u64(form_det(anchor, g));
    for (std::size_t id : ids) {
      if (st.cor[id] && d % *st.cor[id] == 0) return true;
    }
  }
  return false;
}

void append_u64(std::string& out, std::uint64_t v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof v);
}

}  // namespace

SymbolicForm add_forms(const SymbolicForm& f, const SymbolicForm& g) {
  const __int128 a = static_cast<__int128>(f.alpha) + g.alpha;
  const __int128 b = static_cast<__int128>(f.beta) + g.beta;
  if (a >= kCoeffLimit || b >= kCoeffLimit || a <= -kCoeffLimit || b <= -kCoeffLimit) {
    throw std::overflow_error("symbolic form coefficients exceed 62 bits");
  }
  return {static_cast<std::int64_t>(a), static_cast<std::int64_t>(b)};
}

__int128 form_det(const SymbolicForm& f, const SymbolicForm& g) {
  return static_cast<__int128>(f.alpha) * g.beta - static_cast<__int128>(f.beta) * g.alpha;
}

std::vector<std::size_t> SymbolicState::unused_ids() const {
  std::vector<bool> used(cor.size(), false);
  for (const auto& [form, ids] : pair) {
    for (std::size_t id : ids) used[id] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cor.size(); ++i) {
    if (!used[i]) out.push_back(i);
  }
  return out;
}

std::vector<SymbolicState> initial_states(std::size_t r) {
  std::vector<SymbolicState> out;
  if (r < 2) return out;
  for (std::size_t na = 1; na < r; ++na) {
    for (std::size_t nb = 1; nb <= na && na + nb <= r; ++nb) {
      SymbolicState st;
      st.cor.assign(r, std::nullopt);
      std::vector<std::size_t> sa(na), sb(nb);
      std::iota(sa.begin(), sa.end(), 0);
      std::iota(sb.begin(), sb.end(), na);
      st.pair[kFormA] = sa;
      st.pair[kFormB] = sb;
      st.path.push_back({kFormA, kFormB});
      out.push_back(std::move(st));
    }
  }
  return out;
}

Divisibility divisibility_status(const SymbolicState& st, const SymbolicForm& form) {
  std::vector<Prime> forced;
  for (const auto& v : st.cor) {
    if (v) forced.push_back(*v);
  }
  Forcible forcible;
  for (const auto& [anchor, ids] : st.pair) {
    if (anchor == form) return AlreadyDivisible{ids.front()};
    std::uint64_t d = abs_u64(form_det(anchor, form));
    if (d == 0) return AlreadyDivisible{ids.front()};
    for (std::size_t id : ids) {
      if (st.cor[id] && d % *st.cor[id] == 0) return AlreadyDivisible{id};
    }
    std::vector<Prime> divisors;
    for (std::size_t id : ids) {
      if (st.cor[id]) continue;
      if (divisors.empty() && d > 1) divisors = prime_divisors(d);
      for (Prime q : divisors) {
        if (std::find(forced.begin(), forced.end(), q) == forced.end()) {
          forcible.options.emplace_back(id, q);
        }
      }
    }
  }
  if (forcible.options.empty()) return RequiresNewPrime{};
  std::sort(forcible.options.begin(), forcible.options.end());
  return forcible;
}

SymbolicState canonicalize(SymbolicState st) {
  const std::size_t n = st.cor.size();
  std::vector<std::size_t> order;
  order.reserve(n);
  for (auto& [form, ids] : st.pair) {
    std::sort(ids.begin(), ids.end(), [&](std::size_t x, std::size_t y) {
      const auto& cx = st.cor[x];
      const auto& cy = st.cor[y];
      if (cx.has_value() != cy.has_value()) return cx.has_value();
      if (cx && *cx != *cy) return *cx < *cy;
      return x < y;
    });
    order.insert(order.end(), ids.begin(), ids.end());
  }
  for (std::size_t id : st.unused_ids()) order.push_back(id);

  std::vector<std::size_t> relabel(n);
  SymbolicState out;
  out.cor.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    relabel[order[i]] = i;
    out.cor[i] = st.cor[order[i]];
  }
  for (const auto& [form, ids] : st.pair) {
    std::vector<std::size_t> mapped;
    for (std::size_t id : ids) mapped.push_back(relabel[id]);
    std::sort(mapped.begin(), mapped.end());
    out.pair.emplace(form, std::move(mapped));
  }
  out.path = std::move(st.path);
  return out;
}

std::string canonical_key(const SymbolicState& st) {
  std::string key;
  key.reserve(16 * st.path.size() + 24 * st.pair.size() + 8 * st.cor.size());
  append_u64(key, st.cor.size());
  for (const auto& v : st.cor) append_u64(key, v.value_or(0));
  append_u64(key, st.pair.size());
  for (const auto& [form, ids] : st.pair) {
    append_u64(key, static_cast<std::uint64_t>(form.alpha));
    append_u64(key, static_cast<std::uint64_t>(form.beta));
    append_u64(key, ids.size());
    for (std::size_t id : ids) append_u64(key, id);
  }
  for (const auto& [f, g] : st.path) {
    append_u64(key, static_cast<std::uint64_t>(f.alpha));
    append_u64(key, static_cast<std::uint64_t>(f.beta));
    append_u64(key, static_cast<std::uint64_t>(g.alpha));
    append_u64(key, static_cast<std::uint64_t>(g.beta));
  }
  return key;
}

std::string invariant_violation(const SymbolicState& st) {
  std::set<Prime> forced;
  for (const auto& v : st.cor) {
    if (!v) continue;
    if (!is_prime(*v)) return "forced value " + std::to_string(*v) + " is not prime";
    if (!forced.insert(*v).second) return "forced value " + std::to_string(*v) + " repeats";
  }
  std::vector<bool> seen(st.cor.size(), false);
  for (const auto& [form, ids] : st.pair) {
    if (ids.empty()) return "empty pairing";
    for (std::size_t id : ids) {
      if (id >= st.cor.size()) return "pairing names an unknown prime id";
      if (seen[id]) return "prime id paired to two forms";
      seen[id] = true;
    }
  }
  if (st.path.empty()) return "empty path";
  if (st.path.front() != FormPair{kFormA, kFormB}) return "path does not start at (a, b)";
  std::set<SymbolicForm> on_path;
  for (std::size_t i = 0; i < st.path.size(); ++i) {
    const auto& [f, g] = st.path[i];
    if (form_det(f, g) != 1) return "path pair with determinant != 1";
    if (i > 0) {
      const auto& [pf, pg] = st.path[i - 1];
      SymbolicForm s = add_forms(pf, pg);
      if (st.path[i] != FormPair{pf, s} && st.path[i] != FormPair{s, pg}) {
        return "path step is not a branching move";
      }
    }
    if (!form_divisible(st, f) || !form_divisible(st, g)) return "path pair not eligible";
    on_path.insert(f);
    on_path.insert(g);
  }
  for (const auto& [form, ids] : st.pair) {
    if (!on_path.count(form)) return "pairing on a form off the path";
  }
  return {};
}

std::vector<SymbolicState> expand_state(const SymbolicState& st) {
  std::vector<SymbolicState> out;
  const auto [f, g] = st.path.back();
  const SymbolicForm s = add_forms(f, g);
  auto emit = [&](const SymbolicState& base) {
    for (const FormPair& next : {FormPair{f, s}, FormPair{s, g}}) {
      SymbolicState child = base;
      child.path.push_back(next);
      child = canonicalize(std::move(child));
      if (invariant_violation(child).empty()) out.push_back(std::move(child));
    }
  };

  auto status = divisibility_status(st, s);
  if (std::holds_alternative<AlreadyDivisible>(status)) {
    emit(st);
    return out;
  }
  if (auto* fo = std::get_if<Forcible>(&status)) {
    for (const auto& [id, q] : fo->options) {
      SymbolicState next = st;
      next.cor[id] = q;
      emit(next);
    }
  }
  auto unused = st.unused_ids();
  for (std::size_t k = 1; k <= unused.size(); ++k) {
    SymbolicState next = st;
    next.pair[s] = std::vector<std::size_t>(unused.begin(), unused.begin() + static_cast<std::ptrdiff_t>(k));
    emit(next);
  }

  std::set<std::string> keys;
  std::vector<SymbolicState> unique;
  for (auto& c : out) {
    if (keys.insert(canonical_key(c)).second) unique.push_back(std::move(c));
  }
  return unique;
}

std::optional<PrimeSet> fully_forced(const SymbolicState& st) {
  std::vector<Prime> values;
  for (const auto& v : st.cor) {
    if (!v) return std::nullopt;
    values.push_back(*v);
  }
  return PrimeSet(values);
}

std::size_t default_classify_limit(std::size_t r) {
  switch (r) {
    case 2:
    case 3: return 20;
    case 4: return 30;
    case 5: return 60;
    default: return 150;
  }
}

ClassifyResult classify(std::size_t r, std::size_t limit, unsigned jobs) {
  if (r < 2) throw std::invalid_argument("classify needs r >= 2");
  if (limit < 1) throw std::invalid_argument("classify needs limit >= 1");
  jobs = std::max(1u, jobs);
  ClassifyResult res;
  std::vector<SymbolicState> current;
  std::map<PrimeSet, bool> infinite_cache;
  std::vector<SymbolicState> settled;
  for (auto& st : initial_states(r)) current.push_back(canonicalize(std::move(st)));
  res.states_per_round.push_back(current.size());

  for (std::size_t round = 0; round < limit && !current.empty(); ++round) {
    std::vector<std::vector<SymbolicState>> children(current.size());
    auto work = [&](std::size_t begin, std::size_t stride) {
      for (std::size_t i = begin; i < current.size(); i += stride) children[i] = expand_state(current[i]);
    };
    if (jobs == 1 || current.size() < 64) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
      for (auto& t : pool) t.join();
    }

    std::unordered_map<std::string, SymbolicState> merged;
    for (std::size_t i = 0; i < current.size(); ++i) {
      if (auto concrete = fully_forced(current[i])) {
        auto [it, fresh] = infinite_cache.try_emplace(*concrete, false);
        if (fresh) it->second = std::holds_alternative<InfiniteType>(finite_type_check(*concrete));
        if (it->second) {
          settled.push_back(std::move(current[i]));
          continue;
        }
      }
      if (children[i].empty()) {
        if (!res.longest_dead || current[i].path.size() > res.l_r) {
          res.l_r = current[i].path.size();
          res.longest_dead = current[i];
        }
        continue;
      }
      for (auto& c : children[i]) {
        auto key = canonical_key(c);
        merged.try_emplace(std::move(key), std::move(c));
      }
    }
    std::vector<std::pair<std::string, SymbolicState>> sorted(std::make_move_iterator(merged.begin()),
                                                              std::make_move_iterator(merged.end()));
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    current.clear();
    for (auto& [key, st] : sorted) current.push_back(std::move(st));
    res.states_per_round.push_back(current.size());
  }
  res.exact = current.empty();
  res.survivors = std::move(settled);
  res.survivors.insert(res.survivors.end(), std::make_move_iterator(current.begin()),
                       std::make_move_iterator(current.end()));
  for (const auto& [primes, infinite] : infinite_cache) {
    if (infinite) res.infinite_sets.push_back(primes);
  }
  return res;
}

std::pair<mpz_class, mpz_class> crt_root(const SymbolicState& st, const std::vector<Prime>& values) {
  if (values.size() != st.cor.size()) throw std::invalid_argument("one value per prime id required");
  std::vector<std::optional<SymbolicForm>> anchor(st.cor.size());
  for (const auto& [form, ids] : st.pair) {
    for (std::size_t id : ids) anchor[id] = form;
  }
  mpz_class x = 0, y = 0, modulus = 1;
  for (std::size_t id = 0; id < values.size(); ++id) {
    const mpz_class p = static_cast<unsigned long>(values[id]);
    mpz_class rx = 1, ry = 1;
    if (anchor[id]) {
      // alpha x + beta y = 0 (mod p) with (x, y) = (beta, -alpha).
      rx = mpz_class(std::to_string(anchor[id]->beta));
      ry = -mpz_class(std::to_string(anchor[id]->alpha));
    }
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), mpz_class(modulus % p).get_mpz_t(), p.get_mpz_t());
    auto lift = [&](mpz_class& acc, const mpz_class& r) {
      mpz_class t = (r - acc) * inv;
      mpz_mod(t.get_mpz_t(), t.get_mpz_t(), p.get_mpz_t());
      acc += modulus * t;
    };
    lift(x, rx);
    lift(y, ry);
    modulus *= p;
  }
  mpz_mod(x.get_mpz_t(), x.get_mpz_t(), modulus.get_mpz_t());
  mpz_mod(y.get_mpz_t(), y.get_mpz_t(), modulus.get_mpz_t());
  if (x == 0) x = modulus;
  if (y == 0) y = modulus;
  return {x, y};
}

std::vector<PrimeSet> instantiate(const SymbolicState& st, const InstantiateOptions& opts) {
  std::vector<std::size_t> free_ids;
  std::set<Prime> forced;
  for (std::size_t id = 0; id < st.cor.size(); ++id) {
    if (st.cor[id]) forced.insert(*st.cor[id]);
    else free_ids.push_back(id);
  }
  std::vector<Prime> pool;
  for (Prime p : primes_up_to(opts.prime_bound)) {
    if (!forced.count(p)) pool.push_back(p);
  }
  if (pool.size() < free_ids.size()) return {};

  // Free ids sharing an anchor (or all unused ones) are interchangeable: keep them increasing.
  std::vector<std::size_t> group(st.cor.size(), SIZE_MAX);
  std::size_t g = 0;
  for (const auto& [form, ids] : st.pair) {
    for (std::size_t id : ids) group[id] = g;
    ++g;
  }
  const std::size_t depth = opts.depth_cap ? opts.depth_cap : std::max<std::size_t>(40, 2 * st.path.size());

  std::set<PrimeSet> found;
  std::size_t tried = 0;
  std::vector<std::size_t> pick(free_ids.size());
  auto try_assignment = [&]() {
    std::vector<Prime> values(st.cor.size());
    for (std::size_t id = 0; id < st.cor.size(); ++id) {
      if (st.cor[id]) values[id] = *st.cor[id];
    }
    for (std::size_t i = 0; i < free_ids.size(); ++i) values[free_ids[i]] = pool[pick[i]];
    ++tried;
    PrimeSet primes(values);
    if (found.count(primes)) return;
    auto [x, y] = crt_root(st, values);
    auto search = search_certificate(primes, NodePair(x, y), depth, opts.node_cap);
    if (search.certificate) found.insert(primes);
  };
  // Tuples in order of their largest pool index.
  std::function<void(std::size_t, std::size_t, bool)> fill = [&](std::size_t pos, std::size_t top,
                                                                 bool used_top) {
    if (tried >= opts.max_assignments) return;
    if (pos == free_ids.size()) {
      if (used_top) try_assignment();
      return;
    }
    for (std::size_t idx = 0; idx <= top && tried < opts.max_assignments; ++idx) {
      bool clash = false;
      for (std::size_t j = 0; j < pos; ++j) {
        if (pick[j] == idx) clash = true;
        if (group[free_ids[j]] == group[free_ids[pos]] && pick[j] > idx) clash = true;
      }
      if (clash) continue;
      pick[pos] = idx;
      fill(pos + 1, top, used_top || idx == top);
    }
  };
  if (free_ids.empty()) {
    try_assignment();
  } else {
    for (std::size_t top = free_ids.size() - 1; top < pool.size() && tried < opts.max_assignments; ++top) {
      fill(0, top, false);
    }
  }
  return {found.begin(), found.end()};
}

bool minimality_check(const PrimeSet& primes, std::span<const PrimeSet> known_infinite,
                      std::size_t memory_cap) {
  for (const auto& k : known_infinite) {
    if (k.is_strict_subset_of(primes)) return false;
  }
  if (primes.size() <= 5) return true;
  // Every proper subset lies in a maximal one; subsets of finite-type sets are finite.
  for (Prime p : primes.primes()) {
    PrimeSet sub = primes.without(p);
    auto verdict = finite_type_check(sub, memory_cap);
    if (std::holds_alternative<InfiniteType>(verdict)) return false;
    if (auto* u = std::get_if<Undecided>(&verdict)) {
      throw minimality_unresolved("minimality unresolved: " + sub.to_string() + ": " + u->reason);
    }
  }
  return true;
}

namespace {

Json form_to_json(const SymbolicForm& f) { return Json::array({f.alpha, f.beta}); }

SymbolicForm form_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw std::invalid_argument("form must be [alpha, beta]");
  }
  return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>()};
}

std::string id_name(std::size_t id) { return "p" + std::to_string(id + 1); }

std::size_t id_from_name(const std::string& name, std::size_t rank) {
  if (name.size() < 2 || name[0] != 'p') throw std::invalid_argument("bad prime id " + name);
  std::size_t id = std::stoul(name.substr(1));
  if (id < 1 || id > rank) throw std::invalid_argument("prime id out of range: " + name);
  return id - 1;
}

}  // namespace

Json state_to_json(const SymbolicState& st) {
  Json cor = Json::object();
  for (std::size_t id = 0; id < st.cor.size(); ++id) {
    if (st.cor[id]) cor[id_name(id)] = *st.cor[id];
    else cor[id_name(id)] = "free";
  }
  Json pair = Json::array();
  for (const auto& [form, ids] : st.pair) {
    Json names = Json::array();
    for (std::size_t id : ids) names.push_back(id_name(id));
    pair.push_back({{"form", form_to_json(form)}, {"primes", names}});
  }
  Json path = Json::array();
  for (const auto& [f, g] : st.path) path.push_back(Json::array({form_to_json(f), form_to_json(g)}));
  Json j;
  j["cor"] = cor;
  j["pair"] = pair;
  j["path"] = path;
  return j;
}

SymbolicState state_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("cor") || !j.contains("pair") || !j.contains("path")) {
    throw std::invalid_argument("symbolic state needs cor, pair and path");
  }
  SymbolicState st;
  const std::size_t rank = j["cor"].size();
  st.cor.assign(rank, std::nullopt);
  for (const auto& [name, value] : j["cor"].items()) {
    std::size_t id = id_from_name(name, rank);
    if (value.is_string() && value.get<std::string>() == "free") continue;
    if (!value.is_number_unsigned()) throw std::invalid_argument("cor value must be \"free\" or a prime");
    st.cor[id] = value.get<Prime>();
  }
  for (const auto& entry : j["pair"]) {
    std::vector<std::size_t> ids;
    for (const auto& name : entry.at("primes")) ids.push_back(id_from_name(name.get<std::string>(), rank));
    st.pair[form_from_json(entry.at("form"))] = std::move(ids);
  }
  for (const auto& entry : j["path"]) {
    if (!entry.is_array() || entry.size() != 2) throw std::invalid_argument("path entry must be [form, form]");
    st.path.emplace_back(form_from_json(entry[0]), form_from_json(entry[1]));
  }
  auto why = invariant_violation(st);
  if (!why.empty()) throw std::invalid_argument("symbolic state: " + why);
  return st;
}

}  // namespace apt_lab
