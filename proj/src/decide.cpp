#include "apt_lab/decide.hpp"

#include <cctype>
#include <cstdlib>

namespace apt_lab {

std::size_t memory_cap_from_env() {
  const char* raw = std::getenv("APT_LAB_MEMORY_CAP");
  if (!raw || !*raw) return kDefaultMemoryCap;
  std::string text(raw);
  std::size_t scale = 1;
  char last = static_cast<char>(std::toupper(static_cast<unsigned char>(text.back())));
  if (last == 'K' || last == 'M' || last == 'G') {
    scale = last == 'K' ? (1u << 10) : last == 'M' ? (1u << 20) : (1u << 30);
    text.pop_back();
  }
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return static_cast<std::size_t>(v) * scale;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("malformed APT_LAB_MEMORY_CAP: ") + raw);
  }
}

namespace {

TypeDecision decide_impl(const PrimeSet& primes, std::size_t memory_cap, bool want_longest) {
  // With |P| <= 1 no residue pair has a P-divisor on both sides while
  // gcd(u, v, N) = 1, so nothing branches.
  if (primes.size() <= 1) return FiniteType{0, std::nullopt};

  std::uint64_t modulus;
  try {
    modulus = primes.product_u64();
  } catch (const std::overflow_error&) {
    return Undecided{"modulus too large: N(P) exceeds 64 bits"};
  }
  if (walk_search_bytes(modulus, want_longest) > memory_cap) {
    return Undecided{"modulus too large: N(P)^2 residue pairs exceed the memory cap"};
  }
  ResidueGraph graph(modulus, primes);
  auto r = search_walks(graph, {want_longest, memory_cap});
  switch (r.kind) {
    case WalkSearchResult::Kind::Acyclic:
      return FiniteType{r.longest_walk, r.longest_start};
    case WalkSearchResult::Kind::Cycle:
      return InfiniteType{std::move(r.cycle)};
    case WalkSearchResult::Kind::Undecided:
      break;
  }
  return Undecided{r.reason};
}

}  // namespace

TypeDecision finite_type_decide(const PrimeSet& primes, std::size_t memory_cap) {
  return decide_impl(primes, memory_cap, true);
}

TypeDecision finite_type_check(const PrimeSet& primes, std::size_t memory_cap) {
  return decide_impl(primes, memory_cap, false);
}

std::uint64_t longest_chain(const PrimeSet& primes, std::size_t memory_cap) {
  if (primes.size() <= 1) return 0;
  auto verdict = finite_type_check(primes, memory_cap);
  if (auto* u = std::get_if<Undecided>(&verdict)) throw std::runtime_error(u->reason);
  if (std::holds_alternative<InfiniteType>(verdict)) {
    throw infinite_type_error(primes.to_string() + " is of infinite type; C(P) is undefined");
  }
  ResidueGraph graph(primes.product_u64(), primes);
  auto run = longest_fixed_first_run(graph);
  if (!run) throw infinite_type_error("unbounded fixed-first-coordinate run");
  return *run;
}

}  // namespace apt_lab
