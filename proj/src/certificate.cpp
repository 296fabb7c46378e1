#include "apt_lab/certificate.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace apt_lab {

namespace {

mpz_class gcd(const mpz_class& a, const mpz_class& b) {
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

mpz_class mod(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

/// (x_0 / n1)^{-1} (y_0 / n2) mod m, or nullopt when x_0 / n1 is not a unit.
std::optional<mpz_class> unit_ratio(const mpz_class& a, const mpz_class& b, const mpz_class& m) {
  if (m == 1) return mpz_class(0);
  mpz_class inv;
  if (mpz_invert(inv.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) return std::nullopt;
  return mod(inv * b, m);
}

// Residue view of a path node modulo N(P), used by the certificate search.
struct ResidueNode {
  std::uint64_t x, y;
  std::uint64_t n1, n2, m;
  std::uint64_t a, b;  // (x / n1) mod m, (y / n2) mod m
  bool eligible;
  bool can_start;  // eligible and x / n1 invertible mod m
};

ResidueNode make_residue_node(std::uint64_t x, std::uint64_t y, std::uint64_t modulus) {
  ResidueNode r{};
  r.x = x;
  r.y = y;
  r.n1 = std::gcd(x, modulus);
  r.n2 = std::gcd(y, modulus);
  r.eligible = r.n1 > 1 && r.n2 > 1 && std::gcd(std::gcd(x, y), modulus) == 1;
  if (!r.eligible) return r;
  r.m = modulus / (r.n1 * r.n2);
  r.a = (x / r.n1) % r.m;
  r.b = (y / r.n2) % r.m;
  r.can_start = std::gcd(r.a, r.m) == 1;
  return r;
}

/// Certificate condition between a candidate start and a later node, on residues.
bool closes(const ResidueNode& start, const ResidueNode& end) {
  if (!start.can_start || start.n1 != end.n1 || start.n2 != end.n2) return false;
  return mul_mod(end.b, start.a, start.m) == mul_mod(start.b, end.a, start.m);
}

std::uint64_t reduce_u64(const mpz_class& v, std::uint64_t modulus) {
  return mpz_fdiv_ui(v.get_mpz_t(), modulus);
}

}  // namespace

VerifyReport check_certificate(const PathCertificate& c) {
  auto fail = [](std::string why) { return VerifyReport{false, std::move(why)}; };
  if (c.word.empty()) return fail("word length must be >= 1");
  const mpz_class& big_n = c.primes.product();

  NodePair cur = c.start;
  for (std::size_t i = 0; i < c.word.size(); ++i) {
    if (!branch_eligible(cur, c.primes)) {
      return fail("pair " + cur.to_string() + " at position " + std::to_string(i) +
                  " is not eligible");
    }
    cur = step(cur, c.word[i]);
  }
  if (!(cur == c.end)) return fail("word leads to " + cur.to_string() + ", not " + c.end.to_string());

  if (c.n1 != gcd(c.start.x, big_n)) return fail("n1 != N_P(x_0)");
  if (c.n2 != gcd(c.start.y, big_n)) return fail("n2 != N_P(y_0)");
  if (c.m * c.n1 * c.n2 != big_n) return fail("m != N(P) / (n1 n2)");

  mpz_class a = c.start.x / c.n1;
  mpz_class b = c.start.y / c.n2;
  auto k = unit_ratio(a, b, c.m);
  if (!k) return fail("K undefined: gcd(x_0 / n1, m) > 1");
  if (mod(c.k - *k, c.m) != 0) return fail("k does not match (x_0/n1)^-1 (y_0/n2) mod m");

  if (c.end.x != c.n1 * c.s) return fail("x_l != n1 s");
  if (c.end.y != c.n2 * (c.k * c.s + c.m * c.t)) return fail("y_l != n2 (k s + m t)");
  if (gcd(c.end.x, big_n) != c.n1) return fail("N_P(x_l) != N_P(x_0)");
  if (gcd(c.end.y, big_n) != c.n2) return fail("N_P(y_l) != N_P(y_0)");
  return {true, {}};
}

std::optional<PathCertificate> make_certificate(const PrimeSet& primes, const NodePair& start,
                                                const StepWord& word) {
  if (word.empty()) return std::nullopt;
  PathCertificate c;
  c.primes = primes;
  c.start = start;
  c.word = word;
  NodePair cur = start;
  for (Step s : word) {
    if (!branch_eligible(cur, primes)) return std::nullopt;
    cur = step(cur, s);
  }
  c.end = std::move(cur);

  const mpz_class& big_n = primes.product();
  c.n1 = gcd(start.x, big_n);
  c.n2 = gcd(start.y, big_n);
  c.m = big_n / (c.n1 * c.n2);
  auto k = unit_ratio(start.x / c.n1, start.y / c.n2, c.m);
  if (!k) return std::nullopt;
  c.k = *k;
  if (gcd(c.end.x, big_n) != c.n1 || gcd(c.end.y, big_n) != c.n2) return std::nullopt;
  c.s = c.end.x / c.n1;
  mpz_class rest = c.end.y / c.n2 - c.k * c.s;
  if (!mpz_divisible_p(rest.get_mpz_t(), c.m.get_mpz_t())) return std::nullopt;
  c.t = rest / c.m;
  return c;
}

CertificateSearch search_certificate(const PrimeSet& primes, const NodePair& root,
                                     std::size_t depth_cap, std::size_t node_cap) {
  if (depth_cap == 0 || node_cap == 0) throw std::invalid_argument("search caps must be >= 1");
  CertificateSearch out;
  if (primes.size() <= 1) {
    out.nodes_visited = 1;
    return out;
  }
  const std::uint64_t modulus = primes.product_u64();
  if (modulus >= (std::uint64_t{1} << 62)) throw std::invalid_argument("N(P) too large");

  std::vector<ResidueNode> path;
  std::vector<Step> letters;
  std::vector<std::uint8_t> next;
  path.push_back(make_residue_node(reduce_u64(root.x, modulus), reduce_u64(root.y, modulus),
                                   modulus));
  next.push_back(0);
  out.nodes_visited = 1;

  std::optional<std::size_t> hit_start;
  while (!path.empty() && !hit_start) {
    std::size_t d = path.size() - 1;
    const ResidueNode& top = path[d];
    if (next[d] == 2 || !top.eligible || d >= depth_cap) {
      if (top.eligible && d >= depth_cap) out.depth_cap_hit = true;
      path.pop_back();
      next.pop_back();
      if (!letters.empty()) letters.pop_back();
      continue;
    }
    if (out.nodes_visited >= node_cap) {
      out.node_cap_hit = true;
      break;
    }
    Step letter = next[d] == 0 ? Step::L : Step::R;
    ++next[d];
    std::uint64_t s = top.x + top.y;
    if (s >= modulus) s -= modulus;
    ResidueNode child = letter == Step::L ? make_residue_node(top.x, s, modulus)
                                          : make_residue_node(s, top.y, modulus);
    ++out.nodes_visited;
    letters.push_back(letter);
    path.push_back(child);
    next.push_back(0);
    if (!child.eligible) continue;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      if (closes(path[i], child)) {
        hit_start = i;
        break;
      }
    }
  }
  if (!hit_start) return out;

  NodePair cur = root;
  for (std::size_t i = 0; i < *hit_start; ++i) cur = step(cur, letters[i]);
  StepWord word(letters.begin() + static_cast<std::ptrdiff_t>(*hit_start), letters.end());
  auto cert = make_certificate(primes, cur, word);
  if (!cert || !verify_certificate(*cert)) {
    throw integrity_error("residue search produced a path that is not a certificate");
  }
  out.certificate = std::move(cert);
  return out;
}

std::vector<NodePair> pump_certificate(const PathCertificate& cert, std::size_t n) {
  if (!verify_certificate(cert)) throw std::invalid_argument("certificate does not verify");
  const auto& primes = cert.primes;
  std::vector<std::pair<mpz_class, mpz_class>> profile;
  NodePair cur = cert.start;
  for (Step s : cert.word) {
    profile.emplace_back(n_p(cur.x, primes), n_p(cur.y, primes));
    cur = step(cur, s);
  }
  profile.emplace_back(n_p(cur.x, primes), n_p(cur.y, primes));

  std::vector<NodePair> out;
  out.reserve(n);
  cur = cert.end;
  for (std::size_t round = 1; round <= n; ++round) {
    for (std::size_t i = 0; i <= cert.word.size(); ++i) {
      if (n_p(cur.x, primes) != profile[i].first || n_p(cur.y, primes) != profile[i].second) {
        throw integrity_error("pumping round " + std::to_string(round) +
                              " broke the N_P profile at position " + std::to_string(i));
      }
      if (i == cert.word.size()) break;
      if (!branch_eligible(cur, primes)) {
        throw integrity_error("pumped pair " + cur.to_string() + " is not eligible");
      }
      cur = step(cur, cert.word[i]);
    }
    out.push_back(cur);
  }
  return out;
}

OrbitCycle orbit_cycle_mod(const PathCertificate& cert, const std::map<Prime, unsigned>& exponents) {
  if (!verify_certificate(cert)) throw std::invalid_argument("certificate does not verify");
  if (exponents.size() != cert.primes.size()) {
    throw std::invalid_argument("exponents must cover exactly the certificate primes");
  }
  mpz_class big_modulus = 1;
  for (Prime p : cert.primes.primes()) {
    auto it = exponents.find(p);
    if (it == exponents.end()) throw std::invalid_argument("missing exponent for " + std::to_string(p));
    if (it->second < 1) throw std::invalid_argument("exponents must be >= 1");
    mpz_class pp;
    mpz_ui_pow_ui(pp.get_mpz_t(), p, it->second);
    big_modulus *= pp;
  }
  if (!big_modulus.fits_ulong_p() || big_modulus.get_ui() >= (std::uint64_t{1} << 62)) {
    throw std::invalid_argument("orbit modulus too large");
  }
  const std::uint64_t modulus = big_modulus.get_ui();
  const std::uint64_t np = cert.primes.product_u64();
  Matrix2 mat = path_matrix(cert.word);
  const std::uint64_t a = reduce_u64(mat.a, modulus), b = reduce_u64(mat.b, modulus);
  const std::uint64_t c = reduce_u64(mat.c, modulus), d = reduce_u64(mat.d, modulus);
  auto f = [&](ResiduePair z) {
    return ResiduePair{(mul_mod(a, z.first, modulus) + mul_mod(b, z.second, modulus)) % modulus,
                       (mul_mod(c, z.first, modulus) + mul_mod(d, z.second, modulus)) % modulus};
  };

  const ResiduePair x0{reduce_u64(cert.end.x, modulus), reduce_u64(cert.end.y, modulus)};
  // Brent: find the cycle length lambda.
  std::uint64_t power = 1, lambda = 1;
  ResiduePair tortoise = x0, hare = f(x0);
  while (tortoise != hare) {
    if (power == lambda) {
      tortoise = hare;
      power *= 2;
      lambda = 0;
    }
    hare = f(hare);
    ++lambda;
  }

  OrbitCycle out{lambda, modulus, true};
  // M is invertible mod N, so the orbit is purely periodic and x0 lies on the cycle.
  ResiduePair z = x0;
  for (std::uint64_t i = 0; i < lambda; ++i) {
    bool ok = std::gcd(z.first, np) > 1 && std::gcd(z.second, np) > 1 &&
              std::gcd(std::gcd(z.first, z.second), modulus) == 1;
    if (!ok) {
      out.all_eligible = false;
      break;
    }
    z = f(z);
  }
  return out;
}

PathCertificate lift_certificate(const PathCertificate& cert, const PrimeSet& superset) {
  if (!verify_certificate(cert)) throw std::invalid_argument("certificate does not verify");
  if (!cert.primes.is_subset_of(superset)) {
    throw std::invalid_argument(cert.primes.to_string() + " is not a subset of " +
                                superset.to_string());
  }
  // v = the part of gcd(x_0, y_0) supported on Q; it is coprime to N(P).
  mpz_class g = gcd(cert.start.x, cert.start.y);
  mpz_class v = 1;
  for (Prime q : superset.primes()) {
    while (mpz_divisible_ui_p(g.get_mpz_t(), q)) {
      g /= static_cast<unsigned long>(q);
      v *= static_cast<unsigned long>(q);
    }
  }
  NodePair start(cert.start.x / v, cert.start.y / v);

  NodePair cur = start;
  for (Step s : cert.word) {
    if (!branch_eligible(cur, superset)) {
      throw integrity_error("divided path leaves APT_Q at " + cur.to_string());
    }
    cur = step(cur, s);
  }

  // Smallest repetition count T whose endpoint closes the Q lattice conditions.
  const std::uint64_t modulus = superset.product_u64();
  if (modulus >= (std::uint64_t{1} << 62)) throw std::invalid_argument("N(Q) too large");
  Matrix2 mat = path_matrix(cert.word);
  const std::uint64_t a = reduce_u64(mat.a, modulus), b = reduce_u64(mat.b, modulus);
  const std::uint64_t c = reduce_u64(mat.c, modulus), d = reduce_u64(mat.d, modulus);
  ResidueNode head =
      make_residue_node(reduce_u64(start.x, modulus), reduce_u64(start.y, modulus), modulus);
  if (!head.can_start) {
    throw integrity_error("lifted start " + start.to_string() + " admits no unit K under " +
                          superset.to_string());
  }
  std::uint64_t x = head.x, y = head.y;
  std::size_t reps = 0;
  const std::size_t max_reps = 1'000'000;
  while (true) {
    ++reps;
    std::uint64_t nx = (mul_mod(a, x, modulus) + mul_mod(b, y, modulus)) % modulus;
    std::uint64_t ny = (mul_mod(c, x, modulus) + mul_mod(d, y, modulus)) % modulus;
    x = nx;
    y = ny;
    if (closes(head, make_residue_node(x, y, modulus))) break;
    if (reps >= max_reps) throw integrity_error("lift did not close within the repetition limit");
  }

  StepWord word;
  word.reserve(cert.word.size() * reps);
  for (std::size_t r = 0; r < reps; ++r) word.insert(word.end(), cert.word.begin(), cert.word.end());
  auto lifted = make_certificate(superset, start, word);
  if (!lifted || !verify_certificate(*lifted)) {
    throw integrity_error("lifted path fails verification under " + superset.to_string());
  }
  return *lifted;
}

PathCertificate certificate_from_residue_cycle(const PrimeSet& primes,
                                               const std::vector<ResiduePair>& cycle) {
  if (cycle.empty()) throw std::invalid_argument("empty residue cycle");
  const std::uint64_t modulus = primes.product_u64();
  StepWord word;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const auto& [u, v] = cycle[i];
    const auto& nxt = cycle[(i + 1) % cycle.size()];
    std::uint64_t s = (u + v) % modulus;
    if (nxt == ResiduePair{u, s}) word.push_back(Step::L);
    else if (nxt == ResiduePair{s, v}) word.push_back(Step::R);
    else throw std::invalid_argument("residue list is not a walk of the branching graph");
  }
  auto lift = [modulus](std::uint64_t r) { return mpz_class(static_cast<unsigned long>(r ? r : modulus)); };
  NodePair start(lift(cycle.front().first), lift(cycle.front().second));
  auto cert = make_certificate(primes, start, word);
  if (!cert) throw integrity_error("residue cycle does not lift to a certificate");
  return *cert;
}

Json certificate_to_json(const PathCertificate& c) {
  Json j;
  j["primes"] = primes_to_json(c.primes);
  j["start"] = pair_to_json(c.start);
  j["word"] = word_to_string(c.word);
  j["end"] = pair_to_json(c.end);
  j["n1"] = big_to_string(c.n1);
  j["n2"] = big_to_string(c.n2);
  j["m"] = big_to_string(c.m);
  j["k"] = big_to_string(c.k);
  j["s"] = big_to_string(c.s);
  j["t"] = big_to_string(c.t);
  return j;
}

PathCertificate certificate_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("certificate must be a JSON object");
  for (const char* key : {"primes", "start", "word", "end", "n1", "n2", "m", "k", "s", "t"}) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("certificate missing \"") + key + "\"");
  }
  if (!j["word"].is_string()) throw std::invalid_argument("certificate word must be a string");
  PathCertificate c;
  c.primes = primes_from_json(j["primes"]);
  c.start = pair_from_json(j["start"]);
  c.word = parse_word(j["word"].get<std::string>());
  c.end = pair_from_json(j["end"]);
  c.n1 = big_from_json(j["n1"]);
  c.n2 = big_from_json(j["n2"]);
  c.m = big_from_json(j["m"]);
  c.k = big_from_json(j["k"]);
  c.s = big_from_json(j["s"]);
  c.t = big_from_json(j["t"]);
  return c;
}

}  // namespace apt_lab
