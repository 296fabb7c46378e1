#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "apt_lab/apt_core.hpp"
#include "apt_lab/json_util.hpp"
#include "apt_lab/primes.hpp"
#include "apt_lab/residue_graph.hpp"

namespace apt_lab {

/// Witness that APT_P(start) is infinite.
///
/// The path start -> ... -> end follows `word`; with n1 = N_P(x_0), n2 = N_P(y_0),
/// m = N(P) / (n1 n2) and k = (x_0 / n1)^{-1} (y_0 / n2) mod m, the end pair is
/// (n1 s, n2 (k s + m t)) and has the same N_P profile as the start.
struct PathCertificate {
  PrimeSet primes;
  NodePair start;
  StepWord word;
  NodePair end;
  mpz_class n1, n2, m, k, s, t;

  friend bool operator==(const PathCertificate& a, const PathCertificate& b) {
    return a.primes == b.primes && a.start == b.start && a.word == b.word && a.end == b.end &&
           a.n1 == b.n1 && a.n2 == b.n2 && a.m == b.m && a.k == b.k && a.s == b.s && a.t == b.t;
  }
};

struct VerifyReport {
  bool ok = false;
  std::string diagnostic;  // empty when ok
};

/// Recomputes every invariant from scratch with exact arithmetic.
VerifyReport check_certificate(const PathCertificate& cert);
inline bool verify_certificate(const PathCertificate& cert) { return check_certificate(cert).ok; }

/// Derives all lattice parameters for the path start --word--> end.
/// Returns nullopt when the path does not form a valid certificate.
std::optional<PathCertificate> make_certificate(const PrimeSet& primes, const NodePair& start,
                                                const StepWord& word);

struct CertificateSearch {
  std::optional<PathCertificate> certificate;
  std::size_t nodes_visited = 0;
  bool node_cap_hit = false;
  bool depth_cap_hit = false;
};

/// Depth-first search (LStep child first) through APT_P(root). At every node
/// each ancestor on the current path is tried, root first, as the certificate
/// start. The search runs on residues mod N(P) and rebuilds the winning path
/// exactly; NotFound is inconclusive.
CertificateSearch search_certificate(const PrimeSet& primes, const NodePair& root,
                                     std::size_t depth_cap, std::size_t node_cap);

/// end * M^i for i = 1..n, where M is the certificate's path matrix. Each replayed
/// segment is checked position by position against the original path's N_P profile;
/// a mismatch throws integrity_error.
std::vector<NodePair> pump_certificate(const PathCertificate& cert, std::size_t n);

struct OrbitCycle {
  std::uint64_t length = 0;
  std::uint64_t modulus = 0;
  bool all_eligible = false;  // every orbit pair eligible modulo `modulus`
};

/// Iterates pair -> pair * M modulo prod p^{a_p} starting from the end pair and
/// measures the cycle with Brent's algorithm.
OrbitCycle orbit_cycle_mod(const PathCertificate& cert,
                           const std::map<Prime, unsigned>& exponents);

/// Transports a certificate for P to a superset Q: the path is divided by the
/// Q-part v of gcd(x_0, y_0), and the word is repeated the fewest times for which
/// the Q lattice conditions close up. Throws integrity_error if the divided path
/// leaves APT_Q.
PathCertificate lift_certificate(const PathCertificate& cert, const PrimeSet& superset);

/// Turns a directed cycle of eligible residue pairs mod N(P) into a certificate
/// rooted at the smallest positive lift of its first pair.
PathCertificate certificate_from_residue_cycle(const PrimeSet& primes,
                                               const std::vector<ResiduePair>& cycle);

Json certificate_to_json(const PathCertificate& cert);
PathCertificate certificate_from_json(const Json& j);

}  // namespace apt_lab
