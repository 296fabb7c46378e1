#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "apt_lab/interval.hpp"
#include "apt_lab/json_util.hpp"
#include "apt_lab/primes.hpp"

namespace apt_lab {

inline constexpr Prime kDefaultPrimeCutoff = 1'000'000;

/// value = constant + (6/pi^2) * rational_part whenever rational_part is set;
/// `value` is always a rigorous enclosure.
struct DensityValue {
  std::optional<mpq_class> rational_part;
  mpq_class constant = 0;
  Interval value;
};

/// prod_{p in P} 1/(p^2 - 1)
mpq_class c_rational(const PrimeSet& primes);
/// C(P) = (6/pi^2) prod_{p in P} 1/(p^2 - 1)
DensityValue c_of(const PrimeSet& primes);

/// Prime zeta P(s) = sum_p p^{-s} for integer s >= 2, from the Moebius series
/// over log zeta(ns).
Interval prime_zeta(unsigned s, mpfr_prec_t prec = kDefaultPrecision);

/// Enclosure of sum_p (p^2 - 1)^{-j}: primes <= cutoff summed directly plus a
/// telescoping tail, intersected with the prime-zeta expansion.
Interval prime_power_sum(unsigned j, Prime cutoff = kDefaultPrimeCutoff,
                         mpfr_prec_t prec = kDefaultPrecision);

/// e_0..e_kmax of {1/(p^2 - 1) : p prime} via Newton's identities.
std::vector<Interval> elementary_sums(unsigned kmax, Prime cutoff = kDefaultPrimeCutoff,
                                      mpfr_prec_t prec = kDefaultPrecision);

/// e_k alone; throws std::runtime_error when wider than `tolerance`.
Interval prime_tail(unsigned k, Prime cutoff = kDefaultPrimeCutoff, double tolerance = 1e-10);

class double_counting_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// 1 - sum C(P) over a containment-free list.
DensityValue upper_bound(std::span<const PrimeSet> known_prims);

struct ClassificationData {
  std::vector<PrimeSet> prim5;
  std::vector<PrimeSet> prim6;
  std::vector<PrimeSet> prim7_without_3;
  /// Which strata are completely classified: {}, {5}, {5,6} or {5,6,7}
  /// (7 meaning |P| = 7 with 3 not in P).
  std::set<unsigned> certified;
  Prime cutoff = kDefaultPrimeCutoff;
};

/// Splits catalog sets into the strata used by lower_bound.
ClassificationData classification_from_sets(std::span<const PrimeSet> sets,
                                            std::set<unsigned> certified);

DensityValue lower_bound(const ClassificationData& data);

Json density_to_json(const DensityValue& v, const std::string& quantity);

}  // namespace apt_lab
