#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace apt_lab {

using Prime = std::uint64_t;

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(std::uint64_t n);

/// Primes <= bound, ascending (simple sieve).
std::vector<Prime> primes_up_to(std::uint64_t bound);

/// Distinct prime divisors of n in ascending order (Pollard-Brent); empty for 0 and 1.
std::vector<Prime> prime_divisors(std::uint64_t n);

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t a, std::uint64_t e, std::uint64_t m);

class invalid_prime_set : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A finite set of distinct primes kept sorted, with its cached product N(P).
class PrimeSet {
 public:
  PrimeSet() : product_(1) {}

  /// Accepts primes in any order; throws invalid_prime_set on duplicates or
  /// composite entries.
  explicit PrimeSet(std::vector<Prime> primes);
  PrimeSet(std::initializer_list<Prime> primes)
      : PrimeSet(std::vector<Prime>(primes)) {}

  /// Parses "2,3,5" (whitespace tolerated, empty string = empty set).
  static PrimeSet parse(const std::string& text);

  std::span<const Prime> primes() const { return primes_; }
  const std::vector<Prime>& values() const { return primes_; }
  std::size_t size() const { return primes_.size(); }
  bool empty() const { return primes_.empty(); }

  const mpz_class& product() const { return product_; }

  /// N(P) as a machine word; throws std::overflow_error when it does not fit.
  std::uint64_t product_u64() const;

  bool contains(Prime p) const;
  bool is_subset_of(const PrimeSet& other) const;
  bool is_strict_subset_of(const PrimeSet& other) const {
    return size() < other.size() && is_subset_of(other);
  }
  PrimeSet with(Prime p) const;
  PrimeSet without(Prime p) const;

  std::string to_string() const;  // "{2,3,5}"
  std::string to_csv() const;     // "2,3,5"

  friend bool operator==(const PrimeSet& a, const PrimeSet& b) {
    return a.primes_ == b.primes_;
  }
  friend auto operator<=>(const PrimeSet& a, const PrimeSet& b) {
    return a.primes_ <=> b.primes_;
  }

 private:
  std::vector<Prime> primes_;
  mpz_class product_;
};

}  // namespace apt_lab
