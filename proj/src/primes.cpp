#include "apt_lab/primes.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace apt_lab {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) result = mul_mod(result, a, m);
    a = mul_mod(a, a, m);
    e >>= 1;
  }
  return result;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // This witness set is deterministic below 2^64.
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<Prime> primes_up_to(std::uint64_t bound) {
  std::vector<Prime> out;
  if (bound < 2) return out;
  std::vector<bool> composite(bound + 1, false);
  for (std::uint64_t i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return out;
}

namespace {

std::uint64_t pollard_brent(std::uint64_t n) {
  if (n % 2 == 0) return 2;
  for (std::uint64_t c = 1;; ++c) {
    auto f = [&](std::uint64_t x) { return (mul_mod(x, x, n) + c) % n; };
    std::uint64_t x = 2, y = 2, d = 1, q = 1, ys = 2;
    const std::uint64_t batch = 128;
    for (std::uint64_t r = 1; d == 1; r *= 2) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      for (std::uint64_t k = 0; k < r && d == 1; k += batch) {
        ys = y;
        for (std::uint64_t i = 0; i < batch && i < r - k; ++i) {
          y = f(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        d = std::gcd(q, n);
      }
    }
    if (d == n) {
      do {
        ys = f(ys);
        d = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (d == 1);
    }
    if (d != n) return d;
  }
}

void factor_into(std::uint64_t n, std::vector<Prime>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  std::uint64_t d = pollard_brent(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

std::vector<Prime> prime_divisors(std::uint64_t n) {
  std::vector<Prime> out;
  if (n == 0) return out;
  for (std::uint64_t p : {2u, 3u, 5u, 7u, 11u, 13u}) {
    if (n % p) continue;
    out.push_back(p);
    while (n % p == 0) n /= p;
  }
  factor_into(n, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PrimeSet::PrimeSet(std::vector<Prime> primes) : primes_(std::move(primes)), product_(1) {
  std::sort(primes_.begin(), primes_.end());
  for (std::size_t i = 0; i < primes_.size(); ++i) {
    if (!is_prime(primes_[i])) {
      throw invalid_prime_set("not a prime: " + std::to_string(primes_[i]));
    }
    if (i > 0 && primes_[i] == primes_[i - 1]) {
      throw invalid_prime_set("duplicate prime: " + std::to_string(primes_[i]));
    }
    product_ *= static_cast<unsigned long>(primes_[i]);
  }
}

PrimeSet PrimeSet::parse(const std::string& text) {
  std::vector<Prime> primes;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    token.erase(std::remove_if(token.begin(), token.end(), ::isspace), token.end());
    if (token.empty()) continue;
    if (!std::all_of(token.begin(), token.end(), ::isdigit)) {
      throw invalid_prime_set("malformed prime list: " + text);
    }
    primes.push_back(std::stoull(token));
  }
  return PrimeSet(std::move(primes));
}

std::uint64_t PrimeSet::product_u64() const {
  if (!product_.fits_ulong_p()) {
    throw std::overflow_error("N(P) exceeds 64 bits for " + to_string());
  }
  return product_.get_ui();
}

bool PrimeSet::contains(Prime p) const {
  return std::binary_search(primes_.begin(), primes_.end(), p);
}

bool PrimeSet::is_subset_of(const PrimeSet& other) const {
  return std::includes(other.primes_.begin(), other.primes_.end(), primes_.begin(),
                       primes_.end());
}

PrimeSet PrimeSet::with(Prime p) const {
  auto v = primes_;
  v.push_back(p);
  return PrimeSet(std::move(v));
}

PrimeSet PrimeSet::without(Prime p) const {
  auto v = primes_;
  v.erase(std::remove(v.begin(), v.end(), p), v.end());
  return PrimeSet(std::move(v));
}

std::string PrimeSet::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < primes_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(primes_[i]);
  }
  return out;
}

std::string PrimeSet::to_string() const { return "{" + to_csv() + "}"; }

}  // namespace apt_lab
