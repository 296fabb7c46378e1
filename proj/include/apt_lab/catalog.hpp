#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "apt_lab/apt_core.hpp"
#include "apt_lab/certificate.hpp"
#include "apt_lab/json_util.hpp"
#include "apt_lab/primes.hpp"

namespace apt_lab {

enum class EntryStatus { Claimed, Certified };

struct CatalogEntry {
  PrimeSet primes;
  NodePair initial;
  EntryStatus status = EntryStatus::Claimed;
  std::optional<PathCertificate> certificate;
};

class catalog_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Antichain of prime sets under inclusion, in file/insertion order.
class Catalog {
 public:
  const std::vector<CatalogEntry>& entries() const { return entries_; }
  std::vector<CatalogEntry>& mutable_entries() { return entries_; }
  std::vector<PrimeSet> prime_sets() const;
  std::size_t size() const { return entries_.size(); }
  /// Appends after checking the entry invariants and the antichain.
  void push_checked(CatalogEntry entry);

 private:
  std::vector<CatalogEntry> entries_;
};

Json entry_to_json(const CatalogEntry& e);
/// Throws catalog_error on a malformed entry or a certificate that fails to verify.
CatalogEntry entry_from_json(const Json& j);

/// One JSON object per line; blank lines are skipped. Errors name the line number.
Catalog parse_catalog(std::istream& in, const std::string& source = "<input>");
Catalog load_catalog(const std::string& path);
std::string serialize_catalog(const Catalog& c);
void save_catalog(const Catalog& c, const std::string& path);

struct CertifyReport {
  std::size_t certified = 0;
  std::size_t reverified = 0;
  std::vector<PrimeSet> failures;
};

/// Searches a certificate for every Claimed entry from its initial pair and
/// re-verifies Certified ones; failures stay in the catalog as Claimed.
CertifyReport certify_all(Catalog& c, std::size_t depth_cap, std::size_t node_cap = 5'000'000,
                          unsigned jobs = 1);

struct InsertReport {
  enum class Outcome { Appended, Duplicate, RejectedSuperset } outcome = Outcome::Appended;
  std::vector<PrimeSet> evicted;
  std::string notice;
};

/// Inserts a Certified entry: supersets of existing entries are rejected, strict
/// subsets evict the entries containing them. Entries are then ordered by primes.
InsertReport insert(Catalog& c, CatalogEntry entry);

}  // namespace apt_lab
