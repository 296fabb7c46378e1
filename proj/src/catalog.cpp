#include "apt_lab/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

namespace apt_lab {

namespace {

void check_entry(const CatalogEntry& e) {
  if (e.status == EntryStatus::Certified) {
    if (!e.certificate) throw catalog_error(e.primes.to_string() + " is certified but has no certificate");
  }
  if (e.certificate) {
    if (!(e.certificate->primes == e.primes)) {
      throw catalog_error(e.primes.to_string() + " carries a certificate for " +
                          e.certificate->primes.to_string());
    }
    auto report = check_certificate(*e.certificate);
    if (!report.ok) throw catalog_error(e.primes.to_string() + ": certificate rejected: " + report.diagnostic);
  }
}

}  // namespace

std::vector<PrimeSet> Catalog::prime_sets() const {
  std::vector<PrimeSet> out;
  for (const auto& e : entries_) out.push_back(e.primes);
  return out;
}

void Catalog::push_checked(CatalogEntry entry) {
  check_entry(entry);
  for (const auto& e : entries_) {
    if (e.primes.is_subset_of(entry.primes) || entry.primes.is_subset_of(e.primes)) {
      throw catalog_error("containment between " + e.primes.to_string() + " and " + entry.primes.to_string());
    }
  }
  entries_.push_back(std::move(entry));
}

Json entry_to_json(const CatalogEntry& e) {
  Json j;
  j["primes"] = primes_to_json(e.primes);
  j["initial"] = pair_to_json(e.initial);
  j["status"] = e.status == EntryStatus::Certified ? "certified" : "claimed";
  if (e.certificate) j["certificate"] = certificate_to_json(*e.certificate);
  return j;
}

CatalogEntry entry_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw std::invalid_argument("entry must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key != "primes" && key != "initial" && key != "status" && key != "certificate") {
        throw std::invalid_argument("unknown key \"" + key + "\"");
      }
    }
    if (!j.contains("primes") || !j.contains("initial") || !j.contains("status")) {
      throw std::invalid_argument("entry needs primes, initial and status");
    }
    CatalogEntry e;
    e.primes = primes_from_json(j["primes"]);
    e.initial = pair_from_json(j["initial"]);
    const auto& status = j["status"];
    if (!status.is_string()) throw std::invalid_argument("status must be a string");
    if (status == "certified") e.status = EntryStatus::Certified;
    else if (status == "claimed") e.status = EntryStatus::Claimed;
    else throw std::invalid_argument("status must be \"claimed\" or \"certified\"");
    if (j.contains("certificate")) e.certificate = certificate_from_json(j["certificate"]);
    check_entry(e);
    return e;
  } catch (const catalog_error&) {
    throw;
  } catch (const std::exception& ex) {
    throw catalog_error(ex.what());
  }
}

Catalog parse_catalog(std::istream& in, const std::string& source) {
  Catalog c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      c.push_checked(entry_from_json(Json::parse(line)));
    } catch (const std::exception& ex) {
      throw catalog_error(source + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return c;
}

Catalog load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw catalog_error("cannot open " + path);
  return parse_catalog(in, path);
}

std::string serialize_catalog(const Catalog& c) {
  std::string out;
  for (const auto& e : c.entries()) {
    out += entry_to_json(e).dump();
    out += '\n';
  }
  return out;
}

void save_catalog(const Catalog& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw catalog_error("cannot write " + path);
  out << serialize_catalog(c);
  if (!out) throw catalog_error("write failed for " + path);
}

CertifyReport certify_all(Catalog& c, std::size_t depth_cap, std::size_t node_cap, unsigned jobs) {
  auto& entries = c.mutable_entries();
  std::vector<std::optional<PathCertificate>> found(entries.size());
  std::vector<bool> was_certified(entries.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < entries.size(); i += stride) {
      auto& e = entries[i];
      was_certified[i] = e.status == EntryStatus::Certified && e.certificate && verify_certificate(*e.certificate);
      if (was_certified[i]) continue;
      found[i] = search_certificate(e.primes, e.initial, depth_cap, node_cap).certificate;
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, entries.size()))));
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
    for (auto& t : pool) t.join();
  }

  CertifyReport report;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto& e = entries[i];
    if (was_certified[i]) {
      ++report.reverified;
    } else if (found[i]) {
      e.status = EntryStatus::Certified;
      e.certificate = std::move(found[i]);
      ++report.certified;
    } else {
      e.status = EntryStatus::Claimed;
      e.certificate.reset();
      report.failures.push_back(e.primes);
    }
  }
  return report;
}

InsertReport insert(Catalog& c, CatalogEntry entry) {
  if (entry.status != EntryStatus::Certified) throw catalog_error("only certified entries can be inserted");
  check_entry(entry);
  InsertReport report;
  auto& entries = c.mutable_entries();
  for (const auto& e : entries) {
    if (e.primes == entry.primes) {
      report.outcome = InsertReport::Outcome::Duplicate;
      report.notice = entry.primes.to_string() + " is already catalogued";
      return report;
    }
    if (e.primes.is_strict_subset_of(entry.primes)) {
      report.outcome = InsertReport::Outcome::RejectedSuperset;
      report.notice = entry.primes.to_string() + " contains " + e.primes.to_string();
      return report;
    }
  }
  auto evict = std::remove_if(entries.begin(), entries.end(), [&](const CatalogEntry& e) {
    if (!entry.primes.is_strict_subset_of(e.primes)) return false;
    report.evicted.push_back(e.primes);
    return true;
  });
  entries.erase(evict, entries.end());
  if (!report.evicted.empty()) {
    report.notice = "evicted " + std::to_string(report.evicted.size()) + " superset(s) of " + entry.primes.to_string();
  }
  entries.push_back(std::move(entry));
  std::stable_sort(entries.begin(), entries.end(),
                   [](const CatalogEntry& a, const CatalogEntry& b) { return a.primes < b.primes; });
  return report;
}

}  // namespace apt_lab
