#include "apt_lab/json_util.hpp"

#include <stdexcept>

namespace apt_lab {

mpz_class big_from_json(const Json& j) {
  mpz_class v;
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s.empty() || v.set_str(s, 10) != 0) {
      throw std::invalid_argument("malformed decimal integer: \"" + s + "\"");
    }
    return v;
  }
  if (j.is_number_integer()) return mpz_class(j.get<long>());
  throw std::invalid_argument("expected integer as decimal string, got " + j.dump());
}

Json pair_to_json(const NodePair& p) {
  return Json::array({big_to_string(p.x), big_to_string(p.y)});
}

NodePair pair_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("expected [x, y], got " + j.dump());
  }
  return NodePair(big_from_json(j[0]), big_from_json(j[1]));
}

Json primes_to_json(const PrimeSet& p) {
  Json out = Json::array();
  for (Prime q : p.primes()) out.push_back(q);
  return out;
}

PrimeSet primes_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected prime list, got " + j.dump());
  std::vector<Prime> primes;
  for (const auto& v : j) {
    if (!v.is_number_unsigned()) {
      throw std::invalid_argument("prime entries must be positive integers, got " + v.dump());
    }
    primes.push_back(v.get<Prime>());
  }
  PrimeSet set(primes);
  if (set.values() != primes) throw std::invalid_argument("primes must be sorted: " + j.dump());
  return set;
}

}  // namespace apt_lab
