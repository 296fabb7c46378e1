#pragma once

#include <string>

#include <gmpxx.h>

#include "json.hpp"

#include "apt_lab/apt_core.hpp"
#include "apt_lab/primes.hpp"

namespace apt_lab {

using Json = nlohmann::ordered_json;

/// Big integers always travel as decimal strings.
inline std::string big_to_string(const mpz_class& v) { return v.get_str(10); }
mpz_class big_from_json(const Json& j);

Json pair_to_json(const NodePair& p);
NodePair pair_from_json(const Json& j);

Json primes_to_json(const PrimeSet& p);
PrimeSet primes_from_json(const Json& j);

}  // namespace apt_lab
