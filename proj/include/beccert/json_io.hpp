#pragma once

#include <string>

#include "beccert/certify.hpp"
#include "beccert/distribution.hpp"
#include "beccert/prawitz.hpp"
#include "json.hpp"

namespace beccert {

using Json = nlohmann::json;

/// {"atoms": [...], "probs": [...]}
Json distribution_to_json(const DiscreteDistribution& d);
/// Throws DomainError on a malformed object or an invalid law.
DiscreteDistribution distribution_from_json(const Json& j);

/// {"dstar", "margin", "integrals": [I1, I2, I3, I4], "errors", "evaluations", "converged"}
Json prawitz_to_json(const PrawitzResult& r);

/// Versioned certificate document ("schema": "v1").
Json certificate_to_json(const Certificate& c);
/// Throws DomainError on a missing field or an unknown schema.
Certificate certificate_from_json(const Json& j);

/// One row per entry: epsilon,u0,u,dstar,margin,certified_from.
std::string certificate_to_csv(const Certificate& c);

}  // namespace beccert
