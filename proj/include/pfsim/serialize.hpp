#pragma once

#include <json.hpp>

#include "pfsim/model.hpp"
#include "pfsim/residuals.hpp"

namespace pfsim {

// JSON mappings shared by the config loader, dataset headers and the export
// manifest. Readers reject unknown keys; missing keys keep their defaults.

nlohmann::json to_json(const BulkCoeffs& b);
nlohmann::json to_json(const ElasticModel& e);
nlohmann::json to_json(const SimParams& p);
nlohmann::json to_json(const LossWeights& w);
nlohmann::json to_json(const LossReport& r);

BulkCoeffs bulk_from_json(const nlohmann::json& j);
ElasticModel elastic_from_json(const nlohmann::json& j);
SimParams params_from_json(const nlohmann::json& j);
LossWeights weights_from_json(const nlohmann::json& j);

/// Throws ConfigError if j has a key outside `allowed`. `where` names the section.
void require_known_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pfsim
