#pragma once

#include <json.hpp>

#include "stoplaw/embedding.hpp"
#include "stoplaw/objectives.hpp"
#include "stoplaw/optimize.hpp"
#include "stoplaw/scale.hpp"
#include "stoplaw/simulate.hpp"

namespace stoplaw {

using json = nlohmann::ordered_json;

// Every number crossing the serialization boundary is rounded to 12
// significant digits; +-infinity is encoded as null.
json json_num(double x);
double num_from_json(const json& j, double infinite_as);

json to_json(const Distribution& d);
Distribution distribution_from_json(const json& j);

json to_json(const DiffusionSpec& spec);
DiffusionSpec diffusion_from_json(const json& j);

json to_json(const RandomizedRule& rule);
RandomizedRule rule_from_json(const json& j);

json to_json(const Utility& u);
Utility utility_from_json(const json& j);

json to_json(const Weighting& w);
Weighting weighting_from_json(const json& j);

json to_json(const Objective& obj);
Objective objective_from_json(const json& j);

SimConfig sim_config_from_json(const json& j);

json to_json(const OptimReport& rep);
json to_json(const CompareReport& rep);
json to_json(const VerifyReport& rep);

}  // namespace stoplaw
