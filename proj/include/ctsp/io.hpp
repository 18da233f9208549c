#pragma once

#include <iosfwd>
#include <string>

#include "ctsp/master.hpp"
#include "ctsp/model.hpp"
#include "json.hpp"

namespace ctsp {

using Json = nlohmann::json;

// Instance files carry the parameters, the commuters, the location
// coordinates and optionally the travel matrices; without matrices the
// Euclidean travel model (speed_mps, default 10) rebuilds them.
Json instance_to_json(const Instance& inst, bool with_matrices = true);
Instance instance_from_json(const Json& j);
// Same, with parameters from `j` replaced by those given.
Instance instance_from_json(const Json& j, const Parameters& params);
Parameters parameters_from_json(const Json& j, Parameters base = {});

Json plan_to_json(const Plan& plan);
// Reads routes as written, without recomputing anything.
Plan plan_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

Instance load_instance(const std::string& path);
void save_instance(const std::string& path, const Instance& inst, bool with_matrices = true);

}  // namespace ctsp
