#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "nlbvp/geometry.hpp"

namespace nlbvp {

using Json = nlohmann::json;

Json function_to_json(const ScalarFunction& f);
ScalarFunction function_from_json(const Json& j);

Json spec_to_json(const ProblemSpec& spec);
/// Parses and validates; the spec is not frozen.
ProblemSpec spec_from_json(const Json& j);

ProblemSpec load_spec(const std::filesystem::path& path);
void save_spec(const ProblemSpec& spec, const std::filesystem::path& path);

}  // namespace nlbvp
