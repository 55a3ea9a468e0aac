#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace amodal {

// Checks `doc` against a JSON Schema using the subset of keywords our
// documented schemas use: type, required, properties, additionalProperties
// (boolean), items, enum, minimum, maximum, minItems, maxItems and local
// "#/definitions/..." references. Returns one message per violation.
std::vector<std::string> schema_errors(const nlohmann::json& doc,
                                       const nlohmann::json& schema);

}  // namespace amodal
