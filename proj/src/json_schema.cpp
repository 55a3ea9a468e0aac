#include "amodal/json_schema.hpp"

#include "amodal/error.hpp"

namespace amodal {

using nlohmann::json;

namespace {

bool has_type(const json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  throw InvalidInput("schema: unsupported type " + type);
}

const json& resolve(const json& schema, const json& root) {
  auto ref = schema.find("$ref");
  if (ref == schema.end()) return schema;
  const std::string target = ref->get<std::string>();
  const std::string prefix = "#/definitions/";
  if (target.rfind(prefix, 0) != 0)
    throw InvalidInput("schema: unsupported $ref " + target);
  return root.at("definitions").at(target.substr(prefix.size()));
}

void check(const json& v, const json& schema_in, const json& root,
           const std::string& where, std::vector<std::string>& errors) {
  const json& schema = resolve(schema_in, root);

  if (auto t = schema.find("type"); t != schema.end()) {
    bool ok = false;
    if (t->is_array()) {
      for (const auto& alt : *t) ok = ok || has_type(v, alt.get<std::string>());
    } else {
      ok = has_type(v, t->get<std::string>());
    }
    if (!ok) {
      errors.push_back(where + ": expected type " + t->dump());
      return;
    }
  }
  if (auto e = schema.find("enum"); e != schema.end()) {
    bool found = false;
    for (const auto& option : *e) found = found || option == v;
    if (!found) errors.push_back(where + ": value not in " + e->dump());
  }
  if (v.is_number()) {
    if (auto m = schema.find("minimum"); m != schema.end() && v.get<double>() < m->get<double>())
      errors.push_back(where + ": below minimum " + m->dump());
    if (auto m = schema.find("maximum"); m != schema.end() && v.get<double>() > m->get<double>())
      errors.push_back(where + ": above maximum " + m->dump());
  }
  if (v.is_object()) {
    if (auto req = schema.find("required"); req != schema.end())
      for (const auto& key : *req)
        if (!v.contains(key.get<std::string>()))
          errors.push_back(where + ": missing required \"" +
                           key.get<std::string>() + "\"");
    const auto props = schema.find("properties");
    for (const auto& [key, child] : v.items()) {
      if (props != schema.end() && props->contains(key)) {
        check(child, (*props)[key], root, where + "." + key, errors);
      } else if (auto extra = schema.find("additionalProperties");
                 extra != schema.end() && extra->is_boolean() && !extra->get<bool>()) {
        errors.push_back(where + ": unexpected property \"" + key + "\"");
      }
    }
  }
  if (v.is_array()) {
    if (auto m = schema.find("minItems"); m != schema.end() && v.size() < m->get<std::size_t>())
      errors.push_back(where + ": fewer than " + m->dump() + " items");
    if (auto m = schema.find("maxItems"); m != schema.end() && v.size() > m->get<std::size_t>())
      errors.push_back(where + ": more than " + m->dump() + " items");
    if (auto items = schema.find("items"); items != schema.end())
      for (std::size_t k = 0; k < v.size(); ++k)
        check(v[k], *items, root, where + "[" + std::to_string(k) + "]", errors);
  }
}

}  // namespace

std::vector<std::string> schema_errors(const json& doc, const json& schema) {
  std::vector<std::string> errors;
  check(doc, schema, schema, "$", errors);
  return errors;
}

}  // namespace amodal
