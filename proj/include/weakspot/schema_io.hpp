#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "weakspot/domain.hpp"
#include "weakspot/errors.hpp"

namespace weakspot {

using Json = nlohmann::ordered_json;

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(path + ": " + e.what());
    }
}

inline void reject_unknown_fields(const Json& obj, std::initializer_list<const char*> known,
                                  const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) throw ConfigError(where + ": unknown field '" + key + "'");
    }
}

// Schema document layout:
//   {
//     "attributes": [ {"name": "...", "values": ["...", ...]}, ... ],
//     "constraints": [ {"<attr>": "<value>", ...}, ... ],
//     "prompt_template": "..."
//   }
// `attributes` is an array so document order is authoritative; `constraints`
// entries are conjunctive binding maps. Any other field is rejected.
inline AttributeSchema schema_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("schema: expected a JSON object");
    reject_unknown_fields(j, {"attributes", "constraints", "prompt_template"}, "schema");
    if (!j.contains("attributes") || !j["attributes"].is_array()) {
        throw ConfigError("schema: 'attributes' must be an array");
    }
    if (!j.contains("prompt_template") || !j["prompt_template"].is_string()) {
        throw ConfigError("schema: 'prompt_template' must be a string");
    }

    AttributeSchema schema;
    for (const auto& entry : j["attributes"]) {
        if (!entry.is_object()) throw ConfigError("schema: each attribute must be an object");
        reject_unknown_fields(entry, {"name", "values"}, "schema attribute");
        if (!entry.contains("name") || !entry["name"].is_string() ||
            !entry.contains("values") || !entry["values"].is_array()) {
            throw ConfigError("schema: attributes need a 'name' string and a 'values' array");
        }
        Attribute a;
        a.name = entry["name"].get<std::string>();
        for (const auto& v : entry["values"]) {
            if (!v.is_string()) throw ConfigError("schema: values of '" + a.name + "' must be strings");
            a.values.push_back(v.get<std::string>());
        }
        schema.attributes.push_back(std::move(a));
    }
    if (j.contains("constraints")) {
        if (!j["constraints"].is_array()) throw ConfigError("schema: 'constraints' must be an array");
        for (const auto& c : j["constraints"]) {
            if (!c.is_object()) throw ConfigError("schema: each constraint must be a binding object");
            ForbiddenAssignment f;
            for (const auto& [name, value] : c.items()) {
                if (!value.is_string()) throw ConfigError("schema: constraint values must be strings");
                f.bindings[name] = value.get<std::string>();
            }
            schema.constraints.push_back(std::move(f));
        }
    }
    schema.prompt_template = j["prompt_template"].get<std::string>();
    return schema;
}

inline Json schema_to_json(const AttributeSchema& schema) {
    Json j;
    j["attributes"] = Json::array();
    for (const auto& a : schema.attributes) {
        Json entry;
        entry["name"] = a.name;
        entry["values"] = a.values;
        j["attributes"].push_back(std::move(entry));
    }
    j["constraints"] = Json::array();
    for (const auto& f : schema.constraints) {
        Json c = Json::object();
        for (const auto& [name, value] : f.bindings) c[name] = value;
        j["constraints"].push_back(std::move(c));
    }
    j["prompt_template"] = schema.prompt_template;
    return j;
}

// Loads and validates; throws SchemaError with every violation listed.
inline AttributeSchema load_schema(const std::string& path) {
    AttributeSchema schema = schema_from_json(load_json_file(path));
    validate_schema(schema);
    return schema;
}

inline void save_schema(const std::string& path, const AttributeSchema& schema) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << schema_to_json(schema).dump(2) << '\n';
}

}  // namespace weakspot
