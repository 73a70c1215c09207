#ifndef TESTS_SCHEMA_CHECK_HPP
#define TESTS_SCHEMA_CHECK_HPP

#include <string>

#include "json.hpp"

// Minimal draft-07 subset validator, just large enough for
// schemas/verdicts.schema.json: type, required, properties,
// additionalProperties (bool or schema), items, enum (strings),
// $ref into #/definitions/.
namespace schema_check {

inline const nlohmann::json& resolve_ref(const nlohmann::json& root, const std::string& ref) {
    const std::string prefix = "#/definitions/";
    if (ref.rfind(prefix, 0) != 0) {
        throw std::runtime_error("unsupported $ref '" + ref + "'");
    }
    return root.at("definitions").at(ref.substr(prefix.size()));
}

inline bool matches(const nlohmann::json& root, const nlohmann::json& schema,
                    const nlohmann::json& value, std::string& error, const std::string& where) {
    if (schema.contains("$ref")) {
        return matches(root, resolve_ref(root, schema["$ref"].get<std::string>()), value, error,
                       where);
    }
    if (schema.contains("enum")) {
        for (const auto& allowed : schema["enum"]) {
            if (allowed == value) return true;
        }
        error = where + ": value not in enum";
        return false;
    }
    if (schema.contains("type")) {
        const std::string type = schema["type"].get<std::string>();
        const bool ok = (type == "object" && value.is_object()) ||
                        (type == "array" && value.is_array()) ||
                        (type == "string" && value.is_string()) ||
                        (type == "boolean" && value.is_boolean()) ||
                        (type == "integer" && value.is_number_integer()) ||
                        (type == "number" && value.is_number());
        if (!ok) {
            error = where + ": expected " + type + ", got " + std::string(value.type_name());
            return false;
        }
    }
    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema["required"]) {
                if (!value.contains(key.get<std::string>())) {
                    error = where + ": missing required key '" + key.get<std::string>() + "'";
                    return false;
                }
            }
        }
        const nlohmann::json props =
            schema.contains("properties") ? schema["properties"] : nlohmann::json::object();
        for (const auto& [key, member] : value.items()) {
            if (props.contains(key)) {
                if (!matches(root, props[key], member, error, where + "." + key)) return false;
                continue;
            }
            if (schema.contains("additionalProperties")) {
                const auto& extra = schema["additionalProperties"];
                if (extra.is_boolean()) {
                    if (!extra.get<bool>()) {
                        error = where + ": unexpected key '" + key + "'";
                        return false;
                    }
                } else if (!matches(root, extra, member, error, where + "." + key)) {
                    return false;
                }
            }
        }
    }
    if (value.is_array() && schema.contains("items")) {
        std::size_t index = 0;
        for (const auto& item : value) {
            if (!matches(root, schema["items"], item, error,
                         where + "[" + std::to_string(index) + "]")) {
                return false;
            }
            ++index;
        }
    }
    return true;
}

// Validates `payload` against #/definitions/<definition> of the schema file.
inline bool payload_matches(const nlohmann::json& schema_doc, const std::string& definition,
                            const nlohmann::json& payload, std::string& error) {
    error.clear();
    return matches(schema_doc, schema_doc.at("definitions").at(definition), payload, error, "$");
}

}  // namespace schema_check

#endif
