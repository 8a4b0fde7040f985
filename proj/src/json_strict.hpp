#pragma once

// Internal helpers for strict document parsing: every object is checked
// against an explicit key set, every value against its expected type, and
// syntax errors are reported with line/column positions.

#include <json.hpp>

#include <set>
#include <string>

#include "taxo/errors.hpp"

namespace taxo::detail {

using json = nlohmann::json;

inline std::string position_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("syntax error at " + position_of(text, e.byte ? e.byte - 1 : 0) + ": " +
                         e.what());
    }
}

inline void require_object(const json& value, const std::string& where) {
    if (!value.is_object()) throw ParseError(where + ": expected an object");
}

inline void check_keys(const json& obj, const std::string& where,
                       const std::set<std::string>& required,
                       const std::set<std::string>& optional) {
    for (const auto& item : obj.items()) {
        if (!required.contains(item.key()) && !optional.contains(item.key()))
            throw ParseError(where + ": unknown key \"" + item.key() + "\"");
    }
    for (const auto& key : required) {
        if (!obj.contains(key)) throw ParseError(where + ": missing key \"" + key + "\"");
    }
}

inline std::string get_string(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_string()) throw ParseError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

inline bool get_bool(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_boolean()) throw ParseError(where + "." + key + ": expected a boolean");
    return v.get<bool>();
}

inline const json& get_array(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_array()) throw ParseError(where + "." + key + ": expected an array");
    return v;
}

inline char get_code_letter(const json& obj, const std::string& key, const std::string& where) {
    std::string s = get_string(obj, key, where);
    if (s.size() != 1 || s[0] < 'A' || s[0] > 'Z')
        throw ParseError(where + "." + key + ": expected a single uppercase ASCII letter");
    return s[0];
}

/// dump(2) with the trailing newline the canonical form requires.
inline std::string canonical_dump(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace taxo::detail
