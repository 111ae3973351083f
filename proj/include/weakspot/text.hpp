#pragma once

#include <charconv>
#include <cstdlib>
#include <string>
#include <system_error>
#include <vector>

#include "weakspot/errors.hpp"

namespace weakspot {

// Shortest decimal form that round-trips the exact double ("0.98" stays
// "0.98"). Keeps delimited exports both human-readable and lossless.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw Error("format_double failed");
    return std::string(buf, ptr);
}

inline double parse_double(const std::string& s, const std::string& where) {
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || end != begin + s.size()) {
        throw IoError(where + ": not a number: '" + s + "'");
    }
    return v;
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& where) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw IoError(where + ": not an unsigned integer: '" + s + "'");
    }
    return v;
}

namespace csv {

// Minimal RFC-4180 quoting: fields containing the delimiter, quotes, or
// newlines are wrapped and inner quotes doubled.
inline std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

inline std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    return out;
}

inline std::vector<std::string> split(const std::string& line, const std::string& where) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw IoError(where + ": unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace csv
}  // namespace weakspot
