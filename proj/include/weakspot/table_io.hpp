#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "weakspot/domain.hpp"
#include "weakspot/evaluation.hpp"
#include "weakspot/text.hpp"

namespace weakspot {

// Reference-table file: comment header, then one row per subdomain holding
// the attribute values in schema order plus the accuracy. The subdomain
// index is derived from the values on load, never stored, so it cannot
// drift from the schema.
//
//   # weakspot-table v1
//   # schema_fingerprint: <hex>
//   # num_samples: 50
//   viewpoint,color,time,location,weather,accuracy
//   side,white,day,at the beach,sunny,0.98

inline std::string table_header(const AttributeSchema& schema, int num_samples) {
    std::string out = "# weakspot-table v1\n";
    out += "# schema_fingerprint: " + schema_fingerprint(schema) + "\n";
    out += "# num_samples: " + std::to_string(num_samples) + "\n";
    std::vector<std::string> cols;
    for (const auto& a : schema.attributes) cols.push_back(a.name);
    cols.push_back("accuracy");
    out += csv::join(cols) + "\n";
    return out;
}

inline std::string table_row(const AttributeSchema& schema, const Subdomain& s, double accuracy) {
    std::vector<std::string> fields;
    for (std::size_t k = 0; k < schema.num_attributes(); ++k) {
        fields.push_back(schema.attributes[k].values[s.assignment[k]]);
    }
    fields.push_back(format_double(accuracy));
    return csv::join(fields) + "\n";
}

inline void save_table(const std::string& path, const AttributeSchema& schema,
                       const ReferenceTable& table) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << table_header(schema, table.num_samples);
    for (const auto& [id, accuracy] : table.rows) {
        out << table_row(schema, make_subdomain(schema, decode_id(schema, id)), accuracy);
    }
}

// Accepts partial tables (a checkpoint is a legal file); rejects rows that
// do not name a constraint-valid subdomain, duplicates, and accuracies
// outside [0, 1]. Fingerprint mismatches are refused with both prints.
inline ReferenceTable load_table(const std::string& path, const AttributeSchema& schema) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    ReferenceTable table;
    table.fingerprint = schema_fingerprint(schema);

    Domain domain = build_domain(schema);

    std::string line;
    std::size_t lineno = 0;
    bool saw_columns = false;
    std::vector<std::string> expected_cols;
    for (const auto& a : schema.attributes) expected_cols.push_back(a.name);
    expected_cols.push_back("accuracy");

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string where = path + ":" + std::to_string(lineno);
        if (line[0] == '#') {
            auto colon = line.find(':');
            if (colon != std::string::npos) {
                std::string key = line.substr(1, colon - 1);
                std::string value = line.substr(colon + 1);
                key.erase(0, key.find_first_not_of(' '));
                key.erase(key.find_last_not_of(' ') + 1);
                value.erase(0, value.find_first_not_of(' '));
                if (key == "schema_fingerprint" && value != table.fingerprint) {
                    throw IoError(where + ": table fingerprint " + value +
                                  " does not match schema fingerprint " + table.fingerprint);
                }
                if (key == "num_samples") {
                    table.num_samples = static_cast<int>(parse_u64(value, where));
                }
            }
            continue;
        }
        auto fields = csv::split(line, where);
        if (!saw_columns) {
            if (fields != expected_cols) {
                throw IoError(where + ": column header does not match the schema attributes");
            }
            saw_columns = true;
            continue;
        }
        if (fields.size() != schema.num_attributes() + 1) {
            throw IoError(where + ": expected " + std::to_string(schema.num_attributes() + 1) + " fields");
        }
        std::vector<std::string> values(fields.begin(), fields.end() - 1);
        Subdomain s;
        try {
            s = subdomain_from_values(schema, values);
        } catch (const ConfigError& e) {
            throw IoError(where + ": " + e.what());
        }
        if (domain.position_of(s.id) == Domain::npos) {
            throw IoError(where + ": row names a constraint-excluded subdomain");
        }
        double accuracy = parse_double(fields.back(), where);
        if (accuracy < 0.0 || accuracy > 1.0) {
            throw IoError(where + ": accuracy " + fields.back() + " outside [0, 1]");
        }
        if (table.has(s.id)) {
            throw IoError(where + ": duplicate row for subdomain " + std::to_string(s.id));
        }
        table.rows[s.id] = accuracy;
    }
    if (!saw_columns) throw IoError(path + ": missing column header");
    return table;
}

}  // namespace weakspot
