#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "weakspot/domain.hpp"
#include "weakspot/exploration.hpp"
#include "weakspot/text.hpp"

namespace weakspot {

// History file: config header plus one append-only row per step.
//
//   # weakspot-history v1
//   # schema_fingerprint: <hex>
//   # config: {"strategy":"bayesian","evaluator":"table","seed":3,"budget":61,"num_samples":50}
//   step,subdomain_id,viewpoint,...,weather,accuracy,num_samples,millis
//   0,904,rear,...,snowing,0.41,50,2
//
// The millis column is wall clock and is the only nondeterministic content;
// canonical_history_text() strips it for replay comparisons.

inline std::string history_header(const AttributeSchema& schema, const RunInfo& info) {
    nlohmann::ordered_json config;
    config["strategy"] = info.strategy;
    config["evaluator"] = info.evaluator;
    config["seed"] = info.seed;
    config["budget"] = info.budget;
    config["num_samples"] = info.num_samples;

    std::string out = "# weakspot-history v1\n";
    out += "# schema_fingerprint: " + info.schema_fingerprint + "\n";
    out += "# config: " + config.dump() + "\n";
    std::vector<std::string> cols{"step", "subdomain_id"};
    for (const auto& a : schema.attributes) cols.push_back(a.name);
    cols.push_back("accuracy");
    cols.push_back("num_samples");
    cols.push_back("millis");
    out += csv::join(cols) + "\n";
    return out;
}

inline std::string history_row(const AttributeSchema& schema, const StepRecord& step) {
    const auto& rec = step.record;
    std::vector<std::string> fields{std::to_string(rec.step), std::to_string(rec.subdomain_id)};
    auto assignment = decode_id(schema, rec.subdomain_id);
    for (std::size_t k = 0; k < schema.num_attributes(); ++k) {
        fields.push_back(schema.attributes[k].values[assignment[k]]);
    }
    fields.push_back(format_double(rec.accuracy));
    fields.push_back(std::to_string(rec.num_samples));
    fields.push_back(std::to_string(step.millis));
    return csv::join(fields) + "\n";
}

// Appends and flushes one row per step, so an interrupted run keeps
// everything it already paid for.
class HistoryWriter {
public:
    HistoryWriter(const std::string& path, const AttributeSchema& schema, const RunInfo& info,
                  bool append = false)
        : schema_(schema) {
        out_.open(path, append ? std::ios::app : std::ios::trunc);
        if (!out_) throw IoError("cannot write " + path);
        if (!append) out_ << history_header(schema, info);
    }

    void append(const StepRecord& step) {
        out_ << history_row(schema_, step);
        out_.flush();
    }

private:
    const AttributeSchema& schema_;
    std::ofstream out_;
};

inline void save_history(const std::string& path, const AttributeSchema& schema,
                         const RunHistory& history) {
    HistoryWriter writer(path, schema, history.info);
    for (const auto& step : history.steps) writer.append(step);
}

inline RunHistory load_history(const std::string& path, const AttributeSchema& schema) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    RunHistory history;
    history.info.schema_fingerprint = schema_fingerprint(schema);

    Domain domain = build_domain(schema);
    std::vector<char> seen(domain.size(), 0);

    std::string line;
    std::size_t lineno = 0;
    bool saw_columns = false;
    std::size_t expected_fields = schema.num_attributes() + 4;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string where = path + ":" + std::to_string(lineno);
        if (line[0] == '#') {
            auto colon = line.find(':');
            if (colon == std::string::npos) continue;
            std::string key = line.substr(1, colon - 1);
            key.erase(0, key.find_first_not_of(' '));
            key.erase(key.find_last_not_of(' ') + 1);
            std::string value = line.substr(colon + 1);
            value.erase(0, value.find_first_not_of(' '));
            if (key == "schema_fingerprint" && value != history.info.schema_fingerprint) {
                throw IoError(where + ": history fingerprint " + value +
                              " does not match schema fingerprint " + history.info.schema_fingerprint);
            }
            if (key == "config") {
                nlohmann::json config;
                try {
                    config = nlohmann::json::parse(value);
                } catch (const nlohmann::json::parse_error& e) {
                    throw IoError(where + ": bad config header: " + e.what());
                }
                history.info.strategy = config.value("strategy", std::string());
                history.info.evaluator = config.value("evaluator", std::string());
                history.info.seed = config.value("seed", std::uint64_t{0});
                history.info.budget = config.value("budget", std::size_t{0});
                history.info.num_samples = config.value("num_samples", kDefaultNumSamples);
            }
            continue;
        }
        auto fields = csv::split(line, where);
        if (!saw_columns) {
            saw_columns = true;  // column names are regenerated from the schema on write
            continue;
        }
        if (fields.size() != expected_fields) {
            throw IoError(where + ": expected " + std::to_string(expected_fields) + " fields");
        }
        StepRecord step;
        step.record.step = parse_u64(fields[0], where);
        step.record.subdomain_id = parse_u64(fields[1], where);
        step.record.accuracy = parse_double(fields[expected_fields - 3], where);
        step.record.num_samples = static_cast<int>(parse_u64(fields[expected_fields - 2], where));
        step.millis = static_cast<std::int64_t>(parse_u64(fields[expected_fields - 1], where));

        if (step.record.step != history.steps.size()) {
            throw IoError(where + ": steps are not contiguous");
        }
        std::size_t pos = domain.position_of(step.record.subdomain_id);
        if (pos == Domain::npos) {
            throw IoError(where + ": subdomain " + std::to_string(step.record.subdomain_id) +
                          " is not in the domain");
        }
        if (seen[pos]) {
            throw IoError(where + ": subdomain " + std::to_string(step.record.subdomain_id) +
                          " appears twice");
        }
        seen[pos] = 1;
        if (step.record.accuracy < 0.0 || step.record.accuracy > 1.0) {
            throw IoError(where + ": accuracy outside [0, 1]");
        }
        history.steps.push_back(std::move(step));
    }
    if (!saw_columns) throw IoError(path + ": missing column header");
    return history;
}

// The history with its timing column removed; two replays of the same
// (config, seed) must agree byte-for-byte on this form.
inline std::string canonical_history_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') {
            out += line;
            out += '\n';
            continue;
        }
        auto fields = csv::split(line, path + ":" + std::to_string(lineno));
        if (!fields.empty()) fields.pop_back();  // drop millis (or its column name)
        out += csv::join(fields);
        out += '\n';
    }
    return out;
}

}  // namespace weakspot
