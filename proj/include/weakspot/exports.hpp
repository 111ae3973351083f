#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "weakspot/errors.hpp"
#include "weakspot/metrics.hpp"
#include "weakspot/surrogate.hpp"
#include "weakspot/text.hpp"

namespace weakspot {

// All exports are delimited text with a comment header carrying the schema
// fingerprint; missing values are written as NA.
constexpr const char* kMissingMarker = "NA";

namespace detail {

inline std::ofstream open_export(const std::string& path, const std::string& kind,
                                 const std::string& fingerprint) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "# weakspot-" << kind << " v1\n";
    out << "# schema_fingerprint: " << fingerprint << "\n";
    return out;
}

}  // namespace detail

inline void export_series(const std::string& path, const MetricSeries& series,
                          const std::string& fingerprint) {
    auto out = detail::open_export(path, "metric", fingerprint);
    out << "# metric: " << series.name << "\n";
    out << "step,mean,std\n";
    for (std::size_t i = 0; i < series.mean.size(); ++i) {
        out << series.x[i] << ',' << format_double(series.mean[i]) << ','
            << format_double(series.std_dev[i]) << '\n';
    }
}

inline void export_histogram(const std::string& path,
                             const std::vector<std::pair<std::string, std::vector<std::uint64_t>>>&
                                 counts_by_strategy,
                             const std::vector<double>& bin_edges, const std::string& fingerprint) {
    auto out = detail::open_export(path, "histogram", fingerprint);
    out << "strategy,bin_low,bin_high,count\n";
    for (const auto& [strategy, counts] : counts_by_strategy) {
        for (std::size_t b = 0; b < counts.size(); ++b) {
            out << csv::escape(strategy) << ',' << format_double(bin_edges[b]) << ','
                << format_double(bin_edges[b + 1]) << ',' << counts[b] << '\n';
        }
    }
}

inline void export_per_value(const std::string& path, const std::vector<ValueSummary>& rows,
                             const std::string& fingerprint) {
    auto out = detail::open_export(path, "per-value", fingerprint);
    out << "attribute,value,mean,ci95_half_width,count\n";
    for (const auto& row : rows) {
        out << csv::escape(row.attribute) << ',' << csv::escape(row.value) << ','
            << (row.mean ? format_double(*row.mean) : kMissingMarker) << ','
            << (row.ci_half_width ? format_double(*row.ci_half_width) : kMissingMarker) << ','
            << row.count << '\n';
    }
}

inline void export_heatmap(const std::string& path, const PairHeatmap& map,
                           const std::string& fingerprint) {
    auto out = detail::open_export(path, "heatmap", fingerprint);
    out << "# rows: " << map.attr_a << ", columns: " << map.attr_b << "\n";
    std::vector<std::string> header{map.attr_a + "\\" + map.attr_b};
    header.insert(header.end(), map.col_values.begin(), map.col_values.end());
    out << csv::join(header) << '\n';
    for (std::size_t i = 0; i < map.row_values.size(); ++i) {
        std::vector<std::string> fields{map.row_values[i]};
        for (std::size_t j = 0; j < map.col_values.size(); ++j) {
            fields.push_back(map.cells[i][j] ? format_double(*map.cells[i][j])
                                             : std::string(kMissingMarker));
        }
        out << csv::join(fields) << '\n';
    }
}

inline void export_predictor_benchmark(
    const std::string& path,
    const std::vector<std::tuple<std::string, std::size_t, double, double>>& rows,
    const std::string& fingerprint) {
    auto out = detail::open_export(path, "predictor-benchmark", fingerprint);
    out << "predictor,train_size,mean_spearman,std_spearman\n";
    for (const auto& [predictor, train_size, mean, std_dev] : rows) {
        out << csv::escape(predictor) << ',' << train_size << ',' << format_double(mean) << ','
            << format_double(std_dev) << '\n';
    }
}

// Surrogate dumps keep a run's final predictor reloadable.
inline nlohmann::ordered_json model_to_json(const SurrogateModel& model) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(model.kind);
    j["lambda"] = model.lambda;
    j["intercept"] = model.intercept;
    j["weights"] = model.weights;
    j["converged"] = model.converged;
    return j;
}

inline SurrogateModel model_from_json(const nlohmann::ordered_json& j) {
    SurrogateModel model;
    model.kind = predictor_kind_from_string(j.at("kind").get<std::string>());
    model.lambda = j.at("lambda").get<double>();
    model.intercept = j.at("intercept").get<double>();
    model.weights = j.at("weights").get<std::vector<double>>();
    model.converged = j.value("converged", true);
    return model;
}

inline void save_model(const std::string& path, const SurrogateModel& model) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << model_to_json(model).dump(2) << '\n';
}

}  // namespace weakspot
