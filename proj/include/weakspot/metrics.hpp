#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "weakspot/domain.hpp"
#include "weakspot/errors.hpp"
#include "weakspot/evaluation.hpp"

namespace weakspot {

// A per-step curve; std is the population standard deviation over seeds
// (zero when a series comes from a single run).
struct MetricSeries {
    std::string name;
    std::vector<std::size_t> x;
    std::vector<double> mean;
    std::vector<double> std_dev;
};

inline MetricSeries single_run_series(std::string name, std::vector<double> values) {
    MetricSeries s;
    s.name = std::move(name);
    s.x.resize(values.size());
    std::iota(s.x.begin(), s.x.end(), std::size_t{0});
    s.std_dev.assign(values.size(), 0.0);
    s.mean = std::move(values);
    return s;
}

// Pointwise mean and population std over equally long per-seed series.
inline MetricSeries aggregate_series(const std::string& name, const std::vector<MetricSeries>& runs) {
    if (runs.empty()) throw ConfigError("cannot aggregate zero series");
    std::size_t len = runs[0].mean.size();
    for (const auto& r : runs) {
        if (r.mean.size() != len) throw ConfigError("cannot aggregate series of different lengths");
    }
    MetricSeries out;
    out.name = name;
    out.x = runs[0].x;
    out.mean.assign(len, 0.0);
    out.std_dev.assign(len, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
        double sum = 0.0;
        for (const auto& r : runs) sum += r.mean[i];
        double mean = sum / static_cast<double>(runs.size());
        double var = 0.0;
        for (const auto& r : runs) var += (r.mean[i] - mean) * (r.mean[i] - mean);
        out.mean[i] = mean;
        out.std_dev[i] = std::sqrt(var / static_cast<double>(runs.size()));
    }
    return out;
}

// Trailing mean over the last `window` steps, partial windows at the start.
inline MetricSeries moving_average_accuracy(const std::vector<EvaluationRecord>& records,
                                            std::size_t window = 10) {
    if (window < 1) throw ConfigError("moving average window must be >= 1");
    std::vector<double> out(records.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        sum += records[i].accuracy;
        if (i >= window) sum -= records[i - window].accuracy;
        out[i] = sum / static_cast<double>(std::min(i + 1, window));
    }
    return single_run_series("moving_average_accuracy", std::move(out));
}

// Element i = mean accuracy over steps 0..i.
inline MetricSeries average_accuracy_curve(const std::vector<EvaluationRecord>& records) {
    std::vector<double> out(records.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        sum += records[i].accuracy;
        out[i] = sum / static_cast<double>(i + 1);
    }
    return single_run_series("average_accuracy", std::move(out));
}

// The floor(k * |domain|) lowest-accuracy subdomains, boundary ties broken
// by lowest id so the target set is unique and coverage replays exactly.
inline std::vector<SubdomainId> bottom_k_target(const Domain& domain, const ReferenceTable& table,
                                                double k = 0.10) {
    if (k <= 0.0 || k > 1.0) throw ConfigError("bottom-k fraction must be in (0, 1]");
    table.require_complete(domain);
    auto target_size = static_cast<std::size_t>(k * static_cast<double>(domain.size()));
    if (target_size == 0) throw ConfigError("bottom-k target set is empty at this fraction");
    std::vector<SubdomainId> ids;
    ids.reserve(domain.size());
    for (const auto& s : domain.subdomains) ids.push_back(s.id);
    std::sort(ids.begin(), ids.end(), [&](SubdomainId a, SubdomainId b) {
        double aa = table.accuracy(a), ab = table.accuracy(b);
        if (aa != ab) return aa < ab;
        return a < b;
    });
    ids.resize(target_size);
    return ids;
}

// Element i = fraction of the bottom-k target already evaluated after step i.
inline MetricSeries bottom_k_coverage(const std::vector<EvaluationRecord>& records,
                                      const Domain& domain, const ReferenceTable& table,
                                      double k = 0.10) {
    auto target = bottom_k_target(domain, table, k);
    std::sort(target.begin(), target.end());
    std::vector<double> out(records.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (std::binary_search(target.begin(), target.end(), records[i].subdomain_id)) ++hits;
        out[i] = static_cast<double>(hits) / static_cast<double>(target.size());
    }
    return single_run_series("bottom_k_coverage", std::move(out));
}

// Right-open bins, last bin closed; values outside [edges.front(),
// edges.back()] are not counted.
inline std::vector<std::uint64_t> accuracy_histogram(
    const std::vector<std::vector<EvaluationRecord>>& histories, const std::vector<double>& bin_edges) {
    if (bin_edges.size() < 2) throw ConfigError("histogram needs at least two bin edges");
    for (std::size_t i = 1; i < bin_edges.size(); ++i) {
        if (bin_edges[i] <= bin_edges[i - 1]) {
            throw ConfigError("histogram bin edges must be strictly increasing");
        }
    }
    std::vector<std::uint64_t> counts(bin_edges.size() - 1, 0);
    for (const auto& records : histories) {
        for (const auto& rec : records) {
            double a = rec.accuracy;
            if (a < bin_edges.front() || a > bin_edges.back()) continue;
            if (a == bin_edges.back()) {
                ++counts.back();
                continue;
            }
            auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), a);
            counts[static_cast<std::size_t>(it - bin_edges.begin()) - 1]++;
        }
    }
    return counts;
}

// Per attribute value: mean accuracy over matching observations, a 95%
// normal-approximation confidence half-width (1.96 * s / sqrt(n), missing
// below two observations), and the observation count. Each subdomain
// contributes one accuracy regardless of its sample count.
struct ValueSummary {
    std::string attribute;
    std::string value;
    std::optional<double> mean;
    std::optional<double> ci_half_width;
    std::size_t count = 0;
};

inline std::vector<ValueSummary> per_value_summary(
    const std::vector<std::pair<SubdomainId, double>>& observations, const AttributeSchema& schema) {
    if (observations.empty()) throw ConfigError("per-value summary needs at least one observation");
    std::vector<ValueSummary> out;
    for (std::size_t k = 0; k < schema.num_attributes(); ++k) {
        for (std::size_t v = 0; v < schema.attributes[k].values.size(); ++v) {
            ValueSummary row;
            row.attribute = schema.attributes[k].name;
            row.value = schema.attributes[k].values[v];
            double sum = 0.0, sumsq = 0.0;
            std::size_t n = 0;
            for (const auto& [id, accuracy] : observations) {
                if (decode_id(schema, id)[k] != v) continue;
                sum += accuracy;
                sumsq += accuracy * accuracy;
                ++n;
            }
            row.count = n;
            if (n >= 1) row.mean = sum / static_cast<double>(n);
            if (n >= 2) {
                double mean = *row.mean;
                double var = (sumsq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
                row.ci_half_width = 1.96 * std::sqrt(std::max(0.0, var) / static_cast<double>(n));
            }
            out.push_back(std::move(row));
        }
    }
    return out;
}

// Mean accuracy per (value of attr_a, value of attr_b); cells with no
// observations (constraint-excluded or simply unexplored) stay empty.
struct PairHeatmap {
    std::string attr_a;
    std::string attr_b;
    std::vector<std::string> row_values;
    std::vector<std::string> col_values;
    std::vector<std::vector<std::optional<double>>> cells;  // [row][col]
};

inline PairHeatmap pair_heatmap(const std::vector<std::pair<SubdomainId, double>>& observations,
                                const AttributeSchema& schema, const std::string& attr_a,
                                const std::string& attr_b) {
    if (attr_a == attr_b) throw ConfigError("heatmap attributes must differ");
    std::size_t ka = schema.attribute_index(attr_a);
    std::size_t kb = schema.attribute_index(attr_b);
    std::size_t na = schema.attributes[ka].values.size();
    std::size_t nb = schema.attributes[kb].values.size();

    std::vector<std::vector<double>> sums(na, std::vector<double>(nb, 0.0));
    std::vector<std::vector<std::size_t>> counts(na, std::vector<std::size_t>(nb, 0));
    for (const auto& [id, accuracy] : observations) {
        auto assignment = decode_id(schema, id);
        sums[assignment[ka]][assignment[kb]] += accuracy;
        counts[assignment[ka]][assignment[kb]]++;
    }

    PairHeatmap map;
    map.attr_a = attr_a;
    map.attr_b = attr_b;
    map.row_values = schema.attributes[ka].values;
    map.col_values = schema.attributes[kb].values;
    map.cells.assign(na, std::vector<std::optional<double>>(nb));
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            if (counts[i][j] > 0) map.cells[i][j] = sums[i][j] / static_cast<double>(counts[i][j]);
        }
    }
    return map;
}

// Adapters: both run histories and full tables feed the qualitative views.
inline std::vector<std::pair<SubdomainId, double>> observations_from_records(
    const std::vector<EvaluationRecord>& records) {
    std::vector<std::pair<SubdomainId, double>> out;
    out.reserve(records.size());
    for (const auto& r : records) out.emplace_back(r.subdomain_id, r.accuracy);
    return out;
}

inline std::vector<std::pair<SubdomainId, double>> observations_from_table(const ReferenceTable& table) {
    std::vector<std::pair<SubdomainId, double>> out;
    out.reserve(table.rows.size());
    for (const auto& [id, accuracy] : table.rows) out.emplace_back(id, accuracy);
    return out;
}

}  // namespace weakspot
