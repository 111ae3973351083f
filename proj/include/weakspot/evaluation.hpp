#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "weakspot/domain.hpp"
#include "weakspot/errors.hpp"
#include "weakspot/rng.hpp"

namespace weakspot {

constexpr int kDefaultNumSamples = 50;

struct EvaluationRecord {
    SubdomainId subdomain_id = 0;
    double accuracy = 0.0;   // fraction in [0, 1]
    int num_samples = 0;
    std::size_t step = 0;    // ordinal within a run
};

// Precomputed accuracy per subdomain. May be partial in memory (a live
// materialization checkpoint); completeness is checked where it matters.
struct ReferenceTable {
    std::string fingerprint;
    int num_samples = kDefaultNumSamples;
    std::map<SubdomainId, double> rows;

    bool has(SubdomainId id) const { return rows.count(id) != 0; }

    double accuracy(SubdomainId id) const {
        auto it = rows.find(id);
        if (it == rows.end()) {
            throw TableIncompleteError("reference table has no row for subdomain " + std::to_string(id));
        }
        return it->second;
    }

    bool covers(const Domain& domain) const {
        for (const auto& s : domain.subdomains) {
            if (!has(s.id)) return false;
        }
        return true;
    }

    void require_complete(const Domain& domain) const {
        for (const auto& s : domain.subdomains) {
            if (!has(s.id)) {
                throw TableIncompleteError("reference table is missing subdomain " + std::to_string(s.id) +
                                           " (" + std::to_string(rows.size()) + " of " +
                                           std::to_string(domain.size()) + " rows present)");
            }
        }
    }

    double global_mean() const {
        double sum = 0.0;
        for (const auto& [_, a] : rows) sum += a;
        return sum / static_cast<double>(rows.size());
    }
};

// Ground truth for strategy benchmarking: a linear model over one-hot
// features plus optional pairwise interactions and seeded noise, clamped to
// [0, 1]. Noise is keyed by (seed, subdomain id) so evaluation order can
// never change a measurement.
struct SyntheticSurface {
    double intercept = 0.5;
    std::vector<double> weights;  // one per one-hot feature
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>> interaction_terms;
    double noise_scale = 0.0;
    std::uint64_t seed = 0;
};

inline double synthetic_accuracy(const SyntheticSurface& surface, const AttributeSchema& schema,
                                 const Subdomain& s) {
    if (surface.weights.size() != schema.onehot_length()) {
        throw ConfigError("synthetic surface has " + std::to_string(surface.weights.size()) +
                          " weights but the schema one-hot length is " +
                          std::to_string(schema.onehot_length()));
    }
    double acc = surface.intercept;
    std::size_t offset = 0;
    std::vector<char> active(surface.weights.size(), 0);
    for (std::size_t k = 0; k < schema.num_attributes(); ++k) {
        std::size_t j = offset + s.assignment[k];
        active[j] = 1;
        acc += surface.weights[j];
        offset += schema.attributes[k].values.size();
    }
    for (const auto& [features, w] : surface.interaction_terms) {
        if (features.first >= active.size() || features.second >= active.size()) {
            throw ConfigError("interaction term references feature outside the one-hot layout");
        }
        if (active[features.first] && active[features.second]) acc += w;
    }
    if (surface.noise_scale > 0.0) {
        acc += surface.noise_scale * keyed_standard_normal(surface.seed, s.id);
    }
    return std::clamp(acc, 0.0, 1.0);
}

class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual EvaluationRecord evaluate(const Subdomain& s) = 0;
};

class LookupEvaluator : public Evaluator {
public:
    explicit LookupEvaluator(const ReferenceTable& table) : table_(table) {}

    EvaluationRecord evaluate(const Subdomain& s) override {
        EvaluationRecord rec;
        rec.subdomain_id = s.id;
        rec.accuracy = table_.accuracy(s.id);
        rec.num_samples = table_.num_samples;
        return rec;
    }

private:
    const ReferenceTable& table_;
};

class SyntheticEvaluator : public Evaluator {
public:
    SyntheticEvaluator(SyntheticSurface surface, const AttributeSchema& schema,
                       int num_samples = kDefaultNumSamples)
        : surface_(std::move(surface)), schema_(schema), num_samples_(num_samples) {
        if (surface_.weights.size() != schema.onehot_length()) {
            throw ConfigError("synthetic surface does not match the schema one-hot length");
        }
    }

    EvaluationRecord evaluate(const Subdomain& s) override {
        EvaluationRecord rec;
        rec.subdomain_id = s.id;
        rec.accuracy = synthetic_accuracy(surface_, schema_, s);
        rec.num_samples = num_samples_;
        return rec;
    }

    const SyntheticSurface& surface() const { return surface_; }

private:
    SyntheticSurface surface_;
    const AttributeSchema& schema_;
    int num_samples_;
};

inline EvaluationRecord lookup_evaluate(const ReferenceTable& table, const Subdomain& s) {
    LookupEvaluator ev(table);
    return ev.evaluate(s);
}

inline EvaluationRecord synthetic_evaluate(const SyntheticSurface& surface,
                                           const AttributeSchema& schema, const Subdomain& s,
                                           int num_samples = kDefaultNumSamples) {
    SyntheticEvaluator ev(surface, schema, num_samples);
    return ev.evaluate(s);
}

// Evaluates every valid subdomain in id order. `on_row` fires after each row
// so callers can persist progress incrementally; `skip` lets a resumed
// materialization reuse rows it already has. A per-subdomain failure aborts
// with a partial-progress report.
inline ReferenceTable materialize_table(
    Evaluator& evaluator, const Domain& domain,
    const std::function<void(const Subdomain&, double)>& on_row = {},
    const std::function<bool(SubdomainId)>& skip = {}) {
    ReferenceTable table;
    table.fingerprint = schema_fingerprint(domain.schema);
    std::size_t done = 0;
    for (const auto& s : domain.subdomains) {
        if (skip && skip(s.id)) {
            ++done;
            continue;
        }
        EvaluationRecord rec;
        try {
            rec = evaluator.evaluate(s);
        } catch (const EvaluationError& e) {
            throw EvaluationError("materialization aborted at subdomain " + std::to_string(s.id) +
                                  " after " + std::to_string(done) + " of " +
                                  std::to_string(domain.size()) + " rows: " + e.what());
        }
        table.num_samples = rec.num_samples;
        table.rows[s.id] = rec.accuracy;
        ++done;
        if (on_row) on_row(s, rec.accuracy);
    }
    return table;
}

}  // namespace weakspot
