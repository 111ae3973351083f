#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "weakspot/domain.hpp"
#include "weakspot/evaluation.hpp"
#include "weakspot/external.hpp"
#include "weakspot/rng.hpp"
#include "weakspot/schema_io.hpp"
#include "weakspot/selection.hpp"
#include "weakspot/table_io.hpp"

namespace weakspot {

// Surface document: either explicit coefficients
//   {"intercept": 0.8, "weights": [...], "interactions": [{"features": [0, 9], "weight": -0.1}],
//    "noise_scale": 0.02, "seed": 7}
// or a deterministic recipe expanded against the schema
//   {"recipe": {"kind": "random_linear", "seed": 7, "intercept": 0.8,
//               "weight_low": -0.2, "weight_high": 0.05, "num_interactions": 4,
//               "interaction_low": -0.1, "interaction_high": 0.1, "noise_scale": 0.02}}
inline SyntheticSurface random_linear_surface(const AttributeSchema& schema, std::uint64_t seed,
                                              double intercept, double weight_low, double weight_high,
                                              std::size_t num_interactions, double interaction_low,
                                              double interaction_high, double noise_scale) {
    if (weight_high < weight_low || interaction_high < interaction_low) {
        throw ConfigError("surface recipe: range bounds are inverted");
    }
    SyntheticSurface surface;
    surface.intercept = intercept;
    surface.noise_scale = noise_scale;
    surface.seed = seed;
    Rng rng(mix64(seed) ^ 0x5f4dcc3b5aa765d6ULL);
    std::size_t d = schema.onehot_length();
    surface.weights.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        surface.weights[j] = weight_low + (weight_high - weight_low) * rng.next_double();
    }
    for (std::size_t t = 0; t < num_interactions; ++t) {
        // Pick two features from different attribute blocks so both can be active.
        std::size_t ka = rng.next_index(schema.num_attributes());
        std::size_t kb = rng.next_index(schema.num_attributes() - 1);
        if (kb >= ka) ++kb;
        std::size_t fa = onehot_offset(schema, ka, rng.next_index(schema.attributes[ka].values.size()));
        std::size_t fb = onehot_offset(schema, kb, rng.next_index(schema.attributes[kb].values.size()));
        double w = interaction_low + (interaction_high - interaction_low) * rng.next_double();
        surface.interaction_terms.push_back({{fa, fb}, w});
    }
    return surface;
}

inline SyntheticSurface surface_from_json(const Json& j, const AttributeSchema& schema) {
    if (!j.is_object()) throw ConfigError("surface: expected a JSON object");
    if (j.contains("recipe")) {
        reject_unknown_fields(j, {"recipe"}, "surface");
        const Json& r = j["recipe"];
        reject_unknown_fields(r,
                              {"kind", "seed", "intercept", "weight_low", "weight_high",
                               "num_interactions", "interaction_low", "interaction_high", "noise_scale"},
                              "surface recipe");
        if (r.value("kind", std::string()) != "random_linear") {
            throw ConfigError("surface recipe: unknown kind (expected random_linear)");
        }
        return random_linear_surface(
            schema, r.value("seed", std::uint64_t{0}), r.value("intercept", 0.8),
            r.value("weight_low", -0.2), r.value("weight_high", 0.05),
            r.value("num_interactions", std::size_t{0}), r.value("interaction_low", -0.1),
            r.value("interaction_high", 0.1), r.value("noise_scale", 0.0));
    }
    reject_unknown_fields(j, {"intercept", "weights", "interactions", "noise_scale", "seed"}, "surface");
    SyntheticSurface surface;
    surface.intercept = j.value("intercept", 0.5);
    if (!j.contains("weights") || !j["weights"].is_array()) {
        throw ConfigError("surface: 'weights' must be an array");
    }
    surface.weights = j["weights"].get<std::vector<double>>();
    if (j.contains("interactions")) {
        for (const auto& term : j["interactions"]) {
            reject_unknown_fields(term, {"features", "weight"}, "surface interaction");
            auto features = term.at("features").get<std::vector<std::size_t>>();
            if (features.size() != 2) {
                throw ConfigError("surface interaction: 'features' must hold two indices");
            }
            surface.interaction_terms.push_back({{features[0], features[1]},
                                                 term.at("weight").get<double>()});
        }
    }
    surface.noise_scale = j.value("noise_scale", 0.0);
    surface.seed = j.value("seed", std::uint64_t{0});
    if (surface.noise_scale < 0.0) throw ConfigError("surface: noise_scale must be nonnegative");
    if (surface.weights.size() != schema.onehot_length()) {
        throw ConfigError("surface has " + std::to_string(surface.weights.size()) +
                          " weights but the schema one-hot length is " +
                          std::to_string(schema.onehot_length()));
    }
    return surface;
}

inline Json surface_to_json(const SyntheticSurface& surface) {
    Json j;
    j["intercept"] = surface.intercept;
    j["weights"] = surface.weights;
    j["interactions"] = Json::array();
    for (const auto& [features, weight] : surface.interaction_terms) {
        Json term;
        term["features"] = std::vector<std::size_t>{features.first, features.second};
        term["weight"] = weight;
        j["interactions"].push_back(std::move(term));
    }
    j["noise_scale"] = surface.noise_scale;
    j["seed"] = surface.seed;
    return j;
}

enum class EvaluatorKind { kTable, kSynthetic, kExternal };

inline std::string to_string(EvaluatorKind kind) {
    switch (kind) {
        case EvaluatorKind::kTable: return "table";
        case EvaluatorKind::kSynthetic: return "synthetic";
        case EvaluatorKind::kExternal: return "external";
    }
    return "?";
}

struct EvaluatorSpec {
    EvaluatorKind kind = EvaluatorKind::kTable;
    std::string table_path;
    std::optional<SyntheticSurface> surface;
    std::string surface_path;  // late-bound against the schema
    ExternalEvaluatorConfig external;
};

struct RunSpec {
    std::string schema_path;
    EvaluatorSpec evaluator;
    StrategySpec strategy;
    std::size_t budget = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> seeds;  // benchmark only
    int num_samples = kDefaultNumSamples;
    std::string out_dir;
};

inline StrategySpec strategy_spec_from_json(const Json& j) {
    if (j.is_string()) {
        StrategySpec spec;
        spec.kind = strategy_kind_from_string(j.get<std::string>());
        return spec;
    }
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError("strategy: expected a name or an object with 'kind'");
    }
    reject_unknown_fields(j,
                          {"kind", "strength", "population", "elite", "tournament", "mutation_rate",
                           "lambda", "pretrain", "seed"},
                          "strategy");
    StrategySpec spec;
    spec.kind = strategy_kind_from_string(j["kind"].get<std::string>());
    if (j.contains("strength")) spec.covering_strength = j["strength"].get<std::size_t>();
    if (j.contains("population")) spec.ga.population_size = j["population"].get<std::size_t>();
    if (j.contains("elite")) spec.ga.elite_count = j["elite"].get<std::size_t>();
    if (j.contains("tournament")) spec.ga.tournament_size = j["tournament"].get<std::size_t>();
    if (j.contains("mutation_rate")) spec.ga.mutation_rate = j["mutation_rate"].get<double>();
    if (j.contains("lambda")) spec.bo_lambda = j["lambda"].get<double>();
    if (j.contains("pretrain")) spec.bo_pretrain = j["pretrain"].get<std::size_t>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    return spec;
}

inline EvaluatorSpec evaluator_spec_from_json(const Json& j) {
    if (j.is_string()) {
        // Shorthand: "table" etc.; paths come from elsewhere in the config.
        EvaluatorSpec spec;
        std::string kind = j.get<std::string>();
        if (kind == "table") spec.kind = EvaluatorKind::kTable;
        else if (kind == "synthetic") spec.kind = EvaluatorKind::kSynthetic;
        else if (kind == "external") spec.kind = EvaluatorKind::kExternal;
        else throw ConfigError("unknown evaluator '" + kind + "'");
        return spec;
    }
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError("evaluator: expected a name or an object with 'kind'");
    }
    reject_unknown_fields(j, {"kind", "table", "surface", "surface_file", "command", "timeout_seconds"},
                          "evaluator");
    EvaluatorSpec spec;
    std::string kind = j["kind"].get<std::string>();
    if (kind == "table") {
        spec.kind = EvaluatorKind::kTable;
        if (j.contains("table")) spec.table_path = j["table"].get<std::string>();
    } else if (kind == "synthetic") {
        spec.kind = EvaluatorKind::kSynthetic;
        if (j.contains("surface_file")) spec.surface_path = j["surface_file"].get<std::string>();
        // An inline surface cannot be validated until the schema is known;
        // keep the raw JSON in surface_path-free form via late binding below.
    } else if (kind == "external") {
        spec.kind = EvaluatorKind::kExternal;
        if (!j.contains("command")) throw ConfigError("external evaluator needs a 'command'");
        spec.external.command = j["command"].get<std::string>();
        spec.external.timeout_seconds = j.value("timeout_seconds", 3600.0);
        if (spec.external.timeout_seconds <= 0) {
            throw ConfigError("external evaluator timeout must be positive");
        }
    } else {
        throw ConfigError("unknown evaluator kind '" + kind + "'");
    }
    return spec;
}

// Run config file: same key/value document format as the schema file.
//   {"schema": "...", "evaluator": {...}, "strategy": {...}, "budget": 61,
//    "seed": 0, "seeds": [...], "num_samples": 50, "out": "..."}
struct ParsedConfig {
    RunSpec spec;
    Json raw_inline_surface;  // evaluator.surface, bound once the schema loads
};

inline ParsedConfig run_spec_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    reject_unknown_fields(
        j, {"schema", "evaluator", "strategy", "budget", "seed", "seeds", "num_samples", "out"},
        "config");
    ParsedConfig parsed;
    RunSpec& spec = parsed.spec;
    if (j.contains("schema")) spec.schema_path = j["schema"].get<std::string>();
    if (j.contains("evaluator")) {
        spec.evaluator = evaluator_spec_from_json(j["evaluator"]);
        if (j["evaluator"].is_object() && j["evaluator"].contains("surface")) {
            parsed.raw_inline_surface = j["evaluator"]["surface"];
        }
    }
    if (j.contains("strategy")) spec.strategy = strategy_spec_from_json(j["strategy"]);
    if (j.contains("budget")) spec.budget = j["budget"].get<std::size_t>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("seeds")) spec.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("num_samples")) {
        spec.num_samples = j["num_samples"].get<int>();
        if (spec.num_samples < 1) throw ConfigError("num_samples must be >= 1");
    }
    if (j.contains("out")) spec.out_dir = j["out"].get<std::string>();
    return parsed;
}

inline ParsedConfig load_run_config(const std::string& path) {
    return run_spec_from_json(load_json_file(path));
}

// Binds an evaluator spec against a concrete schema. The returned evaluator
// references `schema` and, for table lookups, the table owned by `table_out`.
inline std::unique_ptr<Evaluator> make_evaluator(const EvaluatorSpec& spec,
                                                 const Json& raw_inline_surface,
                                                 const AttributeSchema& schema, int num_samples,
                                                 std::unique_ptr<ReferenceTable>& table_out) {
    switch (spec.kind) {
        case EvaluatorKind::kTable: {
            if (spec.table_path.empty()) {
                throw ConfigError("table evaluator needs a table path (--table or config)");
            }
            table_out = std::make_unique<ReferenceTable>(load_table(spec.table_path, schema));
            return std::make_unique<LookupEvaluator>(*table_out);
        }
        case EvaluatorKind::kSynthetic: {
            SyntheticSurface surface;
            if (spec.surface) {
                surface = *spec.surface;
            } else if (!spec.surface_path.empty()) {
                surface = surface_from_json(load_json_file(spec.surface_path), schema);
            } else if (!raw_inline_surface.is_null()) {
                surface = surface_from_json(raw_inline_surface, schema);
            } else {
                throw ConfigError("synthetic evaluator needs a 'surface' or 'surface_file'");
            }
            return std::make_unique<SyntheticEvaluator>(std::move(surface), schema, num_samples);
        }
        case EvaluatorKind::kExternal:
            return std::make_unique<ExternalEvaluator>(spec.external, schema, num_samples);
    }
    throw ConfigError("unknown evaluator kind");
}

}  // namespace weakspot
