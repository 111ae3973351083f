#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "weakspot/covering.hpp"
#include "weakspot/domain.hpp"
#include "weakspot/errors.hpp"
#include "weakspot/evaluation.hpp"
#include "weakspot/rng.hpp"
#include "weakspot/surrogate.hpp"

namespace weakspot {

// What a strategy sees when asked for the next subdomain. `remaining` holds
// domain positions of unevaluated subdomains in ascending id order.
struct LoopView {
    const Domain& domain;
    const std::vector<EvaluationRecord>& history;
    const std::vector<std::size_t>& remaining;
};

class SelectionStrategy {
public:
    virtual ~SelectionStrategy() = default;

    // Returns the domain position of the next subdomain to evaluate.
    virtual std::size_t next(const LoopView& view) = 0;

    // Feedback hook; the loop calls it once per completed evaluation.
    virtual void observe(const EvaluationRecord&) {}

    virtual std::string name() const = 0;
};

inline void require_remaining(const LoopView& view) {
    if (view.remaining.empty()) {
        throw ExhaustedDomainError("no unevaluated subdomains remain");
    }
}

// --- random -----------------------------------------------------------

inline const Subdomain& select_random(const Domain& domain, const std::vector<std::size_t>& remaining,
                                      Rng& rng) {
    if (remaining.empty()) throw ExhaustedDomainError("no unevaluated subdomains remain");
    return domain.subdomains[remaining[rng.next_index(remaining.size())]];
}

class RandomStrategy : public SelectionStrategy {
public:
    explicit RandomStrategy(std::uint64_t seed) : rng_(seed) {}

    std::size_t next(const LoopView& view) override {
        require_remaining(view);
        return view.remaining[rng_.next_index(view.remaining.size())];
    }

    std::string name() const override { return "random"; }

private:
    Rng rng_;
};

// --- oracle -----------------------------------------------------------

// Benchmark-only: picks by true ascending accuracy, ties by lowest id.
inline const Subdomain& select_oracle(const Domain& domain, const std::vector<std::size_t>& remaining,
                                      const ReferenceTable& table) {
    if (remaining.empty()) throw ExhaustedDomainError("no unevaluated subdomains remain");
    std::size_t best = remaining[0];
    double best_acc = table.accuracy(domain.subdomains[best].id);
    for (std::size_t i = 1; i < remaining.size(); ++i) {
        double acc = table.accuracy(domain.subdomains[remaining[i]].id);
        if (acc < best_acc) {  // remaining is ascending by id, so ties keep the lowest id
            best = remaining[i];
            best_acc = acc;
        }
    }
    return domain.subdomains[best];
}

class OracleStrategy : public SelectionStrategy {
public:
    explicit OracleStrategy(const ReferenceTable& table) : table_(table) {}

    std::size_t next(const LoopView& view) override {
        require_remaining(view);
        const Subdomain& s = select_oracle(view.domain, view.remaining, table_);
        return view.domain.position_of(s.id);
    }

    std::string name() const override { return "oracle"; }

private:
    const ReferenceTable& table_;
};

// --- covering ---------------------------------------------------------

// Walks a greedy n-wise covering selection; once the list is exhausted it
// keeps exploring seeded-random so full-budget runs still cover the domain.
class CoveringStrategy : public SelectionStrategy {
public:
    CoveringStrategy(std::size_t strength, std::uint64_t seed) : strength_(strength), rng_(seed) {}

    std::size_t next(const LoopView& view) override {
        require_remaining(view);
        if (!built_) {
            auto selection = generate_covering_selection(view.domain, strength_, rng_);
            for (const auto& s : selection) list_.push_back(view.domain.position_of(s.id));
            built_ = true;
        }
        while (cursor_ < list_.size()) {
            std::size_t pos = list_[cursor_++];
            if (std::binary_search(view.remaining.begin(), view.remaining.end(), pos)) return pos;
        }
        return view.remaining[rng_.next_index(view.remaining.size())];
    }

    std::string name() const override { return "covering"; }

    std::size_t selection_size(const Domain& domain) {
        if (!built_) {
            auto selection = generate_covering_selection(domain, strength_, rng_);
            for (const auto& s : selection) list_.push_back(domain.position_of(s.id));
            built_ = true;
        }
        return list_.size();
    }

private:
    std::size_t strength_;
    Rng rng_;
    bool built_ = false;
    std::vector<std::size_t> list_;
    std::size_t cursor_ = 0;
};

// --- genetic ----------------------------------------------------------

struct GaParams {
    std::size_t population_size = 20;
    std::size_t elite_count = 2;
    std::size_t tournament_size = 2;
    double mutation_rate = -1.0;  // negative = 1 / attribute count

    double effective_mutation_rate(const AttributeSchema& schema) const {
        if (mutation_rate >= 0.0) return mutation_rate;
        return 1.0 / static_cast<double>(schema.num_attributes());
    }

    void validate() const {
        if (population_size < 1) throw ConfigError("GA population size must be >= 1");
        if (elite_count >= population_size) {
            throw ConfigError("GA elite count must be smaller than the population size");
        }
        if (tournament_size < 1) throw ConfigError("GA tournament size must be >= 1");
        if (mutation_rate > 1.0) throw ConfigError("GA mutation rate must be <= 1");
    }
};

// Generational GA over assignments. Lower accuracy is fitter (the loop hunts
// failures). Elites carry over without re-evaluation; children are repaired
// to constraint validity and deduplicated against everything already
// evaluated or queued, re-mutating on collision and falling back to a
// random unevaluated subdomain when repair stalls.
class GeneticStrategy : public SelectionStrategy {
public:
    GeneticStrategy(GaParams params, std::uint64_t seed) : params_(params), rng_(seed) {
        params_.validate();
    }

    std::size_t next(const LoopView& view) override {
        require_remaining(view);
        if (!initialized_) {
            auto initial = rng_.sample_without_replacement(view.remaining, params_.population_size);
            for (std::size_t pos : initial) {
                population_.push_back(view.domain.subdomains[pos].id);
                pending_.push_back(pos);
            }
            initialized_ = true;
        }
        if (pending_.empty()) advance_generation(view);
        if (pending_.empty()) throw ExhaustedDomainError("genetic strategy has no candidates left");
        std::size_t pos = pending_.front();
        pending_.pop_front();
        return pos;
    }

    void observe(const EvaluationRecord& rec) override { fitness_[rec.subdomain_id] = rec.accuracy; }

    std::string name() const override { return "genetic"; }

    std::size_t generation() const { return generation_; }
    const std::vector<SubdomainId>& population() const { return population_; }

private:
    double fitness_of(SubdomainId id) const {
        auto it = fitness_.find(id);
        if (it == fitness_.end()) {
            throw Error("genetic strategy: population member " + std::to_string(id) +
                        " was never evaluated");
        }
        return it->second;
    }

    SubdomainId tournament_winner() {
        SubdomainId best = population_[rng_.next_index(population_.size())];
        double best_fit = fitness_of(best);
        for (std::size_t t = 1; t < params_.tournament_size; ++t) {
            SubdomainId challenger = population_[rng_.next_index(population_.size())];
            double fit = fitness_of(challenger);
            if (fit < best_fit || (fit == best_fit && challenger < best)) {
                best = challenger;
                best_fit = fit;
            }
        }
        return best;
    }

    void mutate(std::vector<std::size_t>& genes, const AttributeSchema& schema, double rate) {
        for (std::size_t k = 0; k < genes.size(); ++k) {
            if (rng_.next_double() < rate) {
                genes[k] = rng_.next_index(schema.attributes[k].values.size());
            }
        }
    }

    void advance_generation(const LoopView& view) {
        const auto& schema = view.domain.schema;
        double rate = params_.effective_mutation_rate(schema);

        std::vector<SubdomainId> ranked = population_;
        std::sort(ranked.begin(), ranked.end(), [&](SubdomainId a, SubdomainId b) {
            double fa = fitness_of(a), fb = fitness_of(b);
            if (fa != fb) return fa < fb;
            return a < b;
        });
        std::vector<SubdomainId> elites(ranked.begin(),
                                        ranked.begin() + std::min(params_.elite_count, ranked.size()));

        std::set<SubdomainId> taken;  // children accepted this generation
        std::vector<std::size_t> child_positions;
        std::size_t want = params_.population_size - elites.size();
        auto unevaluated_left = [&]() {
            return view.remaining.size() > taken.size();  // every taken child is unevaluated
        };

        while (child_positions.size() < want && unevaluated_left()) {
            std::vector<std::size_t> genes =
                decode_id(schema, tournament_winner());
            std::vector<std::size_t> other = decode_id(schema, tournament_winner());
            for (std::size_t k = 0; k < genes.size(); ++k) {
                if (rng_.next_u64() & 1) genes[k] = other[k];
            }
            mutate(genes, schema, rate);

            bool accepted = false;
            for (int attempt = 0; attempt < 32; ++attempt) {
                Subdomain child = make_subdomain(schema, genes);
                std::size_t pos = view.domain.position_of(child.id);
                bool valid = pos != Domain::npos;
                bool fresh = valid && !taken.count(child.id) &&
                             std::binary_search(view.remaining.begin(), view.remaining.end(), pos);
                if (fresh) {
                    taken.insert(child.id);
                    child_positions.push_back(pos);
                    accepted = true;
                    break;
                }
                mutate(genes, schema, rate);
            }
            if (!accepted) {
                // Repair stalled; grab any unevaluated subdomain instead.
                std::vector<std::size_t> open;
                for (std::size_t pos : view.remaining) {
                    if (!taken.count(view.domain.subdomains[pos].id)) open.push_back(pos);
                }
                if (open.empty()) break;
                std::size_t pos = open[rng_.next_index(open.size())];
                taken.insert(view.domain.subdomains[pos].id);
                child_positions.push_back(pos);
            }
        }

        population_ = std::move(elites);
        for (std::size_t pos : child_positions) {
            population_.push_back(view.domain.subdomains[pos].id);
            pending_.push_back(pos);
        }
        ++generation_;
    }

    GaParams params_;
    Rng rng_;
    bool initialized_ = false;
    std::size_t generation_ = 0;
    std::vector<SubdomainId> population_;
    std::deque<std::size_t> pending_;
    std::map<SubdomainId, double> fitness_;
};

// --- bayesian ---------------------------------------------------------

constexpr std::size_t kDefaultPretrainCount = 10;

// Point-estimate acquisition: after a random pretraining phase, fit a Lasso
// surrogate on all observations and pick the unevaluated subdomain with the
// largest potential improvement max(0, a_best - predicted). When nothing
// is predicted to improve, fall back to the lowest prediction. All ties
// break toward the lowest id.
inline const Subdomain& bo_select(const Domain& domain, const std::vector<EvaluationRecord>& history,
                                  const std::vector<std::size_t>& remaining, double lambda,
                                  std::size_t pretrain_count, Rng& rng) {
    if (remaining.empty()) throw ExhaustedDomainError("no unevaluated subdomains remain");
    if (history.size() < pretrain_count) {
        return domain.subdomains[remaining[rng.next_index(remaining.size())]];
    }

    std::vector<std::vector<double>> X;
    std::vector<double> y;
    X.reserve(history.size());
    double a_best = std::numeric_limits<double>::infinity();
    for (const auto& rec : history) {
        X.push_back(encode_onehot(domain.schema, domain.at_id(rec.subdomain_id)));
        y.push_back(rec.accuracy);
        a_best = std::min(a_best, rec.accuracy);
    }
    SurrogateModel model = fit_lasso(X, y, lambda);

    std::vector<Subdomain> batch;
    batch.reserve(remaining.size());
    for (std::size_t pos : remaining) batch.push_back(domain.subdomains[pos]);
    auto predictions = predict(model, batch, domain.schema);

    std::size_t best_improve = 0, best_low = 0;
    double top_score = -1.0;
    double low_pred = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < remaining.size(); ++i) {
        double score = std::max(0.0, a_best - predictions[i]);
        if (score > top_score) {  // strict: ascending ids keep the lowest on ties
            top_score = score;
            best_improve = i;
        }
        if (predictions[i] < low_pred) {
            low_pred = predictions[i];
            best_low = i;
        }
    }
    std::size_t pick = top_score > 0.0 ? best_improve : best_low;
    return domain.subdomains[remaining[pick]];
}

class BayesianStrategy : public SelectionStrategy {
public:
    BayesianStrategy(double lambda, std::size_t pretrain_count, std::uint64_t seed)
        : lambda_(lambda), pretrain_count_(pretrain_count), rng_(seed) {
        if (lambda < 0.0) throw ConfigError("bayesian strategy lambda must be nonnegative");
    }

    std::size_t next(const LoopView& view) override {
        require_remaining(view);
        const Subdomain& s =
            bo_select(view.domain, view.history, view.remaining, lambda_, pretrain_count_, rng_);
        last_model_valid_ = view.history.size() >= pretrain_count_;
        return view.domain.position_of(s.id);
    }

    std::string name() const override { return "bayesian"; }

    // Final surrogate refit over the full history, for model dumps.
    SurrogateModel refit(const Domain& domain, const std::vector<EvaluationRecord>& history) const {
        std::vector<std::vector<double>> X;
        std::vector<double> y;
        for (const auto& rec : history) {
            X.push_back(encode_onehot(domain.schema, domain.at_id(rec.subdomain_id)));
            y.push_back(rec.accuracy);
        }
        return fit_lasso(X, y, lambda_);
    }

    bool model_active() const { return last_model_valid_; }

private:
    double lambda_;
    std::size_t pretrain_count_;
    Rng rng_;
    bool last_model_valid_ = false;
};

// --- strategy configuration -------------------------------------------

enum class StrategyKind { kRandom, kOracle, kCovering, kGenetic, kBayesian };

inline std::string to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::kRandom: return "random";
        case StrategyKind::kOracle: return "oracle";
        case StrategyKind::kCovering: return "covering";
        case StrategyKind::kGenetic: return "genetic";
        case StrategyKind::kBayesian: return "bayesian";
    }
    return "?";
}

inline StrategyKind strategy_kind_from_string(const std::string& s) {
    if (s == "random") return StrategyKind::kRandom;
    if (s == "oracle") return StrategyKind::kOracle;
    if (s == "covering") return StrategyKind::kCovering;
    if (s == "genetic") return StrategyKind::kGenetic;
    if (s == "bayesian") return StrategyKind::kBayesian;
    throw ConfigError("unknown strategy '" + s +
                      "' (expected random, oracle, covering, genetic, or bayesian)");
}

struct StrategySpec {
    StrategyKind kind = StrategyKind::kRandom;
    std::size_t covering_strength = 2;
    GaParams ga;
    double bo_lambda = kLassoDefaultLambda;
    std::size_t bo_pretrain = kDefaultPretrainCount;
    std::optional<std::uint64_t> seed;  // defaults to the run seed
};

// `table` is required for the oracle and must cover the domain.
inline std::unique_ptr<SelectionStrategy> make_strategy(const StrategySpec& spec, std::uint64_t run_seed,
                                                        const Domain& domain,
                                                        const ReferenceTable* table) {
    std::uint64_t seed = spec.seed.value_or(run_seed);
    switch (spec.kind) {
        case StrategyKind::kRandom:
            return std::make_unique<RandomStrategy>(seed);
        case StrategyKind::kOracle:
            if (!table) {
                throw ConfigError("the oracle strategy needs a complete reference table");
            }
            table->require_complete(domain);
            return std::make_unique<OracleStrategy>(*table);
        case StrategyKind::kCovering:
            return std::make_unique<CoveringStrategy>(spec.covering_strength, seed);
        case StrategyKind::kGenetic:
            return std::make_unique<GeneticStrategy>(spec.ga, seed);
        case StrategyKind::kBayesian:
            return std::make_unique<BayesianStrategy>(spec.bo_lambda, spec.bo_pretrain, seed);
    }
    throw ConfigError("unknown strategy kind");
}

}  // namespace weakspot
