#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "weakspot/domain.hpp"
#include "weakspot/errors.hpp"
#include "weakspot/evaluation.hpp"
#include "weakspot/selection.hpp"

namespace weakspot {

struct StepRecord {
    EvaluationRecord record;
    std::int64_t millis = 0;  // wall clock of this step
};

struct RunInfo {
    std::string schema_fingerprint;
    std::string strategy;
    std::string evaluator;
    std::uint64_t seed = 0;
    std::size_t budget = 0;
    int num_samples = kDefaultNumSamples;
};

struct RunHistory {
    RunInfo info;
    std::vector<StepRecord> steps;

    std::vector<EvaluationRecord> records() const {
        std::vector<EvaluationRecord> out;
        out.reserve(steps.size());
        for (const auto& s : steps) out.push_back(s.record);
        return out;
    }
};

// A failed evaluation does not discard progress: the history is truncated at
// the last good step and returned next to the error.
struct ExplorationResult {
    RunHistory history;
    std::optional<std::string> error;

    bool ok() const { return !error.has_value(); }
};

namespace detail {

inline void remove_position(std::vector<std::size_t>& remaining, std::size_t pos) {
    auto it = std::lower_bound(remaining.begin(), remaining.end(), pos);
    if (it == remaining.end() || *it != pos) {
        throw Error("strategy returned an already-evaluated subdomain");
    }
    remaining.erase(it);
}

}  // namespace detail

// One exploration run: alternate selection, evaluation, and feedback until
// the budget is spent or the domain is exhausted. Selection at step i sees
// only records 0..i-1. `on_step` fires after each record so callers can
// persist incrementally. `replay` seeds the loop with already-evaluated
// records: each one is pushed through the strategy (and checked against its
// choice) without touching the evaluator.
inline ExplorationResult run_exploration(const Domain& domain, Evaluator& evaluator,
                                         SelectionStrategy& strategy, std::size_t budget,
                                         RunInfo info,
                                         const std::function<void(const StepRecord&)>& on_step = {},
                                         const std::vector<EvaluationRecord>& replay = {}) {
    ExplorationResult result;
    budget = std::min(budget, domain.size());
    info.budget = budget;
    result.history.info = std::move(info);

    std::vector<std::size_t> remaining(domain.size());
    for (std::size_t i = 0; i < domain.size(); ++i) remaining[i] = i;
    std::vector<EvaluationRecord> records;

    for (const auto& past : replay) {
        LoopView view{domain, records, remaining};
        std::size_t pos = strategy.next(view);
        if (domain.subdomains[pos].id != past.subdomain_id) {
            throw ConfigError("history does not replay: step " + std::to_string(records.size()) +
                              " recorded subdomain " + std::to_string(past.subdomain_id) +
                              " but the strategy chose " + std::to_string(domain.subdomains[pos].id));
        }
        detail::remove_position(remaining, pos);
        EvaluationRecord rec = past;
        rec.step = records.size();
        records.push_back(rec);
        strategy.observe(rec);
        result.history.steps.push_back(StepRecord{rec, 0});
    }

    while (records.size() < budget) {
        LoopView view{domain, records, remaining};
        std::size_t pos;
        auto t0 = std::chrono::steady_clock::now();
        try {
            pos = strategy.next(view);
        } catch (const ExhaustedDomainError&) {
            break;
        }
        const Subdomain& s = domain.subdomains[pos];
        EvaluationRecord rec;
        try {
            rec = evaluator.evaluate(s);
        } catch (const EvaluationError& e) {
            result.error = e.what();
            return result;
        }
        if (rec.accuracy < 0.0 || rec.accuracy > 1.0) {
            result.error = "evaluator returned accuracy outside [0, 1] for subdomain " +
                           std::to_string(s.id);
            return result;
        }
        auto t1 = std::chrono::steady_clock::now();
        rec.subdomain_id = s.id;
        rec.step = records.size();
        detail::remove_position(remaining, pos);
        records.push_back(rec);
        strategy.observe(rec);
        StepRecord step{rec, std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()};
        result.history.steps.push_back(step);
        if (on_step) on_step(step);
    }
    return result;
}

// Independent runs differing only in seed; the evaluation ground truth is
// shared. Per-run errors propagate with the seed attached.
template <typename StrategyFactory>
std::vector<RunHistory> run_multi_seed(const Domain& domain, Evaluator& evaluator,
                                       StrategyFactory&& make_strategy_for_seed, std::size_t budget,
                                       const std::vector<std::uint64_t>& seeds, RunInfo info) {
    if (seeds.empty()) throw ConfigError("run_multi_seed needs at least one seed");
    std::vector<RunHistory> out;
    for (std::uint64_t seed : seeds) {
        std::unique_ptr<SelectionStrategy> strategy = make_strategy_for_seed(seed);
        RunInfo run_info = info;
        run_info.seed = seed;
        ExplorationResult result = run_exploration(domain, evaluator, *strategy, budget, run_info);
        if (!result.ok()) {
            throw EvaluationError("seed " + std::to_string(seed) + ": " + *result.error);
        }
        out.push_back(std::move(result.history));
    }
    return out;
}

}  // namespace weakspot
