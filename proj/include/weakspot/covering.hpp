#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "weakspot/domain.hpp"
#include "weakspot/errors.hpp"
#include "weakspot/rng.hpp"

namespace weakspot {

namespace detail {

// All C(A, n) attribute-index combinations, lexicographic.
inline std::vector<std::vector<std::size_t>> attribute_combinations(std::size_t num_attributes,
                                                                    std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> combo(n);
    std::iota(combo.begin(), combo.end(), std::size_t{0});
    while (true) {
        out.push_back(combo);
        std::size_t i = n;
        while (i > 0 && combo[i - 1] == num_attributes - n + (i - 1)) --i;
        if (i == 0) return out;
        ++combo[i - 1];
        for (std::size_t k = i; k < n; ++k) combo[k] = combo[k - 1] + 1;
    }
}

// Flat tuple index of a subdomain's projection onto one attribute subset.
inline std::size_t tuple_index(const AttributeSchema& schema, const std::vector<std::size_t>& attrs,
                               const Subdomain& s) {
    std::size_t idx = 0;
    for (std::size_t a : attrs) {
        idx = idx * schema.attributes[a].values.size() + s.assignment[a];
    }
    return idx;
}

inline std::size_t tuple_space_size(const AttributeSchema& schema,
                                    const std::vector<std::size_t>& attrs) {
    std::size_t n = 1;
    for (std::size_t a : attrs) n *= schema.attributes[a].values.size();
    return n;
}

}  // namespace detail

// Greedy covering construction for n-wise testing. A tuple (an assignment of
// values to n distinct attributes) counts only if some valid subdomain
// realizes it, so constraint-excluded tuples are never demanded. Each pick
// maximizes newly covered tuples, ties broken seeded-random. The result
// covers every coverable tuple; its length is construction-dependent and is
// reported, not asserted, by callers.
inline std::vector<Subdomain> generate_covering_selection(const Domain& domain, std::size_t strength,
                                                          Rng& rng) {
    const auto& schema = domain.schema;
    if (strength < 2 || strength > schema.num_attributes()) {
        throw ConfigError("covering strength must be between 2 and the attribute count (" +
                          std::to_string(schema.num_attributes()) + "), got " +
                          std::to_string(strength));
    }

    auto subsets = detail::attribute_combinations(schema.num_attributes(), strength);
    std::vector<std::vector<char>> covered(subsets.size());
    std::size_t uncovered = 0;
    for (std::size_t g = 0; g < subsets.size(); ++g) {
        covered[g].assign(detail::tuple_space_size(schema, subsets[g]), 1);
    }
    // A tuple is coverable exactly when a valid subdomain projects onto it.
    for (const auto& s : domain.subdomains) {
        for (std::size_t g = 0; g < subsets.size(); ++g) {
            char& cell = covered[g][detail::tuple_index(schema, subsets[g], s)];
            if (cell) {
                cell = 0;
                ++uncovered;
            }
        }
    }

    std::vector<Subdomain> selection;
    std::vector<char> selected(domain.size(), 0);
    std::vector<std::size_t> best;
    while (uncovered > 0) {
        std::size_t best_gain = 0;
        best.clear();
        for (std::size_t p = 0; p < domain.size(); ++p) {
            if (selected[p]) continue;
            std::size_t gain = 0;
            for (std::size_t g = 0; g < subsets.size(); ++g) {
                if (!covered[g][detail::tuple_index(schema, subsets[g], domain.subdomains[p])]) ++gain;
            }
            if (gain > best_gain) {
                best_gain = gain;
                best.assign(1, p);
            } else if (gain == best_gain && gain > 0) {
                best.push_back(p);
            }
        }
        if (best.empty()) throw Error("covering construction stalled with uncovered tuples");
        std::size_t pick = best[rng.next_index(best.size())];
        selected[pick] = 1;
        const Subdomain& s = domain.subdomains[pick];
        for (std::size_t g = 0; g < subsets.size(); ++g) {
            char& cell = covered[g][detail::tuple_index(schema, subsets[g], s)];
            if (!cell) {
                cell = 1;
                --uncovered;
            }
        }
        selection.push_back(s);
    }
    return selection;
}

}  // namespace weakspot
