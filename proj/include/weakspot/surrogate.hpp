#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "weakspot/domain.hpp"
#include "weakspot/errors.hpp"
#include "weakspot/evaluation.hpp"
#include "weakspot/rng.hpp"

namespace weakspot {

enum class PredictorKind { kOls, kLasso };

inline std::string to_string(PredictorKind kind) {
    return kind == PredictorKind::kOls ? "ols" : "lasso";
}

inline PredictorKind predictor_kind_from_string(const std::string& s) {
    if (s == "ols") return PredictorKind::kOls;
    if (s == "lasso") return PredictorKind::kLasso;
    throw ConfigError("unknown predictor kind '" + s + "' (expected ols or lasso)");
}

struct SurrogateModel {
    PredictorKind kind = PredictorKind::kLasso;
    double lambda = 0.0;
    double intercept = 0.0;
    std::vector<double> weights;
    bool converged = true;  // false = coordinate descent hit the sweep cap

    double predict_one(const std::vector<double>& x) const {
        double y = intercept;
        for (std::size_t j = 0; j < weights.size(); ++j) y += weights[j] * x[j];
        return y;
    }
};

constexpr double kLassoDefaultLambda = 0.01;
constexpr double kCoordinateDescentTol = 1e-8;
constexpr int kCoordinateDescentMaxSweeps = 10000;
constexpr double kOlsJitter = 1e-8;

namespace detail {

struct CenteredData {
    std::vector<std::vector<double>> cols;  // column-major, mean-removed
    std::vector<double> col_means;
    std::vector<double> y_centered;
    double y_mean = 0.0;
};

inline CenteredData center(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
    if (X.empty()) throw InsufficientDataError("cannot fit a model on an empty dataset");
    if (X.size() != y.size()) throw ConfigError("feature matrix and target lengths differ");
    std::size_t n = X.size();
    std::size_t d = X[0].size();
    for (const auto& row : X) {
        if (row.size() != d) throw ConfigError("ragged feature matrix");
    }
    CenteredData data;
    data.col_means.assign(d, 0.0);
    data.cols.assign(d, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            data.cols[j][i] = X[i][j];
            data.col_means[j] += X[i][j];
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        data.col_means[j] /= static_cast<double>(n);
        for (double& v : data.cols[j]) v -= data.col_means[j];
    }
    data.y_mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    data.y_centered.resize(n);
    for (std::size_t i = 0; i < n; ++i) data.y_centered[i] = y[i] - data.y_mean;
    return data;
}

// In-place Cholesky solve of A w = b for symmetric positive-definite A.
inline std::vector<double> cholesky_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    std::size_t d = A.size();
    for (std::size_t j = 0; j < d; ++j) {
        double diag = A[j][j];
        for (std::size_t k = 0; k < j; ++k) diag -= A[j][k] * A[j][k];
        if (diag <= 0.0) throw Error("matrix not positive definite in Cholesky solve");
        A[j][j] = std::sqrt(diag);
        for (std::size_t i = j + 1; i < d; ++i) {
            double v = A[i][j];
            for (std::size_t k = 0; k < j; ++k) v -= A[i][k] * A[j][k];
            A[i][j] = v / A[j][j];
        }
    }
    for (std::size_t i = 0; i < d; ++i) {  // forward: L z = b
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= A[i][k] * b[k];
        b[i] = v / A[i][i];
    }
    for (std::size_t i = d; i-- > 0;) {  // backward: L^T w = z
        double v = b[i];
        for (std::size_t k = i + 1; k < d; ++k) v -= A[k][i] * b[k];
        b[i] = v / A[i][i];
    }
    return b;
}

}  // namespace detail

// Least squares on centered data; a fixed 1e-8 diagonal jitter keeps the
// normal equations solvable when one-hot blocks make X rank deficient
// (fitted values stay well determined even where coefficients are not).
inline SurrogateModel fit_ols(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
    auto data = detail::center(X, y);
    std::size_t d = data.cols.size();

    std::vector<std::vector<double>> gram(d, std::vector<double>(d, 0.0));
    std::vector<double> rhs(d, 0.0);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            double dot = 0.0;
            for (std::size_t i = 0; i < data.cols[a].size(); ++i) dot += data.cols[a][i] * data.cols[b][i];
            gram[a][b] = gram[b][a] = dot;
        }
        gram[a][a] += kOlsJitter;
        double dot = 0.0;
        for (std::size_t i = 0; i < data.cols[a].size(); ++i) dot += data.cols[a][i] * data.y_centered[i];
        rhs[a] = dot;
    }

    SurrogateModel model;
    model.kind = PredictorKind::kOls;
    model.weights = detail::cholesky_solve(std::move(gram), std::move(rhs));
    model.intercept = data.y_mean;
    for (std::size_t j = 0; j < d; ++j) model.intercept -= model.weights[j] * data.col_means[j];
    return model;
}

// L1-penalized least squares, unnormalized objective
//   F(w, b) = 1/2 * sum_i (y_i - b - x_i . w)^2 + lambda * sum_j |w_j|.
// Cyclic coordinate descent in fixed feature order; the intercept is never
// penalized (handled exactly by centering). Converged when the largest
// coefficient change in a sweep drops below 1e-8, capped at 10^4 sweeps.
// `objective_trace`, when given, receives F after every sweep.
inline SurrogateModel fit_lasso(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                                double lambda, std::vector<double>* objective_trace = nullptr) {
    if (lambda < 0.0) throw ConfigError("lasso lambda must be nonnegative");
    auto data = detail::center(X, y);
    std::size_t d = data.cols.size();
    std::size_t n = data.y_centered.size();

    std::vector<double> col_sq(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        for (double v : data.cols[j]) col_sq[j] += v * v;
    }

    std::vector<double> w(d, 0.0);
    std::vector<double> residual = data.y_centered;  // y_c - Xc w

    auto objective = [&]() {
        double sq = 0.0;
        for (double r : residual) sq += r * r;
        double l1 = 0.0;
        for (double v : w) l1 += std::fabs(v);
        return 0.5 * sq + lambda * l1;
    };

    SurrogateModel model;
    model.kind = PredictorKind::kLasso;
    model.lambda = lambda;
    model.converged = false;
    for (int sweep = 0; sweep < kCoordinateDescentMaxSweeps; ++sweep) {
        double max_change = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (col_sq[j] == 0.0) continue;  // feature never varies
            double rho = 0.0;
            for (std::size_t i = 0; i < n; ++i) rho += data.cols[j][i] * residual[i];
            rho += col_sq[j] * w[j];
            double w_new;
            if (rho > lambda) {
                w_new = (rho - lambda) / col_sq[j];
            } else if (rho < -lambda) {
                w_new = (rho + lambda) / col_sq[j];
            } else {
                w_new = 0.0;
            }
            double delta = w_new - w[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < n; ++i) residual[i] -= delta * data.cols[j][i];
                w[j] = w_new;
            }
            max_change = std::max(max_change, std::fabs(delta));
        }
        if (objective_trace) objective_trace->push_back(objective());
        if (max_change < kCoordinateDescentTol) {
            model.converged = true;
            break;
        }
    }

    model.weights = std::move(w);
    model.intercept = data.y_mean;
    for (std::size_t j = 0; j < d; ++j) model.intercept -= model.weights[j] * data.col_means[j];
    return model;
}

// Raw linear scores for ranking; intentionally not clamped to [0, 1].
inline std::vector<double> predict(const SurrogateModel& model, const std::vector<Subdomain>& batch,
                                   const AttributeSchema& schema) {
    if (model.weights.size() != schema.onehot_length()) {
        throw ConfigError("model has " + std::to_string(model.weights.size()) +
                          " weights but the schema one-hot length is " +
                          std::to_string(schema.onehot_length()));
    }
    std::vector<double> out;
    out.reserve(batch.size());
    for (const auto& s : batch) {
        double y = model.intercept;
        std::size_t offset = 0;
        for (std::size_t k = 0; k < schema.num_attributes(); ++k) {
            y += model.weights[offset + s.assignment[k]];
            offset += schema.attributes[k].values.size();
        }
        out.push_back(y);
    }
    return out;
}

// Average ranks for ties (1-based fractional ranks).
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (v[a] != v[b]) return v[a] < v[b];
        return a < b;
    });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

// Spearman's rank correlation: Pearson correlation of average ranks.
inline double spearman(const std::vector<double>& y_pred, const std::vector<double>& y_true) {
    if (y_pred.size() != y_true.size()) throw ConfigError("spearman operands differ in length");
    std::size_t n = y_pred.size();
    if (n < 2) throw UndefinedCorrelationError("spearman needs at least two points");
    auto ra = average_ranks(y_pred);
    auto rb = average_ranks(y_true);
    double mean = 0.5 * static_cast<double>(n + 1);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double da = ra[i] - mean;
        double db = rb[i] - mean;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa == 0.0 || sbb == 0.0) {
        throw UndefinedCorrelationError("spearman undefined: zero rank variance");
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// Trains on a seeded sample of the table and scores how well the predictor
// ranks the held-out remainder.
inline double benchmark_predictor(const Domain& domain, const ReferenceTable& table,
                                  std::size_t train_size, std::uint64_t seed,
                                  PredictorKind kind = PredictorKind::kLasso,
                                  double lambda = kLassoDefaultLambda) {
    if (train_size < 1 || train_size >= domain.size()) {
        throw ConfigError("train_size must be in [1, |domain|)");
    }
    table.require_complete(domain);

    std::vector<std::size_t> positions(domain.size());
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    Rng rng(seed);
    auto train = rng.sample_without_replacement(positions, train_size);
    std::vector<char> in_train(domain.size(), 0);
    for (std::size_t p : train) in_train[p] = 1;

    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (std::size_t p : train) {
        const auto& s = domain.subdomains[p];
        X.push_back(encode_onehot(domain.schema, s));
        y.push_back(table.accuracy(s.id));
    }
    SurrogateModel model = kind == PredictorKind::kOls ? fit_ols(X, y) : fit_lasso(X, y, lambda);

    std::vector<Subdomain> test;
    std::vector<double> truth;
    for (std::size_t p = 0; p < domain.size(); ++p) {
        if (in_train[p]) continue;
        test.push_back(domain.subdomains[p]);
        truth.push_back(table.accuracy(domain.subdomains[p].id));
    }
    auto predictions = predict(model, test, domain.schema);
    return spearman(predictions, truth);
}

}  // namespace weakspot
