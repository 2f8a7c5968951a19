#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rfad/baselines.hpp"
#include "rfad/dataset.hpp"
#include "rfad/errors.hpp"
#include "rfad/graph.hpp"
#include "rfad/scoring.hpp"

namespace rfad {

/// Rank-based ROC AUC (Mann-Whitney): the probability a random positive
/// outscores a random negative, ties counted half.
inline double auc(const std::vector<int>& labels, const std::vector<double>& scores) {
    if (labels.size() != scores.size()) throw InvalidArgumentError("label/score length mismatch");
    std::size_t positives = 0;
    for (const int y : labels) {
        if (y != 0 && y != 1) throw InvalidArgumentError("labels must be 0 or 1");
        positives += static_cast<std::size_t>(y);
    }
    const std::size_t negatives = labels.size() - positives;
    if (positives == 0 || negatives == 0) {
        throw OneClassOnlyError("AUC needs both classes present");
    }

    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks across tied runs, then the usual rank-sum statistic.
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = static_cast<double>(i + 1 + j) / 2.0;
        for (std::size_t t = i; t < j; ++t) {
            if (labels[order[t]] == 1) positive_rank_sum += avg_rank;
        }
        i = j;
    }
    const double p = static_cast<double>(positives);
    return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

struct EvalRow {
    std::string method;
    double fraction = 1.0;
    std::uint64_t seed = 0;
    std::optional<double> auc;
    std::optional<double> wall_time_s;
};

/// Per-(method, fraction) aggregate over seeds.
struct EvalSummary {
    std::string method;
    double fraction = 1.0;
    std::size_t runs = 0;
    double mean_auc = 0.0;
    double std_auc = 0.0;  // population
};

inline std::vector<EvalSummary> summarize(const std::vector<EvalRow>& rows) {
    std::vector<EvalSummary> out;
    for (const auto& row : rows) {
        if (!row.auc) continue;
        auto it = std::find_if(out.begin(), out.end(), [&](const EvalSummary& s) {
            return s.method == row.method && s.fraction == row.fraction;
        });
        if (it == out.end()) {
            out.push_back({row.method, row.fraction, 0, 0.0, 0.0});
            it = out.end() - 1;
        }
        ++it->runs;
        it->mean_auc += *row.auc;  // accumulate; finalized below
    }
    for (auto& s : out) s.mean_auc /= static_cast<double>(s.runs);
    for (const auto& row : rows) {
        if (!row.auc) continue;
        for (auto& s : out) {
            if (s.method == row.method && s.fraction == row.fraction) {
                const double d = *row.auc - s.mean_auc;
                s.std_auc += d * d;
                break;
            }
        }
    }
    for (auto& s : out) s.std_auc = std::sqrt(s.std_auc / static_cast<double>(s.runs));
    return out;
}

/// A method is a pure function of (data, seed) to per-point anomaly scores,
/// higher = more anomalous.
using Scorer = std::function<std::vector<double>(const FeatureMatrix&, std::uint64_t)>;

struct Method {
    std::string name;
    Scorer scorer;
};

inline std::size_t resolve_k(std::size_t override_k, std::size_t n) {
    return override_k == 0 ? default_k(n) : override_k;
}

/// Builds scorers for the requested method names. "hybrid" runs the full
/// pipeline; the baselines run on one-hot + standardized features.
inline std::vector<Method> make_method_scorers(const std::vector<std::string>& names,
                                               const PipelineConfig& cfg) {
    std::vector<Method> methods;
    for (const auto& name : names) {
        if (name == "hybrid") {
            methods.push_back({name, [cfg](const FeatureMatrix& x, std::uint64_t seed) {
                                   PipelineConfig local = cfg;
                                   local.seed = seed;
                                   return score_pipeline(x, local).score;
                               }});
        } else if (name == "iforest") {
            methods.push_back({name, [cfg](const FeatureMatrix& x, std::uint64_t seed) {
                                   return isolation_forest_scores(baseline_features(x), cfg.trees,
                                                                  0, seed);
                               }});
        } else if (name == "knn") {
            methods.push_back({name, [cfg](const FeatureMatrix& x, std::uint64_t) {
                                   return knn_outlier_scores(baseline_features(x),
                                                             resolve_k(cfg.k, x.rows()));
                               }});
        } else if (name == "lof") {
            methods.push_back({name, [cfg](const FeatureMatrix& x, std::uint64_t) {
                                   return lof_scores(baseline_features(x),
                                                     resolve_k(cfg.k, x.rows()));
                               }});
        } else {
            throw InvalidArgumentError("unknown method '" + name + "'");
        }
    }
    return methods;
}

namespace detail {

/// Draws a subsample containing both classes, re-deriving the seed up to 100
/// times when a one-class draw comes up.
inline Subsample stratified_attempts(const FeatureMatrix& x, const std::vector<int>& labels,
                                     double fraction, std::uint64_t base_seed) {
    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
        Subsample sub = subsample(x, labels, fraction, derive_seed(base_seed, attempt));
        const bool has_pos = std::find(sub.labels.begin(), sub.labels.end(), 1) != sub.labels.end();
        const bool has_neg = std::find(sub.labels.begin(), sub.labels.end(), 0) != sub.labels.end();
        if (has_pos && has_neg) return sub;
    }
    throw DegenerateSubsampleError("no two-class subsample after 100 attempts at fraction " +
                                   std::to_string(fraction));
}

}  // namespace detail

/// Scores subsamples of (x, labels) at each (fraction, seed, method) cell.
/// The subsample depends only on (fraction, seed), so all methods see the
/// same rows, and every cell is reproducible in isolation.
inline std::vector<EvalRow> stability_experiment(const FeatureMatrix& x,
                                                 const std::vector<int>& labels,
                                                 const std::vector<Method>& methods,
                                                 const std::vector<double>& fractions,
                                                 const std::vector<std::uint64_t>& seeds) {
    for (const double f : fractions) {
        if (!(f > 0.0) || f > 1.0) throw InvalidArgumentError("fractions must be in (0, 1]");
    }
    std::vector<EvalRow> rows;
    for (const double fraction : fractions) {
        for (const std::uint64_t seed : seeds) {
            const std::uint64_t cell_seed =
                derive_seed(seed, std::bit_cast<std::uint64_t>(fraction));
            const Subsample sub = detail::stratified_attempts(x, labels, fraction, cell_seed);
            for (const auto& method : methods) {
                EvalRow row;
                row.method = method.name;
                row.fraction = fraction;
                row.seed = seed;
                row.auc = auc(sub.labels, method.scorer(sub.matrix, seed));
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

/// Median wall-clock seconds per method over `repeats` runs, scoring only.
/// Runs sequentially so timings do not contend with each other.
inline std::vector<EvalRow> runtime_benchmark(const FeatureMatrix& x,
                                              const std::vector<Method>& methods,
                                              std::size_t repeats, std::uint64_t seed) {
    if (repeats < 1) throw InvalidArgumentError("repeats must be at least 1");
    std::vector<EvalRow> rows;
    for (const auto& method : methods) {
        std::vector<double> times;
        times.reserve(repeats);
        for (std::size_t r = 0; r < repeats; ++r) {
            const auto start = std::chrono::steady_clock::now();
            volatile auto sink = method.scorer(x, seed).size();
            (void)sink;
            const auto stop = std::chrono::steady_clock::now();
            times.push_back(std::chrono::duration<double>(stop - start).count());
        }
        std::sort(times.begin(), times.end());
        const std::size_t mid = times.size() / 2;
        const double median =
            times.size() % 2 == 1 ? times[mid] : (times[mid - 1] + times[mid]) / 2.0;
        EvalRow row;
        row.method = method.name;
        row.seed = seed;
        row.wall_time_s = median;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace rfad
