#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rfad/dataset.hpp"
#include "rfad/distance_matrix.hpp"
#include "rfad/errors.hpp"
#include "rfad/forest.hpp"
#include "rfad/graph.hpp"

namespace rfad {

/// Nearest-rank percentile of the within-cluster pairwise distance
/// distribution. Clusters with no pairs (singletons) yield 0.
inline double cluster_dc(const std::vector<std::size_t>& members, const DistanceMatrix& d,
                         double percentile) {
    if (members.empty()) throw InvalidArgumentError("cluster is empty");
    if (!(percentile > 0.0) || !(percentile < 100.0)) {
        throw InvalidArgumentError("percentile must be in (0, 100)");
    }
    std::vector<double> dists;
    dists.reserve(members.size() * (members.size() - 1) / 2);
    for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            dists.push_back(d(members[a], members[b]));
        }
    }
    if (dists.empty()) return 0.0;
    std::sort(dists.begin(), dists.end());
    // Snap products that should be integers before taking the ceiling.
    auto rank = static_cast<std::size_t>(
        std::ceil(percentile / 100.0 * static_cast<double>(dists.size()) - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, dists.size());
    return dists[rank - 1];
}

/// Fills every cluster's d_c using one global percentile applied per cluster.
inline void assign_dc(Clustering& clustering, const DistanceMatrix& d, double percentile) {
    for (auto& cluster : clustering.clusters) {
        cluster.dc = cluster_dc(cluster.members, d, percentile);
    }
}

/// Density parameter: the point itself plus the co-cluster members strictly
/// closer than the cluster's d_c.
inline std::size_t density(std::size_t i, const Clustering& clustering, const DistanceMatrix& d) {
    const auto& cluster = clustering.clusters[clustering.labels[i]];
    std::size_t alpha = 1;
    for (const std::size_t j : cluster.members) {
        if (j != i && d(i, j) < cluster.dc) ++alpha;
    }
    return alpha;
}

inline std::vector<std::size_t> densities(const Clustering& clustering, const DistanceMatrix& d) {
    std::vector<std::size_t> alphas(clustering.labels.size());
    for (std::size_t i = 0; i < alphas.size(); ++i) alphas[i] = density(i, clustering, d);
    return alphas;
}

/// Distance parameter: mean distance from the point to the cluster centers
/// that are strictly denser than it. When no center is denser, falls back to
/// the maximum distance to any center.
inline double distance_param(std::size_t i, const Clustering& clustering,
                             const std::vector<std::size_t>& alphas, const DistanceMatrix& d) {
    double denser_sum = 0.0;
    std::size_t denser_count = 0;
    double max_dist = 0.0;
    for (const auto& cluster : clustering.clusters) {
        const std::size_t c = cluster.center;
        max_dist = std::max(max_dist, d(i, c));
        if (alphas[c] > alphas[i]) {
            denser_sum += d(i, c);
            ++denser_count;
        }
    }
    if (denser_count == 0) return max_dist;
    return denser_sum / static_cast<double>(denser_count);
}

/// A_i = beta_i / alpha_i. alpha >= 1 by construction, so this is total.
inline std::vector<double> anomaly_scores(const std::vector<std::size_t>& alphas,
                                          const std::vector<double>& betas) {
    if (alphas.size() != betas.size()) {
        throw InvalidArgumentError("alpha/beta length mismatch");
    }
    std::vector<double> scores(alphas.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i] = betas[i] / static_cast<double>(alphas[i]);
    }
    return scores;
}

/// Affine map of scores onto [0, 1]; a constant vector maps to all zeros.
inline std::vector<double> min_max_normalize(const std::vector<double>& scores) {
    if (scores.empty()) return {};
    const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    std::vector<double> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = range > 0.0 ? (scores[i] - lo) / range : 0.0;
    }
    return out;
}

/// Log-z cutoff: transform scores with ln(A + 1), take mean + z * population
/// stddev, and map back with exp(t) - 1.
inline double threshold(const std::vector<double>& scores, double z) {
    if (scores.empty()) throw InvalidArgumentError("no scores");
    if (!(z > 0.0)) throw InvalidArgumentError("z must be positive");
    std::vector<double> logs(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) logs[i] = std::log1p(scores[i]);
    double mean = 0.0;
    for (const double v : logs) mean += v;
    mean /= static_cast<double>(logs.size());
    double var = 0.0;
    for (const double v : logs) var += (v - mean) * (v - mean);
    var /= static_cast<double>(logs.size());
    return std::expm1(mean + z * std::sqrt(var));
}

struct PipelineConfig {
    std::size_t trees = 100;
    std::size_t mtry = 0;       // 0 = ceil(sqrt(m))
    std::size_t max_depth = 0;  // 0 = unbounded
    std::size_t k = 0;          // 0 = ceil(ln N)
    double dc_percentile = 20.0;
    double z = 2.5;
    std::uint64_t seed = 0;
};

/// Everything the pipeline produces for one matrix: per-point parameters and
/// scores, the clustering they came from, and the decision threshold.
struct ScoreReport {
    std::size_t n = 0;
    std::size_t k = 0;  // neighbor count used for the graph
    Clustering clustering;
    std::vector<double> cluster_dc;  // per cluster, aligned with clustering.clusters
    std::vector<std::size_t> alpha;
    std::vector<double> beta;
    std::vector<double> score;
    std::vector<double> score_norm;
    double threshold = 0.0;
    double z = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::uint8_t> flags;

    std::size_t community_count() const { return clustering.count(); }
    std::size_t flagged_count() const {
        std::size_t c = 0;
        for (const auto f : flags) c += f != 0;
        return c;
    }
};

/// Runs the full hybrid pipeline: synthetic contrast, forest, tree distance
/// matrix, KNN graph, communities, medoids, density/distance parameters,
/// scores, and the log-z threshold. Deterministic in (input, config).
inline ScoreReport score_pipeline(const FeatureMatrix& x, const PipelineConfig& cfg) {
    if (x.rows() < 2) throw InvalidArgumentError("need at least 2 rows");
    if (!(cfg.dc_percentile > 0.0) || !(cfg.dc_percentile < 100.0)) {
        throw InvalidArgumentError("dc_percentile must be in (0, 100)");
    }
    if (!(cfg.z > 0.0)) throw InvalidArgumentError("z must be positive");

    const FeatureMatrix y = generate_synthetic(x, derive_seed(cfg.seed, 0));
    const LabeledDataset data = label_real_vs_synthetic(x, y);
    ForestParams fp;
    fp.tree_count = cfg.trees;
    fp.mtry = cfg.mtry;
    fp.max_depth = cfg.max_depth;
    fp.seed = derive_seed(cfg.seed, 1);
    const Forest forest = build_forest(data, fp);
    const DistanceMatrix d = distance_matrix(forest, x);

    ScoreReport report;
    report.n = x.rows();
    report.k = cfg.k == 0 ? default_k(x.rows()) : cfg.k;
    report.z = cfg.z;
    report.seed = cfg.seed;

    const NeighborGraph g = knn_graph(d, report.k);
    const auto labels = detect_communities(g, derive_seed(cfg.seed, 2));
    report.clustering = cluster_centers(labels, d);
    assign_dc(report.clustering, d, cfg.dc_percentile);
    for (const auto& cluster : report.clustering.clusters) {
        report.cluster_dc.push_back(cluster.dc);
    }

    report.alpha = densities(report.clustering, d);
    report.beta.resize(report.n);
    for (std::size_t i = 0; i < report.n; ++i) {
        report.beta[i] = distance_param(i, report.clustering, report.alpha, d);
    }
    report.score = anomaly_scores(report.alpha, report.beta);
    report.threshold = threshold(report.score, cfg.z);
    report.score_norm = min_max_normalize(report.score);
    report.flags.resize(report.n);
    for (std::size_t i = 0; i < report.n; ++i) {
        report.flags[i] = report.score[i] > report.threshold ? 1 : 0;
    }
    return report;
}

}  // namespace rfad
