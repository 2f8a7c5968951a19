#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rfad/dataset.hpp"
#include "rfad/distance_matrix.hpp"
#include "rfad/errors.hpp"
#include "rfad/parallel.hpp"
#include "rfad/rng.hpp"

namespace rfad {

/// Dense row-major numeric matrix used by the distance-based baselines.
struct NumericMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::string> names;
    std::vector<double> data;

    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
};

/// Numeric columns pass through; categorical columns expand to one 0/1
/// indicator per alphabet value (alphabet order, so the layout is stable).
inline NumericMatrix to_numeric(const FeatureMatrix& x) {
    NumericMatrix out;
    out.rows = x.rows();
    for (std::size_t c = 0; c < x.cols(); ++c) {
        const auto& col = x.schema().columns[c];
        if (col.kind == ColumnKind::kNumeric) {
            out.names.push_back(col.name);
        } else {
            for (const auto& value : x.alphabet(c)) {
                out.names.push_back(col.name + "=" + value);
            }
        }
    }
    out.cols = out.names.size();
    out.data.assign(out.rows * out.cols, 0.0);
    std::size_t j = 0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        const auto& col = x.schema().columns[c];
        if (col.kind == ColumnKind::kNumeric) {
            for (std::size_t i = 0; i < out.rows; ++i) out.at(i, j) = x.numeric(i, c);
            ++j;
        } else {
            const auto alphabet = x.alphabet(c);
            for (std::size_t i = 0; i < out.rows; ++i) {
                const auto& value = x.category(i, c);
                const auto it = std::lower_bound(alphabet.begin(), alphabet.end(), value);
                out.at(i, j + static_cast<std::size_t>(it - alphabet.begin())) = 1.0;
            }
            j += alphabet.size();
        }
    }
    return out;
}

/// Column-wise z-scoring with population moments. Constant columns map to 0.
inline void standardize_columns(NumericMatrix& m) {
    for (std::size_t j = 0; j < m.cols; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) mean += m.at(i, j);
        mean /= static_cast<double>(m.rows);
        double var = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) {
            const double d = m.at(i, j) - mean;
            var += d * d;
        }
        var /= static_cast<double>(m.rows);
        const double sd = std::sqrt(var);
        for (std::size_t i = 0; i < m.rows; ++i) {
            m.at(i, j) = sd > 0.0 ? (m.at(i, j) - mean) / sd : 0.0;
        }
    }
}

inline NumericMatrix baseline_features(const FeatureMatrix& x) {
    NumericMatrix m = to_numeric(x);
    standardize_columns(m);
    return m;
}

inline DistanceMatrix euclidean_distances(const NumericMatrix& m) {
    DistanceMatrix d(m.rows);
    parallel_for(m.rows, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < m.rows; ++j) {
            double acc = 0.0;
            for (std::size_t c = 0; c < m.cols; ++c) {
                const double diff = m.at(i, c) - m.at(j, c);
                acc += diff * diff;
            }
            d.set(i, j, std::sqrt(acc));
        }
    });
    return d;
}

namespace detail {

/// Average unsuccessful-search path length in a BST of n nodes; the standard
/// normalizer for isolation trees.
inline double average_path_length(std::size_t n) {
    if (n <= 1) return 0.0;
    if (n == 2) return 1.0;
    const double nd = static_cast<double>(n);
    const double harmonic = std::log(nd - 1.0) + 0.5772156649015329;
    return 2.0 * harmonic - 2.0 * (nd - 1.0) / nd;
}

struct IsolationNode {
    static constexpr std::size_t kLeaf = static_cast<std::size_t>(-1);
    std::size_t feature = 0;
    double split = 0.0;
    std::size_t left = kLeaf;
    std::size_t right = kLeaf;
    std::size_t size = 0;  // rows that reached the node during growth

    bool is_leaf() const { return left == kLeaf; }
};

struct IsolationTree {
    std::vector<IsolationNode> nodes;

    /// Path length of a point: edges walked plus the subtree adjustment at
    /// the terminal node.
    double path_length(const NumericMatrix& m, std::size_t row) const {
        std::size_t at = 0;
        double depth = 0.0;
        while (!nodes[at].is_leaf()) {
            at = m.at(row, nodes[at].feature) < nodes[at].split ? nodes[at].left
                                                                : nodes[at].right;
            depth += 1.0;
        }
        return depth + average_path_length(nodes[at].size);
    }
};

inline std::size_t grow_isolation_node(IsolationTree& tree, const NumericMatrix& m,
                                       std::vector<std::size_t>& rows, std::size_t begin,
                                       std::size_t end, std::size_t depth,
                                       std::size_t depth_limit, Rng& rng) {
    const std::size_t id = tree.nodes.size();
    tree.nodes.push_back({});
    tree.nodes[id].size = end - begin;
    if (end - begin <= 1 || depth >= depth_limit) return id;

    // Candidate features are those not constant over the node's rows.
    std::vector<std::size_t> candidates;
    for (std::size_t c = 0; c < m.cols; ++c) {
        const double first = m.at(rows[begin], c);
        for (std::size_t r = begin + 1; r < end; ++r) {
            if (m.at(rows[r], c) != first) {
                candidates.push_back(c);
                break;
            }
        }
    }
    if (candidates.empty()) return id;

    const std::size_t feature = candidates[rng.index(candidates.size())];
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t r = begin; r < end; ++r) {
        lo = std::min(lo, m.at(rows[r], feature));
        hi = std::max(hi, m.at(rows[r], feature));
    }
    const double split = rng.uniform(lo, hi);

    const auto mid_it = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                       rows.begin() + static_cast<std::ptrdiff_t>(end),
                                       [&](std::size_t r) { return m.at(r, feature) < split; });
    const auto mid = static_cast<std::size_t>(mid_it - rows.begin());
    if (mid == begin || mid == end) return id;  // degenerate draw at the boundary

    tree.nodes[id].feature = feature;
    tree.nodes[id].split = split;
    const std::size_t left = grow_isolation_node(tree, m, rows, begin, mid, depth + 1,
                                                 depth_limit, rng);
    const std::size_t right = grow_isolation_node(tree, m, rows, mid, end, depth + 1,
                                                  depth_limit, rng);
    tree.nodes[id].left = left;
    tree.nodes[id].right = right;
    return id;
}

}  // namespace detail

/// Isolation-forest anomaly score in (0, 1): 2^(-E[path] / c(sample_size)).
/// subsample = 0 selects the usual min(256, N) rows per tree.
inline std::vector<double> isolation_forest_scores(const NumericMatrix& m,
                                                   std::size_t tree_count, std::size_t subsample,
                                                   std::uint64_t seed) {
    if (m.rows < 2) throw InvalidArgumentError("need at least 2 rows");
    if (tree_count < 1) throw InvalidArgumentError("need at least 1 tree");
    if (subsample == 1) throw InvalidArgumentError("subsample must be at least 2");
    const std::size_t sample_size =
        subsample == 0 ? std::min<std::size_t>(256, m.rows) : std::min(subsample, m.rows);
    const auto depth_limit = static_cast<std::size_t>(
        std::ceil(std::log2(static_cast<double>(sample_size))));

    std::vector<detail::IsolationTree> trees(tree_count);
    parallel_for(tree_count, [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        std::vector<std::size_t> rows = rng.sample_without_replacement(m.rows, sample_size);
        detail::grow_isolation_node(trees[t], m, rows, 0, rows.size(), 0, depth_limit, rng);
    });

    const double normalizer = detail::average_path_length(sample_size);
    std::vector<double> scores(m.rows);
    parallel_for(m.rows, [&](std::size_t i) {
        double total = 0.0;
        for (const auto& tree : trees) total += tree.path_length(m, i);
        const double mean = total / static_cast<double>(tree_count);
        scores[i] = std::pow(2.0, -mean / normalizer);
    });
    return scores;
}

/// Distance to the k-th nearest neighbor; larger means more isolated.
inline std::vector<double> knn_outlier_scores(const DistanceMatrix& d, std::size_t k) {
    const std::size_t n = d.size();
    if (k < 1) throw InvalidArgumentError("k must be at least 1");
    if (k > n - 1) throw KTooLargeError("k exceeds n - 1");
    std::vector<double> scores(n);
    parallel_for(n, [&](std::size_t i) {
        std::vector<double> dists;
        dists.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) dists.push_back(d(i, j));
        }
        std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k - 1),
                         dists.end());
        scores[i] = dists[k - 1];
    });
    return scores;
}

/// Local outlier factor with distance-tie-inclusive neighborhoods and a small
/// epsilon guarding the reachability-density division.
inline std::vector<double> lof_scores(const DistanceMatrix& d, std::size_t k) {
    const std::size_t n = d.size();
    if (k < 1) throw InvalidArgumentError("k must be at least 1");
    if (k > n - 1) throw KTooLargeError("k exceeds n - 1");

    // k-distance and neighborhood per point; all points at exactly the
    // k-distance are included, so neighborhoods can exceed k on ties.
    std::vector<double> kdist(n);
    std::vector<std::vector<std::size_t>> neighbors(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<double, std::size_t>> order;
        order.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) order.emplace_back(d(i, j), j);
        }
        std::sort(order.begin(), order.end());
        kdist[i] = order[k - 1].first;
        for (const auto& [dist, j] : order) {
            if (dist > kdist[i]) break;
            neighbors[i].push_back(j);
        }
    }

    std::vector<double> lrd(n);
    for (std::size_t i = 0; i < n; ++i) {
        double reach_sum = 0.0;
        for (const std::size_t j : neighbors[i]) {
            reach_sum += std::max(kdist[j], d(i, j));
        }
        lrd[i] = static_cast<double>(neighbors[i].size()) / (reach_sum + 1e-10);
    }

    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        double ratio_sum = 0.0;
        for (const std::size_t j : neighbors[i]) ratio_sum += lrd[j];
        scores[i] = ratio_sum / (lrd[i] * static_cast<double>(neighbors[i].size()));
    }
    return scores;
}

inline std::vector<double> knn_outlier_scores(const NumericMatrix& m, std::size_t k) {
    return knn_outlier_scores(euclidean_distances(m), k);
}

inline std::vector<double> lof_scores(const NumericMatrix& m, std::size_t k) {
    return lof_scores(euclidean_distances(m), k);
}

}  // namespace rfad
