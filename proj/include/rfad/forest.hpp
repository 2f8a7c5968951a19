#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rfad/dataset.hpp"
#include "rfad/distance_matrix.hpp"
#include "rfad/errors.hpp"
#include "rfad/parallel.hpp"
#include "rfad/rng.hpp"

namespace rfad {

struct ClassCounts {
    std::size_t n_real = 0;
    std::size_t n_synth = 0;

    std::size_t total() const { return n_real + n_synth; }
    bool operator==(const ClassCounts&) const = default;
};

/// Two-class entropy -p1*log2(p1) - p2*log2(p2) with 0*log2(0) = 0.
inline double entropy(const ClassCounts& c) {
    const double total = static_cast<double>(c.total());
    auto plogp = [total](std::size_t k) {
        if (k == 0) return 0.0;
        const double p = static_cast<double>(k) / total;
        return p * std::log2(p);
    };
    const double e = -(plogp(c.n_real) + plogp(c.n_synth));
    return e == 0.0 ? 0.0 : e;
}

/// Expected decrease in entropy for a binary partition, computed from counts.
inline double gain_from_counts(const ClassCounts& parent, const ClassCounts& left,
                               const ClassCounts& right) {
    const double n = static_cast<double>(parent.total());
    return entropy(parent) - (static_cast<double>(left.total()) / n) * entropy(left) -
           (static_cast<double>(right.total()) / n) * entropy(right);
}

/// Binary routing rule for one feature: numeric rows go left iff value is
/// below the threshold, categorical rows go left iff the symbol is in the
/// (sorted) left set.
struct SplitRule {
    enum class Kind { kNumericThreshold, kCategorySubset };

    Kind kind = Kind::kNumericThreshold;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::vector<std::string> left_categories;

    bool routes_left(const FeatureMatrix& m, std::size_t row) const {
        if (kind == Kind::kNumericThreshold) {
            return m.numeric(row, feature) < threshold;
        }
        return std::binary_search(left_categories.begin(), left_categories.end(),
                                  m.category(row, feature));
    }

    bool operator==(const SplitRule&) const = default;
};

struct TreeNode {
    static constexpr std::uint32_t kNoChild = 0xFFFFFFFFu;

    SplitRule split;  // meaningful only for internal nodes
    std::uint32_t left = kNoChild;
    std::uint32_t right = kNoChild;
    ClassCounts counts;  // training rows that reached this node

    bool is_leaf() const { return left == kNoChild; }
    bool operator==(const TreeNode&) const = default;
};

/// Binary decision tree stored as a node arena with the root at index 0.
/// height counts edges on the longest root-to-leaf path.
struct DecisionTree {
    std::vector<TreeNode> nodes;
    std::size_t height = 0;

    /// Routes a record to its leaf, returning the leaf's node index.
    std::uint32_t route(const FeatureMatrix& m, std::size_t row) const {
        std::uint32_t cur = 0;
        while (!nodes[cur].is_leaf()) {
            cur = nodes[cur].split.routes_left(m, row) ? nodes[cur].left : nodes[cur].right;
        }
        return cur;
    }

    /// Node ids visited from the root to the record's leaf, root included.
    std::vector<std::uint32_t> routing_path(const FeatureMatrix& m, std::size_t row) const {
        std::vector<std::uint32_t> path;
        std::uint32_t cur = 0;
        path.push_back(cur);
        while (!nodes[cur].is_leaf()) {
            cur = nodes[cur].split.routes_left(m, row) ? nodes[cur].left : nodes[cur].right;
            path.push_back(cur);
        }
        return path;
    }

    bool operator==(const DecisionTree&) const = default;
};

struct ForestParams {
    std::size_t tree_count = 100;  // T
    std::size_t mtry = 0;          // features drawn per split; 0 = ceil(sqrt(m))
    std::size_t max_depth = 0;     // 0 = unbounded
    std::uint64_t seed = 0;
};

struct Forest {
    std::vector<DecisionTree> trees;
    ForestParams params;
};

/// Information gain of an explicit split over a row subset.
inline double information_gain(const LabeledDataset& data, std::span<const std::size_t> rows,
                               const SplitRule& split) {
    ClassCounts parent, left;
    for (const std::size_t r : rows) {
        const bool real = data.labels[r] == RowClass::kReal;
        (real ? parent.n_real : parent.n_synth)++;
        if (split.routes_left(data.matrix, r)) (real ? left.n_real : left.n_synth)++;
    }
    const ClassCounts right{parent.n_real - left.n_real, parent.n_synth - left.n_synth};
    if (left.total() == 0 || right.total() == 0) {
        throw DegenerateSplitError("split leaves one side empty");
    }
    return gain_from_counts(parent, left, right);
}

namespace detail {

constexpr double kMinGain = 1e-12;

struct BestSplit {
    bool found = false;
    double gain = 0.0;
    SplitRule rule;
};

/// Scans midpoint thresholds of one numeric feature in ascending order.
/// Strictly-greater comparison keeps the lowest qualifying threshold on ties.
inline void scan_numeric_feature(const LabeledDataset& data, std::span<const std::size_t> rows,
                                 std::size_t feature, const ClassCounts& parent, BestSplit& best) {
    std::vector<std::pair<double, bool>> vals;  // (value, is_real)
    vals.reserve(rows.size());
    for (const std::size_t r : rows) {
        vals.emplace_back(data.matrix.numeric(r, feature), data.labels[r] == RowClass::kReal);
    }
    std::sort(vals.begin(), vals.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    ClassCounts left;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        (vals[i].second ? left.n_real : left.n_synth)++;
        const double a = vals[i].first;
        const double b = vals[i + 1].first;
        if (!(b > a)) continue;
        double mid = a + (b - a) / 2.0;
        if (mid <= a) mid = b;  // adjacent doubles: b itself still separates
        const ClassCounts right{parent.n_real - left.n_real, parent.n_synth - left.n_synth};
        const double gain = gain_from_counts(parent, left, right);
        if (gain > best.gain) {
            best.found = true;
            best.gain = gain;
            best.rule = SplitRule{SplitRule::Kind::kNumericThreshold, feature, mid, {}};
        }
    }
}

/// Scans one-category-vs-rest splits in lexicographic category order.
inline void scan_categorical_feature(const LabeledDataset& data, std::span<const std::size_t> rows,
                                     std::size_t feature, const ClassCounts& parent,
                                     BestSplit& best) {
    std::map<std::string_view, ClassCounts> per_cat;
    for (const std::size_t r : rows) {
        auto& c = per_cat[data.matrix.category(r, feature)];
        (data.labels[r] == RowClass::kReal ? c.n_real : c.n_synth)++;
    }
    if (per_cat.size() < 2) return;
    for (const auto& [cat, left] : per_cat) {
        const ClassCounts right{parent.n_real - left.n_real, parent.n_synth - left.n_synth};
        const double gain = gain_from_counts(parent, left, right);
        if (gain > best.gain) {
            best.found = true;
            best.gain = gain;
            best.rule = SplitRule{SplitRule::Kind::kCategorySubset, feature, 0.0,
                                  {std::string(cat)}};
        }
    }
}

class TreeGrower {
public:
    TreeGrower(const LabeledDataset& data, const ForestParams& params, std::uint64_t tree_seed)
        : data_(data), params_(params), rng_(tree_seed) {
        const std::size_t m = data.matrix.cols();
        mtry_ = params.mtry == 0
                    ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))))
                    : params.mtry;
        if (mtry_ > m) mtry_ = m;
    }

    DecisionTree grow(std::vector<std::size_t> rows) {
        tree_.nodes.clear();
        tree_.height = 0;
        grow_node(std::move(rows), 0);
        return std::move(tree_);
    }

private:
    std::uint32_t grow_node(std::vector<std::size_t> rows, std::size_t depth) {
        ClassCounts counts;
        for (const std::size_t r : rows) {
            (data_.labels[r] == RowClass::kReal ? counts.n_real : counts.n_synth)++;
        }

        const bool pure = counts.n_real == 0 || counts.n_synth == 0;
        const bool at_depth_limit = params_.max_depth > 0 && depth >= params_.max_depth;

        BestSplit best;
        best.gain = kMinGain;
        if (!pure && !at_depth_limit) {
            // The feature draw is the only random step; candidate evaluation
            // is deterministic given the draw.
            const auto features = rng_.sample_without_replacement(data_.matrix.cols(), mtry_);
            for (const std::size_t f : features) {
                if (data_.matrix.kind(f) == ColumnKind::kNumeric) {
                    scan_numeric_feature(data_, rows, f, counts, best);
                } else {
                    scan_categorical_feature(data_, rows, f, counts, best);
                }
            }
        }

        const auto id = static_cast<std::uint32_t>(tree_.nodes.size());
        tree_.nodes.push_back(TreeNode{{}, TreeNode::kNoChild, TreeNode::kNoChild, counts});
        if (!best.found) {
            tree_.height = std::max(tree_.height, depth);
            return id;
        }

        std::vector<std::size_t> left_rows, right_rows;
        for (const std::size_t r : rows) {
            (best.rule.routes_left(data_.matrix, r) ? left_rows : right_rows).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        tree_.nodes[id].split = best.rule;
        const std::uint32_t left = grow_node(std::move(left_rows), depth + 1);
        tree_.nodes[id].left = left;
        const std::uint32_t right = grow_node(std::move(right_rows), depth + 1);
        tree_.nodes[id].right = right;
        return id;
    }

    const LabeledDataset& data_;
    const ForestParams& params_;
    Rng rng_;
    std::size_t mtry_ = 0;
    DecisionTree tree_;
};

}  // namespace detail

/// Greedy entropy-gain induction over a row subset of the labeled dataset.
inline DecisionTree build_tree(const LabeledDataset& data, std::vector<std::size_t> rows,
                               const ForestParams& params, std::uint64_t tree_seed) {
    detail::TreeGrower grower(data, params, tree_seed);
    return grower.grow(std::move(rows));
}

/// Greedy entropy-gain induction over the full labeled dataset.
inline DecisionTree build_tree(const LabeledDataset& data, const ForestParams& params,
                               std::uint64_t tree_seed) {
    std::vector<std::size_t> rows(data.matrix.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return build_tree(data, std::move(rows), params, tree_seed);
}

/// Trains T trees, each on its own bootstrap sample (with replacement, same
/// size as the data) drawn from a seed derived from params.seed and the tree
/// index. Trees are built in parallel; the result does not depend on the
/// thread count.
inline Forest build_forest(const LabeledDataset& data, const ForestParams& params) {
    if (params.tree_count < 1) throw InvalidArgumentError("tree count must be at least 1");
    Forest forest;
    forest.params = params;
    forest.trees.resize(params.tree_count);
    const std::size_t n = data.matrix.rows();
    parallel_for(params.tree_count, [&](std::size_t t) {
        const std::uint64_t tree_master = derive_seed(params.seed, t);
        Rng boot(derive_seed(tree_master, 0));
        std::vector<std::size_t> rows(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = boot.index(n);
        forest.trees[t] = build_tree(data, std::move(rows), params, derive_seed(tree_master, 1));
    });
    return forest;
}

/// Number of edges shared by the root-to-leaf routing paths of two records;
/// equivalently the depth of their deepest common node.
inline std::size_t tree_similarity(const DecisionTree& tree, const FeatureMatrix& a,
                                   std::size_t row_a, const FeatureMatrix& b, std::size_t row_b) {
    std::uint32_t cur = 0;
    std::size_t shared = 0;
    while (!tree.nodes[cur].is_leaf()) {
        const bool la = tree.nodes[cur].split.routes_left(a, row_a);
        const bool lb = tree.nodes[cur].split.routes_left(b, row_b);
        if (la != lb) break;
        cur = la ? tree.nodes[cur].left : tree.nodes[cur].right;
        ++shared;
    }
    return shared;
}

/// Forest distance over the original points:
///   D[i][j] = sqrt(1 - sum_t S_t(i,j) / (H_t * T))
/// with height-0 trees contributing ratio 0 and a forced zero diagonal.
/// Every point is routed down every tree regardless of bootstrap membership.
/// Pairs are computed independently (tree sum in fixed order), so the
/// parallel result is identical to the sequential one.
inline DistanceMatrix distance_matrix(const Forest& forest, const FeatureMatrix& x) {
    const std::size_t n = x.rows();
    const std::size_t t_count = forest.trees.size();
    DistanceMatrix d(n);

    // Routing paths per tree per point, computed once up front.
    std::vector<std::vector<std::vector<std::uint32_t>>> paths(t_count);
    parallel_for(t_count, [&](std::size_t t) {
        paths[t].resize(n);
        for (std::size_t i = 0; i < n; ++i) paths[t][i] = forest.trees[t].routing_path(x, i);
    });

    const double tree_count = static_cast<double>(t_count);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < t_count; ++t) {
                const std::size_t h = forest.trees[t].height;
                if (h == 0) continue;
                const auto& pi = paths[t][i];
                const auto& pj = paths[t][j];
                const std::size_t limit = std::min(pi.size(), pj.size());
                std::size_t shared = 0;
                while (shared + 1 < limit && pi[shared + 1] == pj[shared + 1]) ++shared;
                acc += static_cast<double>(shared) / (static_cast<double>(h) * tree_count);
            }
            const double radicand = std::clamp(1.0 - acc, 0.0, 1.0);
            d.set(i, j, std::sqrt(radicand));
        }
    });
    return d;
}

/// Text dump of the forest structure; used by determinism checks.
inline std::string serialize(const Forest& forest) {
    std::ostringstream out;
    char buf[64];
    out << "forest trees=" << forest.trees.size() << " seed=" << forest.params.seed << "\n";
    for (std::size_t t = 0; t < forest.trees.size(); ++t) {
        const auto& tree = forest.trees[t];
        out << "tree " << t << " height=" << tree.height << "\n";
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            const auto& node = tree.nodes[i];
            out << "  node " << i << " real=" << node.counts.n_real
                << " synth=" << node.counts.n_synth;
            if (!node.is_leaf()) {
                out << " feature=" << node.split.feature;
                if (node.split.kind == SplitRule::Kind::kNumericThreshold) {
                    std::snprintf(buf, sizeof(buf), "%.17g", node.split.threshold);
                    out << " threshold=" << buf;
                } else {
                    out << " left_set=";
                    for (const auto& c : node.split.left_categories) out << c << ";";
                }
                out << " left=" << node.left << " right=" << node.right;
            }
            out << "\n";
        }
    }
    return out.str();
}

}  // namespace rfad
