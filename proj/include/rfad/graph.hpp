#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "rfad/distance_matrix.hpp"
#include "rfad/errors.hpp"
#include "rfad/rng.hpp"

namespace rfad {

/// Undirected simple graph over n nodes, adjacency lists kept sorted.
struct NeighborGraph {
    std::size_t n = 0;
    std::vector<std::vector<std::size_t>> adj;

    std::size_t edge_count() const {
        std::size_t deg_sum = 0;
        for (const auto& a : adj) deg_sum += a.size();
        return deg_sum / 2;
    }
};

/// Neighbor count used when none is configured: ceil(ln N), floored at 1 and
/// capped at N - 1.
inline std::size_t default_k(std::size_t n) {
    if (n < 2) throw InvalidArgumentError("need at least 2 points");
    auto k = static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n))));
    if (k < 1) k = 1;
    return std::min(k, n - 1);
}

/// Connects every node to its k nearest others (ties broken by lower index);
/// the edge set is the union over nodes, so degrees may exceed k.
inline NeighborGraph knn_graph(const DistanceMatrix& d, std::size_t k) {
    const std::size_t n = d.size();
    if (k < 1) throw InvalidArgumentError("k must be at least 1");
    if (k > n - 1) {
        throw KTooLargeError("k = " + std::to_string(k) + " exceeds n - 1 = " +
                             std::to_string(n - 1));
    }
    NeighborGraph g;
    g.n = n;
    g.adj.resize(n);

    std::vector<std::pair<double, std::size_t>> cand;
    for (std::size_t i = 0; i < n; ++i) {
        cand.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) cand.emplace_back(d(i, j), j);
        }
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k),
                          cand.end());
        for (std::size_t t = 0; t < k; ++t) {
            g.adj[i].push_back(cand[t].second);
            g.adj[cand[t].second].push_back(i);
        }
    }
    for (auto& a : g.adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return g;
}

namespace detail {

/// Aggregated graph state for the greedy modularity passes. Self-loop weight
/// counts twice toward a node's degree, matching standard modularity.
struct LouvainGraph {
    std::size_t n = 0;
    std::vector<std::vector<std::pair<std::size_t, double>>> adj;  // no self entries
    std::vector<double> self_loop;
    std::vector<double> degree;
    double total_weight = 0.0;  // m

    static LouvainGraph from_neighbor_graph(const NeighborGraph& g) {
        LouvainGraph lg;
        lg.n = g.n;
        lg.adj.resize(g.n);
        lg.self_loop.assign(g.n, 0.0);
        lg.degree.assign(g.n, 0.0);
        for (std::size_t i = 0; i < g.n; ++i) {
            for (const std::size_t j : g.adj[i]) lg.adj[i].emplace_back(j, 1.0);
            lg.degree[i] = static_cast<double>(g.adj[i].size());
            lg.total_weight += lg.degree[i];
        }
        lg.total_weight /= 2.0;
        return lg;
    }
};

/// One local-moving pass to a fixed point. Nodes move to the candidate
/// community with the largest insertion gain; ties keep the lowest community
/// id, and only strictly positive improvements trigger a move.
inline bool louvain_one_level(const LouvainGraph& g, std::vector<std::size_t>& comm, Rng& rng) {
    const double two_m = 2.0 * g.total_weight;
    std::vector<double> tot(g.n, 0.0);
    comm.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        comm[i] = i;
        tot[i] = g.degree[i] + 2.0 * g.self_loop[i];
    }

    std::vector<std::size_t> order(g.n);
    for (std::size_t i = 0; i < g.n; ++i) order[i] = i;
    rng.shuffle(order);

    bool any_move = false;
    bool moved_in_pass = true;
    while (moved_in_pass) {
        moved_in_pass = false;
        for (const std::size_t i : order) {
            const std::size_t old_comm = comm[i];
            const double k_i = g.degree[i] + 2.0 * g.self_loop[i];

            std::map<std::size_t, double> links;  // community -> weight from i
            links[old_comm] += 0.0;               // candidate even with no remaining link
            for (const auto& [j, w] : g.adj[i]) links[comm[j]] += w;

            tot[old_comm] -= k_i;

            std::size_t best_comm = old_comm;
            double best_gain = -std::numeric_limits<double>::infinity();
            double old_gain = 0.0;
            for (const auto& [c, w] : links) {
                const double gain = w - tot[c] * k_i / two_m;
                if (c == old_comm) old_gain = gain;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_comm = c;
                }
            }
            if (best_comm != old_comm && best_gain > old_gain + 1e-12) {
                comm[i] = best_comm;
                moved_in_pass = true;
                any_move = true;
            } else {
                comm[i] = old_comm;
            }
            tot[comm[i]] += k_i;
        }
    }
    return any_move;
}

inline LouvainGraph louvain_aggregate(const LouvainGraph& g, const std::vector<std::size_t>& comm,
                                      std::vector<std::size_t>& compact) {
    // Compact community ids in ascending order of their (old) id.
    compact.assign(g.n, 0);
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < g.n; ++i) used.push_back(comm[i]);
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::vector<std::size_t> remap(g.n, 0);
    for (std::size_t idx = 0; idx < used.size(); ++idx) remap[used[idx]] = idx;
    for (std::size_t i = 0; i < g.n; ++i) compact[i] = remap[comm[i]];

    LouvainGraph out;
    out.n = used.size();
    out.adj.resize(out.n);
    out.self_loop.assign(out.n, 0.0);
    out.degree.assign(out.n, 0.0);
    out.total_weight = g.total_weight;

    std::vector<std::map<std::size_t, double>> between(out.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        const std::size_t ci = compact[i];
        out.self_loop[ci] += g.self_loop[i];
        for (const auto& [j, w] : g.adj[i]) {
            const std::size_t cj = compact[j];
            if (ci == cj) {
                if (i < j) out.self_loop[ci] += w;
            } else {
                between[ci][cj] += w;
            }
        }
    }
    for (std::size_t c = 0; c < out.n; ++c) {
        for (const auto& [d, w] : between[c]) out.adj[c].emplace_back(d, w);
        double deg = 2.0 * out.self_loop[c];
        for (const auto& [d, w] : out.adj[c]) deg += w;
        out.degree[c] = deg - 2.0 * out.self_loop[c];
    }
    return out;
}

}  // namespace detail

/// Greedy modularity maximization over the unweighted graph: seeded local
/// moving passes followed by community aggregation, repeated to a fixed
/// point. Returns one label per node, compacted to [0, K) in ascending order
/// of each community's smallest member index.
inline std::vector<std::size_t> detect_communities(const NeighborGraph& g, std::uint64_t seed) {
    std::vector<std::size_t> node_to_comm(g.n);
    for (std::size_t i = 0; i < g.n; ++i) node_to_comm[i] = i;
    if (g.n == 0) return node_to_comm;

    detail::LouvainGraph lg = detail::LouvainGraph::from_neighbor_graph(g);
    Rng rng(seed);

    if (lg.total_weight > 0.0) {
        while (true) {
            std::vector<std::size_t> comm;
            const bool improved = detail::louvain_one_level(lg, comm, rng);
            if (!improved) break;
            std::vector<std::size_t> compact;
            lg = detail::louvain_aggregate(lg, comm, compact);
            for (std::size_t i = 0; i < g.n; ++i) node_to_comm[i] = compact[node_to_comm[i]];
            if (lg.n == 1) break;
        }
    }

    // Relabel by smallest member index for a stable output.
    std::size_t max_label = 0;
    for (const std::size_t c : node_to_comm) max_label = std::max(max_label, c);
    constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> final_label(max_label + 1, kUnset);
    std::size_t next = 0;
    std::vector<std::size_t> out(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        if (final_label[node_to_comm[i]] == kUnset) final_label[node_to_comm[i]] = next++;
        out[i] = final_label[node_to_comm[i]];
    }
    return out;
}

/// One cluster of the KNN-graph partition: members, medoid center, and the
/// density cutoff d_c (filled by the scoring stage).
struct Cluster {
    std::vector<std::size_t> members;
    std::size_t center = 0;
    double dc = 0.0;
};

struct Clustering {
    std::vector<std::size_t> labels;  // node -> cluster id in [0, K)
    std::vector<Cluster> clusters;

    std::size_t count() const { return clusters.size(); }
};

/// Groups nodes by label and picks each cluster's medoid: the member with
/// the smallest sum of distances to its co-members, ties to the lowest index.
inline Clustering cluster_centers(const std::vector<std::size_t>& labels,
                                  const DistanceMatrix& d) {
    if (labels.size() != d.size()) {
        throw InvalidArgumentError("labels length does not match distance matrix size");
    }
    std::size_t k = 0;
    for (const std::size_t c : labels) k = std::max(k, c + 1);

    Clustering clustering;
    clustering.labels = labels;
    clustering.clusters.resize(k);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        clustering.clusters[labels[i]].members.push_back(i);
    }
    for (auto& cluster : clustering.clusters) {
        if (cluster.members.empty()) {
            throw InvalidArgumentError("cluster ids are not contiguous");
        }
        double best_sum = std::numeric_limits<double>::infinity();
        for (const std::size_t i : cluster.members) {
            double sum = 0.0;
            for (const std::size_t j : cluster.members) sum += d(i, j);
            if (sum < best_sum) {
                best_sum = sum;
                cluster.center = i;
            }
        }
    }
    return clustering;
}

}  // namespace rfad
