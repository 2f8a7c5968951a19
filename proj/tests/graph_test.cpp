#include "rfad/graph.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <queue>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "rfad/distance_matrix.hpp"

namespace {

using namespace rfad;

TEST(DefaultK, CeilLogWithFloorAndCap) {
    EXPECT_EQ(default_k(3), 2u);    // ceil(ln 3) = 2
    EXPECT_EQ(default_k(100), 5u);  // ceil(ln 100) = 5
    EXPECT_EQ(default_k(2), 1u);    // floor at 1
    EXPECT_EQ(default_k(310), 6u);
    EXPECT_THROW(default_k(1), InvalidArgumentError);
}

TEST(KnnGraph, NearestNeighborUnion) {
    DistanceMatrix d(3);
    d.set(0, 1, 0.1);
    d.set(0, 2, 0.9);
    d.set(1, 2, 0.5);
    const NeighborGraph g = knn_graph(d, 1);
    EXPECT_EQ(g.adj[0], (std::vector<std::size_t>{1}));
    EXPECT_EQ(g.adj[1], (std::vector<std::size_t>{0, 2}));  // node 2's nearest is 1
    EXPECT_EQ(g.adj[2], (std::vector<std::size_t>{1}));
    EXPECT_EQ(g.edge_count(), 2u);
}

TEST(KnnGraph, TiesGoToLowerIndex) {
    DistanceMatrix d(3);
    d.set(0, 1, 0.5);
    d.set(0, 2, 0.5);
    d.set(1, 2, 0.5);
    const NeighborGraph g = knn_graph(d, 1);
    EXPECT_EQ(g.adj[0], (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(g.adj[1], (std::vector<std::size_t>{0}));
    EXPECT_EQ(g.adj[2], (std::vector<std::size_t>{0}));
}

TEST(KnnGraph, MaxKIsComplete) {
    const DistanceMatrix d = oracle::random_distances(6, 3);
    const NeighborGraph g = knn_graph(d, 5);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(g.adj[i].size(), 5u);
    EXPECT_EQ(g.edge_count(), 15u);
}

TEST(KnnGraph, RejectsOutOfRangeK) {
    const DistanceMatrix d = oracle::random_distances(4, 0);
    EXPECT_THROW(knn_graph(d, 0), InvalidArgumentError);
    EXPECT_THROW(knn_graph(d, 4), KTooLargeError);
}

TEST(KnnGraph, StructuralInvariants) {
    for (std::uint64_t trial = 0; trial < 8; ++trial) {
        const std::size_t n = 10 + trial * 3;
        const std::size_t k = 1 + trial % 4;
        const DistanceMatrix d = oracle::random_distances(n, trial + 100);
        const NeighborGraph g = knn_graph(d, k);
        ASSERT_EQ(g.n, n);
        EXPECT_LE(g.edge_count(), n * k);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_GE(g.adj[i].size(), std::min(k, n - 1));
            EXPECT_TRUE(std::is_sorted(g.adj[i].begin(), g.adj[i].end()));
            EXPECT_EQ(std::adjacent_find(g.adj[i].begin(), g.adj[i].end()), g.adj[i].end());
            EXPECT_EQ(std::count(g.adj[i].begin(), g.adj[i].end(), i), 0);

            // The k nearest of i (ties to lower index) must all be adjacent.
            std::vector<std::pair<double, std::size_t>> cand;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) cand.emplace_back(d(i, j), j);
            }
            std::sort(cand.begin(), cand.end());
            for (std::size_t t = 0; t < k; ++t) {
                EXPECT_TRUE(std::binary_search(g.adj[i].begin(), g.adj[i].end(), cand[t].second));
            }
        }
    }
}

NeighborGraph graph_from_edges(std::size_t n,
                               const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    NeighborGraph g;
    g.n = n;
    g.adj.resize(n);
    for (const auto& [a, b] : edges) {
        g.adj[a].push_back(b);
        g.adj[b].push_back(a);
    }
    for (auto& a : g.adj) std::sort(a.begin(), a.end());
    return g;
}

// Canonical partition representation: sorted list of sorted member sets.
std::set<std::vector<std::size_t>> as_partition(const std::vector<std::size_t>& labels) {
    std::size_t k = 0;
    for (const std::size_t c : labels) k = std::max(k, c + 1);
    std::vector<std::vector<std::size_t>> groups(k);
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
    return {groups.begin(), groups.end()};
}

TEST(DetectCommunities, DisjointTrianglesSplitIntoComponents) {
    const NeighborGraph g =
        graph_from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
    for (const std::uint64_t seed : {0ull, 1ull, 2ull, 7ull}) {
        const auto labels = detect_communities(g, seed);
        EXPECT_EQ(as_partition(labels),
                  (std::set<std::vector<std::size_t>>{{0, 1, 2}, {3, 4, 5}}));
    }
}

TEST(DetectCommunities, CompleteGraphStaysTogether) {
    const NeighborGraph g =
        graph_from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    for (const std::uint64_t seed : {0ull, 1ull, 5ull}) {
        const auto labels = detect_communities(g, seed);
        EXPECT_EQ(as_partition(labels), (std::set<std::vector<std::size_t>>{{0, 1, 2, 3}}));
    }
}

TEST(DetectCommunities, BridgedCliquesSplitAtTheBridge) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = i + 1; j < 5; ++j) {
            edges.emplace_back(i, j);
            edges.emplace_back(i + 5, j + 5);
        }
    }
    edges.emplace_back(4, 5);  // bridge
    const NeighborGraph g = graph_from_edges(10, edges);
    for (const std::uint64_t seed : {0ull, 1ull, 2ull, 3ull}) {
        const auto labels = detect_communities(g, seed);
        EXPECT_EQ(as_partition(labels),
                  (std::set<std::vector<std::size_t>>{{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}}));
    }
}

TEST(DetectCommunities, SingleEdgePairMerges) {
    const NeighborGraph g = graph_from_edges(2, {{0, 1}});
    const auto labels = detect_communities(g, 0);
    EXPECT_EQ(labels, (std::vector<std::size_t>{0, 0}));
}

std::vector<std::size_t> component_of(const NeighborGraph& g) {
    std::vector<std::size_t> comp(g.n, g.n);
    std::size_t next = 0;
    for (std::size_t s = 0; s < g.n; ++s) {
        if (comp[s] != g.n) continue;
        std::queue<std::size_t> q;
        q.push(s);
        comp[s] = next;
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop();
            for (const std::size_t v : g.adj[u]) {
                if (comp[v] == g.n) {
                    comp[v] = next;
                    q.push(v);
                }
            }
        }
        ++next;
    }
    return comp;
}

TEST(DetectCommunities, PartitionIsValidAndRespectsComponents) {
    for (std::uint64_t trial = 0; trial < 6; ++trial) {
        const std::size_t n = 20 + trial * 5;
        const DistanceMatrix d = oracle::random_distances(n, trial + 40);
        const NeighborGraph g = knn_graph(d, 3);
        const auto labels = detect_communities(g, trial);
        ASSERT_EQ(labels.size(), n);

        // Contiguous ids in [0, K), every community non-empty.
        std::size_t k = 0;
        for (const std::size_t c : labels) k = std::max(k, c + 1);
        std::vector<std::size_t> sizes(k, 0);
        for (const std::size_t c : labels) ++sizes[c];
        for (const std::size_t s : sizes) EXPECT_GT(s, 0u);

        // No community spans two connected components.
        const auto comp = component_of(g);
        std::vector<std::size_t> community_comp(k, n);
        for (std::size_t i = 0; i < n; ++i) {
            if (community_comp[labels[i]] == n) {
                community_comp[labels[i]] = comp[i];
            } else {
                EXPECT_EQ(community_comp[labels[i]], comp[i]);
            }
        }

        // Deterministic under the seed.
        EXPECT_EQ(labels, detect_communities(g, trial));
    }
}

TEST(DetectCommunities, PermutationEquivariantOnForcedStructure) {
    const std::vector<std::pair<std::size_t, std::size_t>> edges = {
        {0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}};
    const NeighborGraph g = graph_from_edges(6, edges);
    const std::vector<std::size_t> perm = {5, 3, 1, 0, 2, 4};  // node i -> perm[i]

    std::vector<std::pair<std::size_t, std::size_t>> permuted;
    for (const auto& [a, b] : edges) permuted.emplace_back(perm[a], perm[b]);
    const NeighborGraph pg = graph_from_edges(6, permuted);

    const auto base = detect_communities(g, 0);
    const auto moved = detect_communities(pg, 0);
    std::vector<std::size_t> expected(6);
    for (std::size_t i = 0; i < 6; ++i) expected[perm[i]] = base[i];
    EXPECT_EQ(as_partition(moved), as_partition(expected));
}

TEST(ClusterCenters, MedoidExamples) {
    {
        DistanceMatrix d(3);
        d.set(0, 1, 0.1);
        d.set(0, 2, 0.1);
        d.set(1, 2, 0.9);
        const Clustering c = cluster_centers({0, 0, 0}, d);
        ASSERT_EQ(c.count(), 1u);
        EXPECT_EQ(c.clusters[0].center, 0u);  // row sums 0.2, 1.0, 1.0
        EXPECT_EQ(c.labels, (std::vector<std::size_t>{0, 0, 0}));
    }
    {
        // Singleton cluster: the lone node is its own center.
        const DistanceMatrix d = oracle::random_distances(3, 8);
        const Clustering c = cluster_centers({0, 1, 1}, d);
        ASSERT_EQ(c.count(), 2u);
        EXPECT_EQ(c.clusters[0].members, (std::vector<std::size_t>{0}));
        EXPECT_EQ(c.clusters[0].center, 0u);
    }
    {
        // Symmetric pair {4, 7}: tie broken to the lowest index.
        DistanceMatrix d(8);
        d.set(4, 7, 0.3);
        std::vector<std::size_t> labels(8, 0);
        labels[4] = labels[7] = 1;
        const Clustering c = cluster_centers(labels, d);
        EXPECT_EQ(c.clusters[1].members, (std::vector<std::size_t>{4, 7}));
        EXPECT_EQ(c.clusters[1].center, 4u);
    }
}

TEST(ClusterCenters, RejectsInvalidLabelings) {
    const DistanceMatrix d = oracle::random_distances(3, 9);
    EXPECT_THROW(cluster_centers({0, 1}, d), InvalidArgumentError);      // length mismatch
    EXPECT_THROW(cluster_centers({0, 2, 2}, d), InvalidArgumentError);   // gap in ids
}

TEST(ClusterCenters, MatchesBruteForceMedoids) {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5 + trial % 30;
        const std::size_t k = 1 + trial % std::min<std::size_t>(5, n);
        const DistanceMatrix d = oracle::random_distances(n, trial + 500);
        const auto labels = oracle::random_labels(n, k, trial + 900);
        const Clustering c = cluster_centers(labels, d);
        ASSERT_EQ(c.count(), k);
        for (const auto& cluster : c.clusters) {
            EXPECT_EQ(cluster.center, oracle::medoid(cluster.members, d));
            // Medoid property: no member beats the center's row sum.
            double center_sum = 0.0;
            for (const std::size_t j : cluster.members) center_sum += d(cluster.center, j);
            for (const std::size_t i : cluster.members) {
                double sum = 0.0;
                for (const std::size_t j : cluster.members) sum += d(i, j);
                EXPECT_GE(sum, center_sum - 1e-15);
            }
        }
    }
}

}  // namespace
