#include "rfad/baselines.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rfad/dataset.hpp"

namespace {

using namespace rfad;

NumericMatrix numeric(std::size_t rows, std::size_t cols, const std::vector<double>& data) {
    NumericMatrix m;
    m.rows = rows;
    m.cols = cols;
    for (std::size_t j = 0; j < cols; ++j) m.names.push_back("f" + std::to_string(j));
    m.data = data;
    return m;
}

NumericMatrix random_numeric(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> data(rows * cols);
    for (auto& v : data) v = u(eng);
    return numeric(rows, cols, data);
}

TEST(ToNumeric, OneHotLayoutFollowsAlphabetOrder) {
    FeatureSchema schema;
    schema.columns = {{"n0", ColumnKind::kNumeric}, {"c0", ColumnKind::kCategorical}};
    FeatureMatrix x(schema, 3);
    x.set_numeric(0, 0, 1.5);
    x.set_numeric(1, 0, -2.0);
    x.set_numeric(2, 0, 0.0);
    x.set_category(0, 1, "red");
    x.set_category(1, 1, "blue");
    x.set_category(2, 1, "green");

    const NumericMatrix m = to_numeric(x);
    ASSERT_EQ(m.cols, 4u);
    EXPECT_EQ(m.names, (std::vector<std::string>{"n0", "c0=blue", "c0=green", "c0=red"}));
    EXPECT_EQ(m.at(0, 0), 1.5);
    // Row 0 is "red" -> indicator in the last column only.
    EXPECT_EQ(m.at(0, 1), 0.0);
    EXPECT_EQ(m.at(0, 2), 0.0);
    EXPECT_EQ(m.at(0, 3), 1.0);
    EXPECT_EQ(m.at(1, 1), 1.0);
    EXPECT_EQ(m.at(2, 2), 1.0);
    EXPECT_EQ(m.at(1, 3), 0.0);
}

TEST(StandardizeColumns, PopulationMomentsAndConstantColumns) {
    NumericMatrix m = numeric(4, 2, {1, 7, 2, 7, 3, 7, 4, 7});
    standardize_columns(m);
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < 4; ++i) mean += m.at(i, 0);
    mean /= 4.0;
    for (std::size_t i = 0; i < 4; ++i) var += (m.at(i, 0) - mean) * (m.at(i, 0) - mean);
    var /= 4.0;
    EXPECT_NEAR(mean, 0.0, 1e-12);
    EXPECT_NEAR(var, 1.0, 1e-12);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(m.at(i, 1), 0.0);  // constant column
}

TEST(KnnOutlierScores, CollinearExample) {
    const NumericMatrix m = numeric(3, 1, {0, 1, 10});
    const auto scores = knn_outlier_scores(m, 1);
    EXPECT_DOUBLE_EQ(scores[0], 1.0);
    EXPECT_DOUBLE_EQ(scores[1], 1.0);
    EXPECT_DOUBLE_EQ(scores[2], 9.0);
}

TEST(KnnOutlierScores, DuplicateAndFarthestBoundary) {
    const NumericMatrix dup = numeric(3, 1, {0, 0, 5});
    EXPECT_EQ(knn_outlier_scores(dup, 1)[0], 0.0);

    const NumericMatrix m = numeric(3, 1, {0, 1, 10});
    const auto scores = knn_outlier_scores(m, 2);  // k = N - 1
    EXPECT_DOUBLE_EQ(scores[0], 10.0);
    EXPECT_DOUBLE_EQ(scores[1], 9.0);
    EXPECT_DOUBLE_EQ(scores[2], 10.0);
}

TEST(KnnOutlierScores, RejectsOutOfRangeK) {
    const NumericMatrix m = random_numeric(5, 2, 1);
    EXPECT_THROW(knn_outlier_scores(m, 0), InvalidArgumentError);
    EXPECT_THROW(knn_outlier_scores(m, 5), KTooLargeError);
}

NumericMatrix unit_grid(std::size_t side) {
    std::vector<double> data;
    for (std::size_t i = 0; i < side; ++i) {
        for (std::size_t j = 0; j < side; ++j) {
            data.push_back(static_cast<double>(i));
            data.push_back(static_cast<double>(j));
        }
    }
    return numeric(side * side, 2, data);
}

TEST(LofScores, GridInteriorNearOne) {
    const NumericMatrix grid = unit_grid(10);
    const auto scores = lof_scores(grid, 5);
    for (std::size_t i = 2; i <= 7; ++i) {
        for (std::size_t j = 2; j <= 7; ++j) {
            EXPECT_NEAR(scores[i * 10 + j], 1.0, 0.2) << "grid point " << i << "," << j;
        }
    }
    for (const double s : scores) EXPECT_GT(s, 0.0);
}

TEST(LofScores, DuplicatedPointIsNotAnOutlier) {
    // Point duplicated k + 1 times with k = 3; zero reach distances are
    // floored by the k-distance, so its LOF collapses to 1.
    const NumericMatrix m =
        numeric(8, 2, {0, 0, 0, 0, 0, 0, 0, 0, 5, 0, 0, 5, 5, 5, 10, 10});
    const auto scores = lof_scores(m, 3);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_LE(scores[i], 1.0 + 1e-9);
}

TEST(LofScores, FarOutlierScoresHigh) {
    std::mt19937_64 eng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> data;
    for (int i = 0; i < 30; ++i) {
        data.push_back(u(eng));
        data.push_back(u(eng));
    }
    data.push_back(100.0);
    data.push_back(100.0);
    const auto scores = lof_scores(numeric(31, 2, data), 5);
    EXPECT_GT(scores[30], 2.0);
    for (std::size_t i = 0; i < 30; ++i) EXPECT_LT(scores[i], scores[30]);
}

TEST(IsolationForest, ExtremeOutlierAlwaysRanksFirst) {
    std::mt19937_64 eng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> data;
    for (int i = 0; i < 40; ++i) {
        data.push_back(u(eng));
        data.push_back(u(eng));
    }
    data.push_back(50.0);
    data.push_back(50.0);
    const NumericMatrix m = numeric(41, 2, data);

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto scores = isolation_forest_scores(m, 100, 0, seed);
        const auto max_it = std::max_element(scores.begin(), scores.end());
        EXPECT_EQ(max_it - scores.begin(), 40) << "seed " << seed;
        for (const double s : scores) {
            EXPECT_GT(s, 0.0);
            EXPECT_LT(s, 1.0);
        }
    }
}

TEST(IsolationForest, FullSubsampleBoundaryAndDeterminism) {
    const NumericMatrix m = random_numeric(30, 3, 9);
    const auto full = isolation_forest_scores(m, 50, 30, 3);  // every tree sees all rows
    ASSERT_EQ(full.size(), 30u);
    EXPECT_EQ(full, isolation_forest_scores(m, 50, 30, 3));
    EXPECT_EQ(isolation_forest_scores(m, 50, 0, 3), isolation_forest_scores(m, 50, 0, 3));
    // Oversized subsample clamps to N.
    EXPECT_EQ(isolation_forest_scores(m, 50, 1000, 3), full);
}

TEST(IsolationForest, Validation) {
    const NumericMatrix m = random_numeric(10, 2, 4);
    EXPECT_THROW(isolation_forest_scores(m, 0, 0, 1), InvalidArgumentError);
    EXPECT_THROW(isolation_forest_scores(m, 10, 1, 1), InvalidArgumentError);
    const NumericMatrix one = random_numeric(1, 2, 4);
    EXPECT_THROW(isolation_forest_scores(one, 10, 0, 1), InvalidArgumentError);
}

TEST(Baselines, DistanceBasedScoresArePermutationEquivariant) {
    const std::size_t n = 20;
    const NumericMatrix m = random_numeric(n, 3, 77);
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = n - 1 - i;
    NumericMatrix pm = m;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < m.cols; ++c) pm.at(perm[i], c) = m.at(i, c);
    }

    for (const std::size_t k : {1ul, 4ul}) {
        const auto base_knn = knn_outlier_scores(m, k);
        const auto perm_knn = knn_outlier_scores(pm, k);
        const auto base_lof = lof_scores(m, k);
        const auto perm_lof = lof_scores(pm, k);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_EQ(perm_knn[perm[i]], base_knn[i]);
            EXPECT_DOUBLE_EQ(perm_lof[perm[i]], base_lof[i]);
        }
    }
}

TEST(Baselines, MatrixOverloadsMatchDistanceVersions) {
    const NumericMatrix m = random_numeric(15, 2, 31);
    const DistanceMatrix d = euclidean_distances(m);
    EXPECT_EQ(knn_outlier_scores(m, 3), knn_outlier_scores(d, 3));
    EXPECT_EQ(lof_scores(m, 3), lof_scores(d, 3));

    // Euclidean distances are symmetric with a zero diagonal.
    for (std::size_t i = 0; i < m.rows; ++i) {
        EXPECT_EQ(d(i, i), 0.0);
        for (std::size_t j = 0; j < m.rows; ++j) EXPECT_EQ(d(i, j), d(j, i));
    }
}

TEST(BaselineFeatures, OneHotPlusStandardization) {
    const FeatureMatrix x = oracle::random_mixed_matrix(25, 2, 1, 3);
    const NumericMatrix m = baseline_features(x);
    ASSERT_GT(m.cols, 2u);  // categorical column expanded
    for (std::size_t j = 0; j < m.cols; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) mean += m.at(i, j);
        EXPECT_NEAR(mean / static_cast<double>(m.rows), 0.0, 1e-12);
    }
}

}  // namespace
