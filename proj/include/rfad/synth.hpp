#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "rfad/dataset.hpp"
#include "rfad/errors.hpp"
#include "rfad/rng.hpp"

namespace rfad {

struct SynthConfig {
    std::size_t clusters = 2;
    std::size_t per_cluster = 150;
    std::size_t outliers = 0;
    std::size_t dims = 8;
    std::uint64_t seed = 0;
};

struct LabeledPoints {
    FeatureMatrix features;
    std::vector<int> labels;  // 1 = outlier
};

/// Unit-variance Gaussian clusters on axis-aligned centers (pairwise at least
/// 10 apart), plus uniform outliers drawn from the inlier bounding box
/// inflated 3x around its midpoint. Inlier rows come first, cluster by
/// cluster, then outliers.
inline LabeledPoints make_synthetic_benchmark(const SynthConfig& cfg) {
    if (cfg.clusters < 1) throw InvalidArgumentError("need at least 1 cluster");
    if (cfg.per_cluster < 1) throw InvalidArgumentError("need at least 1 point per cluster");
    if (cfg.dims < 1) throw InvalidArgumentError("need at least 1 dimension");

    FeatureSchema schema;
    for (std::size_t d = 0; d < cfg.dims; ++d) {
        schema.columns.push_back({"f" + std::to_string(d), ColumnKind::kNumeric});
    }
    const std::size_t inliers = cfg.clusters * cfg.per_cluster;
    FeatureMatrix x(schema, inliers + cfg.outliers);

    for (std::size_t c = 0; c < cfg.clusters; ++c) {
        // Center magnitude grows once the axes are exhausted, keeping every
        // pair of centers at least 10 apart.
        const std::size_t axis = c % cfg.dims;
        const double magnitude = 10.0 * static_cast<double>(1 + c / cfg.dims);
        Rng rng(derive_seed(cfg.seed, c));
        for (std::size_t p = 0; p < cfg.per_cluster; ++p) {
            const std::size_t row = c * cfg.per_cluster + p;
            for (std::size_t d = 0; d < cfg.dims; ++d) {
                const double center = d == axis ? magnitude : 0.0;
                x.set_numeric(row, d, center + rng.normal());
            }
        }
    }

    if (cfg.outliers > 0) {
        std::vector<double> lo(cfg.dims), hi(cfg.dims);
        for (std::size_t d = 0; d < cfg.dims; ++d) {
            lo[d] = x.numeric(0, d);
            hi[d] = x.numeric(0, d);
            for (std::size_t r = 1; r < inliers; ++r) {
                lo[d] = std::min(lo[d], x.numeric(r, d));
                hi[d] = std::max(hi[d], x.numeric(r, d));
            }
            const double mid = (lo[d] + hi[d]) / 2.0;
            const double half = std::max((hi[d] - lo[d]) / 2.0, 0.5);
            lo[d] = mid - 3.0 * half;
            hi[d] = mid + 3.0 * half;
        }
        Rng rng(derive_seed(cfg.seed, cfg.clusters));
        for (std::size_t o = 0; o < cfg.outliers; ++o) {
            for (std::size_t d = 0; d < cfg.dims; ++d) {
                x.set_numeric(inliers + o, d, rng.uniform(lo[d], hi[d]));
            }
        }
    }

    LabeledPoints out;
    out.features = std::move(x);
    out.labels.assign(inliers, 0);
    out.labels.resize(inliers + cfg.outliers, 1);
    return out;
}

}  // namespace rfad
