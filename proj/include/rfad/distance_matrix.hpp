#pragma once

#include <cstddef>
#include <vector>

namespace rfad {

/// Dense symmetric matrix of pairwise distances in [0, 1] with a zero
/// diagonal. Writes go through set() so symmetry holds by construction.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

    void set(std::size_t i, std::size_t j, double v) {
        values_[i * n_ + j] = v;
        values_[j * n_ + i] = v;
    }

    const std::vector<double>& values() const { return values_; }

private:
    std::size_t n_ = 0;
    std::vector<double> values_;
};

}  // namespace rfad
