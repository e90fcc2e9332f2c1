#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bisim/tolerances.hpp"

namespace bisim {

/// Dense n x n matrix of pairwise distances (a semimetric on a finite set).
class MetricMatrix {
public:
    MetricMatrix() = default;
    explicit MetricMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}
    MetricMatrix(std::size_t n, std::vector<double> entries);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }
    const std::vector<double>& entries() const { return d_; }

    double max_entry() const;
    bool operator==(const MetricMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

/// Sup-norm distance between two matrices of the same size.
double sup_distance(const MetricMatrix& a, const MetricMatrix& b);

/// Distance 1 between distinct points, 0 on the diagonal.
MetricMatrix discrete_metric(std::size_t n);

/**
 * Checks zero diagonal, symmetry, nonnegativity, the triangle inequality (within
 * tol.triangle) and, when upper_bound is finite, d <= upper_bound. Returns one
 * message per violated condition; empty when all hold.
 */
std::vector<std::string> semimetric_violations(const MetricMatrix& d, const Tolerances& tol = default_tolerances,
                                               double upper_bound = -1.0);

} // namespace bisim
