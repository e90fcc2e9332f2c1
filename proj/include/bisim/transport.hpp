#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bisim/metric_matrix.hpp"
#include "bisim/partition.hpp"
#include "bisim/tolerances.hpp"

namespace bisim {

/// Coupling of two distributions: mass(i, j) is moved from source i to target j.
class TransportPlan {
public:
    TransportPlan() = default;
    explicit TransportPlan(std::size_t n) : n_(n), mass_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return mass_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return mass_[i * n_ + j]; }

    std::vector<double> row_sums() const;
    std::vector<double> column_sums() const;
    double cost(const MetricMatrix& h) const;

private:
    std::size_t n_ = 0;
    std::vector<double> mass_;
};

/// Kantorovich distance together with an optimal plan and an h-Lipschitz dual potential.
struct TransportResult {
    /// Primal optimum: sum of plan * h.
    double value = 0.0;
    TransportPlan plan;
    /// f with f(x) - f(y) <= h(x, y); P(f) - Q(f) equals value at optimality.
    std::vector<double> potentials;
    /// P(f) - Q(f).
    double dual_value = 0.0;
};

/**
 * Exact Kantorovich distance T_K(h)(P, Q) on a finite support, solved as a
 * transportation problem by successive shortest augmenting paths.
 *
 * Zero-mass points stay in the index space but carry no flow. The plan and the
 * potentials are checked after the solve; a marginal error, a Lipschitz
 * violation or a duality gap beyond tol raises std::runtime_error. Mismatched
 * sizes, negative masses, total masses differing by more than tol.feasibility,
 * or a cost that is not a semimetric raise std::invalid_argument.
 */
TransportResult kantorovich(const MetricMatrix& h, std::span<const double> p, std::span<const double> q,
                            const Tolerances& tol = default_tolerances);

/**
 * Optimal transport cost only. Skips the cost-matrix validation and certificate
 * construction of kantorovich(); intended for the inner loop of metric iteration.
 */
double kantorovich_distance(const MetricMatrix& h, std::span<const double> p, std::span<const double> q,
                            const Tolerances& tol = default_tolerances);

/**
 * Same as kantorovich_distance for sparse inputs: masses p_mass sit on the
 * points p_index (indices into h), likewise for q.
 */
double sparse_kantorovich_distance(const MetricMatrix& h, std::span<const std::size_t> p_index,
                                   std::span<const double> p_mass, std::span<const std::size_t> q_index,
                                   std::span<const double> q_mass);

/// Half the L1 distance; equals sup over subsets X of |P(X) - Q(X)|.
double total_variation(std::span<const double> p, std::span<const double> q);

/// Mass per block of the partition.
std::vector<double> block_masses(std::span<const double> p, const Partition& partition);

/// Sup over unions X of partition blocks of |P(X) - Q(X)|.
double quotient_total_variation(std::span<const double> p, std::span<const double> q, const Partition& partition);

/// Cost 1 between states in different blocks, 0 within a block.
MetricMatrix quotient_discrete_metric(const Partition& partition);

} // namespace bisim
