#pragma once

#include <cstddef>
#include <vector>

#include "bisim/mdp.hpp"
#include "bisim/metric_matrix.hpp"
#include "bisim/partition.hpp"

namespace bisim {

/// Upper bound B / (1 - c) on every metric in the iteration lattice.
double metric_bound(const FiniteMdp& mdp, double c);

struct MetricStepOptions {
    /// Worker threads for the per-pair transport solves; 0 picks hardware concurrency.
    std::size_t threads = 0;
};

/**
 * One application of the bisimulation operator:
 *   F(h)(s, t) = max_a ( |r(s, a) - r(t, a)| + c * T_K(h)(P(s, a), P(t, a)) ).
 * Throws std::invalid_argument if c is outside (0, 1), h has the wrong size, or
 * h is not symmetric with zero diagonal and entries in [0, B / (1 - c)].
 */
MetricMatrix metric_step(const FiniteMdp& mdp, double c, const MetricMatrix& h,
                         const MetricStepOptions& options = {});

struct FixedPointOptions {
    MetricStepOptions step;
    /// Keep every iterate h_0, h_1, ... (h_0 = 0) in the result.
    bool record_trace = false;
    /// Safety cap; exceeding it throws std::runtime_error.
    std::size_t max_iterations = 100000;
};

struct FixedPointResult {
    MetricMatrix metric;
    std::size_t iterations = 0;
    /// Bound on ||metric - d_fix|| from the last step size: c / (1 - c) * ||h_n - h_{n-1}||.
    double certified_error = 0.0;
    /// ||h_{n+1} - h_n|| for every step taken.
    std::vector<double> step_sizes;
    std::vector<MetricMatrix> trace;
};

/**
 * Iterates the operator from h_0 = 0 until ||h_{n+1} - h_n|| <= eps (1 - c) / c,
 * so that ||h_{n+1} - d_fix|| <= eps.
 */
FixedPointResult fixed_point_metric(const FiniteMdp& mdp, double c, double eps,
                                    const FixedPointOptions& options = {});

/**
 * Coarsest stable partition by signature refinement: states share a block when
 * their rewards agree per action and their transition mass into every current
 * block agrees per action, each within tol.
 */
Partition bisimulation_partition(const FiniteMdp& mdp, double tol = 0.0);

struct PairDisagreement {
    std::size_t first;
    std::size_t second;
    double distance;
    bool same_block;
};

struct KernelReport {
    double tol = 0.0;
    /// Same block but distance > 10 tol, or different blocks but distance <= tol.
    std::vector<PairDisagreement> failures;
    /// Same block with distance in (tol, 10 tol].
    std::vector<PairDisagreement> indeterminate;

    bool agrees() const { return failures.empty(); }
};

/// Compares the zero set of a metric with a partition, pair by pair.
KernelReport kernel_check(const MetricMatrix& metric, const Partition& partition, double tol);

struct PerturbationResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double reward_term = 0.0;
    double transition_term = 0.0;
    /// Allowed numerical slack 2 eps from the two certified metric solves.
    double slack = 0.0;

    bool holds() const { return lhs <= rhs + slack; }
};

/**
 * Continuity of the metric in the model parameters:
 *   ||d1 - d2|| <= 2/(1-c) max_a ||r1 - r2|| + 2Bc/(1-c)^2 sup_{a,s} TV(P1, P2)
 * with B the larger of the two reward spans. Both metrics are computed to eps.
 */
PerturbationResult perturbation_bound(const FiniteMdp& first, const FiniteMdp& second, double c, double eps,
                                      const FixedPointOptions& options = {});

struct LipschitzCheck {
    /// max over pairs of |V(s) - V(t)| - d(s, t).
    double max_violation = 0.0;
    /// 2 eps_value + eps_metric.
    double allowance = 0.0;

    bool holds() const { return max_violation <= allowance; }
};

/**
 * Checks that V* is 1-Lipschitz with respect to the metric. V* is computed by
 * value iteration to eps_value; the metric is assumed accurate to eps_metric.
 * Requires gamma <= c.
 */
LipschitzCheck value_lipschitz_check(const FiniteMdp& mdp, double gamma, double c, const MetricMatrix& metric,
                                     double eps_value, double eps_metric);

} // namespace bisim
