#pragma once

#include <cstddef>
#include <vector>

#include "bisim/mdp.hpp"

namespace bisim::toy {

// Continuous benchmark on S = [0, 1] with actions a and b:
// r(s, a) = 1 - s, r(s, b) = s, action a jumps uniformly over S, action b stays put.
// Discretized on the uniform grid B_k = [k/n, (k+1)/n).

struct ToySpec {
    std::size_t n = 1;
    double gamma = 0.5;
    double c = 0.5;
};

/// Midpoint (2k + 1) / (2n) of block k.
double block_center(std::size_t k, std::size_t n);

/// Block-averaged grid MDP with n states.
FiniteMdp toy_mdp(std::size_t n);
inline FiniteMdp toy_mdp(const ToySpec& spec) { return toy_mdp(spec.n); }

/// |x - y| / (1 - c).
double toy_metric_closed_form(double x, double y, double c);

/// Published piecewise value: 1 - x + gamma / (2 (1 - gamma)) below 1/2, x / (1 - gamma) above.
double toy_value_closed_form(double x, double gamma);

struct ConvergenceRow {
    std::size_t n = 0;
    /// max_{k,l} |d(B_k, B_l) - |x_k - x_l| / (1 - c)|.
    double max_metric_dev = 0.0;
    /// max_k |V*_quotient(B_k) - closed form at x_k|.
    double max_value_dev = 0.0;
    /// 1 / (n (1 - gamma)).
    double certified_bound = 0.0;
    /// Certified error of the computed metric.
    double metric_error = 0.0;
    /// max_k sup_{x in B_k} |closed form(x) - V*_quotient(B_k)|.
    double max_within_block_spread = 0.0;
};

struct ExperimentOptions {
    double metric_eps = 1e-6;
    double value_eps = 1e-12;
};

/// Runs the grid MDP for every n and compares against the closed forms. Requires gamma <= c.
std::vector<ConvergenceRow> convergence_experiment(const std::vector<std::size_t>& ns, double c, double gamma,
                                                   const ExperimentOptions& options = {});

} // namespace bisim::toy
