#pragma once

namespace bisim {

/// Numerical tolerances shared by the solvers and validators.
struct Tolerances {
    /// Allowed deviation of a transition row or distribution from total mass 1.
    double row_sum = 1e-12;
    /// Marginal and Lipschitz feasibility of transport plans and potentials.
    double feasibility = 1e-9;
    /// Allowed |primal - dual| of a transport solve.
    double duality_gap = 1e-9;
    /// Slack allowed in the triangle inequality of cost / metric matrices.
    double triangle = 1e-9;
};

inline constexpr Tolerances default_tolerances{};

} // namespace bisim
