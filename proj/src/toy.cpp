#include "bisim/toy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bisim/bisim_metric.hpp"

namespace bisim::toy {

namespace {

void check_unit(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
    }
}

void check_open_unit(double x, const char* what) {
    if (!(x > 0.0 && x < 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in (0, 1)");
    }
}

} // namespace

double block_center(std::size_t k, std::size_t n) {
    return static_cast<double>(2 * k + 1) / static_cast<double>(2 * n);
}

FiniteMdp toy_mdp(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("toy_mdp: need at least one block");
    }
    std::vector<double> rewards(n * 2);
    std::vector<double> transitions(n * 2 * n, 0.0);
    const double uniform = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = block_center(k, n);
        rewards[k * 2 + 0] = 1.0 - x;
        rewards[k * 2 + 1] = x;
        std::fill_n(transitions.begin() + static_cast<std::ptrdiff_t>((k * 2 + 0) * n), n, uniform);
        transitions[(k * 2 + 1) * n + k] = 1.0;
    }
    return FiniteMdp(n, {"a", "b"}, std::move(rewards), std::move(transitions));
}

double toy_metric_closed_form(double x, double y, double c) {
    check_unit(x, "x");
    check_unit(y, "y");
    check_open_unit(c, "c");
    return std::abs(x - y) / (1.0 - c);
}

double toy_value_closed_form(double x, double gamma) {
    check_unit(x, "x");
    check_open_unit(gamma, "gamma");
    if (x < 0.5) {
        return 1.0 - x + gamma / (2.0 * (1.0 - gamma));
    }
    return x / (1.0 - gamma);
}

std::vector<ConvergenceRow> convergence_experiment(const std::vector<std::size_t>& ns, double c, double gamma,
                                                   const ExperimentOptions& options) {
    check_open_unit(c, "c");
    check_open_unit(gamma, "gamma");
    if (gamma > c) {
        throw std::invalid_argument("convergence_experiment: requires gamma <= c");
    }
    std::vector<ConvergenceRow> rows;
    rows.reserve(ns.size());
    for (std::size_t n : ns) {
        const FiniteMdp mdp = toy_mdp(n);
        ConvergenceRow row;
        row.n = n;
        row.certified_bound = 1.0 / (static_cast<double>(n) * (1.0 - gamma));

        const auto metric = fixed_point_metric(mdp, c, options.metric_eps);
        row.metric_error = metric.certified_error;
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t l = 0; l < n; ++l) {
                const double expected = toy_metric_closed_form(block_center(k, n), block_center(l, n), c);
                row.max_metric_dev = std::max(row.max_metric_dev, std::abs(metric.metric(k, l) - expected));
            }
        }

        // The grid MDP is its own quotient over the blocks B_k.
        const auto values = value_iteration(mdp, gamma, options.value_eps).values;
        for (std::size_t k = 0; k < n; ++k) {
            const double x = block_center(k, n);
            row.max_value_dev = std::max(row.max_value_dev, std::abs(values[k] - toy_value_closed_form(x, gamma)));

            // The closed form is continuous and piecewise linear, so its extremes
            // over a block sit at the block ends or at the kink 1/2.
            const double lo = static_cast<double>(k) / static_cast<double>(n);
            const double hi = static_cast<double>(k + 1) / static_cast<double>(n);
            std::vector<double> probes{lo, hi};
            if (lo < 0.5 && 0.5 < hi) {
                probes.push_back(0.5);
            }
            for (double p : probes) {
                row.max_within_block_spread =
                    std::max(row.max_within_block_spread, std::abs(toy_value_closed_form(p, gamma) - values[k]));
            }
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace bisim::toy
