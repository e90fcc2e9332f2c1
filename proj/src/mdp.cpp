#include "bisim/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bisim {

FiniteMdp::FiniteMdp(std::size_t n_states, std::vector<std::string> actions,
                     std::vector<double> rewards, std::vector<double> transitions)
    : n_states_(n_states), actions_(std::move(actions)), rewards_(std::move(rewards)),
      transitions_(std::move(transitions)) {
    if (n_states_ == 0) {
        throw std::invalid_argument("FiniteMdp: n_states must be positive");
    }
    if (actions_.empty()) {
        throw std::invalid_argument("FiniteMdp: at least one action is required");
    }
    if (rewards_.size() != n_states_ * actions_.size()) {
        throw std::invalid_argument("FiniteMdp: rewards must have n_states * n_actions entries");
    }
    if (transitions_.size() != n_states_ * actions_.size() * n_states_) {
        throw std::invalid_argument(
            "FiniteMdp: transitions must have n_states * n_actions * n_states entries");
    }
}

namespace {

std::string describe(const FiniteMdp& mdp, std::size_t s, std::size_t a, const std::string& what) {
    std::ostringstream os;
    os << "state " << s << " action " << mdp.actions()[a] << ": " << what;
    return os.str();
}

} // namespace

std::vector<Violation> validate_mdp(const FiniteMdp& mdp, const Tolerances& tol) {
    std::vector<Violation> report;
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
            const double r = mdp.reward(s, a);
            if (!std::isfinite(r)) {
                report.push_back({s, a, r, describe(mdp, s, a, "reward is not finite")});
            }
            const auto row = mdp.row(s, a);
            double most_negative = 0.0;
            bool finite = true;
            for (double p : row) {
                finite = finite && std::isfinite(p);
                most_negative = std::min(most_negative, p);
            }
            if (!finite) {
                report.push_back({s, a, std::numeric_limits<double>::quiet_NaN(),
                                  describe(mdp, s, a, "transition row has non-finite entries")});
                continue;
            }
            if (most_negative < 0.0) {
                std::ostringstream os;
                os << "negative mass " << most_negative;
                report.push_back({s, a, most_negative, describe(mdp, s, a, os.str())});
            }
            const double sum = std::accumulate(row.begin(), row.end(), 0.0);
            if (std::abs(sum - 1.0) > tol.row_sum) {
                std::ostringstream os;
                os.precision(12);
                os << "row sum " << sum << " != 1";
                report.push_back({s, a, sum, describe(mdp, s, a, os.str())});
            }
        }
    }
    return report;
}

void require_valid(const FiniteMdp& mdp, const Tolerances& tol) {
    const auto report = validate_mdp(mdp, tol);
    if (!report.empty()) {
        throw std::invalid_argument("invalid MDP: " + report.front().message);
    }
}

FiniteMdp renormalized(const FiniteMdp& mdp) {
    FiniteMdp out = mdp;
    for (std::size_t s = 0; s < out.n_states(); ++s) {
        for (std::size_t a = 0; a < out.n_actions(); ++a) {
            auto row = out.row(s, a);
            const double sum = std::accumulate(row.begin(), row.end(), 0.0);
            if (!(sum > 0.0)) {
                throw std::invalid_argument(describe(mdp, s, a, "cannot renormalize a zero row"));
            }
            for (double& p : row) {
                p /= sum;
            }
        }
    }
    return out;
}

double reward_span(const FiniteMdp& mdp) {
    double span = 0.0;
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
        double lo = mdp.reward(0, a);
        double hi = lo;
        for (std::size_t s = 1; s < mdp.n_states(); ++s) {
            lo = std::min(lo, mdp.reward(s, a));
            hi = std::max(hi, mdp.reward(s, a));
        }
        span = std::max(span, hi - lo);
    }
    return span;
}

namespace {

double action_value(const FiniteMdp& mdp, std::size_t s, std::size_t a, double gamma,
                    std::span<const double> values) {
    const auto row = mdp.row(s, a);
    double expected = 0.0;
    for (std::size_t t = 0; t < row.size(); ++t) {
        expected += row[t] * values[t];
    }
    return mdp.reward(s, a) + gamma * expected;
}

void check_discount(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("discount factor must lie in (0, 1)");
    }
}

} // namespace

ValueVector bellman_backup(const FiniteMdp& mdp, double gamma, std::span<const double> values) {
    if (values.size() != mdp.n_states()) {
        throw std::invalid_argument("bellman_backup: value vector has the wrong length");
    }
    ValueVector next(mdp.n_states());
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        double best = action_value(mdp, s, 0, gamma, values);
        for (std::size_t a = 1; a < mdp.n_actions(); ++a) {
            best = std::max(best, action_value(mdp, s, a, gamma, values));
        }
        next[s] = best;
    }
    return next;
}

ValueIterationResult value_iteration(const FiniteMdp& mdp, double gamma, double eps) {
    check_discount(gamma);
    if (!(eps > 0.0)) {
        throw std::invalid_argument("value_iteration: epsilon must be positive");
    }
    require_valid(mdp);
    const double threshold = eps * (1.0 - gamma) / gamma;

    ValueIterationResult result;
    result.values.assign(mdp.n_states(), 0.0);
    while (true) {
        ValueVector next = bellman_backup(mdp, gamma, result.values);
        double update = 0.0;
        for (std::size_t s = 0; s < next.size(); ++s) {
            update = std::max(update, std::abs(next[s] - result.values[s]));
        }
        result.values = std::move(next);
        ++result.iterations;
        result.last_update = update;
        if (update <= threshold) {
            break;
        }
    }
    result.certified_error = gamma / (1.0 - gamma) * result.last_update;
    return result;
}

Policy greedy_policy(const FiniteMdp& mdp, std::span<const double> values, double gamma) {
    if (values.size() != mdp.n_states()) {
        throw std::invalid_argument("greedy_policy: value vector has the wrong length");
    }
    Policy policy(mdp.n_states(), 0);
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        double best = action_value(mdp, s, 0, gamma, values);
        for (std::size_t a = 1; a < mdp.n_actions(); ++a) {
            const double q = action_value(mdp, s, a, gamma, values);
            if (q > best) {
                best = q;
                policy[s] = a;
            }
        }
    }
    return policy;
}

} // namespace bisim
