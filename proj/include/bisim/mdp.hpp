#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bisim/tolerances.hpp"

namespace bisim {

/**
 * Finite Markov decision process with a fixed action set shared by all states.
 *
 * Rewards are stored state-major (r[s][a]); transitions as one probability row
 * per (state, action) pair over all states. The constructor only checks shapes;
 * stochasticity is checked by validate_mdp().
 */
class FiniteMdp {
public:
    FiniteMdp() = default;
    FiniteMdp(std::size_t n_states, std::vector<std::string> actions,
              std::vector<double> rewards, std::vector<double> transitions);

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return actions_.size(); }
    const std::vector<std::string>& actions() const { return actions_; }

    double reward(std::size_t s, std::size_t a) const { return rewards_[s * n_actions() + a]; }
    double& reward(std::size_t s, std::size_t a) { return rewards_[s * n_actions() + a]; }

    std::span<const double> row(std::size_t s, std::size_t a) const {
        return {transitions_.data() + (s * n_actions() + a) * n_states_, n_states_};
    }
    std::span<double> row(std::size_t s, std::size_t a) {
        return {transitions_.data() + (s * n_actions() + a) * n_states_, n_states_};
    }

    const std::vector<double>& rewards() const { return rewards_; }
    const std::vector<double>& transitions() const { return transitions_; }

    bool operator==(const FiniteMdp&) const = default;

private:
    std::size_t n_states_ = 0;
    std::vector<std::string> actions_;
    std::vector<double> rewards_;
    std::vector<double> transitions_;
};

using ValueVector = std::vector<double>;
/// Action index per state.
using Policy = std::vector<std::size_t>;

struct Violation {
    std::size_t state;
    std::size_t action;
    /// Offending magnitude: the row sum, the most negative entry, or the reward.
    double magnitude;
    std::string message;
};

/// Lists every broken FiniteMdp invariant; empty means valid.
std::vector<Violation> validate_mdp(const FiniteMdp& mdp, const Tolerances& tol = default_tolerances);

/// Throws std::invalid_argument with the first violation if the MDP is not valid.
void require_valid(const FiniteMdp& mdp, const Tolerances& tol = default_tolerances);

/// Copy of the MDP with every transition row rescaled to sum to one.
FiniteMdp renormalized(const FiniteMdp& mdp);

/// Largest per-action spread of rewards across states: max_a (max_s r - min_s r).
double reward_span(const FiniteMdp& mdp);

/// One synchronous Bellman optimality backup.
ValueVector bellman_backup(const FiniteMdp& mdp, double gamma, std::span<const double> values);

struct ValueIterationResult {
    ValueVector values;
    std::size_t iterations = 0;
    /// Sup-norm of the last update.
    double last_update = 0.0;
    /// Guaranteed bound on the sup-norm distance to V*.
    double certified_error = 0.0;
};

/**
 * Value iteration from V_0 = 0. Stops once ||V_{n+1} - V_n|| <= eps (1 - gamma) / gamma,
 * which certifies ||V_{n+1} - V*|| <= eps.
 */
ValueIterationResult value_iteration(const FiniteMdp& mdp, double gamma, double eps);

/// Argmax action per state; ties go to the lowest action index.
Policy greedy_policy(const FiniteMdp& mdp, std::span<const double> values, double gamma);

} // namespace bisim
