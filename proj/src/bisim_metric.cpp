#include "bisim/bisim_metric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "bisim/transport.hpp"

namespace bisim {

namespace {

void check_metric_discount(double c) {
    if (!(c > 0.0 && c < 1.0)) {
        throw std::invalid_argument("metric discount c must lie in (0, 1)");
    }
}

// Sparse view of every transition row plus, per action, an id shared by rows
// that are exactly equal (their Kantorovich distance is zero for any h).
struct TransitionSupport {
    std::size_t n_actions = 0;
    std::vector<std::vector<std::size_t>> index;
    std::vector<std::vector<double>> mass;
    std::vector<std::size_t> row_class;

    explicit TransitionSupport(const FiniteMdp& mdp) : n_actions(mdp.n_actions()) {
        const std::size_t rows = mdp.n_states() * n_actions;
        index.resize(rows);
        mass.resize(rows);
        row_class.resize(rows);
        for (std::size_t s = 0; s < mdp.n_states(); ++s) {
            for (std::size_t a = 0; a < n_actions; ++a) {
                const auto row = mdp.row(s, a);
                const std::size_t r = s * n_actions + a;
                for (std::size_t t = 0; t < row.size(); ++t) {
                    if (row[t] > 0.0) {
                        index[r].push_back(t);
                        mass[r].push_back(row[t]);
                    }
                }
            }
        }
        for (std::size_t a = 0; a < n_actions; ++a) {
            std::map<std::pair<std::vector<std::size_t>, std::vector<double>>, std::size_t> classes;
            for (std::size_t s = 0; s < mdp.n_states(); ++s) {
                const std::size_t r = s * n_actions + a;
                auto [it, inserted] = classes.try_emplace({index[r], mass[r]}, classes.size());
                row_class[r] = it->second;
            }
        }
    }

    double distance(const MetricMatrix& h, std::size_t s, std::size_t t, std::size_t a) const {
        const std::size_t rs = s * n_actions + a;
        const std::size_t rt = t * n_actions + a;
        if (row_class[rs] == row_class[rt]) {
            return 0.0;
        }
        return sparse_kantorovich_distance(h, index[rs], mass[rs], index[rt], mass[rt]);
    }
};

void check_step_input(const FiniteMdp& mdp, double c, const MetricMatrix& h) {
    check_metric_discount(c);
    const std::size_t n = mdp.n_states();
    if (h.size() != n) {
        throw std::invalid_argument("metric_step: metric size does not match the number of states");
    }
    const double bound = metric_bound(mdp, c) + default_tolerances.triangle;
    for (std::size_t i = 0; i < n; ++i) {
        if (h(i, i) != 0.0) {
            throw std::invalid_argument("metric_step: metric has a nonzero diagonal");
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = h(i, j);
            if (v != h(j, i)) {
                throw std::invalid_argument("metric_step: metric is not symmetric");
            }
            if (!(v >= 0.0 && v <= bound)) {
                std::ostringstream os;
                os << "metric_step: entry (" << i << ", " << j << ") = " << v << " outside [0, " << bound << "]";
                throw std::invalid_argument(os.str());
            }
        }
    }
}

MetricMatrix apply_operator(const FiniteMdp& mdp, const TransitionSupport& support, double c,
                            const MetricMatrix& h, const MetricStepOptions& options) {
    const std::size_t n = mdp.n_states();
    MetricMatrix out(n);

    auto work = [&](std::size_t first_row, std::size_t stride) {
        for (std::size_t s = first_row; s < n; s += stride) {
            for (std::size_t t = s + 1; t < n; ++t) {
                double best = 0.0;
                for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
                    const double reward_gap = std::abs(mdp.reward(s, a) - mdp.reward(t, a));
                    best = std::max(best, reward_gap + c * support.distance(h, s, t, a));
                }
                out(s, t) = best;
                out(t, s) = best;
            }
        }
    };

    std::size_t threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    if (threads == 1) {
        work(0, 1);
        return out;
    }
    // Rows are interleaved across workers; each pair is written by exactly one.
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back(work, w, threads);
    }
    pool.clear();
    return out;
}

} // namespace

double metric_bound(const FiniteMdp& mdp, double c) {
    check_metric_discount(c);
    return reward_span(mdp) / (1.0 - c);
}

MetricMatrix metric_step(const FiniteMdp& mdp, double c, const MetricMatrix& h, const MetricStepOptions& options) {
    check_step_input(mdp, c, h);
    const TransitionSupport support(mdp);
    return apply_operator(mdp, support, c, h, options);
}

FixedPointResult fixed_point_metric(const FiniteMdp& mdp, double c, double eps, const FixedPointOptions& options) {
    check_metric_discount(c);
    if (!(eps > 0.0)) {
        throw std::invalid_argument("fixed_point_metric: epsilon must be positive");
    }
    require_valid(mdp);
    const TransitionSupport support(mdp);
    const double threshold = eps * (1.0 - c) / c;

    FixedPointResult result;
    result.metric = MetricMatrix(mdp.n_states());
    if (options.record_trace) {
        result.trace.push_back(result.metric);
    }
    while (true) {
        if (result.iterations >= options.max_iterations) {
            throw std::runtime_error("fixed_point_metric: iteration limit reached before convergence");
        }
        MetricMatrix next = apply_operator(mdp, support, c, result.metric, options.step);
        const double step = sup_distance(next, result.metric);
        result.metric = std::move(next);
        ++result.iterations;
        result.step_sizes.push_back(step);
        if (options.record_trace) {
            result.trace.push_back(result.metric);
        }
        if (step <= threshold) {
            result.certified_error = c / (1.0 - c) * step;
            break;
        }
    }
    return result;
}

Partition bisimulation_partition(const FiniteMdp& mdp, double tol) {
    if (!(tol >= 0.0)) {
        throw std::invalid_argument("bisimulation_partition: tolerance must be nonnegative");
    }
    const std::size_t n = mdp.n_states();
    const std::size_t n_actions = mdp.n_actions();
    Partition current = Partition::single_block(n);

    auto within = [tol](const std::vector<double>& x, const std::vector<double>& y) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (std::abs(x[i] - y[i]) > tol) {
                return false;
            }
        }
        return true;
    };

    for (std::size_t round = 0; round <= n; ++round) {
        const std::size_t blocks = current.block_count();
        std::vector<std::vector<double>> signature(n);
        for (std::size_t s = 0; s < n; ++s) {
            auto& sig = signature[s];
            sig.reserve(n_actions * (blocks + 1));
            for (std::size_t a = 0; a < n_actions; ++a) {
                sig.push_back(mdp.reward(s, a));
            }
            for (std::size_t a = 0; a < n_actions; ++a) {
                const auto masses = block_masses(mdp.row(s, a), current);
                sig.insert(sig.end(), masses.begin(), masses.end());
            }
        }

        std::vector<std::size_t> labels(n);
        std::size_t next_label = 0;
        for (const auto& members : current.blocks()) {
            std::vector<std::size_t> order = members;
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t x, std::size_t y) { return signature[x] < signature[y]; });
            std::vector<std::size_t> representatives;
            for (std::size_t s : order) {
                auto group = std::find_if(representatives.begin(), representatives.end(),
                                          [&](std::size_t r) { return within(signature[r], signature[s]); });
                if (group == representatives.end()) {
                    representatives.push_back(s);
                    labels[s] = next_label++;
                } else {
                    labels[s] = labels[*group];
                }
            }
        }
        Partition refined = canonical(labels);
        if (refined.block_count() == current.block_count()) {
            return refined;
        }
        current = std::move(refined);
    }
    return current;
}

KernelReport kernel_check(const MetricMatrix& metric, const Partition& partition, double tol) {
    if (metric.size() != partition.size()) {
        throw std::invalid_argument("kernel_check: metric and partition sizes differ");
    }
    KernelReport report;
    report.tol = tol;
    for (std::size_t s = 0; s < metric.size(); ++s) {
        for (std::size_t t = s + 1; t < metric.size(); ++t) {
            const double d = metric(s, t);
            const bool same = partition.block_of(s) == partition.block_of(t);
            if (same && d > 10.0 * tol) {
                report.failures.push_back({s, t, d, true});
            } else if (same && d > tol) {
                report.indeterminate.push_back({s, t, d, true});
            } else if (!same && d <= tol) {
                report.failures.push_back({s, t, d, false});
            }
        }
    }
    return report;
}

PerturbationResult perturbation_bound(const FiniteMdp& first, const FiniteMdp& second, double c, double eps,
                                      const FixedPointOptions& options) {
    if (first.n_states() != second.n_states() || first.actions() != second.actions()) {
        throw std::invalid_argument("perturbation_bound: models have different state or action sets");
    }
    const auto d1 = fixed_point_metric(first, c, eps, options);
    const auto d2 = fixed_point_metric(second, c, eps, options);

    double reward_gap = 0.0;
    double tv_gap = 0.0;
    for (std::size_t s = 0; s < first.n_states(); ++s) {
        for (std::size_t a = 0; a < first.n_actions(); ++a) {
            reward_gap = std::max(reward_gap, std::abs(first.reward(s, a) - second.reward(s, a)));
            tv_gap = std::max(tv_gap, total_variation(first.row(s, a), second.row(s, a)));
        }
    }
    const double span = std::max(reward_span(first), reward_span(second));

    PerturbationResult out;
    out.lhs = sup_distance(d1.metric, d2.metric);
    out.reward_term = 2.0 / (1.0 - c) * reward_gap;
    out.transition_term = 2.0 * span * c / ((1.0 - c) * (1.0 - c)) * tv_gap;
    out.rhs = out.reward_term + out.transition_term;
    out.slack = 2.0 * eps;
    return out;
}

LipschitzCheck value_lipschitz_check(const FiniteMdp& mdp, double gamma, double c, const MetricMatrix& metric,
                                     double eps_value, double eps_metric) {
    if (gamma > c) {
        throw std::invalid_argument("value_lipschitz_check: requires gamma <= c");
    }
    if (metric.size() != mdp.n_states()) {
        throw std::invalid_argument("value_lipschitz_check: metric size does not match the model");
    }
    const auto values = value_iteration(mdp, gamma, eps_value).values;

    LipschitzCheck out;
    out.allowance = 2.0 * eps_value + eps_metric;
    out.max_violation = 0.0;
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        for (std::size_t t = 0; t < mdp.n_states(); ++t) {
            out.max_violation = std::max(out.max_violation, std::abs(values[s] - values[t]) - metric(s, t));
        }
    }
    return out;
}

} // namespace bisim
