#include "bisim/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bisim/bisim_metric.hpp"

namespace bisim {

Partition epsilon_partition(const MetricMatrix& metric, double eps) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("epsilon_partition: epsilon must be positive");
    }
    std::vector<std::size_t> representatives;
    std::vector<std::size_t> labels(metric.size());
    for (std::size_t s = 0; s < metric.size(); ++s) {
        auto hit = std::find_if(representatives.begin(), representatives.end(),
                                [&](std::size_t r) { return metric(r, s) <= eps / 2.0; });
        if (hit == representatives.end()) {
            labels[s] = representatives.size();
            representatives.push_back(s);
        } else {
            labels[s] = static_cast<std::size_t>(hit - representatives.begin());
        }
    }
    return Partition(std::move(labels));
}

std::vector<double> block_diameters(const MetricMatrix& metric, const Partition& partition) {
    if (metric.size() != partition.size()) {
        throw std::invalid_argument("block_diameters: metric and partition sizes differ");
    }
    std::vector<double> out(partition.block_count(), 0.0);
    for (const auto& members : partition.blocks()) {
        double diam = 0.0;
        for (std::size_t x : members) {
            for (std::size_t y : members) {
                diam = std::max(diam, metric(x, y));
            }
        }
        out[partition.block_of(members.front())] = diam;
    }
    return out;
}

FiniteMdp quotient_mdp(const FiniteMdp& mdp, const Partition& partition,
                       std::optional<std::span<const double>> weights) {
    const std::size_t n = mdp.n_states();
    const std::size_t n_actions = mdp.n_actions();
    if (partition.size() != n) {
        throw std::invalid_argument("quotient_mdp: partition does not cover the state space");
    }
    std::vector<double> w(n, 1.0);
    if (weights) {
        if (weights->size() != n) {
            throw std::invalid_argument("quotient_mdp: one weight per state is required");
        }
        for (std::size_t s = 0; s < n; ++s) {
            if (!((*weights)[s] >= 0.0) || !std::isfinite((*weights)[s])) {
                throw std::invalid_argument("quotient_mdp: weights must be finite and nonnegative");
            }
            w[s] = (*weights)[s];
        }
    }

    const std::size_t m = partition.block_count();
    std::vector<double> block_weight(m, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        block_weight[partition.block_of(s)] += w[s];
    }
    for (std::size_t b = 0; b < m; ++b) {
        if (!(block_weight[b] > 0.0)) {
            throw std::invalid_argument("quotient_mdp: block " + std::to_string(b) + " has zero total weight");
        }
    }

    std::vector<double> rewards(m * n_actions, 0.0);
    std::vector<double> transitions(m * n_actions * m, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t b = partition.block_of(s);
        const double share = w[s] / block_weight[b];
        if (share == 0.0) {
            continue;
        }
        for (std::size_t a = 0; a < n_actions; ++a) {
            rewards[b * n_actions + a] += share * mdp.reward(s, a);
            const auto row = mdp.row(s, a);
            double* out_row = transitions.data() + (b * n_actions + a) * m;
            for (std::size_t t = 0; t < n; ++t) {
                out_row[partition.block_of(t)] += share * row[t];
            }
        }
    }
    // A singleton block with unit share reproduces its member exactly.
    return FiniteMdp(m, mdp.actions(), std::move(rewards), std::move(transitions));
}

AggregationReport aggregation_report(const FiniteMdp& mdp, const Partition& partition, double gamma, double c,
                                     double eps_metric) {
    if (gamma > c) {
        throw std::invalid_argument("aggregation_report: requires gamma <= c");
    }
    const auto fixed = fixed_point_metric(mdp, c, eps_metric);
    return aggregation_report(mdp, partition, gamma, c, fixed.metric, fixed.certified_error, eps_metric);
}

AggregationReport aggregation_report(const FiniteMdp& mdp, const Partition& partition, double gamma, double c,
                                     const MetricMatrix& metric, double metric_error, double eps_value) {
    if (gamma > c) {
        throw std::invalid_argument("aggregation_report: requires gamma <= c");
    }
    AggregationReport report;
    report.metric_error = metric_error;
    report.original_values = value_iteration(mdp, gamma, eps_value).values;
    report.quotient_values = value_iteration(quotient_mdp(mdp, partition), gamma, eps_value).values;

    const auto diameters = block_diameters(metric, partition);
    const auto members = partition.blocks();
    for (std::size_t b = 0; b < members.size(); ++b) {
        BlockSummary row;
        row.block = b;
        row.size = members[b].size();
        row.diameter = diameters[b];
        row.value_spread_bound = diameters[b];
        for (std::size_t x : members[b]) {
            for (std::size_t y : members[b]) {
                row.observed_value_spread =
                    std::max(row.observed_value_spread, std::abs(report.original_values[x] - report.original_values[y]));
            }
        }
        report.global_bound = std::max(report.global_bound, row.diameter);
        report.blocks.push_back(row);
    }
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        report.empirical_value_error =
            std::max(report.empirical_value_error,
                     std::abs(report.original_values[s] - report.quotient_values[partition.block_of(s)]));
    }
    return report;
}

} // namespace bisim
