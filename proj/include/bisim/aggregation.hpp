#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bisim/mdp.hpp"
#include "bisim/metric_matrix.hpp"
#include "bisim/partition.hpp"

namespace bisim {

/**
 * Greedy ball cover. States are scanned in index order; each joins the first
 * block whose representative (lowest member) lies within eps / 2, otherwise it
 * opens a new block. Every block then has diameter <= eps.
 */
Partition epsilon_partition(const MetricMatrix& metric, double eps);

/// Largest pairwise distance inside each block.
std::vector<double> block_diameters(const MetricMatrix& metric, const Partition& partition);

/**
 * Aggregated MDP over the blocks of a partition. Rewards and block-to-block
 * transition masses are weighted averages over block members; weights default
 * to uniform. Throws std::invalid_argument if a block has zero total weight.
 */
FiniteMdp quotient_mdp(const FiniteMdp& mdp, const Partition& partition,
                       std::optional<std::span<const double>> weights = std::nullopt);

struct BlockSummary {
    std::size_t block = 0;
    std::size_t size = 0;
    double diameter = 0.0;
    /// Certified bound on |V*(s) - V*(t)| for s, t in the block; equals the diameter.
    double value_spread_bound = 0.0;
    /// Observed max |V*(s) - V*(t)| in the block.
    double observed_value_spread = 0.0;
};

struct AggregationReport {
    std::vector<BlockSummary> blocks;
    /// max block diameter.
    double global_bound = 0.0;
    /// Certified error of the metric the diameters were measured with.
    double metric_error = 0.0;
    /// max_s |V*(s) - V*_quotient(block(s))|; empirical, not certified.
    double empirical_value_error = 0.0;
    ValueVector original_values;
    ValueVector quotient_values;
};

/// Computes d_fix to eps_metric and reports on the partition. Requires gamma <= c.
AggregationReport aggregation_report(const FiniteMdp& mdp, const Partition& partition, double gamma, double c,
                                     double eps_metric);

/// Same report, using an already computed metric with certified error metric_error.
AggregationReport aggregation_report(const FiniteMdp& mdp, const Partition& partition, double gamma, double c,
                                     const MetricMatrix& metric, double metric_error, double eps_value);

} // namespace bisim
