#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bisim/aggregation.hpp"
#include "bisim/mdp.hpp"
#include "bisim/metric_matrix.hpp"
#include "bisim/toy.hpp"

namespace bisim::io {

/// Unreadable file or malformed document.
class DocumentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kFormatVersion = 1;

/**
 * JSON model file:
 *   { "format_version": 1, "n_states": N, "actions": ["a", ...],
 *     "rewards": [[r(s, a) for a] for s], "transitions": [[[P(s, a, t) for t] for a] for s],
 *     "state_labels": ["..."] (optional) }
 */
struct MdpDocument {
    FiniteMdp mdp;
    std::vector<std::string> state_labels;
};

MdpDocument parse_mdp_document(std::string_view text);
MdpDocument read_mdp_file(const std::filesystem::path& path);
std::string to_json(const MdpDocument& doc);
void write_mdp_file(const std::filesystem::path& path, const MdpDocument& doc);

/// Fixed-point decimal with 9 fractional digits.
std::string format_number(double x);

/// One line per state, entries separated by single spaces.
std::string format_metric_table(const MetricMatrix& metric);

/// Header "block,size,diameter,value_spread_bound,observed_value_spread", one row per block.
std::string aggregation_csv(const AggregationReport& report);

/// Header "n,max_metric_dev,max_value_dev,certified_bound".
std::string convergence_csv(const std::vector<toy::ConvergenceRow>& rows);

void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace bisim::io
