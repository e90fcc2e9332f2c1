// Command-line front end for the bisimulation metric library.
//
// Exit codes: 0 success, 1 domain failure (invalid model, failed bound,
// rejected parameters), 2 I/O or parse failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bisim/aggregation.hpp"
#include "bisim/bisim_metric.hpp"
#include "bisim/io.hpp"
#include "bisim/mdp.hpp"
#include "bisim/toy.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kIoFailure = 2;

using bisim::io::format_number;

struct DomainFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bisim::FiniteMdp load_valid(const std::string& path) {
    auto doc = bisim::io::read_mdp_file(path);
    const auto report = bisim::validate_mdp(doc.mdp);
    if (!report.empty()) {
        throw DomainFailure(path + ": " + report.front().message);
    }
    return std::move(doc.mdp);
}

void emit(const std::string& text, const std::string& output) {
    if (output.empty()) {
        std::cout << text;
    } else {
        bisim::io::write_text_file(output, text);
    }
}

int cmd_validate(const std::string& path) {
    const auto doc = bisim::io::read_mdp_file(path);
    const auto report = bisim::validate_mdp(doc.mdp);
    for (const auto& v : report) {
        std::cout << v.message << '\n';
    }
    if (report.empty()) {
        std::cout << "valid: " << doc.mdp.n_states() << " states, " << doc.mdp.n_actions() << " actions\n";
        return kOk;
    }
    return kDomainFailure;
}

int cmd_metric(const std::string& path, double c, double eps, const std::string& output) {
    const auto mdp = load_valid(path);
    const auto result = bisim::fixed_point_metric(mdp, c, eps);
    std::string text = bisim::io::format_metric_table(result.metric);
    text += "certified_error <= " + format_number(result.certified_error) + "\n";
    emit(text, output);
    std::cerr << "iterations: " << result.iterations << '\n';
    return kOk;
}

int cmd_solve(const std::string& path, double gamma, double eps, const std::string& output) {
    const auto mdp = load_valid(path);
    const auto result = bisim::value_iteration(mdp, gamma, eps);
    const auto policy = bisim::greedy_policy(mdp, result.values, gamma);
    std::string text = "state,value,action\n";
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        text += std::to_string(s) + ',' + format_number(result.values[s]) + ',' + mdp.actions()[policy[s]] + '\n';
    }
    emit(text, output);
    std::cerr << "iterations: " << result.iterations << ", certified_error <= " << format_number(result.certified_error)
              << '\n';
    return kOk;
}

int cmd_aggregate(const std::string& path, double c, double gamma, double target, double metric_eps,
                  const std::string& output, const std::string& report_path) {
    const auto mdp = load_valid(path);
    const auto metric = bisim::fixed_point_metric(mdp, c, metric_eps);
    const auto partition = bisim::epsilon_partition(metric.metric, target);
    const auto quotient = bisim::quotient_mdp(mdp, partition);
    const auto report =
        bisim::aggregation_report(mdp, partition, gamma, c, metric.metric, metric.certified_error, metric_eps);

    bisim::io::MdpDocument quotient_doc{quotient, {}};
    if (!output.empty()) {
        bisim::io::write_mdp_file(output, quotient_doc);
    }
    emit(bisim::io::aggregation_csv(report), report_path);
    std::cerr << "blocks: " << partition.block_count() << ", global_bound: " << format_number(report.global_bound)
              << ", metric_error: " << format_number(report.metric_error)
              << ", empirical_value_error: " << format_number(report.empirical_value_error) << '\n';
    return kOk;
}

std::string sized_path(const std::string& path, std::size_t n, bool many) {
    if (!many) {
        return path;
    }
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    const std::string suffix = "_n" + std::to_string(n);
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return path + suffix;
    }
    return path.substr(0, dot) + suffix + path.substr(dot);
}

int cmd_toy(const std::vector<std::size_t>& ns, double gamma, double c, double eps, const std::string& output,
            const std::string& csv_path) {
    if (!output.empty()) {
        for (std::size_t n : ns) {
            bisim::io::write_mdp_file(sized_path(output, n, ns.size() > 1), {bisim::toy::toy_mdp(n), {}});
        }
    }
    bisim::toy::ExperimentOptions options;
    options.metric_eps = eps;
    const auto rows = bisim::toy::convergence_experiment(ns, c, gamma, options);
    emit(bisim::io::convergence_csv(rows), csv_path);
    return kOk;
}

int cmd_perturb(const std::string& first, const std::string& second, double c, double eps) {
    const auto a = load_valid(first);
    const auto b = load_valid(second);
    const auto result = bisim::perturbation_bound(a, b, c, eps);
    std::cout << "lhs " << format_number(result.lhs) << '\n'
              << "rhs " << format_number(result.rhs) << '\n'
              << "reward_term " << format_number(result.reward_term) << '\n'
              << "transition_term " << format_number(result.transition_term) << '\n'
              << "slack " << format_number(result.slack) << '\n'
              << (result.holds() ? "pass" : "fail") << '\n';
    return result.holds() ? kOk : kDomainFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bisimulation metrics for finite Markov decision processes"};
    app.require_subcommand(1);

    double gamma = 0.5;
    double c = 0.5;
    double eps = 1e-6;
    double metric_eps = 1e-8;
    std::string output;
    std::string secondary_output;
    std::string path;
    std::string path2;
    std::vector<std::size_t> sizes;

    auto* validate = app.add_subcommand("validate", "Check a model file");
    validate->add_option("file", path, "Model file")->required();

    auto* metric = app.add_subcommand("metric", "Compute the bisimulation metric");
    metric->add_option("file", path, "Model file")->required();
    metric->add_option("-c,--metric-discount", c, "Metric discount c in (0, 1)")->capture_default_str();
    metric->add_option("-e,--epsilon", eps, "Certified error target")->capture_default_str();
    metric->add_option("-o,--output", output, "Write the table here instead of standard output");

    auto* solve = app.add_subcommand("solve", "Optimal values and greedy policy by value iteration");
    solve->add_option("file", path, "Model file")->required();
    solve->add_option("-g,--discount", gamma, "Discount factor in (0, 1)")->capture_default_str();
    solve->add_option("-e,--epsilon", eps, "Certified error target")->capture_default_str();
    solve->add_option("-o,--output", output, "Write the table here instead of standard output");

    auto* aggregate = app.add_subcommand("aggregate", "Metric-guided state aggregation");
    aggregate->add_option("file", path, "Model file")->required();
    aggregate->add_option("-c,--metric-discount", c, "Metric discount c in (0, 1)")->capture_default_str();
    aggregate->add_option("-g,--discount", gamma, "Discount factor, at most c")->capture_default_str();
    aggregate->add_option("-e,--epsilon", eps, "Target block diameter")->capture_default_str();
    aggregate->add_option("--metric-tolerance", metric_eps, "Certified error of the metric solve")
        ->capture_default_str();
    aggregate->add_option("-o,--output", output, "Write the quotient model file here");
    aggregate->add_option("--report", secondary_output, "Write the block CSV here instead of standard output");

    auto* toy_cmd = app.add_subcommand("toy", "Grid discretization of the [0, 1] benchmark and convergence table");
    toy_cmd->add_option("-n,--blocks", sizes, "Grid sizes (repeatable)")->required();
    toy_cmd->add_option("-g,--discount", gamma, "Discount factor, at most c")->capture_default_str();
    toy_cmd->add_option("-c,--metric-discount", c, "Metric discount c in (0, 1)")->capture_default_str();
    toy_cmd->add_option("-e,--epsilon", eps, "Certified error of the metric solve")->capture_default_str();
    toy_cmd->add_option("-o,--output", output, "Write the grid model file(s) here");
    toy_cmd->add_option("--csv", secondary_output, "Write the table here instead of standard output");

    auto* perturb = app.add_subcommand("perturb", "Check the metric continuity bound for two models");
    perturb->add_option("first", path, "First model file")->required();
    perturb->add_option("second", path2, "Second model file")->required();
    perturb->add_option("-c,--metric-discount", c, "Metric discount c in (0, 1)")->capture_default_str();
    perturb->add_option("-e,--epsilon", eps, "Certified error of each metric solve")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kIoFailure;
    }

    try {
        if (*validate) {
            return cmd_validate(path);
        }
        if (*metric) {
            return cmd_metric(path, c, eps, output);
        }
        if (*solve) {
            return cmd_solve(path, gamma, eps, output);
        }
        if (*aggregate) {
            return cmd_aggregate(path, c, gamma, eps, metric_eps, output, secondary_output);
        }
        if (*toy_cmd) {
            return cmd_toy(sizes, gamma, c, eps, output, secondary_output);
        }
        if (*perturb) {
            return cmd_perturb(path, path2, c, eps);
        }
    } catch (const bisim::io::DocumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDomainFailure;
    }
    return kDomainFailure;
}
