#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bisim/aggregation.hpp"
#include "bisim/bisim_metric.hpp"
#include "bisim/io.hpp"
#include "bisim/toy.hpp"
#include "bisim/transport.hpp"

namespace py = pybind11;
using namespace bisim;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const MetricMatrix& m) {
    Array out({m.size(), m.size()});
    std::copy(m.entries().begin(), m.entries().end(), out.mutable_data());
    return out;
}

MetricMatrix to_metric(const Array& a) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1)) {
        throw std::invalid_argument("metric must be a square matrix");
    }
    const auto n = static_cast<std::size_t>(a.shape(0));
    return MetricMatrix(n, std::vector<double>(a.data(), a.data() + n * n));
}

std::vector<double> to_vector(const Array& a) {
    if (a.ndim() != 1) {
        throw std::invalid_argument("expected a one-dimensional array");
    }
    return {a.data(), a.data() + a.size()};
}

FiniteMdp make_mdp(const Array& rewards, const Array& transitions, std::vector<std::string> actions) {
    if (rewards.ndim() != 2 || transitions.ndim() != 3) {
        throw std::invalid_argument("rewards must be (n, actions) and transitions (n, actions, n)");
    }
    const auto n = static_cast<std::size_t>(rewards.shape(0));
    const auto n_actions = static_cast<std::size_t>(rewards.shape(1));
    if (static_cast<std::size_t>(transitions.shape(0)) != n ||
        static_cast<std::size_t>(transitions.shape(1)) != n_actions ||
        static_cast<std::size_t>(transitions.shape(2)) != n) {
        throw std::invalid_argument("transitions shape does not match rewards");
    }
    if (actions.empty()) {
        for (std::size_t a = 0; a < n_actions; ++a) {
            actions.push_back("a" + std::to_string(a));
        }
    }
    return FiniteMdp(n, std::move(actions), std::vector<double>(rewards.data(), rewards.data() + rewards.size()),
                     std::vector<double>(transitions.data(), transitions.data() + transitions.size()));
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bisimulation metrics for finite MDPs";

    py::class_<FiniteMdp>(m, "FiniteMdp")
        .def(py::init(&make_mdp), py::arg("rewards"), py::arg("transitions"),
             py::arg("actions") = std::vector<std::string>{})
        .def_property_readonly("n_states", &FiniteMdp::n_states)
        .def_property_readonly("n_actions", &FiniteMdp::n_actions)
        .def_property_readonly("actions", &FiniteMdp::actions)
        .def_property_readonly("rewards",
                               [](const FiniteMdp& mdp) {
                                   Array out({mdp.n_states(), mdp.n_actions()});
                                   std::copy(mdp.rewards().begin(), mdp.rewards().end(), out.mutable_data());
                                   return out;
                               })
        .def_property_readonly("transitions",
                               [](const FiniteMdp& mdp) {
                                   Array out({mdp.n_states(), mdp.n_actions(), mdp.n_states()});
                                   std::copy(mdp.transitions().begin(), mdp.transitions().end(),
                                             out.mutable_data());
                                   return out;
                               })
        .def("__eq__", [](const FiniteMdp& a, const FiniteMdp& b) { return a == b; });

    py::class_<Partition>(m, "Partition")
        .def(py::init<std::vector<std::size_t>>(), py::arg("assignment"))
        .def_static("singletons", &Partition::singletons)
        .def_static("single_block", &Partition::single_block)
        .def_property_readonly("assignment", &Partition::assignment)
        .def_property_readonly("block_count", &Partition::block_count)
        .def("block_of", &Partition::block_of)
        .def("blocks", &Partition::blocks)
        .def("__len__", &Partition::size)
        .def("__eq__", [](const Partition& a, const Partition& b) { return a == b; });

    py::class_<Violation>(m, "Violation")
        .def_readonly("state", &Violation::state)
        .def_readonly("action", &Violation::action)
        .def_readonly("magnitude", &Violation::magnitude)
        .def_readonly("message", &Violation::message);

    py::class_<ValueIterationResult>(m, "ValueIterationResult")
        .def_readonly("values", &ValueIterationResult::values)
        .def_readonly("iterations", &ValueIterationResult::iterations)
        .def_readonly("last_update", &ValueIterationResult::last_update)
        .def_readonly("certified_error", &ValueIterationResult::certified_error);

    m.def("validate", [](const FiniteMdp& mdp) { return validate_mdp(mdp); });
    m.def("reward_span", &reward_span);
    m.def("value_iteration", &value_iteration, py::arg("mdp"), py::arg("gamma"), py::arg("eps"));
    m.def(
        "greedy_policy",
        [](const FiniteMdp& mdp, const std::vector<double>& values, double gamma) {
            return greedy_policy(mdp, values, gamma);
        },
        py::arg("mdp"), py::arg("values"), py::arg("gamma"));

    py::class_<TransportResult>(m, "TransportResult")
        .def_readonly("value", &TransportResult::value)
        .def_readonly("dual_value", &TransportResult::dual_value)
        .def_readonly("potentials", &TransportResult::potentials)
        .def_property_readonly("plan", [](const TransportResult& r) {
            const auto n = r.plan.size();
            Array out({n, n});
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    out.mutable_at(i, j) = r.plan(i, j);
                }
            }
            return out;
        });

    m.def(
        "kantorovich",
        [](const Array& h, const Array& p, const Array& q) {
            return kantorovich(to_metric(h), to_vector(p), to_vector(q));
        },
        py::arg("cost"), py::arg("p"), py::arg("q"));
    m.def(
        "total_variation", [](const Array& p, const Array& q) { return total_variation(to_vector(p), to_vector(q)); },
        py::arg("p"), py::arg("q"));
    m.def(
        "quotient_total_variation",
        [](const Array& p, const Array& q, const Partition& partition) {
            return quotient_total_variation(to_vector(p), to_vector(q), partition);
        },
        py::arg("p"), py::arg("q"), py::arg("partition"));
    m.def("discrete_metric", [](std::size_t n) { return to_array(discrete_metric(n)); });

    py::class_<FixedPointResult>(m, "FixedPointResult")
        .def_property_readonly("metric", [](const FixedPointResult& r) { return to_array(r.metric); })
        .def_readonly("iterations", &FixedPointResult::iterations)
        .def_readonly("certified_error", &FixedPointResult::certified_error)
        .def_readonly("step_sizes", &FixedPointResult::step_sizes)
        .def_property_readonly("trace", [](const FixedPointResult& r) {
            py::list out;
            for (const auto& h : r.trace) {
                out.append(to_array(h));
            }
            return out;
        });

    m.def(
        "fixed_point_metric",
        [](const FiniteMdp& mdp, double c, double eps, bool record_trace, std::size_t threads) {
            FixedPointOptions options;
            options.record_trace = record_trace;
            options.step.threads = threads;
            py::gil_scoped_release release;
            return fixed_point_metric(mdp, c, eps, options);
        },
        py::arg("mdp"), py::arg("c"), py::arg("eps"), py::arg("record_trace") = false, py::arg("threads") = 0);
    m.def("bisimulation_partition", &bisimulation_partition, py::arg("mdp"), py::arg("tol") = 0.0);

    py::class_<PairDisagreement>(m, "PairDisagreement")
        .def_readonly("first", &PairDisagreement::first)
        .def_readonly("second", &PairDisagreement::second)
        .def_readonly("distance", &PairDisagreement::distance)
        .def_readonly("same_block", &PairDisagreement::same_block);
    py::class_<KernelReport>(m, "KernelReport")
        .def_readonly("tol", &KernelReport::tol)
        .def_readonly("failures", &KernelReport::failures)
        .def_readonly("indeterminate", &KernelReport::indeterminate)
        .def("agrees", &KernelReport::agrees);
    m.def(
        "kernel_check",
        [](const Array& metric, const Partition& partition, double tol) {
            return kernel_check(to_metric(metric), partition, tol);
        },
        py::arg("metric"), py::arg("partition"), py::arg("tol"));

    py::class_<PerturbationResult>(m, "PerturbationResult")
        .def_readonly("lhs", &PerturbationResult::lhs)
        .def_readonly("rhs", &PerturbationResult::rhs)
        .def_readonly("reward_term", &PerturbationResult::reward_term)
        .def_readonly("transition_term", &PerturbationResult::transition_term)
        .def_readonly("slack", &PerturbationResult::slack)
        .def("holds", &PerturbationResult::holds);
    m.def(
        "perturbation_bound",
        [](const FiniteMdp& first, const FiniteMdp& second, double c, double eps) {
            return perturbation_bound(first, second, c, eps);
        },
        py::arg("first"), py::arg("second"), py::arg("c"), py::arg("eps"));

    py::class_<LipschitzCheck>(m, "LipschitzCheck")
        .def_readonly("max_violation", &LipschitzCheck::max_violation)
        .def_readonly("allowance", &LipschitzCheck::allowance)
        .def("holds", &LipschitzCheck::holds);
    m.def(
        "value_lipschitz_check",
        [](const FiniteMdp& mdp, double gamma, double c, const Array& metric, double eps_value, double eps_metric) {
            return value_lipschitz_check(mdp, gamma, c, to_metric(metric), eps_value, eps_metric);
        },
        py::arg("mdp"), py::arg("gamma"), py::arg("c"), py::arg("metric"), py::arg("eps_value"),
        py::arg("eps_metric"));

    m.def(
        "epsilon_partition", [](const Array& metric, double eps) { return epsilon_partition(to_metric(metric), eps); },
        py::arg("metric"), py::arg("eps"));
    m.def(
        "quotient_mdp",
        [](const FiniteMdp& mdp, const Partition& partition, std::optional<std::vector<double>> weights) {
            if (weights) {
                return quotient_mdp(mdp, partition, std::span<const double>(*weights));
            }
            return quotient_mdp(mdp, partition);
        },
        py::arg("mdp"), py::arg("partition"), py::arg("weights") = py::none());

    py::class_<BlockSummary>(m, "BlockSummary")
        .def_readonly("block", &BlockSummary::block)
        .def_readonly("size", &BlockSummary::size)
        .def_readonly("diameter", &BlockSummary::diameter)
        .def_readonly("value_spread_bound", &BlockSummary::value_spread_bound)
        .def_readonly("observed_value_spread", &BlockSummary::observed_value_spread);
    py::class_<AggregationReport>(m, "AggregationReport")
        .def_readonly("blocks", &AggregationReport::blocks)
        .def_readonly("global_bound", &AggregationReport::global_bound)
        .def_readonly("metric_error", &AggregationReport::metric_error)
        .def_readonly("empirical_value_error", &AggregationReport::empirical_value_error)
        .def_readonly("original_values", &AggregationReport::original_values)
        .def_readonly("quotient_values", &AggregationReport::quotient_values);
    m.def(
        "aggregation_report",
        [](const FiniteMdp& mdp, const Partition& partition, double gamma, double c, double eps_metric) {
            return aggregation_report(mdp, partition, gamma, c, eps_metric);
        },
        py::arg("mdp"), py::arg("partition"), py::arg("gamma"), py::arg("c"), py::arg("eps_metric"));

    py::class_<toy::ConvergenceRow>(m, "ConvergenceRow")
        .def_readonly("n", &toy::ConvergenceRow::n)
        .def_readonly("max_metric_dev", &toy::ConvergenceRow::max_metric_dev)
        .def_readonly("max_value_dev", &toy::ConvergenceRow::max_value_dev)
        .def_readonly("certified_bound", &toy::ConvergenceRow::certified_bound)
        .def_readonly("metric_error", &toy::ConvergenceRow::metric_error)
        .def_readonly("max_within_block_spread", &toy::ConvergenceRow::max_within_block_spread);
    m.def("toy_mdp", py::overload_cast<std::size_t>(&toy::toy_mdp), py::arg("n"));
    m.def("block_center", &toy::block_center, py::arg("k"), py::arg("n"));
    m.def("toy_metric_closed_form", &toy::toy_metric_closed_form, py::arg("x"), py::arg("y"), py::arg("c"));
    m.def("toy_value_closed_form", &toy::toy_value_closed_form, py::arg("x"), py::arg("gamma"));
    m.def(
        "convergence_experiment",
        [](const std::vector<std::size_t>& ns, double c, double gamma) {
            return toy::convergence_experiment(ns, c, gamma);
        },
        py::arg("ns"), py::arg("c"), py::arg("gamma"));

    m.def(
        "load_mdp", [](const std::filesystem::path& path) { return io::read_mdp_file(path).mdp; }, py::arg("path"));
    m.def(
        "save_mdp", [](const std::filesystem::path& path, const FiniteMdp& mdp) { io::write_mdp_file(path, {mdp, {}}); },
        py::arg("path"), py::arg("mdp"));
    m.def("to_json", [](const FiniteMdp& mdp) { return io::to_json({mdp, {}}); });

    py::register_exception<io::DocumentError>(m, "DocumentError", PyExc_ValueError);
}
