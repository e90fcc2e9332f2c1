#include "bisim/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace bisim::io {

using nlohmann::json;

namespace {

const json& field(const json& doc, const char* name) {
    const auto it = doc.find(name);
    if (it == doc.end()) {
        throw DocumentError(std::string("missing field \"") + name + "\"");
    }
    return *it;
}

void expect_array(const json& value, std::size_t size, const std::string& where) {
    if (!value.is_array() || value.size() != size) {
        throw DocumentError(where + " must be an array of length " + std::to_string(size));
    }
}

double number(const json& value, const std::string& where) {
    if (!value.is_number()) {
        throw DocumentError(where + " must be a number");
    }
    return value.get<double>();
}

} // namespace

MdpDocument parse_mdp_document(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DocumentError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw DocumentError("document must be a JSON object");
    }
    const json& version = field(doc, "format_version");
    if (!version.is_number_integer() || version.get<int>() != kFormatVersion) {
        throw DocumentError("unsupported format_version (expected 1)");
    }
    const json& n_json = field(doc, "n_states");
    if (!n_json.is_number_unsigned() || n_json.get<std::size_t>() == 0) {
        throw DocumentError("n_states must be a positive integer");
    }
    const auto n = n_json.get<std::size_t>();

    const json& actions_json = field(doc, "actions");
    if (!actions_json.is_array() || actions_json.empty()) {
        throw DocumentError("actions must be a nonempty array of labels");
    }
    std::vector<std::string> actions;
    for (const auto& label : actions_json) {
        if (!label.is_string()) {
            throw DocumentError("action labels must be strings");
        }
        actions.push_back(label.get<std::string>());
    }
    const std::size_t m = actions.size();

    const json& rewards_json = field(doc, "rewards");
    expect_array(rewards_json, n, "rewards");
    std::vector<double> rewards;
    rewards.reserve(n * m);
    for (std::size_t s = 0; s < n; ++s) {
        const std::string where = "rewards[" + std::to_string(s) + "]";
        expect_array(rewards_json[s], m, where);
        for (std::size_t a = 0; a < m; ++a) {
            rewards.push_back(number(rewards_json[s][a], where));
        }
    }

    const json& transitions_json = field(doc, "transitions");
    expect_array(transitions_json, n, "transitions");
    std::vector<double> transitions;
    transitions.reserve(n * m * n);
    for (std::size_t s = 0; s < n; ++s) {
        const std::string where = "transitions[" + std::to_string(s) + "]";
        expect_array(transitions_json[s], m, where);
        for (std::size_t a = 0; a < m; ++a) {
            const std::string row_where = where + "[" + std::to_string(a) + "]";
            expect_array(transitions_json[s][a], n, row_where);
            for (std::size_t t = 0; t < n; ++t) {
                transitions.push_back(number(transitions_json[s][a][t], row_where));
            }
        }
    }

    MdpDocument out{FiniteMdp(n, std::move(actions), std::move(rewards), std::move(transitions)), {}};
    if (const auto it = doc.find("state_labels"); it != doc.end()) {
        expect_array(*it, n, "state_labels");
        for (const auto& label : *it) {
            if (!label.is_string()) {
                throw DocumentError("state labels must be strings");
            }
            out.state_labels.push_back(label.get<std::string>());
        }
    }
    return out;
}

MdpDocument read_mdp_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DocumentError("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_mdp_document(buffer.str());
}

std::string to_json(const MdpDocument& doc) {
    const FiniteMdp& mdp = doc.mdp;
    json out;
    out["format_version"] = kFormatVersion;
    out["n_states"] = mdp.n_states();
    out["actions"] = mdp.actions();
    json rewards = json::array();
    json transitions = json::array();
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        json r = json::array();
        json p = json::array();
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
            r.push_back(mdp.reward(s, a));
            const auto row = mdp.row(s, a);
            p.push_back(std::vector<double>(row.begin(), row.end()));
        }
        rewards.push_back(std::move(r));
        transitions.push_back(std::move(p));
    }
    out["rewards"] = std::move(rewards);
    out["transitions"] = std::move(transitions);
    if (!doc.state_labels.empty()) {
        out["state_labels"] = doc.state_labels;
    }
    return out.dump() + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream outfile(path);
    if (!outfile) {
        throw DocumentError("cannot write " + path.string());
    }
    outfile << text;
    if (!outfile) {
        throw DocumentError("failed writing " + path.string());
    }
}

void write_mdp_file(const std::filesystem::path& path, const MdpDocument& doc) {
    write_text_file(path, to_json(doc));
}

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", x == 0.0 ? 0.0 : x);
    return buf;
}

std::string format_metric_table(const MetricMatrix& metric) {
    std::string out;
    for (std::size_t i = 0; i < metric.size(); ++i) {
        for (std::size_t j = 0; j < metric.size(); ++j) {
            if (j > 0) {
                out += ' ';
            }
            out += format_number(metric(i, j));
        }
        out += '\n';
    }
    return out;
}

std::string aggregation_csv(const AggregationReport& report) {
    std::string out = "block,size,diameter,value_spread_bound,observed_value_spread\n";
    for (const auto& b : report.blocks) {
        out += std::to_string(b.block) + ',' + std::to_string(b.size) + ',' + format_number(b.diameter) + ',' +
               format_number(b.value_spread_bound) + ',' + format_number(b.observed_value_spread) + '\n';
    }
    return out;
}

std::string convergence_csv(const std::vector<toy::ConvergenceRow>& rows) {
    std::string out = "n,max_metric_dev,max_value_dev,certified_bound\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n) + ',' + format_number(r.max_metric_dev) + ',' + format_number(r.max_value_dev) +
               ',' + format_number(r.certified_bound) + '\n';
    }
    return out;
}

} // namespace bisim::io
