#include "doctest.h"

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bisim/io.hpp"
#include "bisim/toy.hpp"
#include "oracles.hpp"
#include "random_models.hpp"

using namespace bisim;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string out;
};

Run run(const std::string& args) {
    const std::string command = std::string(BISIM_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) {
        out += buf.data();
    }
    const int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::vector<std::vector<std::string>> split_lines(const std::string& text, char sep) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream fields(line);
        std::string cell;
        while (std::getline(fields, cell, sep)) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

struct Workspace {
    fs::path dir;
    Workspace() {
        dir = fs::temp_directory_path() / ("bisim_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }

    std::string write(const std::string& name, const FiniteMdp& mdp) const {
        const auto path = dir / name;
        io::write_mdp_file(path, {mdp, {}});
        return path.string();
    }
    std::string write_text(const std::string& name, const std::string& text) const {
        const auto path = dir / name;
        io::write_text_file(path, text);
        return path.string();
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

FiniteMdp absorbing_pair() { return FiniteMdp(2, {"a"}, {0.0, 1.0}, {1, 0, 0, 1}); }

} // namespace

TEST_CASE("validate") {
    Workspace ws;
    CHECK(run("validate " + ws.write("ok.json", absorbing_pair())).status == 0);

    const auto bad = run("validate " + ws.write("short.json", FiniteMdp(2, {"a"}, {0, 1}, {0.5, 0.4, 0, 1})));
    CHECK(bad.status == 1);
    CHECK(bad.out.find("state 0 action a") != std::string::npos);
    CHECK(bad.out.find("row sum 0.9") != std::string::npos);

    CHECK(run("validate " + ws.write_text("broken.json", "{\"format_version\": 1,")).status == 2);
    CHECK(run("validate " + ws.path("missing.json")).status == 2);
    CHECK(run("validate").status == 2);
    CHECK(run("no-such-command").status == 2);
}

TEST_CASE("metric") {
    Workspace ws;
    SUBCASE("absorbing pair") {
        const auto r = run("metric " + ws.write("pair.json", absorbing_pair()) + " -c 0.5 -e 1e-6");
        REQUIRE(r.status == 0);
        const auto rows = split_lines(r.out, ' ');
        REQUIRE(rows.size() == 3);
        CHECK(std::abs(std::stod(rows[0][1]) - 2.0) <= 1e-6);
        CHECK(std::abs(std::stod(rows[1][0]) - 2.0) <= 1e-6);
        CHECK(rows[0][0] == "0.000000000");
        CHECK(rows[2][0] == "certified_error");
        CHECK(std::stod(rows[2][2]) <= 1e-6);
    }
    SUBCASE("single state") {
        const auto r = run("metric " + ws.write("one.json", FiniteMdp(1, {"a"}, {0.4}, {1.0})) + " -c 0.5");
        REQUIRE(r.status == 0);
        CHECK(r.out.rfind("0.000000000\ncertified_error", 0) == 0);
    }
    SUBCASE("grid benchmark n = 10") {
        const auto r = run("metric " + ws.write("toy.json", toy::toy_mdp(10)) + " --metric-discount 0.5 --epsilon 1e-6");
        REQUIRE(r.status == 0);
        const auto rows = split_lines(r.out, ' ');
        for (std::size_t k = 0; k < 10; ++k) {
            for (std::size_t l = 0; l < 10; ++l) {
                CHECK(std::abs(std::stod(rows[k][l]) - std::abs(double(k) - double(l)) / 5.0) <= 1e-6);
            }
        }
    }
    SUBCASE("output file and determinism") {
        const auto model = ws.write("rand.json", [] {
            testing::Rng rng(4);
            return testing::random_mdp(rng, 6, 2);
        }());
        const auto first = run("metric " + model + " -c 0.7");
        const auto second = run("metric " + model + " -c 0.7");
        CHECK(first.out == second.out);
        CHECK(run("metric " + model + " -c 0.7 -o " + ws.path("table.txt")).out.empty());
        CHECK(fs::exists(ws.path("table.txt")));
    }
    SUBCASE("domain failures") {
        CHECK(run("metric " + ws.write("pair2.json", absorbing_pair()) + " -c 1.5").status == 1);
        CHECK(run("metric " + ws.write("bad.json", FiniteMdp(2, {"a"}, {0, 1}, {0.5, 0.4, 0, 1}))).status == 1);
    }
}

TEST_CASE("solve") {
    Workspace ws;
    SUBCASE("absorbing pair") {
        const auto r = run("solve " + ws.write("pair.json", absorbing_pair()) + " -g 0.5 -e 1e-9");
        REQUIRE(r.status == 0);
        const auto rows = split_lines(r.out, ',');
        REQUIRE(rows.size() == 3);
        CHECK(rows[0] == std::vector<std::string>{"state", "value", "action"});
        CHECK(std::stod(rows[1][1]) == doctest::Approx(0.0));
        CHECK(std::stod(rows[2][1]) == doctest::Approx(2.0));
    }
    SUBCASE("grid benchmark n = 100") {
        const auto r = run("solve " + ws.write("toy.json", toy::toy_mdp(100)) + " --discount 0.5 -e 1e-9");
        REQUIRE(r.status == 0);
        const auto rows = split_lines(r.out, ',');
        // State 74 has center 0.745, state 25 has center 0.255.
        CHECK(std::stod(rows[1 + 74][1]) == doctest::Approx(1.5).epsilon(0.02));
        CHECK(rows[1 + 74][2] == "b");
        CHECK(std::stod(rows[1 + 25][1]) ==
              doctest::Approx(testing::toy_self_consistent_value(0.255, 0.5)).epsilon(1e-3));
        CHECK(rows[1 + 25][2] == "a");
    }
}

TEST_CASE("aggregate") {
    Workspace ws;
    const auto model = ws.write("toy.json", toy::toy_mdp(100));
    SUBCASE("diameters respect the target") {
        const auto r = run("aggregate " + model + " -c 0.5 -g 0.5 -e 0.1 -o " + ws.path("q.json"));
        REQUIRE(r.status == 0);
        const auto rows = split_lines(r.out, ',');
        REQUIRE(rows.size() > 1);
        CHECK(rows[0][2] == "diameter");
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(std::stod(rows[i][2]) <= 0.1);
        }
        const auto quotient = io::read_mdp_file(ws.path("q.json"));
        CHECK(quotient.mdp.n_states() == rows.size() - 1);
        CHECK(validate_mdp(quotient.mdp).empty());
    }
    SUBCASE("large target gives one block") {
        const auto r = run("aggregate " + model + " -c 0.5 -g 0.5 -e 100 -o " + ws.path("one.json"));
        REQUIRE(r.status == 0);
        CHECK(io::read_mdp_file(ws.path("one.json")).mdp.n_states() == 1);
    }
    SUBCASE("small target gives the identity quotient") {
        const auto r = run("aggregate " + model + " -c 0.5 -g 0.5 -e 0.01 -o " + ws.path("same.json") +
                           " --report " + ws.path("report.csv"));
        REQUIRE(r.status == 0);
        CHECK(r.out.empty());
        CHECK(io::read_mdp_file(ws.path("same.json")).mdp == toy::toy_mdp(100));
        CHECK(fs::exists(ws.path("report.csv")));
    }
    SUBCASE("gamma above c") {
        CHECK(run("aggregate " + model + " -c 0.5 -g 0.6 -e 0.1").status == 1);
    }
}

TEST_CASE("toy") {
    Workspace ws;
    SUBCASE("n = 4 emits the model and the table") {
        const auto r = run("toy -n 4 -g 0.5 -c 0.5 -o " + ws.path("toy4.json"));
        REQUIRE(r.status == 0);
        CHECK(io::read_mdp_file(ws.path("toy4.json")).mdp == toy::toy_mdp(4));
        const auto rows = split_lines(r.out, ',');
        REQUIRE(rows.size() == 2);
        CHECK(rows[0] == std::vector<std::string>{"n", "max_metric_dev", "max_value_dev", "certified_bound"});
        CHECK(rows[1][0] == "4");
        CHECK(std::stod(rows[1][1]) <= 1e-6);
        // Lower-branch gap between the published display and the exact 4-state solve.
        CHECK(std::stod(rows[1][2]) == doctest::Approx(0.25).epsilon(1e-6));
        CHECK(rows[1][3] == "0.500000000");
    }
    SUBCASE("n = 1") {
        const auto rows = split_lines(run("toy -n 1 -g 0.5 -c 0.5").out, ',');
        REQUIRE(rows.size() == 2);
        CHECK(rows[1][1] == "0.000000000");
        CHECK(rows[1][2] == "0.000000000");
    }
    SUBCASE("several sizes") {
        const auto r = run("toy -n 10 -n 100 -n 1000 -g 0.5 -c 0.5 -o " + ws.path("grid.json"));
        REQUIRE(r.status == 0);
        const auto rows = split_lines(r.out, ',');
        REQUIRE(rows.size() == 4);
        CHECK(rows[1][3] == "0.200000000");
        CHECK(rows[2][3] == "0.020000000");
        CHECK(rows[3][3] == "0.002000000");
        CHECK(fs::exists(ws.path("grid_n10.json")));
        CHECK(fs::exists(ws.path("grid_n1000.json")));
    }
}

TEST_CASE("perturb") {
    Workspace ws;
    testing::Rng rng(15);
    const auto base = testing::random_mdp(rng, 5, 2);
    const auto first = ws.write("base.json", base);
    auto parse = [](const std::string& out) {
        std::map<std::string, std::string> fields;
        for (const auto& row : split_lines(out, ' ')) {
            fields[row[0]] = row.size() > 1 ? row[1] : "";
        }
        return fields;
    };
    SUBCASE("identical files") {
        const auto r = run("perturb " + first + " " + first + " -c 0.5");
        CHECK(r.status == 0);
        const auto f = parse(r.out);
        CHECK(f.at("lhs") == "0.000000000");
        CHECK(f.at("rhs") == "0.000000000");
        CHECK(f.count("pass") == 1);
    }
    SUBCASE("reward shift") {
        auto shifted = base;
        shifted.reward(3, 0) += 0.05;
        const auto r = run("perturb " + first + " " + ws.write("shift.json", shifted) + " -c 0.5");
        CHECK(r.status == 0);
        CHECK(std::stod(parse(r.out).at("rhs")) == doctest::Approx(0.2).epsilon(1e-9));
    }
    SUBCASE("random perturbation") {
        const auto r = run("perturb " + first + " " + ws.write("noisy.json", testing::perturb(rng, base, 0.05)) +
                           " -c 0.8");
        CHECK(r.status == 0);
        CHECK(parse(r.out).count("pass") == 1);
    }
    SUBCASE("shape mismatch") {
        CHECK(run("perturb " + first + " " + ws.write("small.json", absorbing_pair())).status == 1);
    }
}
