#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / "nigrid_cli_tests";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

CommandResult run_cli(const std::string& args) {
    const fs::path out_file = work_dir() / "stdout.txt";
    const fs::path err_file = work_dir() / "stderr.txt";
    const std::string command = std::string(NIGRID_CLI_PATH) + " " + args + " >" +
                                out_file.string() + " 2>" + err_file.string();
    const int status = std::system(command.c_str());

    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    auto slurp = [](const fs::path& p) {
        std::ifstream file(p, std::ios::binary);
        std::ostringstream text;
        text << file.rdbuf();
        return text.str();
    };
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    return result;
}

fs::path write_scenario(const std::string& name, const std::string& text) {
    const fs::path path = work_dir() / name;
    std::ofstream file(path, std::ios::binary);
    file << text;
    return path;
}

std::string slurp_file(const fs::path& path) {
    std::ifstream file(path, std::ios::binary);
    std::ostringstream text;
    text << file.rdbuf();
    return text.str();
}

const char* kBaseline = R"({
  "buses": [
    {"id": 1, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.2},
    {"id": 2, "M": 1.5, "D": 1.2, "E0": 1.0, "P_L": -0.1}
  ],
  "lines": [
    {"from": 1, "to": 2, "X": 1.0, "psi_bar": 0.5235987755982988}
  ],
  "initial": [
    {"bus": 1, "delta_dev": 0.3}
  ],
  "sim": {"T": 5.0, "dt": 0.001, "consensus_tol": 0.001}
})";

}  // namespace

TEST_CASE("validate accepts the baseline") {
    const fs::path scenario = write_scenario("baseline.json", kBaseline);
    const CommandResult result = run_cli("validate " + scenario.string());
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("valid") != std::string::npos);
}

TEST_CASE("validate rejects a battery with K1 == K2") {
    const fs::path scenario = write_scenario("bad_battery.json", R"({
      "buses": [
        {"id": 1, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0},
        {"id": 2, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0}
      ],
      "lines": [{"from": 1, "to": 2, "X": 1.0, "psi_bar": 0.1}],
      "battery_edges": [{"line_index": 1, "tau": 1.0, "K1": 2.0, "K2": 2.0}]
    })");
    const CommandResult result = run_cli("validate " + scenario.string());
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("K2 > K1") != std::string::npos);
}

TEST_CASE("validate rejects a disconnected topology") {
    const fs::path scenario = write_scenario("disconnected.json", R"({
      "buses": [
        {"id": 1, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0},
        {"id": 2, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0},
        {"id": 3, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0}
      ],
      "lines": [{"from": 1, "to": 2, "X": 1.0, "psi_bar": 0.0}]
    })");
    const CommandResult result = run_cli("validate " + scenario.string());
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("disconnected") != std::string::npos);
}

TEST_CASE("validate reports parse errors with a line number") {
    const fs::path scenario = write_scenario("broken.json", "{\n  \"buses\": [\n  nope\n}");
    const CommandResult result = run_cli("validate " + scenario.string());
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("line 3") != std::string::npos);
}

TEST_CASE("simulate writes the documented CSV and is byte-stable") {
    const fs::path scenario = write_scenario("baseline_sim.json", kBaseline);
    const fs::path out_dir = work_dir() / "sim_out";
    const std::string args =
        "simulate " + scenario.string() + " --out " + out_dir.string() + " --horizon 2";

    const CommandResult first = run_cli(args);
    REQUIRE(first.exit_code == 0);
    const fs::path csv_path = out_dir / "baseline_sim_trajectory.csv";
    const fs::path report_path = out_dir / "baseline_sim_report.json";
    REQUIRE(fs::exists(csv_path));
    REQUIRE(fs::exists(report_path));

    const std::string csv = slurp_file(csv_path);
    const std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header ==
          "t,delta_dev_1,freq_dev_1,delta_dev_2,freq_dev_2,psi_dev_1,flow_dev_1,W_hat");

    const std::string report = slurp_file(report_path);
    CHECK(report.find("\"tool_version\"") != std::string::npos);

    const CommandResult second = run_cli(args);
    REQUIRE(second.exit_code == 0);
    CHECK(slurp_file(csv_path) == csv);
    CHECK(slurp_file(report_path) == report);

    // W_hat column never steps up beyond the frozen tolerance
    std::istringstream rows(csv);
    std::string row;
    std::getline(rows, row);  // header
    double previous = 0.0;
    bool have_previous = false;
    while (std::getline(rows, row)) {
        const double w = std::stod(row.substr(row.rfind(',') + 1));
        if (have_previous) CHECK(w - previous <= 1e-8);
        previous = w;
        have_previous = true;
    }
}

TEST_CASE("simulate of a zero-deviation scenario emits all-zero columns") {
    const fs::path scenario = write_scenario("flat.json", R"({
      "buses": [
        {"id": 1, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.2},
        {"id": 2, "M": 1.5, "D": 1.2, "E0": 1.0, "P_L": -0.1}
      ],
      "lines": [{"from": 1, "to": 2, "X": 1.0, "psi_bar": 0.5235987755982988}],
      "sim": {"T": 1.0, "dt": 0.001, "consensus_tol": 0.001}
    })");
    const fs::path out_dir = work_dir() / "flat_out";
    const CommandResult result =
        run_cli("simulate " + scenario.string() + " --out " + out_dir.string());
    REQUIRE(result.exit_code == 0);

    std::istringstream rows(slurp_file(out_dir / "flat_trajectory.csv"));
    std::string row;
    std::getline(rows, row);
    while (std::getline(rows, row)) {
        std::istringstream cells(row);
        std::string cell;
        std::getline(cells, cell, ',');  // time column
        while (std::getline(cells, cell, ',')) CHECK(std::stod(cell) == 0.0);
    }
}

TEST_CASE("check passes on the baseline and fails out-of-domain starts") {
    const fs::path baseline = write_scenario("check_baseline.json", kBaseline);
    CHECK(run_cli("check " + baseline.string() + " --which all").exit_code == 0);

    const fs::path far = write_scenario("check_far.json", R"({
      "buses": [
        {"id": 1, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0},
        {"id": 2, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0}
      ],
      "lines": [{"from": 1, "to": 2, "X": 1.0, "psi_bar": 0.5235987755982988}],
      "initial": [{"bus": 1, "delta_dev": 2.2}],
      "sim": {"T": 2.0, "dt": 0.001, "consensus_tol": 0.001}
    })");
    const CommandResult domain = run_cli("check " + far.string() + " --which domain");
    CHECK(domain.exit_code == 1);
    CHECK(domain.out.find("D1") != std::string::npos);
}

TEST_CASE("check flags an undamped bus declared output-strict") {
    const fs::path scenario = write_scenario("undamped.json", R"({
      "buses": [
        {"id": 1, "M": 1.0, "D": 0.0, "E0": 1.0, "P_L": 0.0},
        {"id": 2, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0}
      ],
      "lines": [{"from": 1, "to": 2, "X": 1.0, "psi_bar": 0.1}],
      "sim": {"T": 1.0, "dt": 0.001, "consensus_tol": 0.001}
    })");
    const CommandResult result = run_cli("check " + scenario.string() + " --which dissipation");
    CHECK(result.exit_code == 1);
    CHECK(result.out.find("D = 0") != std::string::npos);
}

TEST_CASE("check reports inconclusive sampling with its own exit code") {
    // the D1 interval (-pi - 5, pi - 5) excludes the whole sampled box
    const fs::path scenario = write_scenario("inconclusive.json", R"({
      "buses": [
        {"id": 1, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0},
        {"id": 2, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0}
      ],
      "lines": [{"from": 1, "to": 2, "X": 1.0, "psi_bar": 2.5}],
      "sim": {"T": 1.0, "dt": 0.001, "consensus_tol": 0.001}
    })");
    const CommandResult result = run_cli("check " + scenario.string() + " --which lyapunov");
    CHECK(result.exit_code == 3);
}

TEST_CASE("sweep writes one row per point and handles empty ranges") {
    const fs::path scenario = write_scenario("sweep.json", R"({
      "buses": [
        {"id": 1, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.1},
        {"id": 2, "M": 1.2, "D": 1.1, "E0": 1.05, "P_L": 0.0},
        {"id": 3, "M": 0.8, "D": 0.9, "E0": 0.98, "P_L": -0.1}
      ],
      "lines": [
        {"from": 1, "to": 2, "X": 0.8, "psi_bar": 0.2},
        {"from": 2, "to": 3, "X": 0.8, "psi_bar": 0.1},
        {"from": 1, "to": 3, "X": 0.8, "psi_bar": 0.3}
      ],
      "battery_edges": [{"line_index": 1, "tau": 1.0, "K1": 1.0, "K2": 2.0}],
      "initial": [{"bus": 1, "delta_dev": 0.2}],
      "sim": {"T": 2.0, "dt": 0.001, "consensus_tol": 0.001}
    })");
    const fs::path out = work_dir() / "sweep.csv";
    const CommandResult result =
        run_cli("sweep " + scenario.string() + " --param battery_line --values 1,2,3 --out " +
                out.string());
    REQUIRE(result.exit_code == 0);
    const std::string table = slurp_file(out);
    CHECK(std::count(table.begin(), table.end(), '\n') == 4);
    CHECK(table.rfind("value,consensus_achieved", 0) == 0);

    const CommandResult empty =
        run_cli("sweep " + scenario.string() + " --param battery_line --values \"\"");
    CHECK(empty.exit_code == 0);
    CHECK(empty.out ==
          "value,consensus_achieved,settle_time,min_W_hat,max_W_hat_step_increase\n");
}

TEST_CASE("integration blow-ups exit with the divergence code") {
    const fs::path scenario = write_scenario("diverge.json", kBaseline);
    const CommandResult result =
        run_cli("simulate " + scenario.string() + " --out " + (work_dir() / "div").string() +
                " --dt 10 --horizon 10000");
    CHECK(result.exit_code == 2);
    CHECK(result.err.find("divergence") != std::string::npos);
}
