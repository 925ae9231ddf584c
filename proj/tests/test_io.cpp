#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "fixtures.hpp"

#include "nigrid/csv.hpp"
#include "nigrid/experiment.hpp"
#include "nigrid/scenario_io.hpp"
#include "nigrid/sweep.hpp"

namespace {

const char* kBaselineText = R"({
  "buses": [
    {"id": 1, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.2},
    {"id": 2, "M": 1.5, "D": 1.2, "E0": 1.0, "P_L": -0.1}
  ],
  "lines": [
    {"from": 1, "to": 2, "X": 1.0, "psi_bar": 0.5235987755982988}
  ],
  "initial": [
    {"bus": 1, "delta_dev": 0.3, "freq_dev": 0.0}
  ],
  "sim": {"T": 50.0, "dt": 0.001, "consensus_tol": 0.001}
})";

bool has_diagnostic(const nigrid::ParseResult& result, const std::string& needle) {
    for (const nigrid::Diagnostic& diag : result.diagnostics) {
        if (diag.path.find(needle) != std::string::npos ||
            diag.message.find(needle) != std::string::npos) {
            return true;
        }
    }
    return false;
}

bool scenarios_equal(const nigrid::GridScenario& a, const nigrid::GridScenario& b) {
    if (a.buses.size() != b.buses.size() || a.lines.size() != b.lines.size() ||
        a.battery_edges.size() != b.battery_edges.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.buses.size(); ++i) {
        if (a.buses[i].inertia != b.buses[i].inertia || a.buses[i].damping != b.buses[i].damping ||
            a.buses[i].internal_voltage != b.buses[i].internal_voltage ||
            a.buses[i].load != b.buses[i].load ||
            a.buses[i].battery_baseline != b.buses[i].battery_baseline) {
            return false;
        }
    }
    for (std::size_t l = 0; l < a.lines.size(); ++l) {
        if (a.lines[l].from != b.lines[l].from || a.lines[l].to != b.lines[l].to ||
            a.lines[l].reactance != b.lines[l].reactance ||
            a.lines[l].equilibrium_angle != b.lines[l].equilibrium_angle) {
            return false;
        }
    }
    for (const auto& [index, params] : a.battery_edges) {
        const auto other = b.battery_edges.find(index);
        if (other == b.battery_edges.end() || other->second.tau != params.tau ||
            other->second.k1 != params.k1 || other->second.k2 != params.k2) {
            return false;
        }
    }
    return a.initial_angle_dev == b.initial_angle_dev &&
           a.initial_freq_dev == b.initial_freq_dev &&
           a.sim.horizon == b.sim.horizon && a.sim.dt == b.sim.dt &&
           a.sim.consensus_tolerance == b.sim.consensus_tolerance &&
           a.nominal_frequency == b.nominal_frequency;
}

}  // namespace

TEST_CASE("baseline scenario parses and finalizes") {
    const nigrid::ParseResult result = nigrid::parse_scenario(kBaselineText);
    REQUIRE(result.ok());
    const nigrid::GridScenario& scenario = *result.scenario;
    CHECK(scenario.buses.size() == 2);
    CHECK(scenario.buses[1].inertia == 1.5);
    CHECK(scenario.lines[0].equilibrium_angle == doctest::Approx(fixtures::kPi / 6.0));
    CHECK(scenario.lines[0].max_transfer == doctest::Approx(1.0));
    CHECK(scenario.initial_angle_dev[0] == 0.3);
    CHECK(scenario.sim.horizon == 50.0);
    CHECK(result.equilibrium.residual <= 1e-12);
}

TEST_CASE("serialization round-trips field for field") {
    for (const nigrid::GridScenario& scenario :
         {fixtures::two_bus(), fixtures::triangle_with_battery(1), fixtures::ring(4)}) {
        const std::string text = nigrid::serialize_scenario(scenario);
        const nigrid::ParseResult reparsed = nigrid::parse_scenario(text);
        REQUIRE(reparsed.ok());
        CHECK(scenarios_equal(scenario, *reparsed.scenario));
        CHECK(nigrid::serialize_scenario(*reparsed.scenario) == text);
    }
}

TEST_CASE("unknown fields are rejected with their path") {
    const std::string text = R"({
      "buses": [{"id": 1, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0, "color": "red"}],
      "lines": []
    })";
    const nigrid::ParseResult result = nigrid::parse_scenario(text);
    CHECK_FALSE(result.ok());
    CHECK(has_diagnostic(result, "color"));
}

TEST_CASE("battery constraint violations carry the inequality") {
    const std::string text = R"({
      "buses": [
        {"id": 1, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0},
        {"id": 2, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0}
      ],
      "lines": [{"from": 1, "to": 2, "X": 1.0, "psi_bar": 0.1}],
      "battery_edges": [{"line_index": 1, "tau": 1.0, "K1": 2.0, "K2": 2.0}]
    })";
    const nigrid::ParseResult result = nigrid::parse_scenario(text);
    CHECK_FALSE(result.ok());
    CHECK(has_diagnostic(result, "K2 > K1"));
}

TEST_CASE("structural problems are field-addressed") {
    const std::string bad_ids = R"({
      "buses": [
        {"id": 1, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0},
        {"id": 5, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0}
      ],
      "lines": [{"from": 1, "to": 2, "X": 1.0, "psi_bar": 0.0}]
    })";
    CHECK(has_diagnostic(nigrid::parse_scenario(bad_ids), "buses[1].id"));

    const std::string bad_ref = R"({
      "buses": [
        {"id": 1, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0},
        {"id": 2, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0}
      ],
      "lines": [{"from": 1, "to": 7, "X": 1.0, "psi_bar": 0.0}]
    })";
    CHECK(has_diagnostic(nigrid::parse_scenario(bad_ref), "lines[0].to"));

    const std::string disconnected = R"({
      "buses": [
        {"id": 1, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0},
        {"id": 2, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0},
        {"id": 3, "M": 1.0, "D": 1.0, "E0": 1.0, "P_L": 0.0}
      ],
      "lines": [{"from": 1, "to": 2, "X": 1.0, "psi_bar": 0.0}]
    })";
    CHECK(has_diagnostic(nigrid::parse_scenario(disconnected), "disconnected"));
}

TEST_CASE("syntax errors carry a line number") {
    const nigrid::ParseResult result = nigrid::parse_scenario("{\n  \"buses\": [\n  oops\n}");
    CHECK_FALSE(result.ok());
    CHECK(has_diagnostic(result, "line 3"));
}

TEST_CASE("scenario hash is stable and sensitive") {
    const nigrid::GridScenario scenario = fixtures::two_bus();
    CHECK(nigrid::scenario_hash(scenario) == nigrid::scenario_hash(scenario));
    nigrid::GridScenario modified = scenario;
    modified.buses[0].inertia += 1e-9;
    CHECK(nigrid::scenario_hash(scenario) != nigrid::scenario_hash(modified));
}

TEST_CASE("apply_parameter edits the addressed field and re-finalizes") {
    const nigrid::GridScenario base = fixtures::triangle_with_battery(0);

    const nigrid::GridScenario shifted =
        nigrid::apply_parameter(base, "initial[2].delta_dev", 0.7);
    CHECK(shifted.initial_angle_dev[1] == 0.7);

    const nigrid::GridScenario stiffer = nigrid::apply_parameter(base, "lines[1].X", 0.5);
    CHECK(stiffer.lines[0].reactance == 0.5);
    CHECK(stiffer.lines[0].max_transfer ==
          doctest::Approx(base.lines[0].max_transfer * base.lines[0].reactance / 0.5));

    const nigrid::GridScenario tuned = nigrid::apply_parameter(base, "battery_edges[1].K2", 3.0);
    CHECK(tuned.battery_edges.at(0).k2 == 3.0);

    const nigrid::GridScenario moved = nigrid::apply_parameter(base, "battery_line", 3.0);
    CHECK(moved.battery_edges.count(2) == 1);
    CHECK(moved.battery_edges.count(0) == 0);

    CHECK_THROWS_AS(nigrid::apply_parameter(base, "nonsense", 1.0), nigrid::InvalidInputError);
    CHECK_THROWS_AS(nigrid::apply_parameter(base, "buses[9].M", 1.0), nigrid::InvalidInputError);
    CHECK_THROWS_AS(nigrid::apply_parameter(base, "buses[1].weight", 1.0),
                    nigrid::InvalidInputError);
}

TEST_CASE("sweeping the battery line yields one row per line") {
    nigrid::GridScenario base = fixtures::triangle_with_battery(0);
    base.sim.horizon = 2.0;
    nigrid::RunConfig config = nigrid::RunConfig::from(base.sim);
    config.quad_step = 1e-3;

    const std::vector<nigrid::SweepPoint> points =
        nigrid::run_sweep(base, "battery_line", {1.0, 2.0, 3.0}, config);
    REQUIRE(points.size() == 3);
    const std::string table = nigrid::sweep_csv(points);
    CHECK(std::count(table.begin(), table.end(), '\n') == 4);  // header + 3 rows

    CHECK(nigrid::run_sweep(base, "battery_line", {}, config).empty());
    CHECK(nigrid::sweep_csv({}) ==
          "value,consensus_achieved,settle_time,min_W_hat,max_W_hat_step_increase\n");
}

TEST_CASE("out-of-domain starts are flagged but still fully reported") {
    nigrid::GridScenario scenario = fixtures::two_bus();
    scenario.initial_angle_dev = {2.8, 0.0};  // beyond the D1 interval
    scenario.sim.horizon = 2.0;
    nigrid::compute_equilibrium(scenario);
    nigrid::RunConfig config = nigrid::RunConfig::from(scenario.sim);
    config.quad_step = 1e-3;

    const nigrid::RunReport report = nigrid::run_experiment(scenario, config);
    CHECK_FALSE(report.domain.in_d1);
    CHECK_FALSE(report.warnings.empty());
    // the consensus verdict is still computed for the run
    CHECK(report.consensus.tolerance == scenario.sim.consensus_tolerance);
    CHECK(report.consensus.final_max_pairwise_gap > 0.0);
}

TEST_CASE("battery runs report the per-end command series") {
    nigrid::GridScenario scenario = fixtures::triangle_with_battery(1);
    scenario.sim.horizon = 1.0;
    nigrid::RunConfig config = nigrid::RunConfig::from(scenario.sim);
    config.quad_step = 1e-3;

    nigrid::Trajectory traj;
    const nigrid::RunReport report = nigrid::run_experiment(scenario, config, &traj);
    REQUIRE(report.batteries.size() == 1);
    const nigrid::BatterySummary& battery = report.batteries.front();
    CHECK(battery.command_i.size() == traj.size());
    CHECK(battery.command_j.size() == traj.size());
    CHECK(battery.max_abs_pair_sum <= 1e-12);
    CHECK(battery.max_abs_command > 0.0);

    const nlohmann::json doc = nigrid::report_to_json(report);
    CHECK(doc.at("batteries").at(0).at("command_i").size() == traj.size());
}

TEST_CASE("sweeping the initial deviation keeps in-domain consensus") {
    nigrid::GridScenario base = fixtures::two_bus();
    base.sim.horizon = 40.0;
    nigrid::RunConfig config = nigrid::RunConfig::from(base.sim);
    config.quad_step = 1e-3;

    const std::vector<double> magnitudes = {0.1, 0.4, 0.8, 1.2};
    for (double magnitude : magnitudes) {
        const nigrid::GridScenario probe =
            nigrid::apply_parameter(base, "initial[1].delta_dev", magnitude);
        const nigrid::DomainReport domain =
            nigrid::domain_membership(probe, probe.initial_angle_dev, std::nullopt);
        REQUIRE(domain.in_d1);
        REQUIRE(domain.in_d2);
    }
    const std::vector<nigrid::SweepPoint> points =
        nigrid::run_sweep(base, "initial[1].delta_dev", magnitudes, config);
    REQUIRE(points.size() == magnitudes.size());
    for (const nigrid::SweepPoint& point : points) {
        CHECK(point.consensus_achieved);
        CHECK(point.max_w_hat_step_increase <= 1e-8);
    }
}

TEST_CASE("the worker pool honors NI_GRID_THREADS") {
    setenv("NI_GRID_THREADS", "1", 1);
    CHECK(nigrid::worker_count() == 1);
    unsetenv("NI_GRID_THREADS");
    CHECK(nigrid::worker_count() >= 1);
}

TEST_CASE("identical runs produce identical reports") {
    nigrid::GridScenario scenario = fixtures::two_bus();
    scenario.sim.horizon = 2.0;
    nigrid::RunConfig config = nigrid::RunConfig::from(scenario.sim);
    config.quad_step = 1e-3;

    const nigrid::RunReport first = nigrid::run_experiment(scenario, config);
    const nigrid::RunReport second = nigrid::run_experiment(scenario, config);
    CHECK(nigrid::report_to_json(first).dump() == nigrid::report_to_json(second).dump());
}

TEST_CASE("run report captures the certificate outcomes") {
    nigrid::GridScenario scenario = fixtures::two_bus();
    scenario.sim.horizon = 5.0;
    nigrid::RunConfig config = nigrid::RunConfig::from(scenario.sim);
    config.quad_step = 1e-3;

    nigrid::Trajectory traj;
    const nigrid::RunReport report = nigrid::run_experiment(scenario, config, &traj);
    CHECK(report.domain.in_d1);
    CHECK(report.domain.in_d2);
    CHECK(report.plant_dissipation.size() == 2);
    CHECK(report.controller_dissipation.size() == 1);
    CHECK(report.all_certificates_pass());
    CHECK(traj.W_hat.size() == traj.size());

    const nlohmann::json doc = nigrid::report_to_json(report);
    CHECK(doc.at("tool_version") == nigrid::kToolVersion);
    CHECK(doc.at("lyapunov").at("verdict") == "pass");
    CHECK(doc.at("domain").at("in_d1") == true);
}

TEST_CASE("trajectory csv lays out the documented columns") {
    nigrid::GridScenario scenario = fixtures::triangle_with_battery(1);
    scenario.sim.horizon = 1.0;
    nigrid::RunConfig config = nigrid::RunConfig::from(scenario.sim);
    config.quad_step = 1e-3;
    config.record_stride = 100;

    nigrid::Trajectory traj;
    nigrid::run_experiment(scenario, config, &traj);
    const std::string csv = nigrid::trajectory_csv(scenario, traj);
    const std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header ==
          "t,delta_dev_1,freq_dev_1,delta_dev_2,freq_dev_2,delta_dev_3,freq_dev_3,"
          "psi_dev_1,flow_dev_1,psi_dev_2,flow_dev_2,psi_dev_3,flow_dev_3,"
          "x_c_2,P_ST_2_2,P_ST_3_2,W_hat");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(traj.size()) + 1);
}
