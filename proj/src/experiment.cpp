#include "nigrid/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nigrid/scenario_io.hpp"
#include "nigrid/trajectory.hpp"

namespace nigrid {

namespace {

using nlohmann::json;

json dissipation_to_json(const DissipationReport& report) {
    json entry;
    entry["samples"] = report.samples;
    entry["max_violation"] = report.max_violation;
    entry["tolerance"] = report.tolerance;
    entry["verdict"] = to_string(report.verdict);
    entry["violation_count"] = report.violating_times.size();
    return entry;
}

}  // namespace

bool RunReport::all_certificates_pass() const {
    for (const DissipationReport& r : plant_dissipation) {
        if (!r.passed()) return false;
    }
    for (const DissipationReport& r : controller_dissipation) {
        if (!r.passed()) return false;
    }
    return lyapunov.verdict == Verdict::pass;
}

FrequencySyncReport detect_frequency_sync(const GridScenario& scenario, const Trajectory& traj,
                                          double tolerance) {
    FrequencySyncReport report;
    report.tolerance = tolerance;
    const std::size_t n = scenario.buses.size();
    if (traj.X_p.empty()) throw InsufficientDataError("trajectory has no recorded states");

    auto max_freq_dev = [&](std::size_t k) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::max(worst, std::abs(traj.X_p[k][2 * static_cast<Eigen::Index>(i)]));
        }
        return worst;
    };

    const std::size_t samples = traj.X_p.size();
    report.final_max_freq_dev = max_freq_dev(samples - 1);

    std::size_t first_settled = 0;
    for (std::size_t k = samples; k-- > 0;) {
        if (max_freq_dev(k) > tolerance) {
            first_settled = k + 1;
            break;
        }
    }
    if (first_settled < samples) {
        report.achieved = true;
        report.settle_time = traj.time(first_settled);
    }
    return report;
}

RunReport run_experiment(const GridScenario& scenario, const RunConfig& config,
                         Trajectory* out_trajectory) {
    RunReport report;
    report.config = config;
    report.scenario_hash = scenario_hash(scenario);

    const InterconnectedSystem sys = assemble_grid_system(scenario);

    std::vector<int> battery_lines;
    for (const auto& [index, _] : scenario.battery_edges) battery_lines.push_back(index);
    report.domain = domain_membership(scenario, scenario.initial_angle_dev, battery_lines);
    if (!report.domain.in_d1 || !report.domain.in_d2) {
        report.warnings.push_back("initial deviation lies outside D1/D2; the local consensus "
                                  "claims do not cover this run");
    }

    Trajectory traj = integrate(sys, initial_plant_state(scenario),
                                initial_controller_state(scenario), config.horizon, config.dt,
                                IntegrationMethod::rk4, config.record_stride);
    traj.scenario_hash = report.scenario_hash;

    const double fd_tolerance = config.dissipation_coeff * traj.dt * traj.dt;
    for (int i = 0; i < sys.node_count(); ++i) {
        report.plant_dissipation.push_back(check_dissipation(
            sys.plant(i), plant_trace(sys, traj, i), sys.plant(i).osni_epsilon, fd_tolerance));
        if (sys.plant(i).osni_epsilon == 0.0) {
            report.warnings.push_back("bus " + std::to_string(i + 1) +
                                      " is undamped: dissipation checked as plain NI");
        }
    }
    for (int l = 0; l < sys.edge_count(); ++l) {
        report.controller_dissipation.push_back(
            check_dissipation(sys.controller(l), controller_trace(sys, traj, l),
                              sys.controller(l).osni_epsilon, fd_tolerance));
    }

    report.lyapunov = monitor_monotonicity(sys, traj, config.quad_step,
                                           config.monotonicity_coeff * traj.dt * traj.dt);
    traj.W_hat = lyapunov_series(sys, traj, config.quad_step);

    report.consensus = detect_consensus(traj, config.consensus_tolerance);
    report.frequency_sync = detect_frequency_sync(scenario, traj, config.consensus_tolerance);

    const int m = sys.channel_width();
    for (const auto& [line_index, params] : scenario.battery_edges) {
        const Line& line = scenario.lines[static_cast<std::size_t>(line_index)];
        BatterySummary summary;
        summary.line = line_index;
        summary.bus_i = line.from;
        summary.bus_j = line.to;
        const int offset = sys.controller_state_offset(line_index);
        summary.command_i.reserve(traj.size());
        summary.command_j.reserve(traj.size());
        for (std::size_t k = 0; k < traj.size(); ++k) {
            const double state = traj.X_c[k][offset];
            const double input = traj.U_c[k][static_cast<Eigen::Index>(line_index) * m];
            const double cmd_i = battery_power_command(+1, state, input, line, params);
            const double cmd_j = battery_power_command(-1, state, input, line, params);
            summary.command_i.push_back(cmd_i);
            summary.command_j.push_back(cmd_j);
            summary.max_abs_command =
                std::max({summary.max_abs_command, std::abs(cmd_i), std::abs(cmd_j)});
            summary.max_abs_pair_sum = std::max(summary.max_abs_pair_sum, std::abs(cmd_i + cmd_j));
        }
        report.batteries.push_back(std::move(summary));
    }

    if (out_trajectory) *out_trajectory = std::move(traj);
    return report;
}

json report_to_json(const RunReport& report) {
    json doc;
    doc["tool_version"] = report.tool_version;

    char hash_text[32];
    std::snprintf(hash_text, sizeof(hash_text), "%016llx",
                  static_cast<unsigned long long>(report.scenario_hash));
    doc["scenario_hash"] = hash_text;

    doc["config"] = {{"T", report.config.horizon},
                     {"dt", report.config.dt},
                     {"consensus_tol", report.config.consensus_tolerance},
                     {"quad_step", report.config.quad_step},
                     {"seed", report.config.seed},
                     {"record_stride", report.config.record_stride}};

    doc["domain"] = {{"in_d1", report.domain.in_d1},
                     {"in_d2", report.domain.in_d2},
                     {"d2_sum", report.domain.d2_sum}};

    doc["dissipation"] = json::object();
    doc["dissipation"]["plants"] = json::array();
    for (const auto& entry : report.plant_dissipation) {
        doc["dissipation"]["plants"].push_back(dissipation_to_json(entry));
    }
    doc["dissipation"]["controllers"] = json::array();
    for (const auto& entry : report.controller_dissipation) {
        doc["dissipation"]["controllers"].push_back(dissipation_to_json(entry));
    }

    doc["lyapunov"] = {{"samples", report.lyapunov.samples},
                       {"initial", report.lyapunov.initial_value},
                       {"final", report.lyapunov.final_value},
                       {"min", report.lyapunov.min_value},
                       {"max_step_increase", report.lyapunov.max_step_increase},
                       {"sharp_max_violation", report.lyapunov.sharp_max_violation},
                       {"eps_p_min", report.lyapunov.eps_p_min},
                       {"tolerance", report.lyapunov.tolerance},
                       {"verdict", to_string(report.lyapunov.verdict)}};

    doc["consensus"] = {{"achieved", report.consensus.achieved},
                        {"final_max_pairwise_gap", report.consensus.final_max_pairwise_gap},
                        {"tolerance", report.consensus.tolerance}};
    if (report.consensus.settle_time) {
        doc["consensus"]["settle_time"] = *report.consensus.settle_time;
    }

    doc["frequency_sync"] = {{"achieved", report.frequency_sync.achieved},
                             {"final_max_freq_dev", report.frequency_sync.final_max_freq_dev},
                             {"tolerance", report.frequency_sync.tolerance}};
    if (report.frequency_sync.achieved) {
        doc["frequency_sync"]["settle_time"] = report.frequency_sync.settle_time;
    }

    doc["batteries"] = json::array();
    for (const BatterySummary& battery : report.batteries) {
        json entry;
        entry["line"] = battery.line + 1;
        entry["bus_i"] = battery.bus_i + 1;
        entry["bus_j"] = battery.bus_j + 1;
        entry["max_abs_command"] = battery.max_abs_command;
        entry["max_abs_pair_sum"] = battery.max_abs_pair_sum;
        entry["command_i"] = battery.command_i;
        entry["command_j"] = battery.command_j;
        doc["batteries"].push_back(entry);
    }

    doc["warnings"] = report.warnings;
    return doc;
}

}  // namespace nigrid
