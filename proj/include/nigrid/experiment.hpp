#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "nigrid/grid.hpp"
#include "nigrid/lyapunov.hpp"
#include "nigrid/simulate.hpp"

namespace nigrid {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
    double horizon = 50.0;
    double dt = 1e-3;
    double consensus_tolerance = 1e-3;
    double quad_step = 1e-4;
    // finite-difference checks tolerate C*dt^2; these are the frozen C values
    double dissipation_coeff = 1.0;
    double monotonicity_coeff = 0.01;
    std::uint64_t seed = 2024;
    std::size_t record_stride = 1;

    static RunConfig from(const SimConfig& sim) {
        RunConfig config;
        config.horizon = sim.horizon;
        config.dt = sim.dt;
        config.consensus_tolerance = sim.consensus_tolerance;
        return config;
    }
};

/// Battery activity on one line over the run: the power commands issued at
/// both end buses (exact negatives of each other) and how far their sum ever
/// strayed from zero.
struct BatterySummary {
    int line = 0;   // 0-based
    int bus_i = 0;  // initial node
    int bus_j = 0;  // terminal node
    std::vector<double> command_i;
    std::vector<double> command_j;
    double max_abs_command = 0.0;
    double max_abs_pair_sum = 0.0;
};

struct FrequencySyncReport {
    bool achieved = false;
    double settle_time = 0.0;
    double final_max_freq_dev = 0.0;
    double tolerance = 0.0;
};

/// Everything one deterministic run produces for the certificate suites.
struct RunReport {
    std::string tool_version = kToolVersion;
    std::uint64_t scenario_hash = 0;
    RunConfig config;
    DomainReport domain;
    std::vector<DissipationReport> plant_dissipation;
    std::vector<DissipationReport> controller_dissipation;
    MonotonicityReport lyapunov;
    ConsensusVerdict consensus;
    FrequencySyncReport frequency_sync;
    std::vector<BatterySummary> batteries;
    std::vector<std::string> warnings;

    bool all_certificates_pass() const;
};

/// Integrates the scenario and runs every along-trajectory check: domain
/// membership at t = 0 (battery lines excluded), per-subsystem dissipation,
/// Lyapunov monotonicity, consensus and frequency synchronization, battery
/// power commands. The scenario must be finalized by compute_equilibrium.
/// When `out_trajectory` is given the recorded trajectory (with Lyapunov
/// samples filled in) is moved there.
RunReport run_experiment(const GridScenario& scenario, const RunConfig& config,
                         Trajectory* out_trajectory = nullptr);

/// Frequency-deviation settling scan over the recorded plant states.
FrequencySyncReport detect_frequency_sync(const GridScenario& scenario, const Trajectory& traj,
                                          double tolerance);

nlohmann::json report_to_json(const RunReport& report);

}  // namespace nigrid
