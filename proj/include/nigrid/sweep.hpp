#pragma once

#include <limits>
#include <string>
#include <vector>

#include "nigrid/experiment.hpp"

namespace nigrid {

/// Outcome of one sweep point.
struct SweepPoint {
    double value = 0.0;
    bool consensus_achieved = false;
    double settle_time = std::numeric_limits<double>::quiet_NaN();
    double min_w_hat = 0.0;
    double max_w_hat_step_increase = 0.0;
};

/// Returns a copy of the scenario with one numeric field replaced and the
/// equilibrium re-derived. Specs address fields as
///   buses[<id>].M|D|E0|P_L|P_ST
///   lines[<index>].X|psi_bar
///   battery_edges[<line index>].tau|K1|K2
///   initial[<id>].delta_dev|freq_dev
///   battery_line            (moves the single battery edge to line round(value))
/// with 1-based ids/indices. Throws InvalidInputError on a malformed spec.
GridScenario apply_parameter(const GridScenario& scenario, const std::string& spec, double value);

/// Runs one experiment per value, fanned out over a worker pool; results come
/// back in input order. The pool size is capped by the NI_GRID_THREADS
/// environment variable.
std::vector<SweepPoint> run_sweep(const GridScenario& scenario, const std::string& spec,
                                  const std::vector<double>& values, const RunConfig& config);

/// Summary table, one row per sweep point.
std::string sweep_csv(const std::vector<SweepPoint>& points);

/// Worker-pool width: min(hardware, NI_GRID_THREADS), at least 1.
unsigned worker_count();

}  // namespace nigrid
