#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nigrid/interconnect.hpp"

namespace nigrid {

/// Synchronous generator bus. Powers are per-unit, time constants in
/// seconds; `mechanical` is derived from the steady-state balance by
/// compute_equilibrium, not an input.
struct Bus {
    double inertia = 1.0;           // M > 0
    double damping = 1.0;           // D >= 0; D == 0 is flagged (plain NI, no consensus claim)
    double internal_voltage = 1.0;  // E0 > 0
    double load = 0.0;              // P_L
    double mechanical = 0.0;        // P_M, filled by compute_equilibrium
    double battery_baseline = 0.0;  // steady-state battery output P_ST
};

/// Lossless transmission line. `max_transfer` (= E0_i * E0_j / X) is derived
/// by compute_equilibrium. Node indices are 0-based.
struct Line {
    int from = 0;
    int to = 0;
    double reactance = 0.0;          // X > 0
    double equilibrium_angle = 0.0;  // psi_bar, rad
    double max_transfer = 0.0;       // derived
};

/// First-order battery edge compensator (tau, K1, K2) with K2 > K1 > 0.
struct BatteryParams {
    double tau = 1.0;
    double k1 = 1.0;
    double k2 = 2.0;
};

struct SimConfig {
    double horizon = 50.0;
    double dt = 1e-3;
    double consensus_tolerance = 1e-3;
};

/// Input description of a post-fault study: grid data, the pre-fault
/// equilibrium angles per line, initial deviations, and which lines carry
/// battery controllers. Faults enter purely as initial deviations.
struct GridScenario {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    double nominal_frequency = 100.0 * 3.14159265358979323846;  // rad/s, bookkeeping only
    std::vector<double> initial_angle_dev;                      // per bus, defaults to zero
    std::vector<double> initial_freq_dev;                       // per bus, defaults to zero
    std::map<int, BatteryParams> battery_edges;                 // 0-based line index -> params
    SimConfig sim;

    NetworkTopology topology() const;
};

/// Lossless branch power flow P = (E_i*E_j/X) * sin(angle_diff).
double branch_flow(double voltage_i, double voltage_j, double reactance, double angle_diff);

struct EquilibriumReport {
    double residual = 0.0;            // steady-state balance residual after filling P_M
    double max_cycle_residual = 0.0;  // per-line angles need not close around cycles
    std::vector<std::string> warnings;
};

/// Validates the scenario, derives per-line max transfers, and fills each
/// bus's mechanical power from the steady-state balance. Per-line equilibrium
/// angles that do not close around cycles still define valid deviation
/// dynamics; they are reported, not rejected.
EquilibriumReport compute_equilibrium(GridScenario& scenario);

/// Swing-equation deviation plant: state (freq_dev, angle_dev), output the
/// angle deviation, storage (M/2) freq_dev^2, output strictness D. The plant
/// is linear, so the standing observability and input-effect hypotheses hold
/// by inspection of (A, B, C).
DynamicSystem make_node_plant(const Bus& bus);

/// Static line controller y = Pmax (sin(psi_bar) - sin(u + psi_bar)); needs a
/// finalized line (max_transfer > 0).
DynamicSystem make_line_controller(const Line& line);

/// Battery edge controller xdot = -x/tau + (K1/tau) u, y = x - K2 u with
/// storage x^2/(2 K1); negative-imaginary with steady-state margin K2 - K1.
DynamicSystem make_battery_controller(const BatteryParams& params);

/// Change in battery power injected at one end of a battery edge
/// (orientation_sign is the +-1 incidence entry of the bus on that line).
/// The two ends of an edge produce exact negatives.
double battery_power_command(int orientation_sign, double controller_state,
                             double controller_input, const Line& line,
                             const BatteryParams& params);

struct DomainReport {
    bool in_d1 = false;
    bool in_d2 = false;
    double d2_sum = 0.0;
    int first_d1_violation = -1;  // line index, or -1
};

/// Membership in the local domains: D1 keeps every per-line angle deviation
/// inside (-pi - 2 psi_bar, pi - 2 psi_bar) (open), D2 requires the summed
/// line-energy terms to be positive (the all-zero deviation is included
/// explicitly). Excluded lines are skipped in both, matching the domain used
/// when a line's static controller is replaced by a battery.
DomainReport domain_membership(const GridScenario& scenario,
                               const std::vector<double>& angle_devs,
                               const std::vector<int>& excluded_lines);

DomainReport domain_membership(const GridScenario& scenario,
                               const std::vector<double>& angle_devs,
                               std::optional<int> excluded_line = std::nullopt);

/// Builds the feedback interconnection: one swing plant per bus, one static
/// line controller per line, battery edges replaced by dynamic controllers.
/// Requires a scenario finalized by compute_equilibrium.
InterconnectedSystem assemble_grid_system(const GridScenario& scenario);

/// Stacked plant state from the scenario's initial deviations, blocks of
/// (freq_dev, angle_dev) per bus.
Vector initial_plant_state(const GridScenario& scenario);

/// Controller state is one entry per battery edge, starting at zero.
Vector initial_controller_state(const GridScenario& scenario);

}  // namespace nigrid
