#pragma once

// Shared grid fixtures for the test suites. Every builder returns a scenario
// already finalized through compute_equilibrium.

#include <cmath>

#include "nigrid/grid.hpp"

namespace fixtures {

constexpr double kPi = 3.14159265358979323846;

inline nigrid::GridScenario two_bus(double damping_1 = 1.0, double damping_2 = 1.2) {
    nigrid::GridScenario scenario;
    scenario.buses.push_back({1.0, damping_1, 1.0, 0.2, 0.0, 0.0});
    scenario.buses.push_back({1.5, damping_2, 1.0, -0.1, 0.0, 0.0});
    scenario.lines.push_back({0, 1, 1.0, kPi / 6.0, 0.0});
    scenario.initial_angle_dev = {0.3, 0.0};
    scenario.initial_freq_dev = {0.0, 0.0};
    nigrid::compute_equilibrium(scenario);
    return scenario;
}

inline nigrid::GridScenario triangle() {
    nigrid::GridScenario scenario;
    scenario.buses.push_back({1.0, 1.0, 1.0, 0.1, 0.0, 0.0});
    scenario.buses.push_back({1.2, 1.1, 1.05, 0.0, 0.0, 0.0});
    scenario.buses.push_back({0.8, 0.9, 0.98, -0.1, 0.0, 0.0});
    // equilibrium angles close around the cycle: 0.2 + 0.1 = 0.3
    scenario.lines.push_back({0, 1, 0.8, 0.2, 0.0});
    scenario.lines.push_back({1, 2, 0.8, 0.1, 0.0});
    scenario.lines.push_back({0, 2, 0.8, 0.3, 0.0});
    scenario.initial_angle_dev = {0.25, -0.1, 0.0};
    scenario.initial_freq_dev = {0.0, 0.1, 0.0};
    nigrid::compute_equilibrium(scenario);
    return scenario;
}

inline nigrid::GridScenario ring(int node_count = 5) {
    nigrid::GridScenario scenario;
    for (int i = 0; i < node_count; ++i) {
        scenario.buses.push_back({1.0 + 0.1 * i, 1.0 + 0.05 * i, 1.0, 0.05 * i, 0.0, 0.0});
    }
    for (int i = 0; i < node_count; ++i) {
        const double angle = (i + 1 < node_count)
                                 ? 0.1
                                 : -0.1 * static_cast<double>(node_count - 1);
        scenario.lines.push_back({i, (i + 1) % node_count, 1.0, angle, 0.0});
    }
    scenario.initial_angle_dev.assign(static_cast<std::size_t>(node_count), 0.0);
    scenario.initial_freq_dev.assign(static_cast<std::size_t>(node_count), 0.0);
    scenario.initial_angle_dev[0] = 0.2;
    nigrid::compute_equilibrium(scenario);
    return scenario;
}

inline nigrid::GridScenario triangle_with_battery(int line_index = 0,
                                                  nigrid::BatteryParams params = {1.0, 1.0,
                                                                                  2.0}) {
    nigrid::GridScenario scenario = triangle();
    scenario.battery_edges[line_index] = params;
    nigrid::compute_equilibrium(scenario);
    return scenario;
}

/// Same physical grid with one line's bookkeeping orientation flipped: the
/// endpoint order swaps and the equilibrium angle changes sign.
inline nigrid::GridScenario flip_line(const nigrid::GridScenario& scenario, int line_index) {
    nigrid::GridScenario flipped = scenario;
    nigrid::Line& line = flipped.lines[static_cast<std::size_t>(line_index)];
    std::swap(line.from, line.to);
    line.equilibrium_angle = -line.equilibrium_angle;
    nigrid::compute_equilibrium(flipped);
    return flipped;
}

}  // namespace fixtures
