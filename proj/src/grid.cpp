#include "nigrid/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nigrid {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate_buses(const GridScenario& scenario, std::vector<std::string>& warnings) {
    if (scenario.buses.empty()) throw ConstructionError("scenario has no buses");
    for (std::size_t i = 0; i < scenario.buses.size(); ++i) {
        const Bus& bus = scenario.buses[i];
        const std::string label = "bus " + std::to_string(i + 1);
        if (!(bus.inertia > 0.0)) throw ConstructionError(label + ": inertia must be > 0");
        if (bus.damping < 0.0) throw ConstructionError(label + ": damping must be >= 0");
        if (!(bus.internal_voltage > 0.0)) {
            throw ConstructionError(label + ": internal voltage must be > 0");
        }
        if (bus.damping == 0.0) {
            warnings.push_back(label + ": undamped; plant claim downgraded to plain NI and "
                                       "consensus criteria do not apply");
        }
    }
}

void validate_lines(const GridScenario& scenario, std::vector<std::string>& warnings) {
    const int n = static_cast<int>(scenario.buses.size());
    for (std::size_t l = 0; l < scenario.lines.size(); ++l) {
        const Line& line = scenario.lines[l];
        const std::string label = "line " + std::to_string(l + 1);
        if (line.from < 0 || line.from >= n || line.to < 0 || line.to >= n) {
            throw ConstructionError(label + ": endpoint out of range");
        }
        if (!(line.reactance > 0.0)) throw ConstructionError(label + ": reactance must be > 0");
        if (std::abs(line.equilibrium_angle) >= 0.5 * kPi) {
            warnings.push_back(label + ": |equilibrium angle| >= pi/2, outside the stable "
                                       "operating branch");
        }
    }
}

void validate_batteries(const GridScenario& scenario) {
    const int line_count = static_cast<int>(scenario.lines.size());
    for (const auto& [index, params] : scenario.battery_edges) {
        const std::string label = "battery edge on line " + std::to_string(index + 1);
        if (index < 0 || index >= line_count) {
            throw ConstructionError(label + ": line index out of range");
        }
        if (!(params.tau > 0.0)) throw ConstructionError(label + ": requires tau > 0");
        if (!(params.k1 > 0.0)) throw ConstructionError(label + ": requires K1 > 0");
        if (!(params.k2 > params.k1)) throw ConstructionError(label + ": requires K2 > K1");
    }
}

// Assigns node potentials over a spanning tree and measures how far each
// non-tree line's equilibrium angle is from closing its cycle.
double cycle_residual(const GridScenario& scenario) {
    const int n = static_cast<int>(scenario.buses.size());
    std::vector<double> potential(static_cast<std::size_t>(n), 0.0);
    std::vector<char> known(static_cast<std::size_t>(n), 0);
    known[0] = 1;

    std::vector<char> used(scenario.lines.size(), 0);
    bool grew = true;
    while (grew) {
        grew = false;
        for (std::size_t l = 0; l < scenario.lines.size(); ++l) {
            if (used[l]) continue;
            const Line& line = scenario.lines[l];
            const auto from = static_cast<std::size_t>(line.from);
            const auto to = static_cast<std::size_t>(line.to);
            if (known[from] && !known[to]) {
                potential[to] = potential[from] - line.equilibrium_angle;
                known[to] = 1;
                used[l] = 1;
                grew = true;
            } else if (known[to] && !known[from]) {
                potential[from] = potential[to] + line.equilibrium_angle;
                known[from] = 1;
                used[l] = 1;
                grew = true;
            }
        }
    }

    double worst = 0.0;
    for (std::size_t l = 0; l < scenario.lines.size(); ++l) {
        if (used[l]) continue;
        const Line& line = scenario.lines[l];
        const double implied = potential[static_cast<std::size_t>(line.from)] -
                               potential[static_cast<std::size_t>(line.to)];
        worst = std::max(worst, std::abs(implied - line.equilibrium_angle));
    }
    return worst;
}

}  // namespace

NetworkTopology GridScenario::topology() const {
    std::vector<Edge> edges;
    edges.reserve(lines.size());
    for (const Line& line : lines) edges.push_back({line.from, line.to});
    return NetworkTopology(static_cast<int>(buses.size()), std::move(edges));
}

double branch_flow(double voltage_i, double voltage_j, double reactance, double angle_diff) {
    if (!(reactance > 0.0)) throw InvalidInputError("branch_flow: reactance must be > 0");
    return voltage_i * voltage_j / reactance * std::sin(angle_diff);
}

EquilibriumReport compute_equilibrium(GridScenario& scenario) {
    EquilibriumReport report;
    validate_buses(scenario, report.warnings);
    validate_lines(scenario, report.warnings);
    validate_batteries(scenario);
    scenario.topology();  // throws on disconnected or malformed topologies

    const std::size_t n = scenario.buses.size();
    if (scenario.initial_angle_dev.empty()) scenario.initial_angle_dev.assign(n, 0.0);
    if (scenario.initial_freq_dev.empty()) scenario.initial_freq_dev.assign(n, 0.0);
    if (scenario.initial_angle_dev.size() != n || scenario.initial_freq_dev.size() != n) {
        throw ConstructionError("initial deviation arrays must have one entry per bus");
    }

    for (Line& line : scenario.lines) {
        line.max_transfer =
            scenario.buses[static_cast<std::size_t>(line.from)].internal_voltage *
            scenario.buses[static_cast<std::size_t>(line.to)].internal_voltage /
            line.reactance;
    }

    // steady-state balance: P_M + P_ST - P_L - sum of oriented line flows = 0
    for (std::size_t i = 0; i < n; ++i) {
        scenario.buses[i].mechanical =
            scenario.buses[i].load - scenario.buses[i].battery_baseline;
    }
    for (const Line& line : scenario.lines) {
        const double flow = line.max_transfer * std::sin(line.equilibrium_angle);
        scenario.buses[static_cast<std::size_t>(line.from)].mechanical += flow;
        scenario.buses[static_cast<std::size_t>(line.to)].mechanical -= flow;
    }

    // re-evaluate the balance through branch_flow as a slightly independent path
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double net_flow = 0.0;
        for (const Line& line : scenario.lines) {
            const double e_from =
                scenario.buses[static_cast<std::size_t>(line.from)].internal_voltage;
            const double e_to = scenario.buses[static_cast<std::size_t>(line.to)].internal_voltage;
            if (line.from == static_cast<int>(i)) {
                net_flow += branch_flow(e_from, e_to, line.reactance, line.equilibrium_angle);
            } else if (line.to == static_cast<int>(i)) {
                net_flow += branch_flow(e_to, e_from, line.reactance, -line.equilibrium_angle);
            }
        }
        const Bus& bus = scenario.buses[i];
        residual = std::max(residual, std::abs(bus.mechanical + bus.battery_baseline -
                                               bus.load - net_flow));
    }
    report.residual = residual;

    report.max_cycle_residual = cycle_residual(scenario);
    if (report.max_cycle_residual > 1e-9) {
        report.warnings.push_back(
            "equilibrium angles do not close around cycles (max residual " +
            std::to_string(report.max_cycle_residual) +
            "); dynamics remain well-defined but no node-angle assignment produces them");
    }
    return report;
}

DynamicSystem make_node_plant(const Bus& bus) {
    if (!(bus.inertia > 0.0)) throw ConstructionError("node plant: inertia must be > 0");
    if (bus.damping < 0.0) throw ConstructionError("node plant: damping must be >= 0");
    const double inertia = bus.inertia;
    const double damping = bus.damping;

    DynamicSystem plant;
    plant.state_dim = 2;  // (freq_dev, angle_dev)
    plant.io_dim = 1;
    plant.f = [inertia, damping](const Vector& x, const Vector& u) {
        Vector xdot(2);
        xdot[0] = (u[0] - damping * x[0]) / inertia;
        xdot[1] = x[0];
        return xdot;
    };
    plant.h = [](const Vector& x) {
        Vector y(1);
        y[0] = x[1];
        return y;
    };
    plant.storage = [inertia](const Vector& x) { return 0.5 * inertia * x[0] * x[0]; };
    plant.osni_epsilon = damping;  // largest admissible strictness
    return plant;
}

DynamicSystem make_line_controller(const Line& line) {
    if (!(line.max_transfer > 0.0)) {
        throw ConstructionError("line controller: max transfer not derived; run "
                                "compute_equilibrium first");
    }
    const double pmax = line.max_transfer;
    const double psi = line.equilibrium_angle;
    return make_static_system(1, [pmax, psi](const Vector& u) {
        Vector y(1);
        y[0] = pmax * (std::sin(psi) - std::sin(u[0] + psi));
        return y;
    });
}

DynamicSystem make_battery_controller(const BatteryParams& params) {
    if (!(params.tau > 0.0)) throw ConstructionError("battery controller: requires tau > 0");
    if (!(params.k1 > 0.0)) throw ConstructionError("battery controller: requires K1 > 0");
    if (!(params.k2 > params.k1)) throw ConstructionError("battery controller: requires K2 > K1");
    const double tau = params.tau;
    const double k1 = params.k1;
    const double k2 = params.k2;

    DynamicSystem controller;
    controller.state_dim = 1;
    controller.io_dim = 1;
    controller.f = [tau, k1](const Vector& x, const Vector& u) {
        Vector xdot(1);
        xdot[0] = (-x[0] + k1 * u[0]) / tau;
        return xdot;
    };
    controller.h = [](const Vector& x) { return x; };
    controller.g = [k2](const Vector& u) { return (-k2 * u).eval(); };
    controller.storage = [k1](const Vector& x) { return x[0] * x[0] / (2.0 * k1); };
    controller.osni_epsilon = 0.0;
    return controller;
}

double battery_power_command(int orientation_sign, double controller_state,
                             double controller_input, const Line& line,
                             const BatteryParams& params) {
    if (orientation_sign != 1 && orientation_sign != -1) {
        throw InvalidInputError("battery_power_command: orientation sign must be +-1");
    }
    const double line_output =
        line.max_transfer * (std::sin(line.equilibrium_angle) -
                             std::sin(controller_input + line.equilibrium_angle));
    return static_cast<double>(orientation_sign) *
           (controller_state - params.k2 * controller_input - line_output);
}

DomainReport domain_membership(const GridScenario& scenario,
                               const std::vector<double>& angle_devs,
                               const std::vector<int>& excluded_lines) {
    if (angle_devs.size() != scenario.buses.size()) {
        throw InvalidInputError("domain_membership: one angle deviation per bus required");
    }
    DomainReport report;
    report.in_d1 = true;
    bool all_zero = true;
    for (double dev : angle_devs) all_zero = all_zero && dev == 0.0;

    for (std::size_t l = 0; l < scenario.lines.size(); ++l) {
        if (std::find(excluded_lines.begin(), excluded_lines.end(), static_cast<int>(l)) !=
            excluded_lines.end()) {
            continue;
        }
        const Line& line = scenario.lines[l];
        const double psi_dev = angle_devs[static_cast<std::size_t>(line.from)] -
                               angle_devs[static_cast<std::size_t>(line.to)];
        const double lo = -kPi - 2.0 * line.equilibrium_angle;
        const double hi = kPi - 2.0 * line.equilibrium_angle;
        if (!(psi_dev > lo && psi_dev < hi) && report.in_d1) {
            report.in_d1 = false;
            report.first_d1_violation = static_cast<int>(l);
        }
        report.d2_sum += line.max_transfer *
                         (std::cos(line.equilibrium_angle) -
                          psi_dev * std::sin(line.equilibrium_angle) -
                          std::cos(psi_dev + line.equilibrium_angle));
    }
    report.in_d2 = report.d2_sum > 0.0 || all_zero;
    return report;
}

DomainReport domain_membership(const GridScenario& scenario,
                               const std::vector<double>& angle_devs,
                               std::optional<int> excluded_line) {
    std::vector<int> excluded;
    if (excluded_line) excluded.push_back(*excluded_line);
    return domain_membership(scenario, angle_devs, excluded);
}

InterconnectedSystem assemble_grid_system(const GridScenario& scenario) {
    std::vector<DynamicSystem> plants;
    plants.reserve(scenario.buses.size());
    for (const Bus& bus : scenario.buses) plants.push_back(make_node_plant(bus));

    std::vector<DynamicSystem> controllers;
    controllers.reserve(scenario.lines.size());
    for (std::size_t l = 0; l < scenario.lines.size(); ++l) {
        const auto battery = scenario.battery_edges.find(static_cast<int>(l));
        if (battery != scenario.battery_edges.end()) {
            controllers.push_back(make_battery_controller(battery->second));
        } else {
            controllers.push_back(make_line_controller(scenario.lines[l]));
        }
    }
    return InterconnectedSystem(scenario.topology(), std::move(plants), std::move(controllers));
}

Vector initial_plant_state(const GridScenario& scenario) {
    const std::size_t n = scenario.buses.size();
    Vector state = Vector::Zero(2 * static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (i < scenario.initial_freq_dev.size()) {
            state[2 * static_cast<Eigen::Index>(i)] = scenario.initial_freq_dev[i];
        }
        if (i < scenario.initial_angle_dev.size()) {
            state[2 * static_cast<Eigen::Index>(i) + 1] = scenario.initial_angle_dev[i];
        }
    }
    return state;
}

Vector initial_controller_state(const GridScenario& scenario) {
    return Vector::Zero(static_cast<Eigen::Index>(scenario.battery_edges.size()));
}

}  // namespace nigrid
