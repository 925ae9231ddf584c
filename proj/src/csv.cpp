#include "nigrid/csv.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace nigrid {

namespace {

void append_value(std::string& out, double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    out += buffer;
}

}  // namespace

std::string trajectory_csv(const GridScenario& scenario, const Trajectory& traj) {
    if (traj.W_hat.size() != traj.size()) {
        throw InvalidInputError("trajectory_csv: Lyapunov samples not filled");
    }
    const std::size_t bus_count = scenario.buses.size();
    const std::size_t line_count = scenario.lines.size();

    std::string out;
    out.reserve(64 * traj.size());

    out += "t";
    for (std::size_t i = 0; i < bus_count; ++i) {
        out += ",delta_dev_" + std::to_string(i + 1);
        out += ",freq_dev_" + std::to_string(i + 1);
    }
    for (std::size_t l = 0; l < line_count; ++l) {
        out += ",psi_dev_" + std::to_string(l + 1);
        out += ",flow_dev_" + std::to_string(l + 1);
    }
    for (const auto& [line_index, _] : scenario.battery_edges) {
        const Line& line = scenario.lines[static_cast<std::size_t>(line_index)];
        const std::string k = std::to_string(line_index + 1);
        out += ",x_c_" + k;
        out += ",P_ST_" + std::to_string(line.from + 1) + "_" + k;
        out += ",P_ST_" + std::to_string(line.to + 1) + "_" + k;
    }
    out += ",W_hat\n";

    for (std::size_t row = 0; row < traj.size(); ++row) {
        append_value(out, traj.time(row));
        for (std::size_t i = 0; i < bus_count; ++i) {
            out += ',';
            append_value(out, traj.X_p[row][2 * static_cast<Eigen::Index>(i) + 1]);
            out += ',';
            append_value(out, traj.X_p[row][2 * static_cast<Eigen::Index>(i)]);
        }
        for (std::size_t l = 0; l < line_count; ++l) {
            const Line& line = scenario.lines[l];
            const double psi_dev = traj.X_p[row][2 * static_cast<Eigen::Index>(line.from) + 1] -
                                   traj.X_p[row][2 * static_cast<Eigen::Index>(line.to) + 1];
            const double flow_dev =
                line.max_transfer * (std::sin(psi_dev + line.equilibrium_angle) -
                                     std::sin(line.equilibrium_angle));
            out += ',';
            append_value(out, psi_dev);
            out += ',';
            append_value(out, flow_dev);
        }
        int controller_offset = 0;
        for (const auto& [line_index, params] : scenario.battery_edges) {
            const Line& line = scenario.lines[static_cast<std::size_t>(line_index)];
            const double state = traj.X_c[row][controller_offset];
            const double input =
                traj.U_c[row][static_cast<Eigen::Index>(line_index) * traj.channel_width];
            out += ',';
            append_value(out, state);
            out += ',';
            append_value(out, battery_power_command(+1, state, input, line, params));
            out += ',';
            append_value(out, battery_power_command(-1, state, input, line, params));
            ++controller_offset;
        }
        out += ',';
        append_value(out, traj.W_hat[row]);
        out += '\n';
    }
    return out;
}

}  // namespace nigrid
