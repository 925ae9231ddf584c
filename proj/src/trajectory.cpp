#include "nigrid/trajectory.hpp"

#include <string>

namespace nigrid {

namespace {

SystemTrace sliced_trace(const Trajectory& traj, const std::vector<Vector>& states,
                         Eigen::Index state_offset, Eigen::Index state_dim,
                         const std::vector<Vector>& inputs, Eigen::Index input_offset,
                         Eigen::Index input_dim) {
    SystemTrace trace;
    trace.t0 = traj.t0;
    trace.dt = traj.dt;
    trace.states.reserve(states.size());
    trace.inputs.reserve(inputs.size());
    for (std::size_t k = 0; k < states.size(); ++k) {
        trace.states.push_back(states[k].segment(state_offset, state_dim));
        trace.inputs.push_back(inputs[k].segment(input_offset, input_dim));
    }
    return trace;
}

}  // namespace

SystemTrace plant_trace(const InterconnectedSystem& sys, const Trajectory& traj, int i) {
    if (i < 0 || i >= sys.node_count()) throw InvalidInputError("plant index out of range");
    const int m = sys.channel_width();
    return sliced_trace(traj, traj.X_p, sys.plant_state_offset(i), sys.plant(i).state_dim,
                        traj.U_p, static_cast<Eigen::Index>(i) * m, m);
}

SystemTrace controller_trace(const InterconnectedSystem& sys, const Trajectory& traj, int l) {
    if (l < 0 || l >= sys.edge_count()) throw InvalidInputError("controller index out of range");
    const int m = sys.channel_width();
    return sliced_trace(traj, traj.X_c, sys.controller_state_offset(l),
                        sys.controller(l).state_dim, traj.U_c,
                        static_cast<Eigen::Index>(l) * m, m);
}

SystemTrace aggregate_plant_trace(const Trajectory& traj) {
    SystemTrace trace;
    trace.t0 = traj.t0;
    trace.dt = traj.dt;
    trace.states = traj.X_p;
    trace.inputs = traj.U_p;
    return trace;
}

SystemTrace aggregate_controller_trace(const Trajectory& traj) {
    SystemTrace trace;
    trace.t0 = traj.t0;
    trace.dt = traj.dt;
    trace.states = traj.X_c;
    trace.inputs = traj.U_c;
    return trace;
}

SystemTrace networked_plant_trace(const Trajectory& traj) {
    SystemTrace trace;
    trace.t0 = traj.t0;
    trace.dt = traj.dt;
    trace.states = traj.X_p;
    trace.inputs = traj.Y_c;  // U_hat_p == Y_c along the closed loop
    return trace;
}

}  // namespace nigrid
