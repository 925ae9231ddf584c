#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nigrid/interconnect.hpp"
#include "nigrid/system.hpp"

namespace nigrid {

/// Uniformly sampled record of a coupled run: every signal the certificate
/// checkers consume, recorded at each sample directly from the wiring, so the
/// interconnection identities hold at machine precision per sample.
struct Trajectory {
    double t0 = 0.0;
    double dt = 0.0;             // spacing between recorded samples
    double integrator_dt = 0.0;  // internal step; equals dt unless strided
    std::string integrator;      // "rk4" or "euler"
    std::uint64_t scenario_hash = 0;

    int num_nodes = 0;
    int num_edges = 0;
    int channel_width = 0;

    std::vector<Vector> X_p, X_c, Y_p, Y_c, U_p, U_c;
    std::vector<double> W_hat;  // optional Lyapunov samples; empty until filled

    std::size_t size() const { return X_p.size(); }
    double time(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
};

/// State/input record of node plant i along a coupled run.
SystemTrace plant_trace(const InterconnectedSystem& sys, const Trajectory& traj, int i);

/// State/input record of edge controller l along a coupled run.
SystemTrace controller_trace(const InterconnectedSystem& sys, const Trajectory& traj, int l);

/// (X_p, U_p): the aggregated plant stack seen as one system.
SystemTrace aggregate_plant_trace(const Trajectory& traj);

/// (X_c, U_c): the aggregated controller stack seen as one system.
SystemTrace aggregate_controller_trace(const Trajectory& traj);

/// (X_p, U_hat_p = Y_c): the networked node plants seen from the edge space.
SystemTrace networked_plant_trace(const Trajectory& traj);

}  // namespace nigrid
