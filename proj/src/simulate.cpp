#include "nigrid/simulate.hpp"

#include <cmath>
#include <string>

namespace nigrid {

Trajectory integrate(const InterconnectedSystem& sys, const Vector& plant_state0,
                     const Vector& controller_state0, double horizon, double dt,
                     IntegrationMethod method, std::size_t record_stride) {
    if (plant_state0.size() != sys.plant_state_dim() ||
        controller_state0.size() != sys.controller_state_dim()) {
        throw InvalidInputError("integrate: initial state dimension mismatch");
    }
    if (dt <= 0.0) throw InvalidInputError("integrate: dt must be > 0");
    if (horizon < dt) throw InvalidInputError("integrate: horizon must be >= dt");
    if (record_stride < 1) throw InvalidInputError("integrate: record_stride must be >= 1");

    const long long steps = std::llround(horizon / dt);
    if (steps % static_cast<long long>(record_stride) != 0) {
        throw InvalidInputError("integrate: step count must be divisible by record_stride");
    }

    const Eigen::Index np = sys.plant_state_dim();
    const Eigen::Index nc = sys.controller_state_dim();

    Trajectory traj;
    traj.t0 = 0.0;
    traj.dt = dt * static_cast<double>(record_stride);
    traj.integrator_dt = dt;
    traj.integrator = to_string(method);
    traj.num_nodes = sys.node_count();
    traj.num_edges = sys.edge_count();
    traj.channel_width = sys.channel_width();

    const std::size_t records = static_cast<std::size_t>(steps / record_stride) + 1;
    traj.X_p.reserve(records);
    traj.X_c.reserve(records);
    traj.Y_p.reserve(records);
    traj.Y_c.reserve(records);
    traj.U_p.reserve(records);
    traj.U_c.reserve(records);

    Vector state(np + nc);
    state.head(np) = plant_state0;
    state.tail(nc) = controller_state0;

    auto rhs = [&](double, const Vector& z) -> Vector {
        const CoupledSignals sig = coupled_rhs(sys, z.head(np), z.tail(nc));
        Vector dz(np + nc);
        dz.head(np) = sig.xp_dot;
        dz.tail(nc) = sig.xc_dot;
        return dz;
    };
    auto record = [&](long long k, double, const Vector& z) {
        if (k % static_cast<long long>(record_stride) != 0) return;
        const CoupledSignals sig = coupled_rhs(sys, z.head(np), z.tail(nc));
        traj.X_p.push_back(z.head(np));
        traj.X_c.push_back(z.tail(nc));
        traj.Y_p.push_back(sig.y_p);
        traj.Y_c.push_back(sig.y_c);
        traj.U_p.push_back(sig.u_p);
        traj.U_c.push_back(sig.u_c);
    };
    fixed_step_integrate(rhs, state, 0.0, steps, dt, method, record);
    return traj;
}

Trajectory oracle_integrate(const InterconnectedSystem& sys, const Vector& plant_state0,
                            const Vector& controller_state0, double horizon, double dt_fine,
                            std::size_t record_stride) {
    return integrate(sys, plant_state0, controller_state0, horizon, dt_fine,
                     IntegrationMethod::euler, record_stride);
}

ConsensusVerdict detect_consensus(const Trajectory& traj, double tolerance) {
    if (traj.num_nodes < 2) {
        throw InvalidInputError("consensus detection needs at least two node outputs");
    }
    if (traj.Y_p.empty()) throw InsufficientDataError("trajectory has no recorded outputs");
    if (tolerance < 0.0) throw InvalidInputError("consensus tolerance must be >= 0");

    const int m = traj.channel_width;
    const int n = traj.num_nodes;
    const std::size_t samples = traj.Y_p.size();

    auto max_gap = [&](std::size_t k) {
        double gap = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double d = (traj.Y_p[k].segment(static_cast<Eigen::Index>(i) * m, m) -
                                  traj.Y_p[k].segment(static_cast<Eigen::Index>(j) * m, m))
                                     .norm();
                gap = std::max(gap, d);
            }
        }
        return gap;
    };

    ConsensusVerdict verdict;
    verdict.tolerance = tolerance;
    verdict.final_max_pairwise_gap = max_gap(samples - 1);

    // scan backwards for the last violation; everything after it has settled
    std::size_t first_settled = 0;
    for (std::size_t k = samples; k-- > 0;) {
        if (max_gap(k) > tolerance) {
            first_settled = k + 1;
            break;
        }
    }
    if (first_settled < samples) {
        verdict.achieved = true;
        verdict.settle_time = traj.time(first_settled);
    }
    return verdict;
}

}  // namespace nigrid
