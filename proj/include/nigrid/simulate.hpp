#pragma once

#include <cstddef>
#include <optional>

#include "nigrid/trajectory.hpp"

namespace nigrid {

/// Fixed-step integration of the coupled system. Records all wiring signals
/// at every `record_stride`-th grid point (both endpoints always included;
/// the step count must be divisible by the stride). Deterministic
/// bit-for-bit for fixed inputs on one platform. Throws DivergenceError with
/// the first bad time when a state turns non-finite.
Trajectory integrate(const InterconnectedSystem& sys, const Vector& plant_state0,
                     const Vector& controller_state0, double horizon, double dt,
                     IntegrationMethod method = IntegrationMethod::rk4,
                     std::size_t record_stride = 1);

/// Brute-force explicit-Euler reference run at a fine step; the independent
/// baseline the derived test values are checked against.
Trajectory oracle_integrate(const InterconnectedSystem& sys, const Vector& plant_state0,
                            const Vector& controller_state0, double horizon, double dt_fine,
                            std::size_t record_stride = 1);

struct ConsensusVerdict {
    bool achieved = false;
    std::optional<double> settle_time;  // earliest time after which gaps stay small
    double final_max_pairwise_gap = 0.0;
    double tolerance = 0.0;
};

/// Scans all pairwise node-output gaps |y_pi - y_pj| and reports the earliest
/// sample after which every gap stays within the tolerance through the end of
/// the horizon. Needs at least two nodes.
ConsensusVerdict detect_consensus(const Trajectory& traj, double tolerance);

}  // namespace nigrid
