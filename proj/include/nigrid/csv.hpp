#pragma once

#include <string>

#include "nigrid/grid.hpp"
#include "nigrid/trajectory.hpp"

namespace nigrid {

/// Flat trajectory export with one header row and 17-significant-digit
/// decimal values. Columns, in order: t; per bus i: delta_dev_i, freq_dev_i;
/// per line l: psi_dev_l, flow_dev_l; per battery edge on line k with ends
/// (i, j): x_c_k, P_ST_i_k, P_ST_j_k; then W_hat. All labels are 1-based.
/// The trajectory must carry Lyapunov samples (W_hat).
std::string trajectory_csv(const GridScenario& scenario, const Trajectory& traj);

}  // namespace nigrid
