#pragma once

#include <Eigen/Core>

#include <string>

#include "nigrid/errors.hpp"

namespace nigrid {

enum class IntegrationMethod { rk4, euler };

inline std::string to_string(IntegrationMethod method) {
    return method == IntegrationMethod::rk4 ? "rk4" : "euler";
}

/// One classic 4-stage Runge-Kutta step. `rhs` is callable as rhs(t, x).
template <class Rhs>
Eigen::VectorXd rk4_step(Rhs&& rhs, double t, const Eigen::VectorXd& x, double dt) {
    const Eigen::VectorXd k1 = rhs(t, x);
    const Eigen::VectorXd k2 = rhs(t + 0.5 * dt, x + (0.5 * dt) * k1);
    const Eigen::VectorXd k3 = rhs(t + 0.5 * dt, x + (0.5 * dt) * k2);
    const Eigen::VectorXd k4 = rhs(t + dt, x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// One explicit Euler step; reserved for brute-force reference runs.
template <class Rhs>
Eigen::VectorXd euler_step(Rhs&& rhs, double t, const Eigen::VectorXd& x, double dt) {
    return x + dt * rhs(t, x);
}

/// Fixed-step integration over `steps` intervals of width `dt` starting at
/// `t0`. `observe(step_index, t, state)` is called at every grid point,
/// endpoints included, before the state is advanced past it. Grid times are
/// formed as t0 + k*dt, never accumulated, so repeated runs are bit-identical.
/// Throws DivergenceError at the first non-finite state.
template <class Rhs, class Observer>
Eigen::VectorXd fixed_step_integrate(Rhs&& rhs, Eigen::VectorXd state, double t0,
                                     long long steps, double dt,
                                     IntegrationMethod method, Observer&& observe) {
    if (dt <= 0.0) throw InvalidInputError("fixed_step_integrate: dt must be > 0");
    if (steps < 1) throw InvalidInputError("fixed_step_integrate: need at least one step");
    for (long long k = 0; k < steps; ++k) {
        const double t = t0 + static_cast<double>(k) * dt;
        observe(k, t, state);
        state = (method == IntegrationMethod::rk4) ? rk4_step(rhs, t, state, dt)
                                                   : euler_step(rhs, t, state, dt);
        if (!state.allFinite()) {
            throw DivergenceError("integration produced a non-finite state",
                                  t0 + static_cast<double>(k + 1) * dt);
        }
    }
    observe(steps, t0 + static_cast<double>(steps) * dt, state);
    return state;
}

}  // namespace nigrid
