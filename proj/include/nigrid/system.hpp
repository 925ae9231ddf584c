#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

#include "nigrid/ode.hpp"

namespace nigrid {

using Vector = Eigen::VectorXd;

using DynamicsFn = std::function<Vector(const Vector& x, const Vector& u)>;
using OutputFn = std::function<Vector(const Vector& x)>;
using FeedthroughFn = std::function<Vector(const Vector& u)>;
using StorageFn = std::function<double(const Vector& x)>;
using InputSignal = std::function<Vector(double t)>;

/// Nonlinear MIMO system  xdot = f(x, u),  y = h(x) + g(u).
///
/// An empty callable stands for the identically-zero map: systems without
/// direct feedthrough leave `g` unset, static maps (state_dim == 0) leave
/// `f` and `h` unset. The feedthrough `g` must act independently per channel
/// with g(0) = 0 (see check_channel_independence). `storage` is an optional
/// nonnegative storage function; checks that need one throw UnsupportedError
/// when it is absent. `osni_epsilon` is the claimed output strictness of the
/// dissipation inequality; 0 means a plain negative-imaginary claim.
struct DynamicSystem {
    int state_dim = 0;
    int io_dim = 0;
    DynamicsFn f;
    OutputFn h;
    FeedthroughFn g;
    StorageFn storage;
    double osni_epsilon = 0.0;

    bool is_static() const { return state_dim == 0; }
    bool has_feedthrough() const { return static_cast<bool>(g); }
    bool has_storage() const { return static_cast<bool>(storage); }
};

/// Static system y = g(u) with zero storage.
DynamicSystem make_static_system(int io_dim, FeedthroughFn g);

struct Evaluation {
    Vector xdot;
    Vector y;
};

/// Evaluates xdot = f(x, u) and y = h(x) + g(u), validating every dimension
/// (including the sizes returned by user-supplied callables).
Evaluation evaluate(const DynamicSystem& sys, const Vector& x, const Vector& u);

/// Uniformly sampled state/input record of a single system.
struct SystemTrace {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<Vector> states;
    std::vector<Vector> inputs;

    std::size_t size() const { return states.size(); }
    double time(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
};

/// Fixed-step simulation of one system from `x0` under the input signal
/// `input(t)`, recording state and input at every grid point.
SystemTrace simulate_system(const DynamicSystem& sys, const Vector& x0,
                            const InputSignal& input, double horizon, double dt,
                            IntegrationMethod method = IntegrationMethod::rk4);

}  // namespace nigrid
