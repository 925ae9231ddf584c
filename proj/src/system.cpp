#include "nigrid/system.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "nigrid/errors.hpp"

namespace nigrid {

namespace {

void require_size(const Vector& v, int expected, const char* what) {
    if (v.size() != expected) {
        throw InvalidInputError(std::string(what) + ": expected size " +
                                std::to_string(expected) + ", got " +
                                std::to_string(v.size()));
    }
}

}  // namespace

DynamicSystem make_static_system(int io_dim, FeedthroughFn g) {
    if (io_dim < 1) throw ConstructionError("static system needs io_dim >= 1");
    DynamicSystem sys;
    sys.state_dim = 0;
    sys.io_dim = io_dim;
    sys.g = std::move(g);
    sys.storage = [](const Vector&) { return 0.0; };
    sys.osni_epsilon = 0.0;
    return sys;
}

Evaluation evaluate(const DynamicSystem& sys, const Vector& x, const Vector& u) {
    require_size(x, sys.state_dim, "state");
    require_size(u, sys.io_dim, "input");

    Evaluation out;
    if (sys.state_dim > 0) {
        if (!sys.f) throw ConstructionError("dynamic system is missing f");
        out.xdot = sys.f(x, u);
        require_size(out.xdot, sys.state_dim, "f(x,u)");
    } else {
        out.xdot = Vector(0);
    }

    out.y = Vector::Zero(sys.io_dim);
    if (sys.h) {
        const Vector hx = sys.h(x);
        require_size(hx, sys.io_dim, "h(x)");
        out.y += hx;
    }
    if (sys.g) {
        const Vector gu = sys.g(u);
        require_size(gu, sys.io_dim, "g(u)");
        out.y += gu;
    }
    return out;
}

SystemTrace simulate_system(const DynamicSystem& sys, const Vector& x0,
                            const InputSignal& input, double horizon, double dt,
                            IntegrationMethod method) {
    require_size(x0, sys.state_dim, "initial state");
    if (dt <= 0.0) throw InvalidInputError("simulate_system: dt must be > 0");
    if (horizon < dt) throw InvalidInputError("simulate_system: horizon must be >= dt");
    if (!input) throw InvalidInputError("simulate_system: missing input signal");

    const long long steps = std::llround(horizon / dt);

    SystemTrace trace;
    trace.t0 = 0.0;
    trace.dt = dt;
    trace.states.reserve(static_cast<std::size_t>(steps) + 1);
    trace.inputs.reserve(static_cast<std::size_t>(steps) + 1);

    auto rhs = [&](double t, const Vector& x) -> Vector {
        if (sys.state_dim == 0) return Vector(0);
        const Vector u = input(t);
        require_size(u, sys.io_dim, "input signal");
        Vector xdot = sys.f(x, u);
        require_size(xdot, sys.state_dim, "f(x,u)");
        return xdot;
    };
    auto record = [&](long long, double t, const Vector& x) {
        trace.states.push_back(x);
        trace.inputs.push_back(input(t));
    };
    fixed_step_integrate(rhs, x0, 0.0, steps, dt, method, record);
    return trace;
}

}  // namespace nigrid
