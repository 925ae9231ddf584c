#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nigrid/system.hpp"

namespace nigrid {

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "inconclusive";
    }
}

/// Outcome of a numeric dissipation-inequality check along a trajectory.
/// The residual r(t) = Vdot - u'*hdot + epsilon*|hdot|^2 must stay below the
/// tolerance for a pass; verdict == pass iff max_violation <= tolerance.
struct DissipationReport {
    std::size_t samples = 0;       // interior samples actually checked
    double max_violation = 0.0;    // most positive residual seen
    std::vector<double> violating_times;
    double tolerance = 0.0;
    Verdict verdict = Verdict::fail;

    bool passed() const { return verdict == Verdict::pass; }
};

/// Checks the NI/OSNI dissipation inequality on sampled data. Vdot and hdot
/// are estimated by central finite differences on interior samples, so the
/// tolerance should scale like C*dt^2. Requires a storage function and at
/// least 3 samples.
DissipationReport check_dissipation(const DynamicSystem& sys, const SystemTrace& trace,
                                    double epsilon, double tolerance);

struct ChannelWitness {
    std::size_t sample = 0;
    int perturbed_channel = 0;
    int affected_channel = 0;
    double magnitude = 0.0;
};

struct ChannelIndependenceReport {
    std::size_t samples = 0;
    double origin_norm = 0.0;   // |g(0)|
    bool origin_ok = false;     // g(0) = 0 within 1e-12
    std::vector<ChannelWitness> witnesses;

    bool passed() const { return origin_ok && witnesses.empty(); }
};

/// Verifies on seeded random inputs that perturbing input channel j changes
/// only output channel j, and that g(0) = 0. Deterministic for a given seed.
ChannelIndependenceReport check_channel_independence(const FeedthroughFn& g, int io_dim,
                                                     std::size_t sample_count,
                                                     std::uint64_t seed);

enum class SteadyStateRole { plant, controller };

struct SteadyStateReport {
    Verdict verdict = Verdict::inconclusive;
    Vector y_bar;                        // output at the end of the settle run
    double inner_product = 0.0;          // u_bar' * y_bar
    double required_bound = 0.0;         // threshold the inner product was held to
    double tail_output_derivative = 0.0; // max |ydot| over the trailing window
    double settle_time_used = 0.0;
};

/// Drives the system with the constant input u_bar from the zero state until
/// the output is numerically constant, then checks the steady-state sign
/// condition: u'y >= -tolerance for a plant, u'y <= -gamma*|u|^2 + tolerance
/// for a controller. Static systems settle immediately. A run that does not
/// settle within `settle_time` yields an inconclusive (not fail) verdict.
SteadyStateReport check_steady_state_sign(const DynamicSystem& sys, const Vector& u_bar,
                                          SteadyStateRole role, double gamma,
                                          double settle_time, double tolerance,
                                          double dt = 1e-3);

}  // namespace nigrid
