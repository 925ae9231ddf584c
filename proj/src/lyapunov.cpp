#include "nigrid/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace nigrid {

namespace {

struct ChannelIntegral {
    double value = 0.0;    // composite trapezoid at the requested step
    double refined = 0.0;  // same rule at half the step, shares the nodes
};

// Oriented integral of channel `channel` of g from 0 to `upper`. The node set
// is evaluated once at half resolution, which yields both the requested-step
// value and its half-step refinement for the Richardson bound.
ChannelIntegral integrate_channel(const FeedthroughFn& g, int channel, double upper,
                                  double step, Vector& scratch) {
    ChannelIntegral result;
    if (upper == 0.0 || !g) return result;

    const long long intervals =
        std::max<long long>(1, static_cast<long long>(std::ceil(std::abs(upper) / step)));
    const double h = upper / static_cast<double>(intervals);  // signed
    const long long fine_nodes = 2 * intervals;               // half-step grid

    auto sample = [&](long long i) {
        scratch.setZero();
        scratch[channel] = upper * static_cast<double>(i) / static_cast<double>(fine_nodes);
        const Vector value = g(scratch);
        if (value.size() != scratch.size()) {
            throw InvalidInputError("feedthrough returned a vector of the wrong size");
        }
        return value[channel];
    };

    const double f_first = sample(0);
    const double f_last = sample(fine_nodes);
    double sum_even = 0.0;  // interior nodes of the requested-step grid
    double sum_all = 0.0;   // all interior nodes of the half-step grid
    for (long long i = 1; i < fine_nodes; ++i) {
        const double fi = sample(i);
        sum_all += fi;
        if (i % 2 == 0) sum_even += fi;
    }
    result.value = h * (0.5 * (f_first + f_last) + sum_even);
    result.refined = 0.5 * h * (0.5 * (f_first + f_last) + sum_all);
    return result;
}

struct IntegralTerm {
    double value = 0.0;
    double error_bound = 0.0;
};

IntegralTerm feedthrough_integral(const FeedthroughFn& g, int io_dim, const Vector& upper,
                                  double step) {
    IntegralTerm total;
    Vector scratch = Vector::Zero(io_dim);
    for (int k = 0; k < io_dim; ++k) {
        const ChannelIntegral ci = integrate_channel(g, k, upper[k], step, scratch);
        total.value += ci.value;
        // Richardson estimate for the order-2 trapezoid value at the full step
        total.error_bound += (4.0 / 3.0) * std::abs(ci.value - ci.refined);
    }
    return total;
}

void require_quad_step(double quad_step) {
    if (quad_step <= 0.0) throw InvalidInputError("quadrature step must be > 0");
}

}  // namespace

LyapunovEvaluation eval_lyapunov_single(const DynamicSystem& plant,
                                        const DynamicSystem& controller, const Vector& x_p,
                                        const Vector& x_c, double quad_step) {
    require_quad_step(quad_step);
    if (!plant.has_storage() || !controller.has_storage()) {
        throw UnsupportedError("Lyapunov evaluation requires storage on plant and controller");
    }
    if (x_p.size() != plant.state_dim || x_c.size() != controller.state_dim) {
        throw InvalidInputError("Lyapunov evaluation: state dimension mismatch");
    }
    if (plant.io_dim != controller.io_dim) {
        throw InvalidInputError("Lyapunov evaluation: io dimension mismatch");
    }

    LyapunovEvaluation eval;
    eval.storage_plant = plant.storage(x_p);
    eval.storage_controller = controller.storage(x_c);

    const Vector h_p = plant.h ? plant.h(x_p) : Vector::Zero(plant.io_dim).eval();
    const Vector h_c = controller.h ? controller.h(x_c) : Vector::Zero(controller.io_dim).eval();
    eval.cross_term = h_p.dot(h_c);

    const IntegralTerm integral =
        feedthrough_integral(controller.g, controller.io_dim, h_p, quad_step);
    eval.integral_term = integral.value;
    eval.quadrature_error_bound = integral.error_bound;

    eval.value =
        eval.storage_plant + eval.storage_controller - eval.cross_term - eval.integral_term;
    return eval;
}

LyapunovEvaluation eval_lyapunov_networked(const InterconnectedSystem& sys, const Vector& X_p,
                                           const Vector& X_c, double quad_step) {
    require_quad_step(quad_step);
    if (X_p.size() != sys.plant_state_dim() || X_c.size() != sys.controller_state_dim()) {
        throw InvalidInputError("Lyapunov evaluation: aggregated state dimension mismatch");
    }
    const int m = sys.channel_width();

    LyapunovEvaluation eval;
    Vector y_p(static_cast<Eigen::Index>(sys.node_count()) * m);
    for (int i = 0; i < sys.node_count(); ++i) {
        const DynamicSystem& plant = sys.plant(i);
        if (!plant.has_storage()) {
            throw UnsupportedError("Lyapunov evaluation requires storage on every plant");
        }
        const auto x = X_p.segment(sys.plant_state_offset(i), plant.state_dim);
        eval.storage_plant += plant.storage(x);
        if (plant.h) {
            y_p.segment(static_cast<Eigen::Index>(i) * m, m) = plant.h(x);
        } else {
            y_p.segment(static_cast<Eigen::Index>(i) * m, m).setZero();
        }
    }

    const Vector y_hat = edge_inputs(sys.incidence(), y_p);

    Vector scratch = Vector::Zero(m);
    for (int l = 0; l < sys.edge_count(); ++l) {
        const DynamicSystem& controller = sys.controller(l);
        if (!controller.has_storage()) {
            throw UnsupportedError("Lyapunov evaluation requires storage on every controller");
        }
        const auto x = X_c.segment(sys.controller_state_offset(l), controller.state_dim);
        eval.storage_controller += controller.storage(x);

        const auto upper = y_hat.segment(static_cast<Eigen::Index>(l) * m, m);
        if (controller.h) eval.cross_term += upper.dot(controller.h(x));
        for (int c = 0; c < m; ++c) {
            const ChannelIntegral ci =
                integrate_channel(controller.g, c, upper[c], quad_step, scratch);
            eval.integral_term += ci.value;
            eval.quadrature_error_bound += (4.0 / 3.0) * std::abs(ci.value - ci.refined);
        }
    }

    eval.value =
        eval.storage_plant + eval.storage_controller - eval.cross_term - eval.integral_term;
    return eval;
}

std::vector<double> lyapunov_series(const InterconnectedSystem& sys, const Trajectory& traj,
                                    double quad_step) {
    std::vector<double> values;
    values.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        values.push_back(eval_lyapunov_networked(sys, traj.X_p[k], traj.X_c[k], quad_step).value);
    }
    return values;
}

MonotonicityReport monitor_monotonicity(const InterconnectedSystem& sys, const Trajectory& traj,
                                        double quad_step, double tolerance) {
    if (traj.size() < 2 || traj.Y_p.empty()) {
        throw InsufficientDataError("monotonicity check needs a recorded trajectory");
    }
    if (traj.Y_p.size() != traj.size()) {
        throw InsufficientDataError("trajectory lacks recorded outputs");
    }

    const std::vector<double> w = lyapunov_series(sys, traj, quad_step);
    const std::size_t n = w.size();

    MonotonicityReport report;
    report.samples = n;
    report.initial_value = w.front();
    report.final_value = w.back();
    report.min_value = *std::min_element(w.begin(), w.end());
    report.tolerance = tolerance;

    double eps = std::numeric_limits<double>::infinity();
    for (const DynamicSystem& plant : sys.plants()) eps = std::min(eps, plant.osni_epsilon);
    report.eps_p_min = eps;

    // node-output time derivatives from the records: central differences
    // inside, one-sided at the ends
    const double dt = traj.dt;
    std::vector<Vector> ydot(n);
    ydot[0] = (traj.Y_p[1] - traj.Y_p[0]) / dt;
    ydot[n - 1] = (traj.Y_p[n - 1] - traj.Y_p[n - 2]) / dt;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        ydot[k] = (traj.Y_p[k + 1] - traj.Y_p[k - 1]) / (2.0 * dt);
    }

    double max_increase = -std::numeric_limits<double>::infinity();
    double sharp = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double dw = w[k + 1] - w[k];
        max_increase = std::max(max_increase, dw);
        const double dissipated =
            0.5 * dt * (ydot[k].squaredNorm() + ydot[k + 1].squaredNorm());
        sharp = std::max(sharp, dw + eps * dissipated);
    }
    report.max_step_increase = max_increase;
    report.sharp_max_violation = sharp;
    report.verdict = (max_increase <= tolerance) ? Verdict::pass : Verdict::fail;
    return report;
}

DomainSampleReport sample_positive_definiteness(const PointEvaluator& evaluator,
                                                const DomainBox& box,
                                                const DomainPredicate& domain,
                                                const SamplingPlan& plan, std::uint64_t seed) {
    if (!evaluator) throw InvalidInputError("domain sampling: missing evaluator");
    const int dim = static_cast<int>(box.intervals.size());
    if (dim < 1) throw InvalidInputError("domain sampling: empty box");
    for (const auto& [lo, hi] : box.intervals) {
        if (!(lo <= 0.0 && 0.0 <= hi) || !(lo < hi)) {
            throw InvalidInputError("domain sampling: box must contain the origin");
        }
    }
    if (plan.grid_points_per_dim < 0 || plan.random_samples < 0 ||
        (plan.grid_points_per_dim == 0 && plan.random_samples == 0)) {
        throw InvalidInputError("domain sampling: empty sampling plan");
    }

    DomainSampleReport report;
    report.origin_value = evaluator(Vector::Zero(dim));
    if (std::abs(report.origin_value) > 1e-12) {
        report.verdict = Verdict::fail;
        report.argmin = Vector::Zero(dim);
        report.min_value = report.origin_value;
        return report;
    }

    double min_value = std::numeric_limits<double>::infinity();
    Vector argmin;
    std::size_t accepted = 0;
    auto consider = [&](const Vector& p) {
        if (p.lpNorm<Eigen::Infinity>() < 1e-15) return;  // origin handled above
        if (domain && !domain(p)) return;
        const double v = evaluator(p);
        ++accepted;
        if (v < min_value) {
            min_value = v;
            argmin = p;
        }
    };

    if (plan.grid_points_per_dim > 0) {
        double total = 1.0;
        for (int d = 0; d < dim; ++d) total *= static_cast<double>(plan.grid_points_per_dim);
        if (total <= 20000.0) {
            // full tensor grid
            std::vector<int> index(static_cast<std::size_t>(dim), 0);
            Vector p(dim);
            const int g = plan.grid_points_per_dim;
            while (true) {
                for (int d = 0; d < dim; ++d) {
                    const auto& [lo, hi] = box.intervals[static_cast<std::size_t>(d)];
                    const double frac =
                        (g == 1) ? 0.5
                                 : static_cast<double>(index[static_cast<std::size_t>(d)]) /
                                       static_cast<double>(g - 1);
                    p[d] = lo + frac * (hi - lo);
                }
                consider(p);
                int d = 0;
                while (d < dim && ++index[static_cast<std::size_t>(d)] == g) {
                    index[static_cast<std::size_t>(d)] = 0;
                    ++d;
                }
                if (d == dim) break;
            }
        } else {
            // axis-aligned sweeps through the origin
            for (int d = 0; d < dim; ++d) {
                const auto& [lo, hi] = box.intervals[static_cast<std::size_t>(d)];
                for (int i = 0; i < plan.grid_points_per_dim; ++i) {
                    const double frac = (plan.grid_points_per_dim == 1)
                                            ? 0.5
                                            : static_cast<double>(i) /
                                                  static_cast<double>(plan.grid_points_per_dim - 1);
                    Vector p = Vector::Zero(dim);
                    p[d] = lo + frac * (hi - lo);
                    consider(p);
                }
            }
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < plan.random_samples; ++s) {
        Vector p(dim);
        for (int d = 0; d < dim; ++d) {
            const auto& [lo, hi] = box.intervals[static_cast<std::size_t>(d)];
            p[d] = lo + unit(rng) * (hi - lo);
        }
        consider(p);
    }

    report.samples = accepted;
    if (accepted == 0) {
        report.verdict = Verdict::inconclusive;
        return report;
    }
    report.min_value = min_value;
    report.argmin = argmin;
    report.verdict = (min_value > 0.0) ? Verdict::pass : Verdict::fail;
    return report;
}

}  // namespace nigrid
