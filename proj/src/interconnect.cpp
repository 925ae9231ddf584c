#include "nigrid/interconnect.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <utility>

namespace nigrid {

namespace {

Vector checked(Vector value, Eigen::Index expected, const char* what) {
    if (value.size() != expected) {
        throw InvalidInputError(std::string(what) + " returned size " +
                                std::to_string(value.size()) + ", expected " +
                                std::to_string(expected));
    }
    return value;
}

int infer_channel_width(Eigen::Index signal_size, int blocks, const char* what) {
    if (blocks < 1) throw InvalidInputError(std::string(what) + ": no blocks");
    if (signal_size <= 0 || signal_size % blocks != 0) {
        throw InvalidInputError(std::string(what) + ": signal of size " +
                                std::to_string(signal_size) + " does not split into " +
                                std::to_string(blocks) + " equal blocks");
    }
    return static_cast<int>(signal_size / blocks);
}

}  // namespace

Vector edge_inputs(const IncidenceMatrix& incidence, const Vector& node_outputs) {
    const int m = infer_channel_width(node_outputs.size(), incidence.node_count(), "edge_inputs");
    Vector out(static_cast<Eigen::Index>(incidence.edge_count()) * m);
    for (int l = 0; l < incidence.edge_count(); ++l) {
        const Edge& e = incidence.edges()[static_cast<std::size_t>(l)];
        out.segment(static_cast<Eigen::Index>(l) * m, m) =
            node_outputs.segment(static_cast<Eigen::Index>(e.initial) * m, m) -
            node_outputs.segment(static_cast<Eigen::Index>(e.terminal) * m, m);
    }
    return out;
}

Vector node_inputs(const IncidenceMatrix& incidence, const Vector& edge_outputs) {
    const int m = infer_channel_width(edge_outputs.size(), incidence.edge_count(), "node_inputs");
    Vector out = Vector::Zero(static_cast<Eigen::Index>(incidence.node_count()) * m);
    for (int l = 0; l < incidence.edge_count(); ++l) {
        const Edge& e = incidence.edges()[static_cast<std::size_t>(l)];
        const auto block = edge_outputs.segment(static_cast<Eigen::Index>(l) * m, m);
        out.segment(static_cast<Eigen::Index>(e.initial) * m, m) += block;
        out.segment(static_cast<Eigen::Index>(e.terminal) * m, m) -= block;
    }
    return out;
}

PowerBalance power_balance_identity(const IncidenceMatrix& incidence,
                                    const Vector& node_outputs, const Vector& edge_outputs) {
    PowerBalance balance;
    balance.node_side = node_inputs(incidence, edge_outputs).dot(node_outputs);
    balance.edge_side = edge_inputs(incidence, node_outputs).dot(edge_outputs);
    return balance;
}

InterconnectedSystem::InterconnectedSystem(NetworkTopology topology,
                                           std::vector<DynamicSystem> node_plants,
                                           std::vector<DynamicSystem> edge_controllers)
    : topology_(std::move(topology)),
      incidence_(build_incidence(topology_)),
      plants_(std::move(node_plants)),
      controllers_(std::move(edge_controllers)) {
    if (static_cast<int>(plants_.size()) != topology_.node_count()) {
        throw ConstructionError("plant count does not match node count");
    }
    if (static_cast<int>(controllers_.size()) != topology_.edge_count()) {
        throw ConstructionError("controller count does not match edge count");
    }
    if (plants_.empty()) throw ConstructionError("interconnection needs at least one plant");

    channel_width_ = plants_.front().io_dim;
    if (channel_width_ < 1) throw ConstructionError("plant io_dim must be >= 1");
    for (std::size_t i = 0; i < plants_.size(); ++i) {
        if (plants_[i].io_dim != channel_width_) {
            throw ConstructionError("plant " + std::to_string(i) +
                                    " has mismatched io_dim");
        }
        if (plants_[i].has_feedthrough()) {
            throw ConstructionError("plant " + std::to_string(i) +
                                    " has direct feedthrough; the wiring requires pure h(x) "
                                    "plant outputs");
        }
        if (plants_[i].state_dim > 0 && !plants_[i].f) {
            throw ConstructionError("plant " + std::to_string(i) + " is missing f");
        }
    }
    for (std::size_t l = 0; l < controllers_.size(); ++l) {
        if (controllers_[l].io_dim != channel_width_) {
            throw ConstructionError("controller " + std::to_string(l) +
                                    " has mismatched io_dim");
        }
        if (controllers_[l].state_dim > 0 && !controllers_[l].f) {
            throw ConstructionError("controller " + std::to_string(l) + " is missing f");
        }
    }

    plant_offsets_.resize(plants_.size());
    for (std::size_t i = 0; i < plants_.size(); ++i) {
        plant_offsets_[i] = plant_state_dim_;
        plant_state_dim_ += plants_[i].state_dim;
    }
    controller_offsets_.resize(controllers_.size());
    for (std::size_t l = 0; l < controllers_.size(); ++l) {
        controller_offsets_[l] = controller_state_dim_;
        controller_state_dim_ += controllers_[l].state_dim;
    }
}

CoupledSignals coupled_rhs(const InterconnectedSystem& sys, const Vector& plant_state,
                           const Vector& controller_state) {
    if (plant_state.size() != sys.plant_state_dim() ||
        controller_state.size() != sys.controller_state_dim()) {
        throw InvalidInputError("coupled_rhs: aggregated state dimension mismatch");
    }
    const int m = sys.channel_width();
    const int node_count = sys.node_count();
    const int edge_count = sys.edge_count();

    CoupledSignals sig;
    sig.y_p.resize(static_cast<Eigen::Index>(node_count) * m);
    for (int i = 0; i < node_count; ++i) {
        const DynamicSystem& plant = sys.plant(i);
        const auto x = plant_state.segment(sys.plant_state_offset(i), plant.state_dim);
        if (plant.h) {
            sig.y_p.segment(static_cast<Eigen::Index>(i) * m, m) =
                checked(plant.h(x), m, "plant h(x)");
        } else {
            sig.y_p.segment(static_cast<Eigen::Index>(i) * m, m).setZero();
        }
    }

    sig.u_c = (edge_count > 0) ? edge_inputs(sys.incidence(), sig.y_p)
                               : Vector(0);

    sig.y_c.resize(static_cast<Eigen::Index>(edge_count) * m);
    for (int l = 0; l < edge_count; ++l) {
        const DynamicSystem& controller = sys.controller(l);
        const auto x = controller_state.segment(sys.controller_state_offset(l),
                                                controller.state_dim);
        const auto u = sig.u_c.segment(static_cast<Eigen::Index>(l) * m, m);
        auto block = sig.y_c.segment(static_cast<Eigen::Index>(l) * m, m);
        block.setZero();
        if (controller.h) block += checked(controller.h(x), m, "controller h(x)");
        if (controller.g) block += checked(controller.g(u), m, "controller g(u)");
    }

    sig.u_p = (edge_count > 0)
                  ? node_inputs(sys.incidence(), sig.y_c)
                  : Vector::Zero(static_cast<Eigen::Index>(node_count) * m).eval();

    sig.xp_dot.resize(sys.plant_state_dim());
    for (int i = 0; i < node_count; ++i) {
        const DynamicSystem& plant = sys.plant(i);
        if (plant.state_dim == 0) continue;
        const auto x = plant_state.segment(sys.plant_state_offset(i), plant.state_dim);
        const auto u = sig.u_p.segment(static_cast<Eigen::Index>(i) * m, m);
        sig.xp_dot.segment(sys.plant_state_offset(i), plant.state_dim) =
            checked(plant.f(x, u), plant.state_dim, "plant f(x,u)");
    }

    sig.xc_dot.resize(sys.controller_state_dim());
    for (int l = 0; l < edge_count; ++l) {
        const DynamicSystem& controller = sys.controller(l);
        if (controller.state_dim == 0) continue;
        const auto x = controller_state.segment(sys.controller_state_offset(l),
                                                controller.state_dim);
        const auto u = sig.u_c.segment(static_cast<Eigen::Index>(l) * m, m);
        sig.xc_dot.segment(sys.controller_state_offset(l), controller.state_dim) =
            checked(controller.f(x, u), controller.state_dim, "controller f(x,u)");
    }
    return sig;
}

DynamicSystem aggregate_systems(const std::vector<DynamicSystem>& parts) {
    if (parts.empty()) throw InvalidInputError("aggregate_systems: no parts");

    int state_dim = 0;
    int io_dim = 0;
    bool any_feedthrough = false;
    bool all_storage = true;
    double epsilon = std::numeric_limits<double>::infinity();
    std::vector<int> state_offsets(parts.size());
    std::vector<int> io_offsets(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        state_offsets[i] = state_dim;
        io_offsets[i] = io_dim;
        state_dim += parts[i].state_dim;
        io_dim += parts[i].io_dim;
        any_feedthrough = any_feedthrough || parts[i].has_feedthrough();
        all_storage = all_storage && parts[i].has_storage();
        epsilon = std::min(epsilon, parts[i].osni_epsilon);
    }

    DynamicSystem agg;
    agg.state_dim = state_dim;
    agg.io_dim = io_dim;
    agg.osni_epsilon = epsilon;

    if (state_dim > 0) {
        agg.f = [parts, state_offsets, io_offsets, state_dim](const Vector& x,
                                                              const Vector& u) {
            Vector xdot(state_dim);
            for (std::size_t i = 0; i < parts.size(); ++i) {
                if (parts[i].state_dim == 0) continue;
                xdot.segment(state_offsets[i], parts[i].state_dim) =
                    checked(parts[i].f(x.segment(state_offsets[i], parts[i].state_dim),
                                       u.segment(io_offsets[i], parts[i].io_dim)),
                            parts[i].state_dim, "part f(x,u)");
            }
            return xdot;
        };
    }
    agg.h = [parts, state_offsets, io_offsets, io_dim](const Vector& x) {
        Vector y = Vector::Zero(io_dim);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (!parts[i].h) continue;
            y.segment(io_offsets[i], parts[i].io_dim) =
                checked(parts[i].h(x.segment(state_offsets[i], parts[i].state_dim)),
                        parts[i].io_dim, "part h(x)");
        }
        return y;
    };
    if (any_feedthrough) {
        agg.g = [parts, io_offsets, io_dim](const Vector& u) {
            Vector y = Vector::Zero(io_dim);
            for (std::size_t i = 0; i < parts.size(); ++i) {
                if (!parts[i].g) continue;
                y.segment(io_offsets[i], parts[i].io_dim) =
                    checked(parts[i].g(u.segment(io_offsets[i], parts[i].io_dim)),
                            parts[i].io_dim, "part g(u)");
            }
            return y;
        };
    }
    if (all_storage) {
        agg.storage = [parts, state_offsets](const Vector& x) {
            double v = 0.0;
            for (std::size_t i = 0; i < parts.size(); ++i) {
                v += parts[i].storage(x.segment(state_offsets[i], parts[i].state_dim));
            }
            return v;
        };
    }
    return agg;
}

DynamicSystem networked_plant(const InterconnectedSystem& sys) {
    const int m = sys.channel_width();
    const int edge_count = sys.edge_count();
    const DynamicSystem stacked = aggregate_systems(sys.plants());
    const IncidenceMatrix incidence = sys.incidence();

    DynamicSystem hat;
    hat.state_dim = stacked.state_dim;
    hat.io_dim = m * edge_count;
    hat.osni_epsilon = stacked.osni_epsilon;
    hat.f = [stacked, incidence](const Vector& x, const Vector& u_hat) {
        return stacked.f(x, node_inputs(incidence, u_hat));
    };
    hat.h = [stacked, incidence](const Vector& x) {
        return edge_inputs(incidence, stacked.h(x));
    };
    hat.storage = stacked.storage;
    return hat;
}

}  // namespace nigrid
