#pragma once

#include <vector>

#include "nigrid/system.hpp"
#include "nigrid/topology.hpp"

namespace nigrid {

/// U_c = (Q' (x) I_m) Y_p: each edge takes the difference of its end-node
/// output blocks. The channel width m is inferred from the signal length.
Vector edge_inputs(const IncidenceMatrix& incidence, const Vector& node_outputs);

/// U_p = (Q (x) I_m) Y_c: each node sums its incident edge output blocks with
/// orientation sign.
Vector node_inputs(const IncidenceMatrix& incidence, const Vector& edge_outputs);

/// Both sides of the network power-balance identity. The node side is
/// U_p' Y_p with U_p = (Q (x) I) Y_c; the edge side is U_c' Y_c with
/// U_c = (Q' (x) I) Y_p. They agree to machine precision for every signal
/// pair; callers assert the difference against their tolerance.
struct PowerBalance {
    double node_side = 0.0;
    double edge_side = 0.0;
};

PowerBalance power_balance_identity(const IncidenceMatrix& incidence,
                                    const Vector& node_outputs, const Vector& edge_outputs);

/// Feedback interconnection of per-node plants and per-edge controllers over
/// a fixed topology. Plants must have no direct feedthrough (their output
/// depends on state only), which makes the wiring loop explicitly solvable:
/// Y_p -> U_c -> Y_c -> U_p.
class InterconnectedSystem {
public:
    InterconnectedSystem(NetworkTopology topology, std::vector<DynamicSystem> node_plants,
                         std::vector<DynamicSystem> edge_controllers);

    const NetworkTopology& topology() const { return topology_; }
    const IncidenceMatrix& incidence() const { return incidence_; }

    int channel_width() const { return channel_width_; }
    int node_count() const { return topology_.node_count(); }
    int edge_count() const { return topology_.edge_count(); }

    int plant_state_dim() const { return plant_state_dim_; }
    int controller_state_dim() const { return controller_state_dim_; }
    int plant_state_offset(int i) const { return plant_offsets_[static_cast<std::size_t>(i)]; }
    int controller_state_offset(int l) const {
        return controller_offsets_[static_cast<std::size_t>(l)];
    }

    const DynamicSystem& plant(int i) const { return plants_[static_cast<std::size_t>(i)]; }
    const DynamicSystem& controller(int l) const {
        return controllers_[static_cast<std::size_t>(l)];
    }
    const std::vector<DynamicSystem>& plants() const { return plants_; }
    const std::vector<DynamicSystem>& controllers() const { return controllers_; }

private:
    NetworkTopology topology_;
    IncidenceMatrix incidence_;
    std::vector<DynamicSystem> plants_;
    std::vector<DynamicSystem> controllers_;
    std::vector<int> plant_offsets_;
    std::vector<int> controller_offsets_;
    int channel_width_ = 0;
    int plant_state_dim_ = 0;
    int controller_state_dim_ = 0;
};

/// All signals of the coupled system at one state: derivatives of the
/// aggregated plant and controller states plus the wired inputs/outputs.
struct CoupledSignals {
    Vector xp_dot;
    Vector xc_dot;
    Vector y_p;
    Vector y_c;
    Vector u_p;
    Vector u_c;
};

CoupledSignals coupled_rhs(const InterconnectedSystem& sys, const Vector& plant_state,
                           const Vector& controller_state);

/// Stacks subsystems into one block-diagonal system. The aggregate storage is
/// the sum of part storages (absent if any part lacks one) and the aggregate
/// output strictness is the minimum over parts.
DynamicSystem aggregate_systems(const std::vector<DynamicSystem>& parts);

/// The networked node plants (Q' (x) I) H_p (Q (x) I): input and output live
/// in the edge-channel space, the storage is the summed plant storage.
DynamicSystem networked_plant(const InterconnectedSystem& sys);

}  // namespace nigrid
