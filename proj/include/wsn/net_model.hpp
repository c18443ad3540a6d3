#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wsn/rng.hpp"

namespace wsn {

enum class NodeRole { Member, ClusterHead, DirectToBs };

enum class AgentAction { None, Recluster, Keep };  // none / a1 / a2

struct NodeState {
    int id = 0;  // 1-based; the BS is not a node
    double x = 0.0;
    double y = 0.0;
    double energy = 0.0;  // joules; node is alive iff energy > 0
    bool alive = false;
    NodeRole role = NodeRole::DirectToBs;
    std::optional<int> cluster_head_id;
    int ch_selection_count = 0;
};

struct NetworkConfig {
    int n_nodes = 100;
    double side_length = 100.0;
    double bs_x = 50.0;
    double bs_y = 175.0;
    double e0 = 0.5;           // initial energy, J
    double k_fraction = 0.05;  // CH fraction in (0, 1]
    std::uint64_t seed = 1;

    bool valid() const {
        return n_nodes >= 2 && side_length > 0 && e0 > 0 && k_fraction > 0 &&
               k_fraction <= 1 && k_fraction * n_nodes >= 1;
    }
};

struct NetworkState {
    long round = 0;
    std::vector<NodeState> nodes;  // sorted by id, ids 1..N
    long rounds_since_recluster = 0;
    AgentAction last_action = AgentAction::None;
    double bs_x = 0.0;
    double bs_y = 0.0;

    const NodeState& node(int id) const { return nodes[static_cast<size_t>(id - 1)]; }
    NodeState& node(int id) { return nodes[static_cast<size_t>(id - 1)]; }

    double dist_to_bs(const NodeState& n) const {
        return std::hypot(n.x - bs_x, n.y - bs_y);
    }

    long alive_count() const;
    double total_energy() const;       // E_net, dead nodes contribute 0
    double mean_alive_energy() const;  // Ebar over alive nodes
};

inline double node_distance(const NodeState& a, const NodeState& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct NetworkStats {
    double e_net = 0.0;
    double e_bar = 0.0;
    double e_bar_dissipated = 0.0;
    long alive_count = 0;
};

// Uniform deployment in [0, L]^2, all energies at e0, round 0.
// Deterministic in cfg.seed (stream label "topology").
NetworkState generate_topology(const NetworkConfig& cfg);

// Alive nodes whose energy is at least the average alive-node energy.
// Never empty while any node lives: the max-energy node qualifies.
std::vector<int> potential_heads(const NetworkState& s);

// Round-over-round statistics. `prev` must hold the same node ids.
NetworkStats network_stats(const NetworkState& s, const NetworkState& prev);

// Topology CSV: header "id,x,y", 6-decimal fixed point.
void dump_topology_csv(const NetworkState& s, std::ostream& out);
NetworkState load_topology_csv(std::istream& in, const NetworkConfig& cfg);

}  // namespace wsn
