#include "wsn/sim_engine.hpp"

#include <algorithm>
#include <cmath>

namespace wsn {

double charge(NodeState& n, double cost) {
    const double drained = std::min(cost, n.energy);
    n.energy -= cost;
    if (n.energy <= 0.0) {
        n.energy = 0.0;
        n.alive = false;
        n.role = NodeRole::DirectToBs;
        n.cluster_head_id.reset();
    }
    return drained;
}

void apply_solution(NetworkState& s, const ClusteringSolution& sol) {
    for (auto& n : s.nodes) {
        if (!n.alive) continue;
        n.role = NodeRole::DirectToBs;
        n.cluster_head_id.reset();
    }
    for (const int ch : sol.chs) {
        NodeState& n = s.node(ch);
        if (!n.alive) continue;
        n.role = NodeRole::ClusterHead;
        n.cluster_head_id = ch;
        ++n.ch_selection_count;
    }
    for (const auto& [member, ch] : sol.assignment) {
        NodeState& n = s.node(member);
        if (!n.alive || n.role == NodeRole::ClusterHead) continue;
        n.role = NodeRole::Member;
        n.cluster_head_id = ch;
    }
}

void normalize_roles(NetworkState& s) {
    for (auto& n : s.nodes) {
        if (!n.alive || n.role != NodeRole::Member) continue;
        if (!n.cluster_head_id || !s.node(*n.cluster_head_id).alive) {
            n.role = NodeRole::DirectToBs;
            n.cluster_head_id.reset();
        }
    }
}

RoundMetrics run_round(NetworkState& s, Protocol& protocol, const RadioParams& p) {
    if (s.alive_count() == 0) {
        RoundMetrics rm;
        rm.round = s.round;
        return rm;
    }
    return run_round_with_decision(s, protocol.decide(s), protocol.centralized(), p);
}

RoundMetrics run_round_with_decision(NetworkState& s,
                                     const std::optional<ClusteringSolution>& decision,
                                     bool centralized, const RadioParams& p) {
    RoundMetrics rm;
    if (s.alive_count() == 0) {  // terminal row, state untouched
        rm.round = s.round;
        return rm;
    }
    rm.round = s.round + 1;
    rm.reclustered = decision.has_value();
    if (decision) {
        apply_solution(s, *decision);
        s.rounds_since_recluster = 0;
        s.last_action = AgentAction::Recluster;
        if (centralized) {
            // Status uplink rides on data packets; every alive node pays one
            // control receive for the assignment downlink. Both directions
            // count toward the overhead metric.
            long notified = 0;
            for (auto& n : s.nodes) {
                if (!n.alive) continue;
                ++notified;
                rm.energy_drained += charge(n, control_rx_energy(p));
            }
            rm.control_packets = 2 * notified;
        }
    } else {
        ++s.rounds_since_recluster;
        s.last_action = AgentAction::Keep;
    }
    normalize_roles(s);

    // Phase 2: steady state. Members first, then CHs, node-id ascending.
    std::vector<int> ch_ids;
    std::map<int, long> collected;  // packets sitting at each CH
    for (const auto& n : s.nodes) {
        if (n.alive && n.role == NodeRole::ClusterHead) {
            ch_ids.push_back(n.id);
            collected[n.id] = 0;
        }
    }
    rm.ch_count = static_cast<long>(ch_ids.size());

    for (auto& n : s.nodes) {
        if (!n.alive || n.role == NodeRole::ClusterHead) continue;
        ++rm.data_sent;
        if (n.role == NodeRole::Member) {
            NodeState& head = s.node(*n.cluster_head_id);
            rm.energy_drained += charge(n, tx_energy(p, p.b_data, node_distance(n, head)));
            if (!n.alive) continue;  // died mid-transmit, packet lost
            if (!head.alive) continue;  // receiver gone, packet lost
            rm.energy_drained += charge(head, rx_energy(p, p.b_data));
            if (head.alive) ++collected[head.id];  // lost if the CH died receiving
        } else {
            rm.energy_drained += charge(n, tx_energy(p, p.b_data, s.dist_to_bs(n)));
            if (n.alive) ++rm.data_delivered;  // the BS always receives
        }
    }
    for (const int ch : ch_ids) {
        NodeState& head = s.node(ch);
        ++rm.data_sent;  // each CH folds its own reading into the aggregate
        if (!head.alive) continue;  // died during collection; aggregate lost
        rm.energy_drained += charge(head, ch_tx_energy(p, p.b_data, s.dist_to_bs(head)));
        if (head.alive) rm.data_delivered += collected[ch] + 1;
    }
    normalize_roles(s);

    s.round = rm.round;
    rm.alive = s.alive_count();
    rm.e_net = s.total_energy();
    rm.e_dissipated_avg = rm.energy_drained / static_cast<double>(s.nodes.size());
    return rm;
}

SimResult run_simulation_from(NetworkState& s, Protocol& protocol, const RadioParams& p,
                              const StopCondition& stop, int n_total) {
    SimResult result;
    const long half = (n_total + 1) / 2;  // HND threshold: alive <= ceil(N/2)
    long sent = 0;
    long delivered = 0;
    for (;;) {
        if (stop.mode == StopMode::MaxRounds && s.round >= stop.max_rounds) break;
        if (s.alive_count() == 0) break;
        RoundMetrics rm = run_round(s, protocol, p);
        result.per_round.push_back(rm);
        sent += rm.data_sent;
        delivered += rm.data_delivered;
        result.total_control_packets += rm.control_packets;
        ++result.ch_count_histogram[rm.ch_count];
        if (result.fnd == 0 && rm.alive < n_total) result.fnd = rm.round;
        if (result.hnd == 0 && rm.alive <= half) result.hnd = rm.round;
        if (rm.alive == 0) {
            result.lnd = rm.round;
            break;
        }
        if (stop.mode == StopMode::FirstDeath && result.fnd != 0) break;
    }
    result.ch_selection_count.resize(s.nodes.size());
    for (size_t i = 0; i < s.nodes.size(); ++i)
        result.ch_selection_count[i] = s.nodes[i].ch_selection_count;
    result.pdr = sent == 0 ? 0.0 : static_cast<double>(delivered) / static_cast<double>(sent);
    return result;
}

SimResult run_simulation(const NetworkConfig& cfg, Protocol& protocol,
                         const RadioParams& p, const StopCondition& stop) {
    NetworkState s = generate_topology(cfg);
    return run_simulation_from(s, protocol, p, stop, cfg.n_nodes);
}

}  // namespace wsn
