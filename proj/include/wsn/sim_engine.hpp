#pragma once

#include <map>
#include <vector>

#include "wsn/net_model.hpp"
#include "wsn/protocols.hpp"
#include "wsn/radio_energy.hpp"

namespace wsn {

struct RoundMetrics {
    long round = 0;  // 1-based
    long alive = 0;
    double e_net = 0.0;
    double e_dissipated_avg = 0.0;  // over |N|, dead nodes contribute 0
    long data_sent = 0;
    long data_delivered = 0;
    long control_packets = 0;
    bool reclustered = false;
    long ch_count = 0;
    double energy_drained = 0.0;  // total charges this round (conservation ledger)
};

struct SimResult {
    std::vector<RoundMetrics> per_round;
    long fnd = 0;  // 0 = never reached
    long hnd = 0;
    long lnd = 0;
    std::vector<int> ch_selection_count;  // indexed by node id - 1
    std::map<long, long> ch_count_histogram;
    long total_control_packets = 0;
    double pdr = 0.0;
};

enum class StopMode { FirstDeath, AllDead, MaxRounds };

struct StopCondition {
    StopMode mode = StopMode::AllDead;
    long max_rounds = 0;
};

// Deducts `cost`; the node dies when its energy hits zero or below. Returns
// the energy actually drained (residual-capped) so E_net bookkeeping is exact.
double charge(NodeState& n, double cost);

// Installs a clustering decision into node roles and bumps CH selection
// counts. An empty CH set sends every alive node direct-to-BS.
void apply_solution(NetworkState& s, const ClusteringSolution& sol);

// Members whose cluster head is no longer alive fall back to direct-to-BS.
void normalize_roles(NetworkState& s);

// One full round: clustering decision (plus control charges for centralized
// protocols), member uplinks, CH aggregation and BS uplinks, death handling.
RoundMetrics run_round(NetworkState& s, Protocol& protocol, const RadioParams& p);

// Round execution with the clustering decision already made; the RL training
// loop drives this directly.
RoundMetrics run_round_with_decision(NetworkState& s,
                                     const std::optional<ClusteringSolution>& decision,
                                     bool centralized, const RadioParams& p);

SimResult run_simulation(const NetworkConfig& cfg, Protocol& protocol,
                         const RadioParams& p, const StopCondition& stop);

// Same loop, caller-provided initial state (used by the RL environment).
SimResult run_simulation_from(NetworkState& s, Protocol& protocol, const RadioParams& p,
                              const StopCondition& stop, int n_total);

}  // namespace wsn
