#pragma once

#include <map>
#include <optional>
#include <vector>

#include "wsn/net_model.hpp"
#include "wsn/radio_energy.hpp"

namespace wsn {

struct MilpWeights {
    double alpha = 54.83;
    double beta = 14.54;
    double gamma = 35.31;

    bool valid() const { return alpha >= 0 && beta >= 0 && gamma >= 0; }
};

// A feasible CH selection + assignment. Every alive node (CHs included,
// self-assigned) appears exactly once in `assignment`; targets are CHs.
struct ClusteringSolution {
    std::vector<int> chs;            // ascending node ids
    std::map<int, int> assignment;   // node id -> CH id
    double objective = 0.0;          // weighted joules
    bool k_clamped = false;          // requested k exceeded |H|
};

// Requested CH count for the current alive set: max(1, round(k_fraction*|D|)).
int requested_ch_count(double k_fraction, long alive_count);

// Weighted-energy objective: alpha * member uplink + beta * CH-to-BS uplink
// + gamma * CH receive. CH self-assignment is charged at distance zero.
double objective(const NetworkState& s, const RadioParams& p,
                 const MilpWeights& w, const ClusteringSolution& sol);

// Minimum-transmit-energy assignment given a fixed CH set; CHs map to
// themselves, ties go to the lowest CH id. The weights drop out of the
// per-node argmin, so none are taken.
std::map<int, int> optimal_assignment(const NetworkState& s, const RadioParams& p,
                                      const std::vector<int>& chs);

// Exhaustive enumeration over k-subsets of the potential-head set. This is
// the oracle the branch-and-bound is tested against; guarded at C(|H|,k) <= 1e6.
ClusteringSolution solve_bruteforce(const NetworkState& s, const RadioParams& p,
                                    const MilpWeights& w, int k);

// Best-first branch-and-bound over CH subsets. Exact: matches the oracle's
// objective and, under the lexicographic tie-break, its CH set. An optional
// hint (e.g. the previous round's solution) seeds the incumbent.
ClusteringSolution solve_exact(const NetworkState& s, const RadioParams& p,
                               const MilpWeights& w, int k,
                               const ClusteringSolution* hint = nullptr);

}  // namespace wsn
