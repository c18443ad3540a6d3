#include "wsn/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wsn {

namespace {

ClusteringSolution make_solution(const NetworkState& s, std::vector<int> chs,
                                 std::map<int, int> member_assignment, double objective) {
    ClusteringSolution sol;
    std::sort(chs.begin(), chs.end());
    sol.chs = std::move(chs);
    sol.assignment = std::move(member_assignment);
    for (const int ch : sol.chs) sol.assignment[ch] = ch;  // self-assignment
    sol.objective = objective;
    return sol;
}

}  // namespace

std::vector<int> leach_elect(const NetworkState& s, double p_frac, Rng& rng,
                             LeachEpochState& epoch) {
    if (p_frac <= 0.0 || p_frac >= 1.0)
        throw std::invalid_argument("leach_elect: p must be in (0,1)");
    const long epoch_len = static_cast<long>(std::ceil(1.0 / p_frac));
    const long phase = s.round % epoch_len;
    if (epoch.was_ch.size() != s.nodes.size()) epoch.was_ch.assign(s.nodes.size(), false);
    if (phase == 0) std::fill(epoch.was_ch.begin(), epoch.was_ch.end(), false);

    const double threshold = p_frac / (1.0 - p_frac * static_cast<double>(phase));
    std::vector<int> chs;
    for (const auto& n : s.nodes) {
        if (!n.alive) continue;
        const double u = rng.uniform();
        if (!epoch.was_ch[static_cast<size_t>(n.id - 1)] && u < threshold) {
            chs.push_back(n.id);
            epoch.was_ch[static_cast<size_t>(n.id - 1)] = true;
        }
    }
    return chs;
}

std::map<int, int> leach_assign(const NetworkState& s, const std::vector<int>& chs) {
    std::map<int, int> assignment;
    if (chs.empty()) return assignment;
    for (const auto& n : s.nodes) {
        if (!n.alive) continue;
        if (std::find(chs.begin(), chs.end(), n.id) != chs.end()) continue;
        double best = std::numeric_limits<double>::infinity();
        int best_ch = -1;
        for (const int j : chs) {
            if (!s.node(j).alive) continue;
            const double d = node_distance(n, s.node(j));
            if (d < best || (d == best && j < best_ch)) {
                best = d;
                best_ch = j;
            }
        }
        if (best_ch > 0) assignment[n.id] = best_ch;
    }
    return assignment;
}

LeachProtocol::LeachProtocol(double p_frac, std::uint64_t seed)
    : p_frac_(p_frac), rng_(seed, "leach-election") {}

std::optional<ClusteringSolution> LeachProtocol::decide(const NetworkState& s) {
    std::vector<int> chs = leach_elect(s, p_frac_, rng_, epoch_);
    // Keep only alive self-elected heads (dead nodes never elect by
    // construction) and sort for stable downstream handling.
    std::sort(chs.begin(), chs.end());
    return make_solution(s, chs, leach_assign(s, chs), 0.0);
}

double ssd(const NetworkState& s, const std::vector<int>& chs) {
    if (chs.empty()) throw std::invalid_argument("ssd: empty CH set");
    double total = 0.0;
    for (const auto& n : s.nodes) {
        if (!n.alive) continue;
        if (std::find(chs.begin(), chs.end(), n.id) != chs.end()) continue;
        double best = std::numeric_limits<double>::infinity();
        for (const int j : chs) {
            const double dx = n.x - s.node(j).x;
            const double dy = n.y - s.node(j).y;
            best = std::min(best, dx * dx + dy * dy);
        }
        total += best;
    }
    return total;
}

ClusteringSolution leach_c_cluster(const NetworkState& s, int k, Rng& rng,
                                   const AnnealSchedule& schedule) {
    std::vector<int> cands = potential_heads(s);
    if (cands.empty()) throw std::runtime_error("leach_c_cluster: no candidates");
    k = std::min(std::max(k, 1), static_cast<int>(cands.size()));

    if (static_cast<int>(cands.size()) == k)
        return make_solution(s, cands, leach_assign(s, cands), ssd(s, cands));

    // Random initial k-subset (partial Fisher-Yates over the candidate list).
    std::vector<int> pool = cands;
    for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(rng.below(pool.size() - static_cast<size_t>(i)));
        std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
    }
    std::vector<int> current(pool.begin(), pool.begin() + k);
    std::vector<int> spare(pool.begin() + k, pool.end());

    double current_ssd = ssd(s, current);
    std::vector<int> best = current;
    double best_ssd = current_ssd;
    double temp = current_ssd / schedule.initial_temp_divisor;

    for (int it = 0; it < schedule.iterations; ++it) {
        const auto ci = rng.below(current.size());
        const auto si = rng.below(spare.size());
        std::swap(current[ci], spare[si]);
        const double candidate_ssd = ssd(s, current);
        const double delta = candidate_ssd - current_ssd;
        if (delta <= 0.0 || rng.uniform() < std::exp(-delta / temp)) {
            current_ssd = candidate_ssd;
            if (current_ssd < best_ssd) {
                best_ssd = current_ssd;
                best = current;
            }
        } else {
            std::swap(current[ci], spare[si]);  // revert
        }
        temp *= schedule.cooling;
    }
    return make_solution(s, best, leach_assign(s, best), best_ssd);
}

LeachCProtocol::LeachCProtocol(double k_fraction, std::uint64_t seed, AnnealSchedule schedule)
    : k_fraction_(k_fraction), rng_(seed, "leach-c-anneal"), schedule_(schedule) {}

std::optional<ClusteringSolution> LeachCProtocol::decide(const NetworkState& s) {
    const int k = requested_ch_count(k_fraction_, s.alive_count());
    return leach_c_cluster(s, k, rng_, schedule_);
}

MilpPeriodicProtocol::MilpPeriodicProtocol(const RadioParams& p, MilpWeights w,
                                           double k_fraction, long period)
    : radio_(p), weights_(w), k_fraction_(k_fraction), period_(std::max(1L, period)) {}

std::optional<ClusteringSolution> MilpPeriodicProtocol::decide(const NetworkState& s) {
    if (s.round % period_ != 0 && last_.has_value()) {
        // Stale solutions survive until the period elapses unless the current
        // CH set lost a member to depletion.
        const bool intact = std::all_of(last_->chs.begin(), last_->chs.end(),
                                        [&](int id) { return s.node(id).alive; });
        if (intact) return std::nullopt;
    }
    const int k = requested_ch_count(k_fraction_, s.alive_count());
    last_ = solve_exact(s, radio_, weights_, k, last_ ? &*last_ : nullptr);
    return last_;
}

}  // namespace wsn
