#include "wsn/clustering_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <stdexcept>

namespace wsn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> alive_ids(const NetworkState& s) {
    std::vector<int> ids;
    for (const auto& n : s.nodes)
        if (n.alive) ids.push_back(n.id);
    return ids;
}

double member_cost(const NetworkState& s, const RadioParams& p, int i, int j) {
    const double d = i == j ? 0.0 : node_distance(s.node(i), s.node(j));
    return tx_energy(p, p.b_data, d);
}

double opening_cost(const NetworkState& s, const RadioParams& p, int j) {
    return ch_tx_energy(p, p.b_data, s.dist_to_bs(s.node(j)));
}

// Shared instance data for the two solvers.
struct Instance {
    std::vector<int> alive;            // ascending ids
    std::vector<int> cands;            // potential heads, ascending ids
    std::vector<double> cost_by_cand;  // [cand index * n_alive + alive index]
    std::vector<double> opening;       // [cand index]
    double gamma_term = 0.0;

    Instance(const NetworkState& s, const RadioParams& p, const MilpWeights& w) {
        alive = alive_ids(s);
        if (alive.empty()) throw std::runtime_error("clustering: no alive nodes");
        cands = potential_heads(s);
        cost_by_cand.resize(cands.size() * alive.size());
        for (size_t c = 0; c < cands.size(); ++c)
            for (size_t a = 0; a < alive.size(); ++a)
                cost_by_cand[c * alive.size() + a] = member_cost(s, p, alive[a], cands[c]);
        opening.resize(cands.size());
        for (size_t c = 0; c < cands.size(); ++c)
            opening[c] = opening_cost(s, p, cands[c]);
        gamma_term = w.gamma * rx_energy(p, p.b_data) * static_cast<double>(alive.size());
    }
};

ClusteringSolution finish(const NetworkState& s, const RadioParams& p,
                          const MilpWeights& w, std::vector<int> chs, bool clamped) {
    ClusteringSolution sol;
    std::sort(chs.begin(), chs.end());
    sol.chs = std::move(chs);
    sol.assignment = optimal_assignment(s, p, sol.chs);
    sol.objective = objective(s, p, w, sol);
    sol.k_clamped = clamped;
    return sol;
}

bool better_tie_break(const std::vector<int>& a, const std::vector<int>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

int requested_ch_count(double k_fraction, long alive_count) {
    return std::max(1, static_cast<int>(std::lround(k_fraction * static_cast<double>(alive_count))));
}

double objective(const NetworkState& s, const RadioParams& p,
                 const MilpWeights& w, const ClusteringSolution& sol) {
    // Canonical evaluation order (assignment map is id-sorted); both solvers
    // route their results through here so objective ties are exact.
    double member_term = 0.0;
    double rx_term = 0.0;
    for (const auto& [i, j] : sol.assignment) {
        if (!std::binary_search(sol.chs.begin(), sol.chs.end(), j))
            throw std::invalid_argument("objective: assignment targets a non-CH node");
        member_term += member_cost(s, p, i, j);
        rx_term += rx_energy(p, p.b_data);
    }
    double opening_term = 0.0;
    for (const int j : sol.chs) opening_term += opening_cost(s, p, j);
    return w.alpha * member_term + w.beta * opening_term + w.gamma * rx_term;
}

std::map<int, int> optimal_assignment(const NetworkState& s, const RadioParams& p,
                                      const std::vector<int>& chs) {
    if (chs.empty()) throw std::invalid_argument("optimal_assignment: empty CH set");
    std::map<int, int> assignment;
    for (const auto& n : s.nodes) {
        if (!n.alive) continue;
        double best = kInf;
        int best_ch = -1;
        for (const int j : chs) {  // ascending: strict < keeps the lowest id on ties
            const double c = member_cost(s, p, n.id, j);
            if (c < best) {
                best = c;
                best_ch = j;
            }
        }
        assignment[n.id] = best_ch;
    }
    return assignment;
}

ClusteringSolution solve_bruteforce(const NetworkState& s, const RadioParams& p,
                                    const MilpWeights& w, int k) {
    if (!w.valid()) throw std::invalid_argument("solve_bruteforce: negative weights");
    const std::vector<int> cands = potential_heads(s);
    if (cands.empty()) throw std::runtime_error("solve_bruteforce: no candidates");
    const int m = static_cast<int>(cands.size());
    const bool clamped = k > m;
    k = std::min(std::max(k, 1), m);

    double combos = 1.0;
    for (int i = 0; i < k; ++i) combos = combos * (m - i) / (i + 1);
    if (combos > 1e6) throw std::runtime_error("solve_bruteforce: combinatorial limit exceeded");

    // Lexicographic subset enumeration; first strictly better solution wins,
    // which realizes the lexicographically-smallest tie-break for free.
    std::vector<int> idx(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
    ClusteringSolution best;
    best.objective = kInf;
    for (;;) {
        std::vector<int> chs;
        chs.reserve(static_cast<size_t>(k));
        for (const int i : idx) chs.push_back(cands[static_cast<size_t>(i)]);
        ClusteringSolution sol = finish(s, p, w, chs, clamped);
        if (sol.objective < best.objective) best = std::move(sol);

        int pos = k - 1;
        while (pos >= 0 && idx[static_cast<size_t>(pos)] == m - k + pos) --pos;
        if (pos < 0) break;
        ++idx[static_cast<size_t>(pos)];
        for (int i = pos + 1; i < k; ++i)
            idx[static_cast<size_t>(i)] = idx[static_cast<size_t>(i - 1)] + 1;
    }
    return best;
}

ClusteringSolution solve_exact(const NetworkState& s, const RadioParams& p,
                               const MilpWeights& w, int k,
                               const ClusteringSolution* hint) {
    if (!w.valid()) throw std::invalid_argument("solve_exact: negative weights");
    Instance inst(s, p, w);
    const int n = static_cast<int>(inst.alive.size());
    const int m = static_cast<int>(inst.cands.size());
    const bool clamped = k > m;
    k = std::min(std::max(k, 1), m);

    ClusteringSolution incumbent;
    incumbent.objective = kInf;
    auto offer = [&](const std::vector<int>& chs) {
        ClusteringSolution sol = finish(s, p, w, chs, clamped);
        if (sol.objective < incumbent.objective ||
            (sol.objective == incumbent.objective && better_tie_break(sol.chs, incumbent.chs)))
            incumbent = std::move(sol);
    };

    if (hint && static_cast<int>(hint->chs.size()) == k) {
        const bool usable = std::all_of(hint->chs.begin(), hint->chs.end(), [&](int id) {
            return std::binary_search(inst.cands.begin(), inst.cands.end(), id);
        });
        if (usable) offer(hint->chs);
    }
    {
        // Greedy incumbent: add the candidate that most reduces the objective.
        std::vector<double> best_cost(static_cast<size_t>(n), kInf);
        std::vector<int> chosen;
        std::vector<bool> used(static_cast<size_t>(m), false);
        for (int step = 0; step < k; ++step) {
            int pick = -1;
            double pick_val = kInf;
            for (int c = 0; c < m; ++c) {
                if (used[static_cast<size_t>(c)]) continue;
                const double* col = inst.cost_by_cand.data() +
                                    static_cast<size_t>(c) * static_cast<size_t>(n);
                double val = w.beta * inst.opening[static_cast<size_t>(c)];
                for (int i = 0; i < n; ++i)
                    val += w.alpha * std::min(best_cost[static_cast<size_t>(i)], col[i]) -
                           (best_cost[static_cast<size_t>(i)] < kInf
                                ? w.alpha * best_cost[static_cast<size_t>(i)]
                                : 0.0);
                if (val < pick_val) {
                    pick_val = val;
                    pick = c;
                }
            }
            used[static_cast<size_t>(pick)] = true;
            chosen.push_back(inst.cands[static_cast<size_t>(pick)]);
            const double* picked_col = inst.cost_by_cand.data() +
                                       static_cast<size_t>(pick) * static_cast<size_t>(n);
            for (int i = 0; i < n; ++i)
                best_cost[static_cast<size_t>(i)] =
                    std::min(best_cost[static_cast<size_t>(i)], picked_col[i]);
        }
        offer(chosen);
    }

    // Lagrangian relaxation of the one-CH-per-node constraints (multipliers
    // lambda_i): L(lambda) = sum_i lambda_i + gamma_term + min over k-subsets
    // of rho_j, with rho_j = beta*opening_j + sum_i min(0, alpha*cost_ij -
    // lambda_i). Any lambda gives a valid lower bound; subgradient ascent
    // against the incumbent upper bound tightens it, typically to a near-zero
    // gap at this problem size.
    std::vector<double> lambda(static_cast<size_t>(n));
    std::vector<double> rho(static_cast<size_t>(m));
    std::vector<double> mu(static_cast<size_t>(m));
    double lambda_sum = 0.0;
    {
        // init from the incumbent's assignment costs
        std::size_t a = 0;
        for (const auto& [i, j] : incumbent.assignment)
            lambda[a++] = w.alpha * member_cost(s, p, i, j);
        const auto eval_rho = [&]() {
            for (int c = 0; c < m; ++c) {
                const double* col = inst.cost_by_cand.data() +
                                    static_cast<size_t>(c) * static_cast<size_t>(n);
                double acc = w.beta * inst.opening[static_cast<size_t>(c)];
                for (int i = 0; i < n; ++i)
                    acc += std::min(0.0, w.alpha * col[i] - lambda[static_cast<size_t>(i)]);
                rho[static_cast<size_t>(c)] = acc;
            }
        };
        std::vector<double> best_lambda = lambda;
        double best_l = -kInf;
        std::vector<int> sel(static_cast<size_t>(m));
        std::vector<double> grad(static_cast<size_t>(n));
        double theta = 2.0;
        int stall = 0;
        for (int iter = 0; iter < 200; ++iter) {
            eval_rho();
            for (int c = 0; c < m; ++c) sel[static_cast<size_t>(c)] = c;
            std::nth_element(sel.begin(), sel.begin() + (k - 1), sel.end(), [&](int x, int y) {
                return rho[static_cast<size_t>(x)] < rho[static_cast<size_t>(y)];
            });
            double lsum = 0.0, l = inst.gamma_term;
            for (int i = 0; i < n; ++i) lsum += lambda[static_cast<size_t>(i)];
            for (int d = 0; d < k; ++d) l += rho[static_cast<size_t>(sel[static_cast<size_t>(d)])];
            l += lsum;
            if (l > best_l) {
                best_l = l;
                best_lambda = lambda;
                stall = 0;
            } else if (++stall >= 10) {
                theta *= 0.5;
                stall = 0;
            }
            if (best_l >= incumbent.objective || theta < 1e-4) break;
            for (int i = 0; i < n; ++i) grad[static_cast<size_t>(i)] = 1.0;
            for (int d = 0; d < k; ++d) {
                const int c = sel[static_cast<size_t>(d)];
                const double* col = inst.cost_by_cand.data() +
                                    static_cast<size_t>(c) * static_cast<size_t>(n);
                for (int i = 0; i < n; ++i)
                    if (w.alpha * col[i] < lambda[static_cast<size_t>(i)])
                        grad[static_cast<size_t>(i)] -= 1.0;
            }
            double norm = 0.0;
            for (int i = 0; i < n; ++i)
                norm += grad[static_cast<size_t>(i)] * grad[static_cast<size_t>(i)];
            if (norm == 0.0) break;
            const double step = theta * std::max(incumbent.objective - l, 1e-12) / norm;
            for (int i = 0; i < n; ++i) lambda[static_cast<size_t>(i)] += step * grad[static_cast<size_t>(i)];
        }
        lambda = std::move(best_lambda);
        eval_rho();
        lambda_sum = 0.0;
        for (int i = 0; i < n; ++i) lambda_sum += lambda[static_cast<size_t>(i)];
        for (int c = 0; c < m; ++c)
            mu[static_cast<size_t>(c)] =
                rho[static_cast<size_t>(c)] - w.beta * inst.opening[static_cast<size_t>(c)];
    }

    // Decide attractive candidates (lowest rho) first; suffix prefix-sums of
    // rho then give the cheapest `need` remaining openings in O(1).
    std::vector<int> ord(static_cast<size_t>(m));
    for (int c = 0; c < m; ++c) ord[static_cast<size_t>(c)] = c;
    std::sort(ord.begin(), ord.end(), [&](int a, int b) {
        if (rho[static_cast<size_t>(a)] != rho[static_cast<size_t>(b)])
            return rho[static_cast<size_t>(a)] < rho[static_cast<size_t>(b)];
        return inst.cands[static_cast<size_t>(a)] < inst.cands[static_cast<size_t>(b)];
    });
    std::vector<double> rho_prefix(static_cast<size_t>(m) + 1, 0.0);
    for (int t = 0; t < m; ++t)
        rho_prefix[static_cast<size_t>(t) + 1] =
            rho_prefix[static_cast<size_t>(t)] + rho[static_cast<size_t>(ord[static_cast<size_t>(t)])];
    // cheap_open[t*(k+1)+j]: sum of the j cheapest openings within ord[t..m).
    std::vector<double> cheap_open((static_cast<size_t>(m) + 1) * static_cast<size_t>(k + 1), 0.0);
    {
        std::vector<double> heap;  // max-heap of the j smallest seen so far
        for (int j = 1; j <= k; ++j) {
            heap.clear();
            double sum = 0.0;
            for (int t = m - 1; t >= 0; --t) {
                const double o = inst.opening[static_cast<size_t>(ord[static_cast<size_t>(t)])];
                if (static_cast<int>(heap.size()) < j) {
                    heap.push_back(o);
                    std::push_heap(heap.begin(), heap.end());
                    sum += o;
                } else if (o < heap.front()) {
                    sum += o - heap.front();
                    std::pop_heap(heap.begin(), heap.end());
                    heap.back() = o;
                    std::push_heap(heap.begin(), heap.end());
                }
                if (static_cast<int>(heap.size()) == j)
                    cheap_open[static_cast<size_t>(t) * static_cast<size_t>(k + 1) +
                               static_cast<size_t>(j)] = sum;
            }
        }
    }

    // suffix_min[t*n + i]: cheapest member cost for alive node i over ord[t..m).
    std::vector<double> suffix_min((static_cast<size_t>(m) + 1) * static_cast<size_t>(n), kInf);
    for (int t = m - 1; t >= 0; --t) {
        const double* col = inst.cost_by_cand.data() +
                            static_cast<size_t>(ord[static_cast<size_t>(t)]) * static_cast<size_t>(n);
        const double* next = suffix_min.data() + (static_cast<size_t>(t) + 1) * static_cast<size_t>(n);
        double* row = suffix_min.data() + static_cast<size_t>(t) * static_cast<size_t>(n);
        for (int i = 0; i < n; ++i) row[i] = std::min(next[i], col[i]);
    }

    // Depth-first enumeration of k-combinations in `ord` order, pruned by two
    // lower bounds. The O(1) Lagrangian bound (fixed root multipliers) fires
    // first; survivors pay the O(n) combinatorial bound:
    //   beta * (openings so far + the `need` cheapest remaining openings)
    // + alpha * sum_i min(cost to a chosen CH, cost to any remaining candidate)
    // + the constant gamma term.
    // Pruning leaves an epsilon margin so floating-point rounding in the
    // bounds can never discard a true optimum or an objective tie (the
    // lexicographic tie-break must see every optimal CH set).
    std::vector<double> chosen_min(static_cast<size_t>(k + 1) * static_cast<size_t>(n), kInf);
    std::vector<int> picked(static_cast<size_t>(k));

    // suffix_small[t]: the k smallest candidate ids within ord[t..m), sorted.
    // Used to prune tie-only subtrees that cannot win the lexicographic
    // tie-break (without this, degenerate instances where every k-subset ties
    // -- e.g. alpha = beta = 0 -- degrade to full enumeration).
    std::vector<std::vector<int>> suffix_small(static_cast<size_t>(m) + 1);
    for (int t = m - 1; t >= 0; --t) {
        std::vector<int> cur = suffix_small[static_cast<size_t>(t) + 1];
        const int id = inst.cands[static_cast<size_t>(ord[static_cast<size_t>(t)])];
        cur.insert(std::lower_bound(cur.begin(), cur.end(), id), id);
        if (static_cast<int>(cur.size()) > k) cur.pop_back();
        suffix_small[static_cast<size_t>(t)] = std::move(cur);
    }
    std::vector<int> lex_pot;
    lex_pot.reserve(static_cast<size_t>(k));
    const auto tie_could_win = [&](int depth, int c, int t, int need) {
        lex_pot.clear();
        for (int d = 0; d < depth; ++d)
            lex_pot.push_back(inst.cands[static_cast<size_t>(picked[static_cast<size_t>(d)])]);
        lex_pot.push_back(inst.cands[static_cast<size_t>(c)]);
        const auto& small = suffix_small[static_cast<size_t>(t) + 1];
        for (int j = 0; j < need - 1; ++j) lex_pot.push_back(small[static_cast<size_t>(j)]);
        std::sort(lex_pot.begin(), lex_pot.end());
        return better_tie_break(lex_pot, incumbent.chs);
    };

    const auto dfs = [&](const auto& self, int start, int depth, double opening_sum,
                         double rho_sum) -> void {
        const int need = k - depth;
        if (need == 0) {
            std::vector<int> chs;
            chs.reserve(static_cast<size_t>(k));
            for (int d = 0; d < k; ++d)
                chs.push_back(inst.cands[static_cast<size_t>(picked[static_cast<size_t>(d)])]);
            offer(chs);
            return;
        }
        const double* parent = chosen_min.data() + static_cast<size_t>(depth) * static_cast<size_t>(n);
        double* child = chosen_min.data() + static_cast<size_t>(depth + 1) * static_cast<size_t>(n);
        for (int t = start; t <= m - need; ++t) {
            const int c = ord[static_cast<size_t>(t)];
            const double margin =
                1e-9 * std::max(1.0, std::abs(incumbent.objective));
            const double rho_child = rho_sum + rho[static_cast<size_t>(c)];
            const double lag_bound =
                lambda_sum + inst.gamma_term + rho_child +
                rho_prefix[static_cast<size_t>(t + need)] - rho_prefix[static_cast<size_t>(t + 1)];
            if (lag_bound > incumbent.objective + margin) continue;

            const double* col = inst.cost_by_cand.data() +
                                static_cast<size_t>(c) * static_cast<size_t>(n);
            for (int i = 0; i < n; ++i)
                child[i] = std::min(parent[i], col[i]);

            const double open_child = opening_sum + inst.opening[static_cast<size_t>(c)];
            double bound = w.beta * (open_child +
                                     cheap_open[(static_cast<size_t>(t) + 1) *
                                                    static_cast<size_t>(k + 1) +
                                                static_cast<size_t>(need - 1)]) +
                           inst.gamma_term;
            double member = 0.0;
            if (need > 1) {
                const double* sm = suffix_min.data() +
                                   static_cast<size_t>(t + 1) * static_cast<size_t>(n);
                for (int i = 0; i < n; ++i) member += std::min(child[i], sm[i]);
            } else {
                for (int i = 0; i < n; ++i) member += child[i];
            }
            bound += w.alpha * member;
            if (bound > incumbent.objective + margin) continue;
            // Subtree can at best tie the incumbent: explore it only if some
            // completion is lexicographically smaller.
            if (std::max(bound, lag_bound) >= incumbent.objective - margin &&
                !tie_could_win(depth, c, t, need))
                continue;
            picked[static_cast<size_t>(depth)] = c;
            self(self, t + 1, depth + 1, open_child, rho_child);
        }
    };
    dfs(dfs, 0, 0, 0.0, 0.0);
    return incumbent;
}

}  // namespace wsn
