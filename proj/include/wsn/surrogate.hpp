#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wsn/clustering_opt.hpp"
#include "wsn/net_model.hpp"
#include "wsn/nn.hpp"
#include "wsn/radio_energy.hpp"

namespace wsn::surrogate {

// Feature vector for the CH predictor, dimension 4N+5:
//   [ alpha, beta, gamma, E_net, E_n x N, F x N (potential-head flags),
//     expected CH->BS tx energy x N (0 where F=0),
//     expected CH receive energy x N (0 where F=0), expected CH count ]
std::vector<double> ch_features(const NetworkState& s, const RadioParams& p,
                                const MilpWeights& w, double k_fraction);

// Feature vector for the assignment predictor, dimension N*CH_max + N + 2*CH_max + 4:
//   [ alpha, beta, gamma, E_net, E_n x N, CH->BS tx energy x CH_max (zero-padded),
//     per-node-per-CH tx energy N x CH_max (zero-padded),
//     CH ids / N x CH_max (zero-padded) ]
std::vector<double> assign_features(const NetworkState& s, const RadioParams& p,
                                    const MilpWeights& w, const std::vector<int>& chs,
                                    int ch_max);

struct ChSample {
    std::vector<double> features;
    std::vector<double> label;  // N-bit CH indicator
};

struct AssignSample {
    std::vector<double> features;
    std::vector<int> slot;  // per node: CH slot index, -1 where unlabeled (dead)
};

struct SolutionDataset {
    int n_nodes = 0;
    int ch_max = 0;
    std::vector<ChSample> ch_rows;          // paired 1:1 with assign_rows
    std::vector<AssignSample> assign_rows;
    std::vector<std::size_t> train_idx;     // 80:20 split, stratified per seed
    std::vector<std::size_t> test_idx;
};

struct Scenario {
    NetworkConfig config;
    std::vector<MilpWeights> weight_grid;  // usually just the tuned triple
    std::vector<std::uint64_t> seeds;
};

// Simulates each (config, weights, seed) with the exact solver invoked every
// round until first death, logging one labeled row pair per round. Duplicate
// rows (identical content hash) are dropped.
SolutionDataset build_dataset(const std::vector<Scenario>& scenarios, const RadioParams& p,
                              std::uint64_t split_seed = 1);

// MLP plus the per-column affine standardization fitted on the training split.
struct Predictor {
    nn::Mlp net;
    std::vector<double> feat_mean;
    std::vector<double> feat_std;

    nn::Matrix apply_scaling(const std::vector<double>& features) const;
    void save(std::ostream& out) const;
    static Predictor load(std::istream& in);
};

// [feature_dim, hidden_width, N] sigmoid head, BCE loss. The default width
// matches the full profile; smaller widths trade accuracy for desk-scale
// training time.
Predictor train_ch_predictor(const SolutionDataset& ds, const nn::TrainConfig& cfg,
                             int hidden_width = 2000);

// [feature_dim, hidden_width, N*CH_max] row-wise softmax over CH_max slots,
// CCE loss.
Predictor train_assign_predictor(const SolutionDataset& ds, const nn::TrainConfig& cfg,
                                 int hidden_width = 2000);

// Held-out (or given-index) per-node accuracies.
double ch_accuracy(const Predictor& model, const SolutionDataset& ds,
                   const std::vector<std::size_t>& idx);
double assign_accuracy(const Predictor& model, const SolutionDataset& ds,
                       const std::vector<std::size_t>& idx);

// Full surrogate inference: top-k CH probabilities among alive potential
// heads, per-node argmax slot assignment coerced to feasibility, objective
// recomputed exactly.
ClusteringSolution predict_solution(const Predictor& ch_model, const Predictor& assign_model,
                                    const NetworkState& s, const RadioParams& p,
                                    const MilpWeights& w, double k_fraction);

// Dataset CSVs (documented column order) plus a JSON schema sidecar.
void export_dataset(const SolutionDataset& ds, const std::string& dir);

}  // namespace wsn::surrogate
