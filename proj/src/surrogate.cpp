#include "wsn/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "wsn/sim_engine.hpp"

namespace wsn::surrogate {

namespace {

std::uint64_t hash_doubles(const std::vector<double>& v, std::uint64_t h = 0xCBF29CE484222325ULL) {
    for (const double d : v) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &d, sizeof(bits));
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xFF;
            h *= 0x100000001B3ULL;
        }
    }
    return h;
}

}  // namespace

std::vector<double> ch_features(const NetworkState& s, const RadioParams& p,
                                const MilpWeights& w, double k_fraction) {
    const auto n = s.nodes.size();
    const double e_bar = s.mean_alive_energy();
    const double alive = static_cast<double>(s.alive_count());
    const double k_hat = k_fraction * alive;

    std::vector<double> f;
    f.reserve(4 * n + 5);
    f.push_back(w.alpha);
    f.push_back(w.beta);
    f.push_back(w.gamma);
    f.push_back(s.total_energy());
    for (const auto& node : s.nodes) f.push_back(node.alive ? node.energy : 0.0);
    std::vector<bool> flags(n, false);
    for (std::size_t i = 0; i < n; ++i)
        flags[i] = s.nodes[i].alive && s.nodes[i].energy >= e_bar;
    for (std::size_t i = 0; i < n; ++i) f.push_back(flags[i] ? 1.0 : 0.0);
    for (std::size_t i = 0; i < n; ++i)
        f.push_back(flags[i] ? ch_tx_energy(p, p.b_data, s.dist_to_bs(s.nodes[i])) : 0.0);
    // Expected receive load per prospective CH: an even split of the alive
    // membership across the expected CH count.
    const double members_per_ch = k_hat > 0.0 ? std::max(0.0, alive / k_hat - 1.0) : 0.0;
    const double exp_rx = rx_energy(p, p.b_data) * members_per_ch;
    for (std::size_t i = 0; i < n; ++i) f.push_back(flags[i] ? exp_rx : 0.0);
    f.push_back(k_hat);
    return f;
}

std::vector<double> assign_features(const NetworkState& s, const RadioParams& p,
                                    const MilpWeights& w, const std::vector<int>& chs,
                                    int ch_max) {
    const auto n = s.nodes.size();
    const auto cm = static_cast<std::size_t>(ch_max);
    if (chs.size() > cm)
        throw std::invalid_argument("assign_features: more CHs than CH_max slots");

    std::vector<double> f;
    f.reserve(4 + n + cm + n * cm + cm);
    f.push_back(w.alpha);
    f.push_back(w.beta);
    f.push_back(w.gamma);
    f.push_back(s.total_energy());
    for (const auto& node : s.nodes) f.push_back(node.alive ? node.energy : 0.0);
    for (std::size_t c = 0; c < cm; ++c)
        f.push_back(c < chs.size() ? ch_tx_energy(p, p.b_data, s.dist_to_bs(s.node(chs[c]))) : 0.0);
    for (const auto& node : s.nodes) {
        for (std::size_t c = 0; c < cm; ++c) {
            if (c < chs.size() && node.alive) {
                const double d = node.id == chs[c] ? 0.0 : node_distance(node, s.node(chs[c]));
                f.push_back(tx_energy(p, p.b_data, d));
            } else {
                f.push_back(0.0);
            }
        }
    }
    for (std::size_t c = 0; c < cm; ++c)
        f.push_back(c < chs.size() ? static_cast<double>(chs[c]) / static_cast<double>(n) : 0.0);
    return f;
}

SolutionDataset build_dataset(const std::vector<Scenario>& scenarios, const RadioParams& p,
                              std::uint64_t split_seed) {
    SolutionDataset ds;
    std::unordered_set<std::uint64_t> seen;
    std::vector<std::size_t> block_start;  // per (scenario,weights,seed) block, for the split

    for (const auto& sc : scenarios) {
        if (ds.n_nodes == 0) {
            ds.n_nodes = sc.config.n_nodes;
            ds.ch_max = requested_ch_count(sc.config.k_fraction, sc.config.n_nodes);
        }
        for (const auto& w : sc.weight_grid) {
            for (const std::uint64_t seed : sc.seeds) {
                block_start.push_back(ds.ch_rows.size());
                NetworkConfig cfg = sc.config;
                cfg.seed = seed;
                NetworkState s = generate_topology(cfg);
                ClusteringSolution last;
                bool have_last = false;
                while (s.alive_count() == cfg.n_nodes) {  // until first death
                    const int k = requested_ch_count(cfg.k_fraction, s.alive_count());
                    ClusteringSolution sol =
                        solve_exact(s, p, w, k, have_last ? &last : nullptr);

                    ChSample ch;
                    ch.features = ch_features(s, p, w, cfg.k_fraction);
                    ch.label.assign(static_cast<std::size_t>(cfg.n_nodes), 0.0);
                    for (const int id : sol.chs) ch.label[static_cast<std::size_t>(id - 1)] = 1.0;

                    AssignSample as;
                    as.features = assign_features(s, p, w, sol.chs, ds.ch_max);
                    as.slot.assign(static_cast<std::size_t>(cfg.n_nodes), -1);
                    for (const auto& [node_id, ch_id] : sol.assignment) {
                        const auto it = std::lower_bound(sol.chs.begin(), sol.chs.end(), ch_id);
                        as.slot[static_cast<std::size_t>(node_id - 1)] =
                            static_cast<int>(it - sol.chs.begin());
                    }

                    const std::uint64_t h = hash_doubles(ch.label, hash_doubles(ch.features));
                    if (seen.insert(h).second) {
                        ds.ch_rows.push_back(std::move(ch));
                        ds.assign_rows.push_back(std::move(as));
                    }
                    last = sol;
                    have_last = true;
                    run_round_with_decision(s, std::move(sol), /*centralized=*/true, p);
                }
            }
        }
    }

    // 80:20 split, shuffled independently inside each seed block.
    block_start.push_back(ds.ch_rows.size());
    Rng rng(split_seed, "dataset-split");
    for (std::size_t b = 0; b + 1 < block_start.size(); ++b) {
        std::vector<std::size_t> idx(block_start[b + 1] - block_start[b]);
        std::iota(idx.begin(), idx.end(), block_start[b]);
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[rng.below(i)]);
        const std::size_t n_train = idx.size() * 8 / 10;
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < n_train ? ds.train_idx : ds.test_idx).push_back(idx[i]);
    }
    std::sort(ds.train_idx.begin(), ds.train_idx.end());
    std::sort(ds.test_idx.begin(), ds.test_idx.end());
    return ds;
}

nn::Matrix Predictor::apply_scaling(const std::vector<double>& features) const {
    nn::Matrix x(1, features.size());
    for (std::size_t i = 0; i < features.size(); ++i)
        x.data[i] = (features[i] - feat_mean[i]) / feat_std[i];
    return x;
}

void Predictor::save(std::ostream& out) const {
    nlohmann::json j;
    j["feat_mean"] = feat_mean;
    j["feat_std"] = feat_std;
    std::ostringstream net_json;
    net.save(net_json);
    j["net"] = nlohmann::json::parse(net_json.str());
    out << j.dump();
}

Predictor Predictor::load(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in);
    std::istringstream net_json(j.at("net").dump());
    Predictor pr{nn::Mlp::load(net_json), j.at("feat_mean").get<std::vector<double>>(),
                 j.at("feat_std").get<std::vector<double>>()};
    return pr;
}

namespace {

void fit_scaler(const std::vector<std::vector<double>*>& rows, std::vector<double>& mean,
                std::vector<double>& stddev) {
    const std::size_t dim = rows.front()->size();
    mean.assign(dim, 0.0);
    stddev.assign(dim, 0.0);
    for (const auto* r : rows)
        for (std::size_t i = 0; i < dim; ++i) mean[i] += (*r)[i];
    for (auto& m : mean) m /= static_cast<double>(rows.size());
    for (const auto* r : rows)
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = (*r)[i] - mean[i];
            stddev[i] += d * d;
        }
    for (auto& s : stddev) {
        s = std::sqrt(s / static_cast<double>(rows.size()));
        if (s < 1e-12) s = 1.0;  // constant column
    }
}

nn::Matrix scale_batch(const Predictor& pr, const std::vector<const std::vector<double>*>& rows) {
    nn::Matrix x(rows.size(), rows.front()->size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < x.cols; ++c)
            x(r, c) = ((*rows[r])[c] - pr.feat_mean[c]) / pr.feat_std[c];
    return x;
}

// Mini-batch epochs over shuffled training indices.
template <typename MakeTargets, typename GetFeatures>
void run_training(Predictor& pr, const SolutionDataset& ds, const nn::TrainConfig& cfg,
                  std::size_t target_dim, const GetFeatures& get_features,
                  const MakeTargets& make_targets) {
    Rng shuffle_rng(cfg.seed, "surrogate-shuffle");
    std::vector<std::size_t> order = ds.train_idx;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.below(i)]);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            std::vector<const std::vector<double>*> rows;
            rows.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) rows.push_back(get_features(order[i]));
            nn::Matrix x = scale_batch(pr, rows);
            nn::Matrix y(end - start, target_dim);
            for (std::size_t i = start; i < end; ++i) make_targets(order[i], y.row(i - start));
            pr.net.train_step(x, y, cfg);
        }
    }
}

}  // namespace

Predictor train_ch_predictor(const SolutionDataset& ds, const nn::TrainConfig& cfg,
                             int hidden_width) {
    if (ds.ch_rows.empty()) throw std::invalid_argument("train_ch_predictor: empty dataset");
    const auto dim = ds.ch_rows.front().features.size();
    nn::MlpSpec spec;
    spec.layer_sizes = {static_cast<int>(dim), hidden_width, ds.n_nodes};
    spec.output_activation = nn::OutputActivation::Sigmoid;
    spec.dropout_rate = 0.2;
    Predictor pr{nn::Mlp(spec, cfg.seed), {}, {}};

    std::vector<std::vector<double>*> train_rows;
    for (const std::size_t i : ds.train_idx)
        train_rows.push_back(const_cast<std::vector<double>*>(&ds.ch_rows[i].features));
    fit_scaler(train_rows, pr.feat_mean, pr.feat_std);

    nn::TrainConfig c = cfg;
    c.loss = nn::Loss::Bce;
    run_training(
        pr, ds, c, static_cast<std::size_t>(ds.n_nodes),
        [&](std::size_t i) { return &ds.ch_rows[i].features; },
        [&](std::size_t i, double* row) {
            const auto& label = ds.ch_rows[i].label;
            std::copy(label.begin(), label.end(), row);
        });
    return pr;
}

Predictor train_assign_predictor(const SolutionDataset& ds, const nn::TrainConfig& cfg,
                                 int hidden_width) {
    if (ds.assign_rows.empty()) throw std::invalid_argument("train_assign_predictor: empty dataset");
    const auto dim = ds.assign_rows.front().features.size();
    const auto n = static_cast<std::size_t>(ds.n_nodes);
    const auto cm = static_cast<std::size_t>(ds.ch_max);
    nn::MlpSpec spec;
    spec.layer_sizes = {static_cast<int>(dim), hidden_width, static_cast<int>(n * cm)};
    spec.output_activation = nn::OutputActivation::SoftmaxRows;
    spec.softmax_row_width = ds.ch_max;
    spec.dropout_rate = 0.2;
    Predictor pr{nn::Mlp(spec, cfg.seed), {}, {}};

    std::vector<std::vector<double>*> train_rows;
    for (const std::size_t i : ds.train_idx)
        train_rows.push_back(const_cast<std::vector<double>*>(&ds.assign_rows[i].features));
    fit_scaler(train_rows, pr.feat_mean, pr.feat_std);

    nn::TrainConfig c = cfg;
    c.loss = nn::Loss::Cce;
    run_training(
        pr, ds, c, n * cm,
        [&](std::size_t i) { return &ds.assign_rows[i].features; },
        [&](std::size_t i, double* row) {
            std::fill(row, row + n * cm, 0.0);  // all-zero chunks are masked in CCE
            const auto& slots = ds.assign_rows[i].slot;
            for (std::size_t node = 0; node < n; ++node)
                if (slots[node] >= 0) row[node * cm + static_cast<std::size_t>(slots[node])] = 1.0;
        });
    return pr;
}

double ch_accuracy(const Predictor& model, const SolutionDataset& ds,
                   const std::vector<std::size_t>& idx) {
    long correct = 0;
    long total = 0;
    Predictor& m = const_cast<Predictor&>(model);
    for (const std::size_t i : idx) {
        nn::Matrix x = model.apply_scaling(ds.ch_rows[i].features);
        const nn::Matrix p = m.net.forward(x, nn::Mode::Eval);
        for (std::size_t node = 0; node < p.cols; ++node) {
            const bool predicted = p.data[node] >= 0.5;
            const bool truth = ds.ch_rows[i].label[node] >= 0.5;
            correct += predicted == truth;
            ++total;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

double assign_accuracy(const Predictor& model, const SolutionDataset& ds,
                       const std::vector<std::size_t>& idx) {
    long correct = 0;
    long total = 0;
    const auto cm = static_cast<std::size_t>(ds.ch_max);
    Predictor& m = const_cast<Predictor&>(model);
    for (const std::size_t i : idx) {
        nn::Matrix x = model.apply_scaling(ds.assign_rows[i].features);
        const nn::Matrix p = m.net.forward(x, nn::Mode::Eval);
        const auto& slots = ds.assign_rows[i].slot;
        for (std::size_t node = 0; node < slots.size(); ++node) {
            if (slots[node] < 0) continue;
            std::size_t best = 0;
            for (std::size_t c = 1; c < cm; ++c)
                if (p.data[node * cm + c] > p.data[node * cm + best]) best = c;
            correct += static_cast<int>(best) == slots[node];
            ++total;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

ClusteringSolution predict_solution(const Predictor& ch_model, const Predictor& assign_model,
                                    const NetworkState& s, const RadioParams& p,
                                    const MilpWeights& w, double k_fraction) {
    Predictor& chm = const_cast<Predictor&>(ch_model);
    Predictor& asm_ = const_cast<Predictor&>(assign_model);
    const int n = static_cast<int>(s.nodes.size());
    const int ch_max = requested_ch_count(k_fraction, n);
    const int k = requested_ch_count(k_fraction, s.alive_count());

    nn::Matrix x = ch_model.apply_scaling(ch_features(s, p, w, k_fraction));
    const nn::Matrix probs = chm.net.forward(x, nn::Mode::Eval);

    // Top-k scores among alive potential heads; higher probability wins,
    // lower id on ties.
    std::vector<int> cands = potential_heads(s);
    std::stable_sort(cands.begin(), cands.end(), [&](int a, int b) {
        const double pa = probs.data[static_cast<std::size_t>(a - 1)];
        const double pb = probs.data[static_cast<std::size_t>(b - 1)];
        if (pa != pb) return pa > pb;
        return a < b;
    });
    std::vector<int> chs(cands.begin(),
                         cands.begin() + std::min<std::size_t>(cands.size(),
                                                               static_cast<std::size_t>(k)));
    std::sort(chs.begin(), chs.end());

    ClusteringSolution sol;
    sol.chs = chs;
    const std::size_t cm = static_cast<std::size_t>(ch_max);
    nn::Matrix ax = assign_model.apply_scaling(assign_features(s, p, w, chs, ch_max));
    const nn::Matrix ap = asm_.net.forward(ax, nn::Mode::Eval);
    std::map<int, int> fallback;  // computed lazily on the first repair
    for (const auto& node : s.nodes) {
        if (!node.alive) continue;
        if (std::binary_search(chs.begin(), chs.end(), node.id)) {
            sol.assignment[node.id] = node.id;
            continue;
        }
        std::size_t best = 0;
        const std::size_t base = static_cast<std::size_t>(node.id - 1) * cm;
        for (std::size_t c = 1; c < cm; ++c)
            if (ap.data[base + c] > ap.data[base + best]) best = c;
        if (best < chs.size()) {
            sol.assignment[node.id] = chs[best];
        } else {  // predicted an empty slot: repair with the exact rule
            if (fallback.empty()) fallback = optimal_assignment(s, p, chs);
            sol.assignment[node.id] = fallback.at(node.id);
        }
    }
    sol.objective = objective(s, p, w, sol);
    return sol;
}

void export_dataset(const SolutionDataset& ds, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const int n = ds.n_nodes;
    const int cm = ds.ch_max;

    {
        std::ofstream f(fs::path(dir) / "ch_dataset.csv");
        f << "alpha,beta,gamma,e_net";
        for (int i = 1; i <= n; ++i) f << ",e_" << i;
        for (int i = 1; i <= n; ++i) f << ",f_" << i;
        for (int i = 1; i <= n; ++i) f << ",etx_ch_" << i;
        for (int i = 1; i <= n; ++i) f << ",erx_ch_" << i;
        f << ",k_hat";
        for (int i = 1; i <= n; ++i) f << ",label_" << i;
        f << '\n';
        f.precision(17);
        for (const auto& row : ds.ch_rows) {
            for (std::size_t c = 0; c < row.features.size(); ++c)
                f << (c ? "," : "") << row.features[c];
            for (const double l : row.label) f << ',' << l;
            f << '\n';
        }
    }
    {
        std::ofstream f(fs::path(dir) / "assign_dataset.csv");
        f << "alpha,beta,gamma,e_net";
        for (int i = 1; i <= n; ++i) f << ",e_" << i;
        for (int c = 1; c <= cm; ++c) f << ",etx_sink_" << c;
        for (int i = 1; i <= n; ++i)
            for (int c = 1; c <= cm; ++c) f << ",etx_" << i << "_" << c;
        for (int c = 1; c <= cm; ++c) f << ",ch_id_" << c;
        for (int i = 1; i <= n; ++i) f << ",slot_" << i;
        f << '\n';
        f.precision(17);
        for (const auto& row : ds.assign_rows) {
            for (std::size_t c = 0; c < row.features.size(); ++c)
                f << (c ? "," : "") << row.features[c];
            for (const int slot : row.slot) f << ',' << slot;
            f << '\n';
        }
    }
    {
        nlohmann::json schema;
        schema["n_nodes"] = n;
        schema["ch_max"] = cm;
        schema["ch_dataset"] = {
            {"file", "ch_dataset.csv"},
            {"feature_columns",
             {"alpha", "beta", "gamma", "e_net", "e_i x N", "f_i x N", "etx_ch_i x N",
              "erx_ch_i x N", "k_hat"}},
            {"label_columns", "label_i x N (binary CH indicator)"}};
        schema["assign_dataset"] = {
            {"file", "assign_dataset.csv"},
            {"feature_columns",
             {"alpha", "beta", "gamma", "e_net", "e_i x N", "etx_sink_c x CH_max",
              "etx_i_c x (N*CH_max)", "ch_id_c x CH_max (id/N, zero-padded)"}},
            {"label_columns", "slot_i x N (CH slot index, -1 = unlabeled)"}};
        schema["split"] = {{"train", ds.train_idx}, {"test", ds.test_idx}};
        std::ofstream f(fs::path(dir) / "dataset_schema.json");
        f << schema.dump(2);
    }
}

}  // namespace wsn::surrogate
