#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "wsn/sim_engine.hpp"
#include "wsn/surrogate.hpp"

using namespace wsn;
using namespace wsn::surrogate;

namespace {
const RadioParams kRadio{};

NetworkConfig tiny_cfg(std::uint64_t seed = 5) {
    NetworkConfig cfg;
    cfg.n_nodes = 12;
    cfg.k_fraction = 0.25;  // 3 CHs, keeps exact solves instant
    cfg.e0 = 0.05;          // short lifetimes keep the dataset small
    cfg.seed = seed;
    return cfg;
}

SolutionDataset tiny_dataset(int n_seeds = 2) {
    Scenario sc;
    sc.config = tiny_cfg();
    sc.weight_grid = {MilpWeights{}};
    for (int i = 1; i <= n_seeds; ++i) sc.seeds.push_back(static_cast<std::uint64_t>(i));
    return build_dataset({sc}, kRadio, 1);
}
}  // namespace

TEST_CASE("ch_features layout and masking") {
    NetworkConfig cfg = tiny_cfg();
    NetworkState s = generate_topology(cfg);
    s.nodes[0].energy = 0.1;  // below the mean -> flag 0
    s.nodes[1].energy = 0.0;
    s.nodes[1].alive = false;
    const MilpWeights w{};
    const int n = cfg.n_nodes;
    const auto f = ch_features(s, kRadio, w, cfg.k_fraction);
    REQUIRE(static_cast<int>(f.size()) == 4 * n + 5);
    CHECK(f[0] == w.alpha);
    CHECK(f[1] == w.beta);
    CHECK(f[2] == w.gamma);
    CHECK(f[3] == doctest::Approx(s.total_energy()));
    // per-node energies, then flags
    CHECK(f[4] == doctest::Approx(0.1));
    CHECK(f[4 + 1] == 0.0);  // dead node
    const auto h = potential_heads(s);
    for (int i = 0; i < n; ++i) {
        const bool in_h = std::find(h.begin(), h.end(), i + 1) != h.end();
        const double flag = f[static_cast<size_t>(4 + n + i)];
        CHECK(flag == (in_h ? 1.0 : 0.0));
        const double tx = f[static_cast<size_t>(4 + 2 * n + i)];
        const double rx = f[static_cast<size_t>(4 + 3 * n + i)];
        if (!in_h) {
            // masked entries are exactly zero
            CHECK(tx == 0.0);
            CHECK(rx == 0.0);
        } else {
            CHECK(tx == doctest::Approx(ch_tx_energy(
                      kRadio, kRadio.b_data, s.dist_to_bs(s.node(i + 1)))));
            CHECK(rx > 0.0);
        }
    }
    // trailing expected CH count
    CHECK(f.back() == doctest::Approx(cfg.k_fraction * static_cast<double>(s.alive_count())));
}

TEST_CASE("assign_features layout and padding") {
    NetworkConfig cfg = tiny_cfg();
    NetworkState s = generate_topology(cfg);
    const int n = cfg.n_nodes;
    const int ch_max = 3;
    const std::vector<int> chs{2, 7};  // one empty slot to pad
    const auto f = assign_features(s, kRadio, MilpWeights{}, chs, ch_max);
    REQUIRE(static_cast<int>(f.size()) == n * ch_max + n + 2 * ch_max + 4);

    const size_t tx_sink0 = 4 + static_cast<size_t>(n);
    CHECK(f[tx_sink0] == doctest::Approx(ch_tx_energy(kRadio, kRadio.b_data, s.dist_to_bs(s.node(2)))));
    CHECK(f[tx_sink0 + 1] == doctest::Approx(ch_tx_energy(kRadio, kRadio.b_data, s.dist_to_bs(s.node(7)))));
    CHECK(f[tx_sink0 + 2] == 0.0);  // padded slot

    const size_t grid0 = tx_sink0 + static_cast<size_t>(ch_max);
    for (int i = 0; i < n; ++i) {
        const size_t row = grid0 + static_cast<size_t>(i * ch_max);
        const double d2 = i + 1 == 2 ? 0.0 : node_distance(s.node(i + 1), s.node(2));
        CHECK(f[row] == doctest::Approx(tx_energy(kRadio, kRadio.b_data, d2)));
        CHECK(f[row + 2] == 0.0);  // padded column
    }
    const size_t ids0 = grid0 + static_cast<size_t>(n * ch_max);
    CHECK(f[ids0] == doctest::Approx(2.0 / n));
    CHECK(f[ids0 + 1] == doctest::Approx(7.0 / n));
    CHECK(f[ids0 + 2] == 0.0);
}

TEST_CASE("build_dataset") {
    const SolutionDataset ds = tiny_dataset();
    REQUIRE(ds.n_nodes == 12);
    REQUIRE(ds.ch_max >= 1);
    REQUIRE_FALSE(ds.ch_rows.empty());
    REQUIRE(ds.ch_rows.size() == ds.assign_rows.size());

    SUBCASE("one row pair per simulated round until first death") {
        Scenario sc;
        sc.config = tiny_cfg();
        sc.weight_grid = {MilpWeights{}};
        sc.seeds = {1};
        const SolutionDataset one = build_dataset({sc}, kRadio, 1);

        NetworkConfig cfg = sc.config;
        cfg.seed = 1;
        MilpPeriodicProtocol proto(kRadio, MilpWeights{}, cfg.k_fraction, 1);
        const SimResult r = run_simulation(cfg, proto, kRadio, {StopMode::FirstDeath, 0});
        CHECK(static_cast<long>(one.ch_rows.size()) == r.fnd);
    }
    SUBCASE("duplicate seeds are deduplicated") {
        Scenario sc;
        sc.config = tiny_cfg();
        sc.weight_grid = {MilpWeights{}};
        sc.seeds = {1, 1};
        const SolutionDataset dup = build_dataset({sc}, kRadio, 1);
        sc.seeds = {1};
        const SolutionDataset single = build_dataset({sc}, kRadio, 1);
        CHECK(dup.ch_rows.size() == single.ch_rows.size());
    }
    SUBCASE("split is disjoint, complete, and roughly 80:20") {
        std::set<std::size_t> train(ds.train_idx.begin(), ds.train_idx.end());
        std::set<std::size_t> test(ds.test_idx.begin(), ds.test_idx.end());
        CHECK(train.size() == ds.train_idx.size());
        CHECK(test.size() == ds.test_idx.size());
        for (std::size_t i : test) CHECK(train.count(i) == 0);
        CHECK(train.size() + test.size() == ds.ch_rows.size());
        const double frac = static_cast<double>(train.size()) /
                            static_cast<double>(ds.ch_rows.size());
        CHECK(frac > 0.7);
        CHECK(frac < 0.9);
    }
    SUBCASE("labels are reproducible and solver-consistent") {
        const SolutionDataset again = tiny_dataset();
        REQUIRE(again.ch_rows.size() == ds.ch_rows.size());
        for (size_t i = 0; i < ds.ch_rows.size(); ++i) {
            CHECK(again.ch_rows[i].features == ds.ch_rows[i].features);
            CHECK(again.ch_rows[i].label == ds.ch_rows[i].label);
            CHECK(again.assign_rows[i].slot == ds.assign_rows[i].slot);
        }
        // every CH label bit count matches a plausible CH budget
        for (const ChSample& row : ds.ch_rows) {
            long bits = 0;
            for (double v : row.label) {
                CHECK((v == 0.0 || v == 1.0));
                bits += v == 1.0;
            }
            CHECK(bits >= 1);
            CHECK(bits <= ds.ch_max);
        }
        // slots reference real CH label positions
        for (size_t i = 0; i < ds.assign_rows.size(); ++i) {
            for (int slot : ds.assign_rows[i].slot) {
                CHECK(slot >= -1);
                CHECK(slot < ds.ch_max);
            }
        }
    }
}

TEST_CASE("training and inference on a memorizable dataset") {
    const SolutionDataset ds = tiny_dataset(3);

    nn::TrainConfig ch_cfg;
    ch_cfg.learning_rate = 1e-3;
    ch_cfg.batch_size = 16;
    ch_cfg.epochs = 150;
    ch_cfg.seed = 2;
    const Predictor ch_model = train_ch_predictor(ds, ch_cfg);

    nn::TrainConfig as_cfg = ch_cfg;
    const Predictor assign_model = train_assign_predictor(ds, as_cfg);

    SUBCASE("train accuracy is high after convergence") {
        CHECK(ch_accuracy(ch_model, ds, ds.train_idx) > 0.95);
        CHECK(assign_accuracy(assign_model, ds, ds.train_idx) > 0.7);
    }
    SUBCASE("predict_solution is always structurally feasible") {
        NetworkConfig cfg = tiny_cfg(31);  // topology unseen during training
        NetworkState s = generate_topology(cfg);
        for (int round = 0; round < 5; ++round) {
            const ClusteringSolution sol =
                predict_solution(ch_model, assign_model, s, kRadio, MilpWeights{}, cfg.k_fraction);
            const int k = requested_ch_count(cfg.k_fraction, s.alive_count());
            CHECK(static_cast<int>(sol.chs.size()) == std::min<int>(k, static_cast<int>(potential_heads(s).size())));
            CHECK(std::is_sorted(sol.chs.begin(), sol.chs.end()));
            const auto h = potential_heads(s);
            for (int ch : sol.chs)
                CHECK(std::find(h.begin(), h.end(), ch) != h.end());
            CHECK(sol.assignment.size() == static_cast<size_t>(s.alive_count()));
            for (const auto& [node, ch] : sol.assignment)
                CHECK(std::find(sol.chs.begin(), sol.chs.end(), ch) != sol.chs.end());
            for (int ch : sol.chs) CHECK(sol.assignment.at(ch) == ch);
            // the stored objective is the canonical recomputation
            CHECK(sol.objective == objective(s, kRadio, MilpWeights{}, sol));
            run_round_with_decision(s, sol, true, kRadio);
        }
    }
    SUBCASE("k=1 returns the single top-probability candidate") {
        // shrink the alive set so the CH budget drops to one while the
        // feature width (fixed by N) stays what the models were trained on
        NetworkConfig cfg = tiny_cfg();
        NetworkState s = generate_topology(cfg);
        for (size_t i = 2; i < s.nodes.size(); ++i) {
            s.nodes[i].energy = 0.0;
            s.nodes[i].alive = false;
        }
        const ClusteringSolution sol = predict_solution(
            ch_model, assign_model, s, kRadio, MilpWeights{}, cfg.k_fraction);
        CHECK(sol.chs.size() == 1);
        for (const auto& [node, ch] : sol.assignment) CHECK(ch == sol.chs[0]);
    }
    SUBCASE("predictor save/load round trip") {
        std::stringstream ss;
        ch_model.save(ss);
        const Predictor loaded = Predictor::load(ss);
        CHECK(loaded.feat_mean == ch_model.feat_mean);
        CHECK(loaded.feat_std == ch_model.feat_std);
        CHECK(ch_accuracy(loaded, ds, ds.test_idx) ==
              ch_accuracy(ch_model, ds, ds.test_idx));
    }
}
