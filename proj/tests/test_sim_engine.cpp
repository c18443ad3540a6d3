#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wsn/sim_engine.hpp"

using namespace wsn;

namespace {
const RadioParams kRadio{};

NetworkState two_node_state(double e1 = 0.5, double e2 = 0.5) {
    NetworkState s;
    s.bs_x = 50;
    s.bs_y = 175;
    NodeState a;
    a.id = 1;
    a.x = 50;
    a.y = 125;  // 50 m from the BS
    a.energy = e1;
    a.alive = e1 > 0;
    NodeState b = a;
    b.id = 2;
    b.y = 95;  // 30 m from node 1
    b.energy = e2;
    b.alive = e2 > 0;
    s.nodes = {a, b};
    return s;
}

ClusteringSolution ch1_solution() {
    ClusteringSolution sol;
    sol.chs = {1};
    sol.assignment = {{1, 1}, {2, 1}};
    return sol;
}

// A protocol that replays a fixed decision on round 0 and abstains after.
class FixedProtocol final : public Protocol {
  public:
    FixedProtocol(std::optional<ClusteringSolution> sol, bool centralized)
        : sol_(std::move(sol)), centralized_(centralized) {}
    std::string_view name() const override { return "fixed"; }
    bool centralized() const override { return centralized_; }
    std::optional<ClusteringSolution> decide(const NetworkState& s) override {
        if (s.round == 0) return sol_;
        return std::nullopt;
    }

  private:
    std::optional<ClusteringSolution> sol_;
    bool centralized_;
};
}  // namespace

TEST_CASE("charge") {
    NodeState n;
    n.energy = 0.5;
    n.alive = true;
    CHECK(charge(n, 0.1) == doctest::Approx(0.1));
    CHECK(n.energy == doctest::Approx(0.4));
    CHECK(n.alive);
    CHECK(charge(n, 0.5) == doctest::Approx(0.4));  // residual-capped drain
    CHECK(n.energy == 0.0);
    CHECK_FALSE(n.alive);
    CHECK(charge(n, 0.1) == 0.0);  // dead nodes pay nothing
}

TEST_CASE("one CH + one member, both rich: 2 sent, 2 delivered") {
    NetworkState s = two_node_state();
    FixedProtocol proto(ch1_solution(), false);
    const RoundMetrics m = run_round(s, proto, kRadio);
    CHECK(m.data_sent == 2);
    CHECK(m.data_delivered == 2);
    CHECK(m.alive == 2);
    CHECK(m.ch_count == 1);
    CHECK(m.reclustered);
    CHECK(m.control_packets == 0);  // decentralized protocol

    // exact energy ledger: member tx at 30 m; CH rx one packet; CH uplink
    // of one aggregate (its own reading folded in) at 50 m
    const double member_tx = tx_energy(kRadio, kRadio.b_data, 30);
    const double ch_rx = rx_energy(kRadio, kRadio.b_data);
    const double ch_up = ch_tx_energy(kRadio, kRadio.b_data, 50);
    CHECK(s.node(2).energy == doctest::Approx(0.5 - member_tx).epsilon(1e-12));
    CHECK(s.node(1).energy == doctest::Approx(0.5 - ch_rx - ch_up).epsilon(1e-12));
    CHECK(m.energy_drained == doctest::Approx(member_tx + ch_rx + ch_up).epsilon(1e-12));
}

TEST_CASE("member depletion: packet sent but not delivered") {
    const double member_tx = tx_energy(kRadio, kRadio.b_data, 30);
    NetworkState s = two_node_state(0.5, member_tx / 2);  // below its tx cost
    FixedProtocol proto(ch1_solution(), false);
    const RoundMetrics m = run_round(s, proto, kRadio);
    CHECK_FALSE(s.node(2).alive);
    CHECK(s.node(2).energy == 0.0);
    CHECK(m.data_sent == 2);       // member + CH both attempted
    CHECK(m.data_delivered == 1);  // only the CH aggregate arrived
    CHECK(m.alive == 1);
}

TEST_CASE("CH death drops the member packet too") {
    // CH can afford its rx but not the BS uplink.
    const double ch_rx = rx_energy(kRadio, kRadio.b_data);
    NetworkState s = two_node_state(ch_rx + 1e-9, 0.5);
    FixedProtocol proto(ch1_solution(), false);
    const RoundMetrics m = run_round(s, proto, kRadio);
    CHECK_FALSE(s.node(1).alive);
    CHECK(m.data_sent == 2);
    CHECK(m.data_delivered == 0);  // neither packet reached the BS
}

TEST_CASE("empty election falls back to direct-to-BS") {
    NetworkState s = two_node_state();
    ClusteringSolution empty;  // no CHs this round
    FixedProtocol proto(empty, false);
    const RoundMetrics m = run_round(s, proto, kRadio);
    CHECK(m.ch_count == 0);
    CHECK(m.data_sent == 2);
    CHECK(m.data_delivered == 2);
    const double d1 = tx_energy(kRadio, kRadio.b_data, 50);
    const double d2 = tx_energy(kRadio, kRadio.b_data, 80);
    CHECK(s.node(1).energy == doctest::Approx(0.5 - d1).epsilon(1e-12));
    CHECK(s.node(2).energy == doctest::Approx(0.5 - d2).epsilon(1e-12));
}

TEST_CASE("centralized re-cluster charges control costs") {
    NetworkState s = two_node_state();
    FixedProtocol proto(ch1_solution(), true);
    const RoundMetrics m = run_round(s, proto, kRadio);
    CHECK(m.reclustered);
    CHECK(m.control_packets == 4);  // 2 * |alive|
    CHECK(s.rounds_since_recluster == 0);
    // conservation still holds with the control charges included
    const RoundMetrics m2 = run_round(s, proto, kRadio);
    CHECK_FALSE(m2.reclustered);
    CHECK(m2.control_packets == 0);
    CHECK(s.rounds_since_recluster == 1);
}

TEST_CASE("conservation and monotonicity over a full run") {
    NetworkConfig cfg;
    cfg.n_nodes = 30;
    cfg.seed = 13;
    LeachProtocol proto(0.05, 13);
    const SimResult r = run_simulation(cfg, proto, kRadio, {StopMode::AllDead, 0});
    REQUIRE_FALSE(r.per_round.empty());

    NetworkState fresh = generate_topology(cfg);
    double e_prev = fresh.total_energy();
    long alive_prev = cfg.n_nodes;
    double accumulated_err = 0.0;
    for (const RoundMetrics& m : r.per_round) {
        // E_net drop must equal the charges the engine says it applied
        accumulated_err += std::abs((e_prev - m.e_net) - m.energy_drained);
        CHECK(m.alive <= alive_prev);
        CHECK(m.data_delivered <= m.data_sent);
        if (!m.reclustered) CHECK(m.control_packets == 0);
        e_prev = m.e_net;
        alive_prev = m.alive;
    }
    CHECK(accumulated_err <= 1e-12);
    CHECK(r.fnd >= 1);
    CHECK(r.fnd <= r.hnd);
    CHECK(r.hnd <= r.lnd);
    CHECK(static_cast<long>(r.per_round.size()) == r.lnd);
    CHECK(r.pdr >= 0.0);
    CHECK(r.pdr <= 1.0);
    // LEACH pays zero control overhead by construction
    CHECK(r.total_control_packets == 0);
}

TEST_CASE("dead nodes never act again") {
    NetworkConfig cfg;
    cfg.n_nodes = 20;
    cfg.seed = 29;
    LeachProtocol proto(0.05, 29);
    NetworkState s = generate_topology(cfg);
    std::vector<long> death_round(static_cast<size_t>(cfg.n_nodes), 0);
    std::vector<double> death_energy(static_cast<size_t>(cfg.n_nodes), -1);
    for (long r = 1; r <= 3000 && s.alive_count() > 0; ++r) {
        run_round(s, proto, kRadio);
        for (const auto& n : s.nodes) {
            const size_t i = static_cast<size_t>(n.id - 1);
            if (!n.alive && death_round[i] == 0) {
                death_round[i] = r;
                death_energy[i] = n.energy;
            } else if (death_round[i] != 0) {
                // once dead: stays dead, energy frozen, never a CH
                CHECK_FALSE(n.alive);
                CHECK(n.energy == death_energy[i]);
                CHECK(n.role != NodeRole::ClusterHead);
            }
        }
    }
    CHECK(s.alive_count() == 0);
}

TEST_CASE("stop conditions") {
    NetworkConfig cfg;
    cfg.n_nodes = 20;
    cfg.seed = 31;
    SUBCASE("max-rounds(0) gives sentinels") {
        LeachProtocol proto(0.05, 31);
        const SimResult r = run_simulation(cfg, proto, kRadio, {StopMode::MaxRounds, 0});
        CHECK(r.per_round.empty());
        CHECK(r.fnd == 0);
        CHECK(r.hnd == 0);
        CHECK(r.lnd == 0);
    }
    SUBCASE("first-death stops at FND") {
        LeachProtocol proto(0.05, 31);
        const SimResult r = run_simulation(cfg, proto, kRadio, {StopMode::FirstDeath, 0});
        REQUIRE(r.fnd >= 1);
        CHECK(static_cast<long>(r.per_round.size()) == r.fnd);
        CHECK(r.per_round.back().alive < cfg.n_nodes);
        CHECK(r.per_round[r.per_round.size() - 2].alive == cfg.n_nodes);
    }
    SUBCASE("hnd is the first round at or below half") {
        LeachProtocol proto(0.05, 31);
        const SimResult r = run_simulation(cfg, proto, kRadio, {StopMode::AllDead, 0});
        const long half = (cfg.n_nodes + 1) / 2;
        long expect = 0;
        for (const auto& m : r.per_round) {
            if (m.alive <= half) {
                expect = m.round;
                break;
            }
        }
        CHECK(r.hnd == expect);
    }
}

TEST_CASE("identical seeds give identical results") {
    NetworkConfig cfg;
    cfg.n_nodes = 25;
    cfg.seed = 77;
    LeachProtocol p1(0.05, 77), p2(0.05, 77);
    const SimResult a = run_simulation(cfg, p1, kRadio, {StopMode::AllDead, 0});
    const SimResult b = run_simulation(cfg, p2, kRadio, {StopMode::AllDead, 0});
    REQUIRE(a.per_round.size() == b.per_round.size());
    CHECK(a.fnd == b.fnd);
    CHECK(a.hnd == b.hnd);
    CHECK(a.lnd == b.lnd);
    CHECK(a.pdr == b.pdr);
    for (size_t i = 0; i < a.per_round.size(); ++i) {
        CHECK(a.per_round[i].e_net == b.per_round[i].e_net);  // bit-identical
        CHECK(a.per_round[i].alive == b.per_round[i].alive);
        CHECK(a.per_round[i].data_delivered == b.per_round[i].data_delivered);
    }
    CHECK(a.ch_selection_count == b.ch_selection_count);
    CHECK(a.ch_count_histogram == b.ch_count_histogram);
}

TEST_CASE("ch selection counts add up") {
    NetworkConfig cfg;
    cfg.n_nodes = 20;
    cfg.seed = 5;
    LeachCProtocol proto(0.05, 5);
    const SimResult r = run_simulation(cfg, proto, kRadio, {StopMode::FirstDeath, 0});
    long from_nodes = 0;
    for (int c : r.ch_selection_count) from_nodes += c;
    long from_hist = 0;
    for (const auto& [count, rounds] : r.ch_count_histogram) from_hist += count * rounds;
    CHECK(from_nodes == from_hist);
}
