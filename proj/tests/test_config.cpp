#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "wsn/config.hpp"

using namespace wsn;
using namespace wsn::config;

TEST_CASE("empty input yields the reference defaults") {
    std::stringstream empty;
    const AppConfig cfg = parse_config(empty);
    CHECK(cfg.network.n_nodes == 100);
    CHECK(cfg.network.side_length == 100.0);
    CHECK(cfg.network.bs_x == 50.0);
    CHECK(cfg.network.bs_y == 175.0);
    CHECK(cfg.network.e0 == 0.5);
    CHECK(cfg.network.k_fraction == 0.05);
    CHECK(cfg.radio.e_elec == 50e-9);
    CHECK(cfg.radio.e_fs == 10e-12);
    CHECK(cfg.radio.e_amp == 0.0013e-12);
    CHECK(cfg.radio.e_da == 5e-9);
    CHECK(cfg.radio.b_data == 4000.0);
    CHECK(cfg.radio.b_ctrl == 1000.0);
    CHECK(cfg.weights.alpha == 54.83);
    CHECK(cfg.weights.beta == 14.54);
    CHECK(cfg.weights.gamma == 35.31);
    CHECK(cfg.dqn.learning_rate == 1e-4);
    CHECK(cfg.dqn.discount == 0.90);
    CHECK(cfg.dqn.epsilon_start == 0.8);
    CHECK(cfg.dqn.epsilon_end == 0.05);
    CHECK(cfg.dqn.batch_size == 128);
    CHECK(cfg.dqn.target_update_interval == 100);
    CHECK(cfg.dqn.buffer_capacity == 50000);
    CHECK(cfg.dqn.hidden_layers == std::vector<int>{256, 256});
    CHECK(cfg.surrogate.epochs == 200);
    CHECK(cfg.surrogate.batch_size == 16);
    CHECK(cfg.surrogate.ch_learning_rate == 1e-4);
    CHECK(cfg.paths.out_dir.empty());
}

TEST_CASE("parsing sections, comments, and values") {
    std::stringstream in(R"(# comment
[network]
nodes = 40          ; trailing comment
side = 80.5
seed = 42

[weights]
alpha = 1.25
beta = 0
gamma = 3

[dqn]
hidden_layers = 64, 32
total_steps = 500

[paths]
out_dir = /tmp/runs
)");
    const AppConfig cfg = parse_config(in);
    CHECK(cfg.network.n_nodes == 40);
    CHECK(cfg.network.side_length == 80.5);
    CHECK(cfg.network.seed == 42);
    CHECK(cfg.weights.alpha == 1.25);
    CHECK(cfg.weights.beta == 0.0);
    CHECK(cfg.weights.gamma == 3.0);
    CHECK(cfg.dqn.hidden_layers == std::vector<int>{64, 32});
    CHECK(cfg.dqn.total_steps == 500);
    CHECK(cfg.paths.out_dir == "/tmp/runs");
}

TEST_CASE("diagnostics carry line numbers") {
    SUBCASE("unknown section") {
        std::stringstream in("[network]\nnodes = 5\n[bogus]\nx = 1\n");
        try {
            parse_config(in);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("unknown key") {
        std::stringstream in("[radio]\nnot_a_key = 1\n");
        try {
            parse_config(in);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("malformed number") {
        std::stringstream in("[network]\nnodes = banana\n");
        CHECK_THROWS_AS(parse_config(in), ConfigError);
    }
    SUBCASE("key before any section") {
        std::stringstream in("nodes = 5\n");
        CHECK_THROWS_AS(parse_config(in), ConfigError);
    }
    SUBCASE("range validation") {
        std::stringstream in("[network]\nnodes = 1\n");
        CHECK_THROWS_AS(parse_config(in), ConfigError);
        std::stringstream in2("[network]\nk = 0\n");
        CHECK_THROWS_AS(parse_config(in2), ConfigError);
        std::stringstream in3("[dqn]\ndiscount = 1.5\n");
        CHECK_THROWS_AS(parse_config(in3), ConfigError);
    }
}

TEST_CASE("dump round-trips") {
    std::stringstream in(R"([network]
nodes = 37
e0 = 0.125
[weights]
alpha = 0.1
[surrogate]
epochs = 3
[paths]
policy = p.json
)");
    const AppConfig a = parse_config(in);
    std::stringstream dumped(dump_config(a));
    const AppConfig b = parse_config(dumped);
    CHECK(b.network.n_nodes == 37);
    CHECK(b.network.e0 == 0.125);
    CHECK(b.weights.alpha == 0.1);
    CHECK(b.surrogate.epochs == 3);
    CHECK(b.paths.policy == "p.json");
    CHECK(dump_config(b) == dump_config(a));
}

TEST_CASE("missing file raises ConfigError") {
    CHECK_THROWS_AS(load_config("/nonexistent/path/sim.ini"), ConfigError);
}
