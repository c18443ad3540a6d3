#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "wsn/net_model.hpp"

using namespace wsn;

namespace {
NetworkState make_nodes(const std::vector<double>& energies) {
    NetworkState s;
    for (size_t i = 0; i < energies.size(); ++i) {
        NodeState n;
        n.id = static_cast<int>(i) + 1;
        n.x = static_cast<double>(i);
        n.y = 0.0;
        n.energy = energies[i];
        n.alive = energies[i] > 0;
        s.nodes.push_back(n);
    }
    return s;
}
}  // namespace

TEST_CASE("generate_topology determinism and bounds") {
    NetworkConfig cfg;
    const NetworkState a = generate_topology(cfg);
    const NetworkState b = generate_topology(cfg);
    REQUIRE(a.nodes.size() == 100);
    for (size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(a.nodes[i].x == b.nodes[i].x);
        CHECK(a.nodes[i].y == b.nodes[i].y);
        CHECK(a.nodes[i].x >= 0.0);
        CHECK(a.nodes[i].x <= 100.0);
        CHECK(a.nodes[i].y >= 0.0);
        CHECK(a.nodes[i].y <= 100.0);
        CHECK(a.nodes[i].id == static_cast<int>(i) + 1);
        CHECK(a.nodes[i].alive);
    }
    CHECK(a.total_energy() == doctest::Approx(50.0).epsilon(1e-15));

    NetworkConfig other = cfg;
    other.seed = 2;
    const NetworkState c = generate_topology(other);
    CHECK(c.nodes[0].x != a.nodes[0].x);

    NetworkConfig bad;
    bad.n_nodes = 1;
    CHECK_THROWS_AS(generate_topology(bad), std::invalid_argument);
}

TEST_CASE("potential_heads") {
    SUBCASE("equal energies -> everyone") {
        NetworkState s = make_nodes({0.5, 0.5, 0.5});
        CHECK(potential_heads(s) == std::vector<int>{1, 2, 3});
    }
    SUBCASE("strictly above-mean filter") {
        NetworkState s = make_nodes({0.4, 0.6});
        CHECK(potential_heads(s) == std::vector<int>{2});
    }
    SUBCASE("matches an independent mean-then-filter oracle") {
        std::vector<double> e;
        for (int i = 1; i <= 10; ++i) e.push_back(0.1 * i);
        NetworkState s = make_nodes(e);
        double mean = 0.0;
        for (double v : e) mean += v;
        mean /= static_cast<double>(e.size());
        std::vector<int> expect;
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] >= mean) expect.push_back(static_cast<int>(i) + 1);
        CHECK(potential_heads(s) == expect);
    }
    SUBCASE("dead nodes excluded from set and mean") {
        NetworkState s = make_nodes({0.0, 0.2, 0.2});
        CHECK(potential_heads(s) == std::vector<int>{2, 3});
    }
    SUBCASE("never empty while anyone lives") {
        NetworkState s = make_nodes({0.0, 1e-9, 0.9});
        const auto h = potential_heads(s);
        CHECK_FALSE(h.empty());
        CHECK(std::find(h.begin(), h.end(), 3) != h.end());
    }
    SUBCASE("equal energies whose mean rounds above the maximum") {
        // 20 x 0.1 J sums to slightly more than 2.0 in binary floating
        // point, so the naive mean exceeds every node's energy; the set
        // must still be non-empty.
        NetworkState s = make_nodes(std::vector<double>(20, 0.1));
        CHECK_FALSE(potential_heads(s).empty());
    }
    SUBCASE("all dead -> empty") {
        NetworkState s = make_nodes({0.0, 0.0});
        CHECK(potential_heads(s).empty());
    }
}

TEST_CASE("network_stats") {
    SUBCASE("prev == s gives zero dissipation") {
        NetworkState s = make_nodes(std::vector<double>(100, 0.5));
        const NetworkStats st = network_stats(s, s);
        CHECK(st.e_bar_dissipated == 0.0);
        CHECK(st.e_net == doctest::Approx(50.0));
        CHECK(st.e_bar == doctest::Approx(0.5));
        CHECK(st.alive_count == 100);
    }
    SUBCASE("one node drops 0.01 J among 100") {
        NetworkState prev = make_nodes(std::vector<double>(100, 0.5));
        NetworkState s = prev;
        s.nodes[7].energy -= 0.01;
        const NetworkStats st = network_stats(s, prev);
        CHECK(st.e_bar_dissipated == doctest::Approx(1e-4).epsilon(1e-12));
    }
    SUBCASE("dead nodes contribute zero to e_net, excluded from e_bar") {
        NetworkState s = make_nodes({0.0, 0.3, 0.5});
        const NetworkStats st = network_stats(s, s);
        CHECK(st.e_net == doctest::Approx(0.8));
        CHECK(st.e_bar == doctest::Approx(0.4));
        CHECK(st.alive_count == 2);
    }
    SUBCASE("mismatched node sets rejected") {
        NetworkState a = make_nodes({0.5, 0.5});
        NetworkState b = make_nodes({0.5, 0.5, 0.5});
        CHECK_THROWS_AS(network_stats(a, b), std::invalid_argument);
        NetworkState c = a;
        c.nodes[0].id = 9;
        CHECK_THROWS_AS(network_stats(a, c), std::invalid_argument);
    }
}

TEST_CASE("topology csv round trip") {
    NetworkConfig cfg;
    cfg.n_nodes = 10;
    cfg.k_fraction = 0.2;
    cfg.seed = 7;
    const NetworkState s = generate_topology(cfg);
    std::stringstream ss;
    dump_topology_csv(s, ss);
    const std::string text = ss.str();
    CHECK(text.rfind("id,x,y\n", 0) == 0);

    std::stringstream in(text);
    const NetworkState t = load_topology_csv(in, cfg);
    REQUIRE(t.nodes.size() == s.nodes.size());
    for (size_t i = 0; i < s.nodes.size(); ++i) {
        CHECK(t.nodes[i].id == s.nodes[i].id);
        // 6-decimal fixed point on the wire
        CHECK(std::abs(t.nodes[i].x - s.nodes[i].x) <= 5e-7);
        CHECK(std::abs(t.nodes[i].y - s.nodes[i].y) <= 5e-7);
        CHECK(t.nodes[i].energy == cfg.e0);
        CHECK(t.nodes[i].alive);
    }

    std::stringstream bad("nope\n1,2,3\n");
    CHECK_THROWS(load_topology_csv(bad, cfg));
}
