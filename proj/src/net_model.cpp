#include "wsn/net_model.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wsn {

long NetworkState::alive_count() const {
    return std::count_if(nodes.begin(), nodes.end(),
                         [](const NodeState& n) { return n.alive; });
}

double NetworkState::total_energy() const {
    double sum = 0.0;
    for (const auto& n : nodes)
        if (n.alive) sum += n.energy;
    return sum;
}

double NetworkState::mean_alive_energy() const {
    double sum = 0.0;
    long count = 0;
    for (const auto& n : nodes) {
        if (n.alive) {
            sum += n.energy;
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

NetworkState generate_topology(const NetworkConfig& cfg) {
    if (!cfg.valid()) throw std::invalid_argument("generate_topology: invalid NetworkConfig");
    Rng rng(cfg.seed, "topology");
    NetworkState s;
    s.bs_x = cfg.bs_x;
    s.bs_y = cfg.bs_y;
    s.nodes.resize(static_cast<size_t>(cfg.n_nodes));
    for (int i = 0; i < cfg.n_nodes; ++i) {
        NodeState& n = s.nodes[static_cast<size_t>(i)];
        n.id = i + 1;
        n.x = rng.uniform(0.0, cfg.side_length);
        n.y = rng.uniform(0.0, cfg.side_length);
        n.energy = cfg.e0;
        n.alive = true;
        n.role = NodeRole::DirectToBs;
    }
    return s;
}

std::vector<int> potential_heads(const NetworkState& s) {
    const double e_bar = s.mean_alive_energy();
    std::vector<int> heads;
    for (const auto& n : s.nodes)
        if (n.alive && n.energy >= e_bar) heads.push_back(n.id);
    if (!heads.empty()) return heads;
    // The summed mean can round a hair above the true maximum when all
    // energies are equal; fall back to the max-energy nodes so the set is
    // never empty while anyone lives.
    double best = 0.0;
    for (const auto& n : s.nodes)
        if (n.alive && n.energy > best) best = n.energy;
    for (const auto& n : s.nodes)
        if (n.alive && n.energy == best) heads.push_back(n.id);
    return heads;
}

NetworkStats network_stats(const NetworkState& s, const NetworkState& prev) {
    if (s.nodes.size() != prev.nodes.size())
        throw std::invalid_argument("network_stats: mismatched node sets");
    NetworkStats st;
    double dissipated = 0.0;
    for (size_t i = 0; i < s.nodes.size(); ++i) {
        if (s.nodes[i].id != prev.nodes[i].id)
            throw std::invalid_argument("network_stats: mismatched node ids");
        dissipated += prev.nodes[i].energy - s.nodes[i].energy;
    }
    st.e_net = s.total_energy();
    st.alive_count = s.alive_count();
    st.e_bar = st.alive_count == 0 ? 0.0 : st.e_net / static_cast<double>(st.alive_count);
    // Ebar_d averages over |N|, dead nodes included with zero drop.
    st.e_bar_dissipated = dissipated / static_cast<double>(s.nodes.size());
    return st;
}

void dump_topology_csv(const NetworkState& s, std::ostream& out) {
    out << "id,x,y\n";
    out << std::fixed << std::setprecision(6);
    for (const auto& n : s.nodes) out << n.id << ',' << n.x << ',' << n.y << '\n';
}

NetworkState load_topology_csv(std::istream& in, const NetworkConfig& cfg) {
    NetworkState s;
    s.bs_x = cfg.bs_x;
    s.bs_y = cfg.bs_y;
    std::string line;
    if (!std::getline(in, line) || line.rfind("id,x,y", 0) != 0)
        throw std::runtime_error("topology csv: missing id,x,y header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        NodeState n;
        char comma = 0;
        if (!(row >> n.id >> comma >> n.x >> comma >> n.y))
            throw std::runtime_error("topology csv: malformed row: " + line);
        n.energy = cfg.e0;
        n.alive = true;
        s.nodes.push_back(n);
    }
    std::sort(s.nodes.begin(), s.nodes.end(),
              [](const NodeState& a, const NodeState& b) { return a.id < b.id; });
    for (size_t i = 0; i < s.nodes.size(); ++i) {
        if (s.nodes[i].id != static_cast<int>(i) + 1)
            throw std::runtime_error("topology csv: node ids must be 1..N without gaps");
    }
    return s;
}

}  // namespace wsn
