#include "wsn/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace wsn::config {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) fail(line, "trailing characters in number '" + v + "'");
        return d;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        fail(line, "expected a number, got '" + v + "'");
    }
}

long parse_long(const std::string& v, int line) {
    long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        fail(line, "expected an integer, got '" + v + "'");
    return out;
}

std::vector<int> parse_int_list(const std::string& v, int line) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(line, "empty entry in integer list");
        out.push_back(static_cast<int>(parse_long(item, line)));
    }
    if (out.empty()) fail(line, "expected a comma-separated integer list");
    return out;
}

using Setter = std::function<void(AppConfig&, const std::string&, int line)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"network.nodes", [](AppConfig& c, const std::string& v, int l) {
             c.network.n_nodes = static_cast<int>(parse_long(v, l)); }},
        {"network.side", [](AppConfig& c, const std::string& v, int l) {
             c.network.side_length = parse_double(v, l); }},
        {"network.bs_x", [](AppConfig& c, const std::string& v, int l) {
             c.network.bs_x = parse_double(v, l); }},
        {"network.bs_y", [](AppConfig& c, const std::string& v, int l) {
             c.network.bs_y = parse_double(v, l); }},
        {"network.e0", [](AppConfig& c, const std::string& v, int l) {
             c.network.e0 = parse_double(v, l); }},
        {"network.k", [](AppConfig& c, const std::string& v, int l) {
             c.network.k_fraction = parse_double(v, l); }},
        {"network.seed", [](AppConfig& c, const std::string& v, int l) {
             c.network.seed = static_cast<std::uint64_t>(parse_long(v, l)); }},

        {"radio.e_elec", [](AppConfig& c, const std::string& v, int l) {
             c.radio.e_elec = parse_double(v, l); }},
        {"radio.e_fs", [](AppConfig& c, const std::string& v, int l) {
             c.radio.e_fs = parse_double(v, l); }},
        {"radio.e_amp", [](AppConfig& c, const std::string& v, int l) {
             c.radio.e_amp = parse_double(v, l); }},
        {"radio.e_da", [](AppConfig& c, const std::string& v, int l) {
             c.radio.e_da = parse_double(v, l); }},
        {"radio.b_data", [](AppConfig& c, const std::string& v, int l) {
             c.radio.b_data = parse_long(v, l); }},
        {"radio.b_ctrl", [](AppConfig& c, const std::string& v, int l) {
             c.radio.b_ctrl = parse_long(v, l); }},

        {"weights.alpha", [](AppConfig& c, const std::string& v, int l) {
             c.weights.alpha = parse_double(v, l); }},
        {"weights.beta", [](AppConfig& c, const std::string& v, int l) {
             c.weights.beta = parse_double(v, l); }},
        {"weights.gamma", [](AppConfig& c, const std::string& v, int l) {
             c.weights.gamma = parse_double(v, l); }},

        {"dqn.learning_rate", [](AppConfig& c, const std::string& v, int l) {
             c.dqn.learning_rate = parse_double(v, l); }},
        {"dqn.discount", [](AppConfig& c, const std::string& v, int l) {
             c.dqn.discount = parse_double(v, l); }},
        {"dqn.epsilon_start", [](AppConfig& c, const std::string& v, int l) {
             c.dqn.epsilon_start = parse_double(v, l); }},
        {"dqn.epsilon_end", [](AppConfig& c, const std::string& v, int l) {
             c.dqn.epsilon_end = parse_double(v, l); }},
        {"dqn.batch_size", [](AppConfig& c, const std::string& v, int l) {
             c.dqn.batch_size = parse_long(v, l); }},
        {"dqn.target_update_interval", [](AppConfig& c, const std::string& v, int l) {
             c.dqn.target_update_interval = parse_long(v, l); }},
        {"dqn.total_steps", [](AppConfig& c, const std::string& v, int l) {
             c.dqn.total_steps = parse_long(v, l); }},
        {"dqn.buffer_capacity", [](AppConfig& c, const std::string& v, int l) {
             c.dqn.buffer_capacity = static_cast<std::size_t>(parse_long(v, l)); }},
        {"dqn.seed", [](AppConfig& c, const std::string& v, int l) {
             c.dqn.seed = static_cast<std::uint64_t>(parse_long(v, l)); }},
        {"dqn.hidden_layers", [](AppConfig& c, const std::string& v, int l) {
             c.dqn.hidden_layers = parse_int_list(v, l); }},

        {"surrogate.epochs", [](AppConfig& c, const std::string& v, int l) {
             c.surrogate.epochs = static_cast<int>(parse_long(v, l)); }},
        {"surrogate.batch_size", [](AppConfig& c, const std::string& v, int l) {
             c.surrogate.batch_size = static_cast<int>(parse_long(v, l)); }},
        {"surrogate.ch_learning_rate", [](AppConfig& c, const std::string& v, int l) {
             c.surrogate.ch_learning_rate = parse_double(v, l); }},
        {"surrogate.assign_learning_rate", [](AppConfig& c, const std::string& v, int l) {
             c.surrogate.assign_learning_rate = parse_double(v, l); }},
        {"surrogate.dataset_seeds", [](AppConfig& c, const std::string& v, int l) {
             c.surrogate.dataset_seeds = static_cast<int>(parse_long(v, l)); }},
        {"surrogate.seed", [](AppConfig& c, const std::string& v, int l) {
             c.surrogate.seed = static_cast<std::uint64_t>(parse_long(v, l)); }},

        {"paths.out_dir", [](AppConfig& c, const std::string& v, int) {
             c.paths.out_dir = v; }},
        {"paths.policy", [](AppConfig& c, const std::string& v, int) {
             c.paths.policy = v; }},
        {"paths.ch_model", [](AppConfig& c, const std::string& v, int) {
             c.paths.ch_model = v; }},
        {"paths.assign_model", [](AppConfig& c, const std::string& v, int) {
             c.paths.assign_model = v; }},
    };
    return table;
}

const char* const kSections[] = {"network", "radio", "weights", "dqn", "surrogate", "paths"};

}  // namespace

AppConfig parse_config(std::istream& in) {
    AppConfig cfg;
    std::string section;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find_first_of("#;");
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            bool known = false;
            for (const char* k : kSections) known = known || section == k;
            if (!known) fail(line, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value'");
        if (section.empty()) fail(line, "key outside of any [section]");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        const auto it = setters().find(section + "." + key);
        if (it == setters().end()) fail(line, "unknown key '" + key + "' in [" + section + "]");
        it->second(cfg, value, line);
    }
    if (!cfg.network.valid())
        throw ConfigError("line 0: [network] values out of range (nodes >= 1, side > 0, "
                          "e0 > 0, 0 < k <= 1)");
    if (cfg.radio.e_elec < 0 || cfg.radio.e_fs <= 0 || cfg.radio.e_amp <= 0 ||
        cfg.radio.b_data <= 0 || cfg.radio.b_ctrl <= 0)
        throw ConfigError("line 0: [radio] values out of range");
    if (cfg.weights.alpha < 0 || cfg.weights.beta < 0 || cfg.weights.gamma < 0)
        throw ConfigError("line 0: [weights] must be non-negative");
    if (cfg.dqn.discount < 0 || cfg.dqn.discount >= 1 || cfg.dqn.learning_rate <= 0 ||
        cfg.dqn.batch_size < 1 || cfg.dqn.epsilon_start < 0 || cfg.dqn.epsilon_start > 1 ||
        cfg.dqn.epsilon_end < 0 || cfg.dqn.epsilon_end > 1)
        throw ConfigError("line 0: [dqn] values out of range (0 <= discount < 1, "
                          "learning_rate > 0, batch_size >= 1, epsilon in [0,1])");
    if (cfg.surrogate.epochs < 1 || cfg.surrogate.batch_size < 1 ||
        cfg.surrogate.ch_learning_rate <= 0 || cfg.surrogate.assign_learning_rate <= 0 ||
        cfg.surrogate.dataset_seeds < 1)
        throw ConfigError("line 0: [surrogate] values out of range");
    return cfg;
}

AppConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    return parse_config(f);
}

std::string dump_config(const AppConfig& c) {
    std::ostringstream o;
    o.precision(17);
    o << "[network]\n"
      << "nodes = " << c.network.n_nodes << "\nside = " << c.network.side_length
      << "\nbs_x = " << c.network.bs_x << "\nbs_y = " << c.network.bs_y
      << "\ne0 = " << c.network.e0 << "\nk = " << c.network.k_fraction
      << "\nseed = " << c.network.seed << "\n\n[radio]\n"
      << "e_elec = " << c.radio.e_elec << "\ne_fs = " << c.radio.e_fs
      << "\ne_amp = " << c.radio.e_amp << "\ne_da = " << c.radio.e_da
      << "\nb_data = " << c.radio.b_data << "\nb_ctrl = " << c.radio.b_ctrl
      << "\n\n[weights]\n"
      << "alpha = " << c.weights.alpha << "\nbeta = " << c.weights.beta
      << "\ngamma = " << c.weights.gamma << "\n\n[dqn]\n"
      << "learning_rate = " << c.dqn.learning_rate << "\ndiscount = " << c.dqn.discount
      << "\nepsilon_start = " << c.dqn.epsilon_start
      << "\nepsilon_end = " << c.dqn.epsilon_end << "\nbatch_size = " << c.dqn.batch_size
      << "\ntarget_update_interval = " << c.dqn.target_update_interval
      << "\ntotal_steps = " << c.dqn.total_steps
      << "\nbuffer_capacity = " << c.dqn.buffer_capacity << "\nseed = " << c.dqn.seed
      << "\nhidden_layers = ";
    for (std::size_t i = 0; i < c.dqn.hidden_layers.size(); ++i)
        o << (i ? "," : "") << c.dqn.hidden_layers[i];
    o << "\n\n[surrogate]\n"
      << "epochs = " << c.surrogate.epochs << "\nbatch_size = " << c.surrogate.batch_size
      << "\nch_learning_rate = " << c.surrogate.ch_learning_rate
      << "\nassign_learning_rate = " << c.surrogate.assign_learning_rate
      << "\ndataset_seeds = " << c.surrogate.dataset_seeds
      << "\nseed = " << c.surrogate.seed << "\n\n[paths]\n";
    if (!c.paths.out_dir.empty()) o << "out_dir = " << c.paths.out_dir << '\n';
    if (!c.paths.policy.empty()) o << "policy = " << c.paths.policy << '\n';
    if (!c.paths.ch_model.empty()) o << "ch_model = " << c.paths.ch_model << '\n';
    if (!c.paths.assign_model.empty()) o << "assign_model = " << c.paths.assign_model << '\n';
    return o.str();
}

}  // namespace wsn::config
