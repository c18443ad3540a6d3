// wsnsim: simulate / compare / sweep / train-agent / train-surrogate / solve /
// schema-check. Exit codes: 0 ok, 2 config error, 3 missing dependency
// artifact. WSNSIM_OUT_DIR overrides the output directory.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wsn/config.hpp"
#include "wsn/dqn.hpp"
#include "wsn/report.hpp"
#include "wsn/sim_engine.hpp"
#include "wsn/surrogate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wsn;

namespace {

struct ConfigExit {
    int code;
    std::string message;
};

config::AppConfig load_or_die(const std::string& path) {
    try {
        return config::load_config(path);
    } catch (const config::ConfigError& e) {
        throw ConfigExit{2, std::string("config error in ") + path + ": " + e.what()};
    }
}

fs::path resolve_out_dir(const std::string& flag, const config::AppConfig& cfg) {
    if (const char* env = std::getenv("WSNSIM_OUT_DIR"); env && *env) return env;
    if (!flag.empty()) return flag;
    if (!cfg.paths.out_dir.empty()) return cfg.paths.out_dir;
    return ".";
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigExit{2, "cannot write " + p.string()};
    f << content;
}

nn::Mlp load_policy(const config::AppConfig& cfg) {
    if (cfg.paths.policy.empty())
        throw ConfigExit{3, "leach-rlc needs a trained policy: set [paths] policy and run "
                            "'wsnsim train-agent <config>' first"};
    std::ifstream f(cfg.paths.policy);
    if (!f)
        throw ConfigExit{3, "policy checkpoint not found at '" + cfg.paths.policy +
                            "'; run 'wsnsim train-agent <config>' first"};
    return nn::Mlp::load(f);
}

std::unique_ptr<Protocol> make_protocol(const std::string& name,
                                        const config::AppConfig& cfg) {
    if (name == "leach")
        return std::make_unique<LeachProtocol>(cfg.network.k_fraction, cfg.network.seed);
    if (name == "leach-c")
        return std::make_unique<LeachCProtocol>(cfg.network.k_fraction, cfg.network.seed);
    if (name == "leach-rlc")
        return std::make_unique<dqn::RlcProtocol>(load_policy(cfg), cfg.network, cfg.radio,
                                                  cfg.weights);
    throw ConfigExit{2, "unknown protocol '" + name + "'"};
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void emit_run_artifacts(const fs::path& dir, const std::string& protocol,
                        const config::AppConfig& cfg, const SimResult& res,
                        const std::string& suffix = "") {
    fs::create_directories(dir);
    {
        std::ostringstream csv;
        report::write_rounds_csv(csv, res);
        write_file(dir / ("rounds" + suffix + ".csv"), csv.str());
    }
    {
        std::ostringstream js;
        report::write_summary_json(js, protocol, cfg.network.seed, res);
        write_file(dir / ("summary" + suffix + ".json"), js.str());
    }
    report::Series alive{protocol, "#1f77b4", {}, {}};
    report::Series energy{protocol, "#d62728", {}, {}};
    for (const auto& r : res.per_round) {
        alive.x.push_back(static_cast<double>(r.round));
        alive.y.push_back(static_cast<double>(r.alive));
        energy.x.push_back(static_cast<double>(r.round));
        energy.y.push_back(r.e_net);
    }
    write_file(dir / ("alive_vs_rounds" + suffix + ".svg"),
               report::render_line_chart("Alive nodes per round", "round", "alive nodes",
                                         {alive}));
    write_file(dir / ("remaining_energy" + suffix + ".svg"),
               report::render_line_chart("Residual network energy", "round", "energy [J]",
                                         {energy}));
}

int cmd_simulate(const std::string& config_path, const std::string& protocol,
                 std::int64_t seed_override, const std::string& out_flag) {
    config::AppConfig cfg = load_or_die(config_path);
    if (seed_override >= 0) cfg.network.seed = static_cast<std::uint64_t>(seed_override);
    auto proto = make_protocol(protocol, cfg);
    const SimResult res =
        run_simulation(cfg.network, *proto, cfg.radio, {StopMode::AllDead, 0});
    emit_run_artifacts(resolve_out_dir(out_flag, cfg), protocol, cfg, res);
    std::cout << protocol << ": fnd=" << res.fnd << " hnd=" << res.hnd << " lnd=" << res.lnd
              << " pdr=" << res.pdr << " control=" << res.total_control_packets << '\n';
    return 0;
}

std::string selection_grid_csv(const SimResult& res) {
    // CH-selection counts folded into a square node grid (row-major by id).
    const std::size_t n = res.ch_selection_count.size();
    std::size_t side = 1;
    while (side * side < n) ++side;
    std::ostringstream o;
    for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < side; ++c) {
            const std::size_t i = r * side + c;
            o << (c ? "," : "") << (i < n ? res.ch_selection_count[i] : 0);
        }
        o << '\n';
    }
    return o.str();
}

int cmd_compare(const std::string& config_path, std::vector<std::int64_t> seeds,
                const std::string& out_flag) {
    config::AppConfig cfg = load_or_die(config_path);
    if (seeds.empty())
        for (std::int64_t s = 1; s <= 10; ++s) seeds.push_back(s);
    const fs::path dir = resolve_out_dir(out_flag, cfg);
    fs::create_directories(dir);

    const std::vector<std::string> protocols = {"leach", "leach-c", "leach-rlc"};
    json rep;
    rep["seeds"] = seeds;
    std::vector<report::Series> median_curves;
    const std::vector<std::string> colors = {"#1f77b4", "#2ca02c", "#d62728"};

    std::ostringstream control_csv;
    control_csv << "seed,leach,leach-c,leach-rlc\n";
    std::vector<std::vector<long>> control(seeds.size(), std::vector<long>(3, 0));

    for (std::size_t pi = 0; pi < protocols.size(); ++pi) {
        const std::string& pname = protocols[pi];
        std::vector<double> fnd, hnd, pdr;
        std::map<long, long> hist;
        std::vector<long> alive_sum;  // per-round totals for a median-ish curve
        SimResult last;
        for (std::size_t si = 0; si < seeds.size(); ++si) {
            config::AppConfig run_cfg = cfg;
            run_cfg.network.seed = static_cast<std::uint64_t>(seeds[si]);
            auto proto = make_protocol(pname, run_cfg);
            const SimResult res =
                run_simulation(run_cfg.network, *proto, run_cfg.radio, {StopMode::AllDead, 0});
            fnd.push_back(static_cast<double>(res.fnd));
            hnd.push_back(static_cast<double>(res.hnd));
            pdr.push_back(res.pdr);
            for (const auto& [k, v] : res.ch_count_histogram) hist[k] += v;
            control[si][pi] = res.total_control_packets;
            if (res.per_round.size() > alive_sum.size())
                alive_sum.resize(res.per_round.size(), 0);
            for (std::size_t r = 0; r < res.per_round.size(); ++r)
                alive_sum[r] += res.per_round[r].alive;
            last = res;
        }
        json& p = rep[pname];
        p["median_fnd"] = median(fnd);
        p["median_hnd"] = median(hnd);
        p["median_pdr"] = median(pdr);
        long ctl_total = 0;
        for (const auto& row : control) ctl_total += row[pi];
        p["control_packets_total"] = ctl_total;
        json hist_j = json::object();
        for (const auto& [k, v] : hist) hist_j[std::to_string(k)] = v;
        p["ch_count_histogram"] = hist_j;

        std::ostringstream hist_csv;
        hist_csv << "ch_count,rounds\n";
        for (const auto& [k, v] : hist) hist_csv << k << ',' << v << '\n';
        write_file(dir / ("ch_count_histogram_" + pname + ".csv"), hist_csv.str());
        write_file(dir / ("ch_selection_grid_" + pname + ".csv"), selection_grid_csv(last));

        report::Series s{pname, colors[pi], {}, {}};
        for (std::size_t r = 0; r < alive_sum.size(); ++r) {
            s.x.push_back(static_cast<double>(r + 1));
            s.y.push_back(static_cast<double>(alive_sum[r]) /
                          static_cast<double>(seeds.size()));
        }
        median_curves.push_back(std::move(s));
    }
    for (std::size_t si = 0; si < seeds.size(); ++si)
        control_csv << seeds[si] << ',' << control[si][0] << ',' << control[si][1] << ','
                    << control[si][2] << '\n';
    write_file(dir / "control_overhead.csv", control_csv.str());
    write_file(dir / "alive_vs_rounds_compare.svg",
               report::render_line_chart("Mean alive nodes per round", "round", "alive nodes",
                                         median_curves));
    write_file(dir / "compare_report.json", rep.dump(2) + "\n");
    std::cout << rep.dump(2) << '\n';
    return 0;
}

struct GridSpec {
    double lo = 0, hi = 100;
    int count = 5;
};

GridSpec parse_grid_spec(const std::string& s) {
    GridSpec g;
    if (s.empty()) return g;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> g.lo >> c1 >> g.hi >> c2 >> g.count) || c1 != ':' || c2 != ':' ||
        g.count < 2 || g.hi <= g.lo || !(in >> std::ws).eof())
        throw ConfigExit{2, "bad --grid-spec '" + s + "', expected lo:hi:count"};
    return g;
}

int cmd_sweep(const std::string& config_path, const std::string& grid_spec,
              const std::string& metric, const std::string& out_flag) {
    config::AppConfig cfg = load_or_die(config_path);
    if (metric != "fnd") throw ConfigExit{2, "unsupported --metric '" + metric + "'"};
    const GridSpec g = parse_grid_spec(grid_spec);
    const fs::path dir = resolve_out_dir(out_flag, cfg);
    fs::create_directories(dir);

    std::vector<double> axis(static_cast<std::size_t>(g.count));
    for (int i = 0; i < g.count; ++i)
        axis[static_cast<std::size_t>(i)] = g.lo + (g.hi - g.lo) * i / (g.count - 1);

    const auto n = static_cast<std::size_t>(g.count);
    std::vector<double> fnd(n * n * n, 0.0);
    std::ostringstream full;
    full << "alpha,beta,gamma,fnd\n";
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                MilpWeights w{axis[a], axis[b], axis[c]};
                MilpPeriodicProtocol proto(cfg.radio, w, cfg.network.k_fraction);
                const SimResult res = run_simulation(cfg.network, proto, cfg.radio,
                                                     {StopMode::FirstDeath, 0});
                fnd[(a * n + b) * n + c] = static_cast<double>(res.fnd);
                full << axis[a] << ',' << axis[b] << ',' << axis[c] << ',' << res.fnd << '\n';
            }
    write_file(dir / "sweep_fnd.csv", full.str());

    // 2-D projections: mean FND over the dropped axis.
    const auto project = [&](int keep1, int keep2) {
        std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c) {
                    const std::size_t idx[3] = {a, b, c};
                    m[idx[static_cast<std::size_t>(keep1)]]
                     [idx[static_cast<std::size_t>(keep2)]] +=
                        fnd[(a * n + b) * n + c] / static_cast<double>(n);
                }
        return m;
    };
    const char* names[3] = {"alpha", "beta", "gamma"};
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    std::vector<std::string> labels;
    for (const double v : axis) {
        std::ostringstream l;
        l << v;
        labels.push_back(l.str());
    }
    for (const auto& pr : pairs) {
        const auto m = project(pr[0], pr[1]);
        std::ostringstream csv;
        csv << names[pr[0]] << "\\" << names[pr[1]];
        for (const double v : axis) csv << ',' << v;
        csv << '\n';
        for (std::size_t r = 0; r < n; ++r) {
            csv << axis[r];
            for (std::size_t c = 0; c < n; ++c) csv << ',' << m[r][c];
            csv << '\n';
        }
        const std::string base = std::string("sweep_") + names[pr[0]] + "_" + names[pr[1]];
        write_file(dir / (base + ".csv"), csv.str());
        write_file(dir / (base + ".svg"),
                   report::render_color_grid(std::string("mean FND, ") + names[pr[0]] +
                                                 " vs " + names[pr[1]],
                                             m, labels, labels));
    }
    std::cout << "sweep complete: " << n * n * n << " grid points\n";
    return 0;
}

int cmd_train_agent(const std::string& config_path, const std::string& out_flag) {
    config::AppConfig cfg = load_or_die(config_path);
    const fs::path dir = resolve_out_dir(out_flag, cfg);
    fs::create_directories(dir);

    dqn::SolutionProvider backend;
    if (!cfg.paths.ch_model.empty() && !cfg.paths.assign_model.empty()) {
        std::ifstream chf(cfg.paths.ch_model), asf(cfg.paths.assign_model);
        if (!chf || !asf)
            throw ConfigExit{3, "surrogate checkpoints not found; run "
                                "'wsnsim train-surrogate <config>' or clear [paths]"};
        auto chm = std::make_shared<surrogate::Predictor>(surrogate::Predictor::load(chf));
        auto asmod = std::make_shared<surrogate::Predictor>(surrogate::Predictor::load(asf));
        backend = [chm, asmod, cfg](const NetworkState& s) {
            return surrogate::predict_solution(*chm, *asmod, s, cfg.radio, cfg.weights,
                                               cfg.network.k_fraction);
        };
        std::cout << "backend: surrogate predictors\n";
    } else {
        backend = [cfg](const NetworkState& s) {
            return solve_exact(s, cfg.radio, cfg.weights,
                               requested_ch_count(cfg.network.k_fraction, s.alive_count()));
        };
        std::cout << "backend: exact solver\n";
    }

    dqn::TrainResult result =
        dqn::train(cfg.network, cfg.radio, cfg.weights, backend, cfg.dqn);
    {
        std::ofstream f(cfg.paths.policy.empty() ? (dir / "policy.json").string()
                                                 : cfg.paths.policy);
        result.policy.save(f);
    }
    std::ostringstream log;
    log << "step,episode,round,action,reward,loss,epsilon\n";
    log.precision(10);
    for (const auto& e : result.log)
        log << e.step << ',' << e.episode << ',' << e.round << ','
            << (e.action == dqn::Action::Recluster ? "a1" : "a2") << ',' << e.reward << ','
            << e.loss << ',' << e.epsilon << '\n';
    write_file(dir / "train_log.csv", log.str());
    std::cout << "trained " << cfg.dqn.total_steps << " steps over "
              << (result.log.empty() ? 0 : result.log.back().episode + 1) << " episodes\n";
    return 0;
}

int cmd_train_surrogate(const std::string& config_path, const std::string& out_flag) {
    config::AppConfig cfg = load_or_die(config_path);
    const fs::path dir = resolve_out_dir(out_flag, cfg);
    fs::create_directories(dir);

    surrogate::Scenario sc;
    sc.config = cfg.network;
    sc.weight_grid = {cfg.weights};
    for (int s = 1; s <= cfg.surrogate.dataset_seeds; ++s)
        sc.seeds.push_back(static_cast<std::uint64_t>(s));
    const surrogate::SolutionDataset ds =
        surrogate::build_dataset({sc}, cfg.radio, cfg.surrogate.seed);
    surrogate::export_dataset(ds, (dir / "dataset").string());
    std::cout << "dataset: " << ds.ch_rows.size() << " rows (" << ds.train_idx.size()
              << " train / " << ds.test_idx.size() << " test)\n";

    nn::TrainConfig tc;
    tc.epochs = cfg.surrogate.epochs;
    tc.batch_size = cfg.surrogate.batch_size;
    tc.seed = cfg.surrogate.seed;

    tc.learning_rate = cfg.surrogate.ch_learning_rate;
    const surrogate::Predictor chm = surrogate::train_ch_predictor(ds, tc);
    tc.learning_rate = cfg.surrogate.assign_learning_rate;
    const surrogate::Predictor asmod = surrogate::train_assign_predictor(ds, tc);

    const double ch_acc = surrogate::ch_accuracy(chm, ds, ds.test_idx);
    const double as_acc = surrogate::assign_accuracy(asmod, ds, ds.test_idx);
    {
        std::ofstream f(cfg.paths.ch_model.empty() ? (dir / "ch_model.json").string()
                                                   : cfg.paths.ch_model);
        chm.save(f);
    }
    {
        std::ofstream f(cfg.paths.assign_model.empty() ? (dir / "assign_model.json").string()
                                                       : cfg.paths.assign_model);
        asmod.save(f);
    }
    json acc = {{"ch_accuracy", ch_acc}, {"assign_accuracy", as_acc},
                {"rows", ds.ch_rows.size()}};
    write_file(dir / "surrogate_accuracy.json", acc.dump(2) + "\n");
    std::cout << acc.dump(2) << '\n';
    return 0;
}

// State file: CSV "id,x,y,energy_j"; BS position and radio come from flags
// with Table-2 defaults.
int cmd_solve(const std::string& state_path, double alpha, double beta, double gamma,
              int k, double bs_x, double bs_y) {
    std::ifstream f(state_path);
    if (!f) throw ConfigExit{3, "cannot open state file: " + state_path};
    NetworkState s;
    s.bs_x = bs_x;
    s.bs_y = bs_y;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line == "id,x,y,energy_j") continue;
        NodeState node;
        char c = 0;
        std::istringstream in(line);
        if (!(in >> node.id >> c >> node.x >> c >> node.y >> c >> node.energy))
            throw ConfigExit{2, "state file line " + std::to_string(lineno) + ": bad row"};
        node.alive = node.energy > 0;
        s.nodes.push_back(node);
    }
    if (s.nodes.empty()) throw ConfigExit{2, "state file has no nodes"};

    RadioParams radio;
    const ClusteringSolution sol = solve_exact(s, radio, {alpha, beta, gamma}, k);
    json j;
    j["chs"] = sol.chs;
    json assign = json::object();
    for (const auto& [node, ch] : sol.assignment) assign[std::to_string(node)] = ch;
    j["assignment"] = assign;
    j["objective"] = sol.objective;
    j["k_clamped"] = sol.k_clamped;
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_schema_check(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigExit{2, "cannot open " + path};
    const std::string diag = report::check_rounds_csv(f);
    if (!diag.empty()) {
        std::cerr << path << ": " << diag << '\n';
        return 2;
    }
    std::cout << path << ": ok\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"WSN clustering workbench"};
    app.require_subcommand(1);

    std::string config_path, protocol = "leach", out_dir, grid_spec, metric = "fnd";
    std::string state_path, check_path;
    std::int64_t seed_override = -1;
    std::vector<std::int64_t> seeds;
    double alpha = 54.83, beta = 14.54, gamma = 35.31, bs_x = 50.0, bs_y = 175.0;
    int k = 5;

    auto* sim = app.add_subcommand("simulate", "run one protocol to network death");
    sim->add_option("config", config_path)->required();
    sim->add_option("--protocol", protocol)->check(CLI::IsMember({"leach", "leach-c", "leach-rlc"}));
    sim->add_option("--seed", seed_override);
    sim->add_option("--out-dir", out_dir);

    auto* cmp = app.add_subcommand("compare", "run all three protocols across seeds");
    cmp->add_option("config", config_path)->required();
    cmp->add_option("--seeds", seeds);
    cmp->add_option("--out-dir", out_dir);

    auto* swp = app.add_subcommand("sweep", "objective-weight grid sweep");
    swp->add_option("config", config_path)->required();
    swp->add_option("--grid-spec", grid_spec);
    swp->add_option("--metric", metric);
    swp->add_option("--out-dir", out_dir);

    auto* ta = app.add_subcommand("train-agent", "train the re-clustering policy");
    ta->add_option("config", config_path)->required();
    ta->add_option("--out-dir", out_dir);

    auto* ts = app.add_subcommand("train-surrogate", "label a dataset and fit predictors");
    ts->add_option("config", config_path)->required();
    ts->add_option("--out-dir", out_dir);

    auto* sv = app.add_subcommand("solve", "exact clustering for a state file");
    sv->add_option("state", state_path)->required();
    sv->add_option("--alpha", alpha);
    sv->add_option("--beta", beta);
    sv->add_option("--gamma", gamma);
    sv->add_option("--k", k);
    sv->add_option("--bs-x", bs_x);
    sv->add_option("--bs-y", bs_y);

    auto* sc = app.add_subcommand("schema-check", "validate an emitted rounds.csv");
    sc->add_option("file", check_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, protocol, seed_override, out_dir);
        if (cmp->parsed()) return cmd_compare(config_path, seeds, out_dir);
        if (swp->parsed()) return cmd_sweep(config_path, grid_spec, metric, out_dir);
        if (ta->parsed()) return cmd_train_agent(config_path, out_dir);
        if (ts->parsed()) return cmd_train_surrogate(config_path, out_dir);
        if (sv->parsed()) return cmd_solve(state_path, alpha, beta, gamma, k, bs_x, bs_y);
        if (sc->parsed()) return cmd_schema_check(check_path);
    } catch (const ConfigExit& e) {
        std::cerr << "error: " << e.message << '\n';
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
