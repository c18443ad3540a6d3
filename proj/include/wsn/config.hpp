#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "wsn/clustering_opt.hpp"
#include "wsn/dqn.hpp"
#include "wsn/net_model.hpp"
#include "wsn/nn.hpp"
#include "wsn/radio_energy.hpp"

namespace wsn::config {

// Thrown with a "line N: ..." message on any parse or validation failure.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SurrogateConfig {
    int epochs = 200;
    int batch_size = 16;
    double ch_learning_rate = 1e-4;
    double assign_learning_rate = 1e-4;
    int dataset_seeds = 12;      // how many topology seeds label the dataset
    std::uint64_t seed = 1;      // init/shuffle/split seed
};

struct PathsConfig {
    std::string out_dir;         // empty = caller decides
    std::string policy;          // trained agent checkpoint
    std::string ch_model;
    std::string assign_model;
};

// Flat INI-style file: [section] headers, key = value lines, '#' or ';'
// comments. Unknown sections or keys are errors. Every field has a default,
// so an empty file is a complete configuration.
struct AppConfig {
    NetworkConfig network;       // [network] nodes, side, bs_x, bs_y, e0, k, seed
    RadioParams radio;           // [radio] e_elec, e_fs, e_amp, e_da, b_data, b_ctrl
    MilpWeights weights;         // [weights] alpha, beta, gamma
    dqn::DqnConfig dqn;          // [dqn] ...
    SurrogateConfig surrogate;   // [surrogate] ...
    PathsConfig paths;           // [paths] ...
};

AppConfig parse_config(std::istream& in);
AppConfig load_config(const std::string& path);  // missing file -> ConfigError

std::string dump_config(const AppConfig& cfg);   // round-trips through parse_config

}  // namespace wsn::config
