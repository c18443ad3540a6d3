#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wsn/clustering_opt.hpp"
#include "wsn/net_model.hpp"
#include "wsn/nn.hpp"
#include "wsn/radio_energy.hpp"
#include "wsn/sim_engine.hpp"

namespace wsn::dqn {

// Flat observation, length 3N+3, all entries in [0,1]:
//   [ E_net/(N*E0) | E_i/E0 x N | CH one-hot x N | CH_tau/100 clipped |
//     assignment code x N ((slot+1)/CH_max, 0 for dead/unassigned) |
//     previous-action bit ]
using Observation = std::vector<double>;

enum class Action { Recluster, Keep };  // a1, a2

struct Transition {
    Observation state;
    Action action = Action::Keep;
    double reward = 0.0;
    Observation next_state;
    bool terminal = false;
};

class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}
    void push(Transition t);
    std::size_t size() const { return buffer_.size(); }
    // Uniform sample without replacement within the batch.
    std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const;

  private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<Transition> buffer_;
};

struct DqnConfig {
    double learning_rate = 1e-4;
    double discount = 0.90;
    double epsilon_start = 0.8;
    double epsilon_end = 0.05;
    // Linear decay over the first half of total_steps, then flat.
    long batch_size = 128;
    long target_update_interval = 100;
    long total_steps = 200000;
    std::size_t buffer_capacity = 50000;
    std::uint64_t seed = 1;
    std::vector<int> hidden_layers = {256, 256};
};

struct TrainLogEntry {
    long step = 0;
    long episode = 0;
    long round = 0;
    Action action = Action::Keep;
    double reward = 0.0;
    double loss = 0.0;  // NaN until the first update
    double epsilon = 0.0;
};

// Reward: 2.0 once any node has depleted, else 1.1 for a1 and 1.0 for a2.
double reward(const NetworkState& next, Action action);

Observation encode(const NetworkState& s, const NetworkConfig& cfg);

double epsilon_at(const DqnConfig& cfg, long step);

Action select_action(nn::Mlp& qnet, const Observation& obs, double epsilon, Rng& rng);

enum class ClusteringBackend { ExactMilp, Surrogate };

// Produces a clustering solution for an a1 action during training.
using SolutionProvider = std::function<ClusteringSolution(const NetworkState&)>;

struct TrainResult {
    nn::Mlp policy;
    std::vector<TrainLogEntry> log;
};

// Algorithm: episodes on a fixed topology with energies reset to E0; round 0
// forces a1; ε-greedy actions; one Q-update per step toward
// r + γ(1-terminal)·max target-Q; hard target copies at a fixed interval.
// Episodes terminate at the first node death.
TrainResult train(const NetworkConfig& env, const RadioParams& radio,
                  const MilpWeights& weights, const SolutionProvider& backend,
                  const DqnConfig& cfg);

struct EvalResult {
    SimResult sim;
    std::vector<Action> actions;  // one per round
};

// Greedy (ε = 0) rollout to all-dead; a1 rounds invoke the exact solver and
// pay control costs.
EvalResult evaluate(nn::Mlp& policy, const NetworkConfig& env, const RadioParams& radio,
                    const MilpWeights& weights);

// Protocol adapter so the generic simulator/CLI can drive a trained policy.
class RlcProtocol final : public Protocol {
  public:
    RlcProtocol(nn::Mlp policy, const NetworkConfig& env, const RadioParams& radio,
                MilpWeights weights);
    std::string_view name() const override { return "leach-rlc"; }
    bool centralized() const override { return true; }
    std::optional<ClusteringSolution> decide(const NetworkState& s) override;
    const std::vector<Action>& actions() const { return actions_; }

  private:
    nn::Mlp policy_;
    NetworkConfig env_;
    RadioParams radio_;
    MilpWeights weights_;
    std::optional<ClusteringSolution> last_;
    std::vector<Action> actions_;
};

}  // namespace wsn::dqn
