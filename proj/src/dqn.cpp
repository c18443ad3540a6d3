#include "wsn/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace wsn::dqn {

void ReplayBuffer::push(Transition t) {
    if (buffer_.size() < capacity_) {
        buffer_.push_back(std::move(t));
    } else {
        buffer_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
    if (batch > buffer_.size())
        throw std::invalid_argument("ReplayBuffer::sample: batch exceeds buffer size");
    // Floyd's algorithm: uniform without replacement, O(batch).
    std::unordered_set<std::size_t> picked;
    std::vector<const Transition*> out;
    out.reserve(batch);
    for (std::size_t j = buffer_.size() - batch; j < buffer_.size(); ++j) {
        std::size_t t = rng.below(j + 1);
        if (picked.count(t)) t = j;
        picked.insert(t);
        out.push_back(&buffer_[t]);
    }
    return out;
}

double reward(const NetworkState& next, Action action) {
    const bool any_depleted = std::any_of(next.nodes.begin(), next.nodes.end(),
                                          [](const NodeState& n) { return !n.alive; });
    if (any_depleted) return 2.0;
    return action == Action::Recluster ? 1.1 : 1.0;
}

Observation encode(const NetworkState& s, const NetworkConfig& cfg) {
    const int n = cfg.n_nodes;
    const int ch_max = requested_ch_count(cfg.k_fraction, n);
    Observation obs;
    obs.reserve(static_cast<size_t>(3 * n + 3));

    obs.push_back(s.total_energy() / (static_cast<double>(n) * cfg.e0));
    for (const auto& node : s.nodes) obs.push_back(node.alive ? node.energy / cfg.e0 : 0.0);
    for (const auto& node : s.nodes)
        obs.push_back(node.alive && node.role == NodeRole::ClusterHead ? 1.0 : 0.0);
    obs.push_back(std::min(1.0, static_cast<double>(s.rounds_since_recluster) / 100.0));

    std::vector<int> ch_ids;
    for (const auto& node : s.nodes)
        if (node.alive && node.role == NodeRole::ClusterHead) ch_ids.push_back(node.id);
    for (const auto& node : s.nodes) {
        double code = 0.0;
        if (node.alive && node.cluster_head_id) {
            const auto it = std::lower_bound(ch_ids.begin(), ch_ids.end(), *node.cluster_head_id);
            if (it != ch_ids.end() && *it == *node.cluster_head_id) {
                const auto slot = static_cast<double>(it - ch_ids.begin());
                code = (slot + 1.0) / static_cast<double>(ch_max);
            }
        }
        obs.push_back(code);
    }
    obs.push_back(s.last_action == AgentAction::Recluster ? 1.0 : 0.0);
    return obs;
}

double epsilon_at(const DqnConfig& cfg, long step) {
    const long decay_steps = cfg.total_steps / 2;
    if (decay_steps <= 0 || step >= decay_steps) return cfg.epsilon_end;
    const double frac = static_cast<double>(step) / static_cast<double>(decay_steps);
    return cfg.epsilon_start + frac * (cfg.epsilon_end - cfg.epsilon_start);
}

Action select_action(nn::Mlp& qnet, const Observation& obs, double epsilon, Rng& rng) {
    if (rng.uniform() < epsilon) return rng.below(2) == 0 ? Action::Recluster : Action::Keep;
    nn::Matrix x(1, obs.size());
    std::copy(obs.begin(), obs.end(), x.data.begin());
    const nn::Matrix q = qnet.forward(x, nn::Mode::Eval);
    // Ties break toward a2, the cheaper action.
    return q.data[0] > q.data[1] ? Action::Recluster : Action::Keep;
}

namespace {

NetworkState reset_episode(const NetworkState& topology, double e0) {
    NetworkState s = topology;
    s.round = 0;
    s.rounds_since_recluster = 0;
    s.last_action = AgentAction::None;
    for (auto& n : s.nodes) {
        n.energy = e0;
        n.alive = true;
        n.role = NodeRole::DirectToBs;
        n.cluster_head_id.reset();
        n.ch_selection_count = 0;
    }
    return s;
}

nn::MlpSpec qnet_spec(const DqnConfig& cfg, int obs_dim) {
    nn::MlpSpec spec;
    spec.layer_sizes.push_back(obs_dim);
    for (const int h : cfg.hidden_layers) spec.layer_sizes.push_back(h);
    spec.layer_sizes.push_back(2);
    spec.output_activation = nn::OutputActivation::Identity;
    return spec;
}

}  // namespace

TrainResult train(const NetworkConfig& env, const RadioParams& radio,
                  const MilpWeights& weights, const SolutionProvider& backend,
                  const DqnConfig& cfg) {
    (void)weights;  // weights live inside the backend; kept for symmetry
    const NetworkState topology = generate_topology(env);
    const int obs_dim = 3 * env.n_nodes + 3;

    nn::Mlp qnet(qnet_spec(cfg, obs_dim), cfg.seed);
    nn::Mlp target = qnet;
    ReplayBuffer buffer(cfg.buffer_capacity);
    Rng action_rng(cfg.seed, "dqn-action");
    Rng sample_rng(cfg.seed, "dqn-sample");

    nn::TrainConfig update_cfg;
    update_cfg.learning_rate = cfg.learning_rate;
    update_cfg.loss = nn::Loss::Mse;

    TrainResult result{std::move(qnet), {}};
    nn::Mlp& net = result.policy;
    if (cfg.total_steps > 0) result.log.reserve(static_cast<size_t>(cfg.total_steps));

    long step = 0;
    long episode = 0;
    while (step < cfg.total_steps) {
        ++episode;
        NetworkState s = reset_episode(topology, env.e0);
        bool first_round = true;
        bool terminal = false;
        while (!terminal && step < cfg.total_steps) {
            const Observation obs = encode(s, env);
            const double eps = epsilon_at(cfg, step);
            const Action a = first_round ? Action::Recluster
                                         : select_action(net, obs, eps, action_rng);
            first_round = false;

            if (a == Action::Recluster) {
                run_round_with_decision(s, backend(s), /*centralized=*/true, radio);
            } else {
                run_round_with_decision(s, std::nullopt, /*centralized=*/true, radio);
            }
            const double r = reward(s, a);
            terminal = s.alive_count() < env.n_nodes;  // first death ends the episode
            Transition t{obs, a, r, encode(s, env), terminal};
            buffer.push(std::move(t));

            double loss = std::numeric_limits<double>::quiet_NaN();
            if (buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
                const auto batch = buffer.sample(static_cast<std::size_t>(cfg.batch_size), sample_rng);
                const std::size_t b = batch.size();
                nn::Matrix states(b, static_cast<std::size_t>(obs_dim));
                nn::Matrix next_states(b, static_cast<std::size_t>(obs_dim));
                for (std::size_t i = 0; i < b; ++i) {
                    std::copy(batch[i]->state.begin(), batch[i]->state.end(), states.row(i));
                    std::copy(batch[i]->next_state.begin(), batch[i]->next_state.end(),
                              next_states.row(i));
                }
                const nn::Matrix next_q = target.forward(next_states, nn::Mode::Eval);
                nn::Matrix targets = net.forward(states, nn::Mode::Eval);
                for (std::size_t i = 0; i < b; ++i) {
                    const double max_next = std::max(next_q(i, 0), next_q(i, 1));
                    const double y = batch[i]->reward +
                                     (batch[i]->terminal ? 0.0 : cfg.discount * max_next);
                    targets(i, batch[i]->action == Action::Recluster ? 0 : 1) = y;
                }
                // Off-action targets equal the prediction, so only the taken
                // action receives gradient.
                loss = net.train_step(states, targets, update_cfg);
            }

            ++step;
            if (step % cfg.target_update_interval == 0) target = net;
            result.log.push_back({step, episode, s.round, a, r, loss, eps});
        }
    }
    return result;
}

RlcProtocol::RlcProtocol(nn::Mlp policy, const NetworkConfig& env, const RadioParams& radio,
                         MilpWeights weights)
    : policy_(std::move(policy)), env_(env), radio_(radio), weights_(weights) {}

std::optional<ClusteringSolution> RlcProtocol::decide(const NetworkState& s) {
    Action a = Action::Recluster;  // the first round always clusters
    if (last_.has_value()) {
        const Observation obs = encode(s, env_);
        Rng unused_rng;  // greedy: epsilon 0 never draws
        a = select_action(policy_, obs, 0.0, unused_rng);
    }
    actions_.push_back(a);
    if (a == Action::Keep) return std::nullopt;
    const int k = requested_ch_count(env_.k_fraction, s.alive_count());
    last_ = solve_exact(s, radio_, weights_, k, last_ ? &*last_ : nullptr);
    return last_;
}

EvalResult evaluate(nn::Mlp& policy, const NetworkConfig& env, const RadioParams& radio,
                    const MilpWeights& weights) {
    RlcProtocol protocol(policy, env, radio, weights);
    EvalResult res;
    res.sim = run_simulation(env, protocol, radio, {StopMode::AllDead, 0});
    res.actions = protocol.actions();
    return res;
}

}  // namespace wsn::dqn
