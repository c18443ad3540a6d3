#include "wsn/nn.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace wsn::nn {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr double kProbEps = 1e-12;

void add_bias_rows(Matrix& z, const Matrix& b) {
    for (std::size_t r = 0; r < z.rows; ++r) {
        double* zr = z.row(r);
        for (std::size_t c = 0; c < z.cols; ++c) zr[c] += b.data[c];
    }
}

void softmax_rows_inplace(Matrix& z, int width) {
    if (width <= 0 || z.cols % static_cast<std::size_t>(width) != 0)
        throw std::invalid_argument("softmax rows: output width not divisible by row width");
    for (std::size_t r = 0; r < z.rows; ++r) {
        double* zr = z.row(r);
        for (std::size_t c0 = 0; c0 < z.cols; c0 += static_cast<std::size_t>(width)) {
            double mx = zr[c0];
            for (int j = 1; j < width; ++j) mx = std::max(mx, zr[c0 + static_cast<std::size_t>(j)]);
            double sum = 0.0;
            for (int j = 0; j < width; ++j) {
                double& v = zr[c0 + static_cast<std::size_t>(j)];
                v = std::exp(v - mx);
                sum += v;
            }
            for (int j = 0; j < width; ++j) zr[c0 + static_cast<std::size_t>(j)] /= sum;
        }
    }
}

}  // namespace

Mlp::Mlp(MlpSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), dropout_rng_(seed, "mlp-dropout") {
    if (spec_.layer_sizes.size() < 2)
        throw std::invalid_argument("MlpSpec: need at least input and output layer");
    if (spec_.dropout_rate < 0.0 || spec_.dropout_rate >= 1.0)
        throw std::invalid_argument("MlpSpec: dropout must be in [0,1)");
    Rng init_rng(seed, "mlp-init");
    const std::size_t n_layers = spec_.layer_sizes.size() - 1;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const auto fan_in = static_cast<std::size_t>(spec_.layer_sizes[l]);
        const auto fan_out = static_cast<std::size_t>(spec_.layer_sizes[l + 1]);
        Matrix w(fan_out, fan_in);
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
        for (auto& v : w.data) v = init_rng.uniform(-limit, limit);
        weights_.push_back(std::move(w));
        biases_.emplace_back(1, fan_out);
        m_w_.emplace_back(fan_out, fan_in);
        v_w_.emplace_back(fan_out, fan_in);
        m_b_.emplace_back(1, fan_out);
        v_b_.emplace_back(1, fan_out);
    }
}

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
}

Matrix Mlp::forward_impl(const Matrix& input, bool training, bool use_dropout) {
    if (input.cols != static_cast<std::size_t>(spec_.layer_sizes.front()))
        throw std::invalid_argument("forward: input width does not match first layer");
    layer_inputs_.clear();
    dropout_masks_.clear();

    Matrix x = input;
    const std::size_t n_layers = weights_.size();
    for (std::size_t l = 0; l < n_layers; ++l) {
        if (training) layer_inputs_.push_back(x);
        Matrix z;
        linalg::matmul_nt(x, weights_[l], z);
        add_bias_rows(z, biases_[l]);
        const bool is_output = l + 1 == n_layers;
        if (!is_output) {
            for (auto& v : z.data) v = v > 0.0 ? v : 0.0;  // ReLU
            if (training && use_dropout && spec_.dropout_rate > 0.0) {
                Matrix mask(z.rows, z.cols);
                const double keep = 1.0 - spec_.dropout_rate;
                for (auto& mv : mask.data) mv = dropout_rng_.uniform() < keep ? 1.0 / keep : 0.0;
                for (std::size_t i = 0; i < z.size(); ++i) z.data[i] *= mask.data[i];
                dropout_masks_.push_back(std::move(mask));
            } else if (training) {
                dropout_masks_.emplace_back();  // placeholder, no mask
            }
        } else {
            switch (spec_.output_activation) {
                case OutputActivation::Identity:
                    break;
                case OutputActivation::Sigmoid:
                    for (auto& v : z.data) v = 1.0 / (1.0 + std::exp(-v));
                    break;
                case OutputActivation::SoftmaxRows:
                    softmax_rows_inplace(z, spec_.softmax_row_width);
                    break;
            }
        }
        x = std::move(z);
    }
    if (training) output_ = x;
    return x;
}

Matrix Mlp::forward(const Matrix& input, Mode mode) {
    return forward_impl(input, mode == Mode::Train, true);
}

double Mlp::loss_and_gradients(const Matrix& inputs, const Matrix& targets,
                               Loss loss, Gradients& out, bool use_dropout) {
    const Matrix pred = forward_impl(inputs, true, use_dropout);
    if (pred.rows != targets.rows || pred.cols != targets.cols)
        throw std::invalid_argument("loss: prediction/target shape mismatch");
    const double batch = static_cast<double>(pred.rows);

    // Loss value and the gradient at the output layer. Sigmoid+BCE and
    // softmax+CCE fold the activation derivative into (p - y).
    double total_loss = 0.0;
    Matrix delta(pred.rows, pred.cols);
    switch (loss) {
        case Loss::Mse: {
            if (spec_.output_activation != OutputActivation::Identity)
                throw std::invalid_argument("MSE expects an identity output head");
            for (std::size_t i = 0; i < pred.size(); ++i) {
                const double e = pred.data[i] - targets.data[i];
                total_loss += e * e;
                delta.data[i] = 2.0 * e / batch;
            }
            break;
        }
        case Loss::Bce: {
            if (spec_.output_activation != OutputActivation::Sigmoid)
                throw std::invalid_argument("BCE expects a sigmoid output head");
            for (std::size_t i = 0; i < pred.size(); ++i) {
                const double p = std::clamp(pred.data[i], kProbEps, 1.0 - kProbEps);
                const double y = targets.data[i];
                total_loss -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
                delta.data[i] = (pred.data[i] - y) / batch;
            }
            break;
        }
        case Loss::Cce: {
            if (spec_.output_activation != OutputActivation::SoftmaxRows)
                throw std::invalid_argument("CCE expects a softmax-rows output head");
            const auto width = static_cast<std::size_t>(spec_.softmax_row_width);
            for (std::size_t r = 0; r < pred.rows; ++r) {
                for (std::size_t c0 = 0; c0 < pred.cols; c0 += width) {
                    // All-zero target chunks are masked out (no label).
                    double chunk_mass = 0.0;
                    for (std::size_t j = 0; j < width; ++j) chunk_mass += targets(r, c0 + j);
                    if (chunk_mass == 0.0) continue;
                    for (std::size_t j = 0; j < width; ++j) {
                        const double y = targets(r, c0 + j);
                        const double p = std::clamp(pred(r, c0 + j), kProbEps, 1.0);
                        if (y != 0.0) total_loss -= y * std::log(p);
                        delta(r, c0 + j) = (pred(r, c0 + j) - y) / batch;
                    }
                }
            }
            break;
        }
    }
    total_loss /= batch;
    if (!std::isfinite(total_loss))
        throw std::runtime_error("loss is not finite (diverged or bad inputs)");

    // Backward pass.
    out.weights.assign(weights_.size(), Matrix());
    out.biases.assign(weights_.size(), Matrix());
    Matrix d = std::move(delta);
    for (std::size_t li = weights_.size(); li-- > 0;) {
        linalg::matmul_tn(d, layer_inputs_[li], out.weights[li]);
        Matrix db(1, d.cols);
        for (std::size_t r = 0; r < d.rows; ++r)
            for (std::size_t c = 0; c < d.cols; ++c) db.data[c] += d(r, c);
        out.biases[li] = std::move(db);
        if (li == 0) break;
        Matrix dx;
        linalg::matmul(d, weights_[li], dx);
        // Through dropout and ReLU of the previous hidden layer.
        const Matrix& mask = dropout_masks_[li - 1];
        const Matrix& pre = layer_inputs_[li];  // post-activation values fed into layer li
        for (std::size_t i = 0; i < dx.size(); ++i) {
            if (mask.size() != 0) dx.data[i] *= mask.data[i];
            if (pre.data[i] <= 0.0) dx.data[i] = 0.0;  // ReLU gate
        }
        d = std::move(dx);
    }
    return total_loss;
}

double Mlp::train_step(const Matrix& inputs, const Matrix& targets, const TrainConfig& cfg) {
    Gradients g;
    const double loss = loss_and_gradients(inputs, targets, cfg.loss, g);
    ++adam_step_;
    const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(adam_step_));
    const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(adam_step_));
    auto update = [&](Matrix& param, Matrix& m, Matrix& v, const Matrix& grad) {
        for (std::size_t i = 0; i < param.size(); ++i) {
            m.data[i] = kAdamBeta1 * m.data[i] + (1.0 - kAdamBeta1) * grad.data[i];
            v.data[i] = kAdamBeta2 * v.data[i] + (1.0 - kAdamBeta2) * grad.data[i] * grad.data[i];
            const double mhat = m.data[i] / bc1;
            const double vhat = v.data[i] / bc2;
            param.data[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + kAdamEps);
        }
    };
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        update(weights_[l], m_w_[l], v_w_[l], g.weights[l]);
        update(biases_[l], m_b_[l], v_b_[l], g.biases[l]);
    }
    return loss;
}

void Mlp::save(std::ostream& out) const {
    nlohmann::json j;
    j["format"] = "wsn-mlp";
    j["version"] = 1;
    j["layer_sizes"] = spec_.layer_sizes;
    j["output_activation"] = static_cast<int>(spec_.output_activation);
    j["softmax_row_width"] = spec_.softmax_row_width;
    j["dropout_rate"] = spec_.dropout_rate;
    nlohmann::json jw = nlohmann::json::array();
    nlohmann::json jb = nlohmann::json::array();
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        jw.push_back(weights_[l].data);
        jb.push_back(biases_[l].data);
    }
    j["weights"] = std::move(jw);
    j["biases"] = std::move(jb);
    out << j.dump();
}

Mlp Mlp::load(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.value("format", "") != "wsn-mlp" || j.value("version", 0) != 1)
        throw std::runtime_error("mlp load: unrecognized checkpoint format");
    MlpSpec spec;
    spec.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    spec.output_activation = static_cast<OutputActivation>(j.at("output_activation").get<int>());
    spec.softmax_row_width = j.at("softmax_row_width").get<int>();
    spec.dropout_rate = j.at("dropout_rate").get<double>();
    Mlp net(spec, 0);
    const auto& jw = j.at("weights");
    const auto& jb = j.at("biases");
    for (std::size_t l = 0; l < net.weights_.size(); ++l) {
        net.weights_[l].data = jw.at(l).get<std::vector<double>>();
        net.biases_[l].data = jb.at(l).get<std::vector<double>>();
        if (net.weights_[l].data.size() != net.weights_[l].rows * net.weights_[l].cols)
            throw std::runtime_error("mlp load: weight size mismatch");
    }
    return net;
}

double grad_check(Mlp& net, const Matrix& input, const Matrix& target, Loss loss) {
    if (net.parameter_count() > 1000)
        throw std::invalid_argument("grad_check: net too large");
    Gradients analytic;
    net.loss_and_gradients(input, target, loss, analytic, /*use_dropout=*/false);

    const double h = 1e-5;
    double max_rel = 0.0;
    auto probe = [&](Matrix& param, const Matrix& grad) {
        Gradients scratch;
        for (std::size_t i = 0; i < param.size(); ++i) {
            const double orig = param.data[i];
            param.data[i] = orig + h;
            const double lp = net.loss_and_gradients(input, target, loss, scratch, false);
            param.data[i] = orig - h;
            const double lm = net.loss_and_gradients(input, target, loss, scratch, false);
            param.data[i] = orig;
            const double numeric = (lp - lm) / (2.0 * h);
            const double denom = std::max({std::abs(numeric), std::abs(grad.data[i]), 1e-8});
            max_rel = std::max(max_rel, std::abs(numeric - grad.data[i]) / denom);
        }
    };
    for (std::size_t l = 0; l < net.weights().size(); ++l) {
        probe(net.weights()[l], analytic.weights[l]);
        probe(net.biases()[l], analytic.biases[l]);
    }
    return max_rel;
}

}  // namespace wsn::nn
