#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wsn/linalg.hpp"
#include "wsn/rng.hpp"

namespace wsn::nn {

using linalg::Matrix;

enum class OutputActivation { Identity, Sigmoid, SoftmaxRows };
enum class Loss { Mse, Bce, Cce };
enum class Mode { Train, Eval };

struct MlpSpec {
    std::vector<int> layer_sizes;  // >= 2 entries
    OutputActivation output_activation = OutputActivation::Identity;
    int softmax_row_width = 0;     // chunk width for SoftmaxRows
    double dropout_rate = 0.0;     // per hidden layer, in [0,1)
};

struct TrainConfig {
    double learning_rate = 1e-4;
    int batch_size = 16;
    int epochs = 1;
    Loss loss = Loss::Mse;
    std::uint64_t seed = 1;
};

// Per-parameter gradients in the same shapes as the weights.
struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Matrix> biases;
};

// Minimal MLP: affine layers, ReLU hidden activations, inverted dropout
// (eval-mode forward is mask-free), Adam with bias-corrected moments.
// Weights are He-uniform initialized from the seed; with a fixed seed the
// entire weight trajectory is reproducible.
class Mlp {
  public:
    Mlp(MlpSpec spec, std::uint64_t seed);

    // Rows are samples. Train mode applies fresh dropout masks and caches
    // activations for a following backward pass.
    Matrix forward(const Matrix& input, Mode mode);

    // Loss and gradients for a batch, using the activations of an internal
    // train-mode forward pass. Does not update parameters.
    double loss_and_gradients(const Matrix& inputs, const Matrix& targets,
                              Loss loss, Gradients& out, bool use_dropout = true);

    // One Adam step; returns the pre-update mean batch loss.
    double train_step(const Matrix& inputs, const Matrix& targets, const TrainConfig& cfg);

    const MlpSpec& spec() const { return spec_; }
    std::size_t parameter_count() const;
    std::vector<Matrix>& weights() { return weights_; }
    std::vector<Matrix>& biases() { return biases_; }

    void save(std::ostream& out) const;
    static Mlp load(std::istream& in);

  private:
    MlpSpec spec_;
    std::vector<Matrix> weights_;  // [out, in] per layer
    std::vector<Matrix> biases_;   // [1, out]
    std::vector<Matrix> m_w_, v_w_, m_b_, v_b_;
    long adam_step_ = 0;
    Rng dropout_rng_;

    // forward-pass cache for backprop
    std::vector<Matrix> layer_inputs_;
    std::vector<Matrix> dropout_masks_;
    Matrix output_;

    Matrix forward_impl(const Matrix& input, bool training, bool use_dropout);
};

// Max relative error between analytic and central-finite-difference
// gradients (h = 1e-5), dropout disabled. Small nets only.
double grad_check(Mlp& net, const Matrix& input, const Matrix& target, Loss loss);

}  // namespace wsn::nn
