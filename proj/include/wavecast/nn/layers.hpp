#pragma once

#include <optional>
#include <random>
#include <vector>

#include "wavecast/nn/tensor.hpp"

namespace wavecast::nn {

struct Conv1d {
    Tensor kernel;  // [k, Cin, Cout]
    Tensor bias;    // [Cout]
    int dilation = 1;
};

Conv1d make_conv1d(std::size_t k, std::size_t cin, std::size_t cout, int dilation,
                   std::mt19937& rng);

// Per-channel batch normalization over the batch and time axes of [B, T, C].
// Training uses batch statistics except for single-sample batches, which
// fall back to the running statistics (with a one-time warning).
struct BatchNorm1d {
    Tensor gamma;  // [C]
    Tensor beta;   // [C]
    std::vector<double> running_mean;
    std::vector<double> running_var;
    double momentum = 0.1;
    double eps = 1e-5;
    bool warned_single_sample = false;
};

BatchNorm1d make_batchnorm(std::size_t channels);
Tensor batchnorm_forward(BatchNorm1d& bn, const Tensor& x, bool training);

// Residual block of two dilated causal convolutions, each followed by
// BN -> ReLU -> Dropout. The residual is added after the branch's final
// activation; `canonical_residual` instead re-activates after the addition.
struct TcnBlock {
    Conv1d conv1;
    Conv1d conv2;
    BatchNorm1d bn1;
    BatchNorm1d bn2;
    std::optional<Conv1d> projection;  // 1x1, present iff Cin != Cout
    double dropout_p = 0.2;
    bool canonical_residual = false;
};

TcnBlock make_tcn_block(std::size_t cin, std::size_t cout, std::size_t k, int dilation,
                        double dropout_p, bool canonical_residual, std::mt19937& rng);
Tensor tcn_block_forward(TcnBlock& block, const Tensor& x, bool training, std::mt19937& rng);

// Gate weights act on the concatenation [h_{t-1}, x_t].
struct LstmCell {
    Tensor w_f, w_i, w_c, w_o;  // [H, H + D]
    Tensor b_f, b_i, b_c, b_o;  // [H]
    std::size_t hidden = 0;
};

LstmCell make_lstm(std::size_t input_dim, std::size_t hidden, std::mt19937& rng);

struct LstmOutput {
    std::vector<Tensor> h_seq;  // per step, each [B, H]
    Tensor h_last;              // [B, H]
    Tensor c_last;              // [B, H]
};

LstmOutput lstm_forward(const LstmCell& cell, const Tensor& x_seq, Tensor h0 = {},
                        Tensor c0 = {});

struct Dense {
    Tensor weight;  // [Out, In]
    Tensor bias;    // [Out]
};

Dense make_dense(std::size_t in, std::size_t out, std::mt19937& rng);

// Trainable tensors of each layer kind, in a fixed order.
void collect_parameters(const Conv1d& c, std::vector<Tensor>& out);
void collect_parameters(const BatchNorm1d& bn, std::vector<Tensor>& out);
void collect_parameters(const TcnBlock& b, std::vector<Tensor>& out);
void collect_parameters(const LstmCell& c, std::vector<Tensor>& out);
void collect_parameters(const Dense& d, std::vector<Tensor>& out);

}  // namespace wavecast::nn
