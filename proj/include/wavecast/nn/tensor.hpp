#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <random>
#include <vector>

namespace wavecast::nn {

// Reverse-mode autodiff tensor. A Tensor is a shared handle to a graph node
// holding a row-major value buffer, an optional gradient buffer, and the
// backward step that scatters its gradient into its parents. Graphs are
// define-by-run: ops link outputs to inputs and backward() replays the tape
// in reverse topological order.
class Tensor {
public:
    struct Node {
        std::vector<std::size_t> shape;
        std::vector<double> value;
        std::vector<double> grad;
        bool requires_grad = false;
        std::vector<std::shared_ptr<Node>> parents;
        std::function<void(Node&)> backward_step;
    };

    Tensor() = default;

    static Tensor zeros(std::vector<std::size_t> shape, bool requires_grad = false);
    static Tensor full(std::vector<std::size_t> shape, double fill, bool requires_grad = false);
    static Tensor from_values(std::vector<std::size_t> shape, std::vector<double> values,
                              bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const std::vector<std::size_t>& shape() const;
    std::size_t size() const;
    std::size_t dim(std::size_t i) const { return shape()[i]; }

    std::vector<double>& values();
    const std::vector<double>& values() const;
    std::vector<double>& grad();
    const std::vector<double>& grad() const;
    bool requires_grad() const;

    void zero_grad();

    // Runs reverse-mode accumulation from this scalar node.
    void backward();

    // Internal: used by ops.
    static Tensor make_node(std::vector<std::size_t> shape, std::vector<double> values,
                            std::vector<Tensor> parents,
                            std::function<void(Node&)> backward_step);
    const std::shared_ptr<Node>& node() const { return node_; }

private:
    std::shared_ptr<Node> node_;
};

std::size_t shape_size(const std::vector<std::size_t>& shape);

// ---- elementwise ----
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor tanh_op(const Tensor& x);

// Inverted-scaling dropout; identity when !training or p == 0.
Tensor dropout(const Tensor& x, double p, bool training, std::mt19937& rng);

// ---- linear algebra ----
// x: [R, In], weight: [Out, In], bias: [Out] -> [R, Out]
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);
// a: [R, A], b: [R, B] -> [R, A+B]
Tensor concat_cols(const Tensor& a, const Tensor& b);
// x: [B, T, C] -> [B, C] at time t
Tensor time_slice(const Tensor& x, std::size_t t);

// ---- sequence ops ----
// x: [B, T, Cin], kernel: [k, Cin, Cout], bias: [Cout]; left-padded causal
// convolution with gaps of `dilation` between taps: y(t) = sum_i K[i] *
// x(t - i*d).
Tensor conv1d_causal(const Tensor& x, const Tensor& kernel, const Tensor& bias, int dilation);

// Single-sequence form: x [T, Cin] -> [T, Cout].
Tensor conv1d_causal_seq(const Tensor& x, const Tensor& kernel, const Tensor& bias,
                         int dilation);

// ---- losses ----
// Mean squared error between same-shaped tensors; returns a scalar.
Tensor mse_loss(const Tensor& pred, const Tensor& target);

}  // namespace wavecast::nn
