#include "wavecast/nn/layers.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace wavecast::nn {

namespace {

std::vector<double> uniform_values(std::size_t n, double limit, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-limit, limit);
    std::vector<double> v(n);
    for (double& x : v) {
        x = dist(rng);
    }
    return v;
}

}  // namespace

Conv1d make_conv1d(std::size_t k, std::size_t cin, std::size_t cout, int dilation,
                   std::mt19937& rng) {
    if (k < 1 || cin < 1 || cout < 1 || dilation < 1) {
        throw std::invalid_argument("make_conv1d: invalid configuration");
    }
    const double limit = std::sqrt(6.0 / static_cast<double>(k * cin));  // He-uniform
    Conv1d c;
    c.kernel = Tensor::from_values({k, cin, cout}, uniform_values(k * cin * cout, limit, rng),
                                   true);
    c.bias = Tensor::zeros({cout}, true);
    c.dilation = dilation;
    return c;
}

BatchNorm1d make_batchnorm(std::size_t channels) {
    BatchNorm1d bn;
    bn.gamma = Tensor::full({channels}, 1.0, true);
    bn.beta = Tensor::zeros({channels}, true);
    bn.running_mean.assign(channels, 0.0);
    bn.running_var.assign(channels, 1.0);
    return bn;
}

Tensor batchnorm_forward(BatchNorm1d& bn, const Tensor& x, bool training) {
    if (x.shape().size() != 3) {
        throw std::invalid_argument("batchnorm_forward: expected [B, T, C]");
    }
    const std::size_t batch = x.dim(0), steps = x.dim(1), ch = x.dim(2);
    if (bn.gamma.dim(0) != ch) {
        throw std::invalid_argument("batchnorm_forward: channel mismatch");
    }
    const std::size_t count = batch * steps;

    bool use_batch_stats = training;
    if (training && batch < 2) {
        if (!bn.warned_single_sample) {
            std::cerr << "batchnorm: single-sample batch, using running statistics\n";
            bn.warned_single_sample = true;
        }
        use_batch_stats = false;
    }

    std::vector<double> mean(ch), var(ch);
    if (use_batch_stats) {
        for (std::size_t c = 0; c < ch; ++c) {
            mean[c] = 0.0;
            var[c] = 0.0;
        }
        const auto& xv = x.values();
        for (std::size_t i = 0; i < count; ++i) {
            const double* row = xv.data() + i * ch;
            for (std::size_t c = 0; c < ch; ++c) {
                mean[c] += row[c];
            }
        }
        for (std::size_t c = 0; c < ch; ++c) {
            mean[c] /= static_cast<double>(count);
        }
        for (std::size_t i = 0; i < count; ++i) {
            const double* row = xv.data() + i * ch;
            for (std::size_t c = 0; c < ch; ++c) {
                const double d = row[c] - mean[c];
                var[c] += d * d;
            }
        }
        for (std::size_t c = 0; c < ch; ++c) {
            var[c] /= static_cast<double>(count);
            bn.running_mean[c] = (1.0 - bn.momentum) * bn.running_mean[c] + bn.momentum * mean[c];
            bn.running_var[c] = (1.0 - bn.momentum) * bn.running_var[c] + bn.momentum * var[c];
        }
    } else {
        mean = bn.running_mean;
        var = bn.running_var;
    }

    auto inv_std = std::make_shared<std::vector<double>>(ch);
    for (std::size_t c = 0; c < ch; ++c) {
        (*inv_std)[c] = 1.0 / std::sqrt(var[c] + bn.eps);
    }
    auto normalized = std::make_shared<std::vector<double>>(x.size());
    std::vector<double> out(x.size());
    {
        const auto& xv = x.values();
        const auto& gv = bn.gamma.values();
        const auto& bv = bn.beta.values();
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t c = 0; c < ch; ++c) {
                const double xhat = (xv[i * ch + c] - mean[c]) * (*inv_std)[c];
                (*normalized)[i * ch + c] = xhat;
                out[i * ch + c] = gv[c] * xhat + bv[c];
            }
        }
    }

    auto xn = x.node();
    auto gn = bn.gamma.node();
    auto bnn = bn.beta.node();
    return Tensor::make_node(
        x.shape(), std::move(out), {x, bn.gamma, bn.beta},
        [xn, gn, bnn, normalized, inv_std, count, ch, use_batch_stats](Tensor::Node& n) {
            const auto& g = n.grad;
            if (gn->requires_grad) {
                for (std::size_t i = 0; i < count; ++i) {
                    for (std::size_t c = 0; c < ch; ++c) {
                        gn->grad[c] += g[i * ch + c] * (*normalized)[i * ch + c];
                    }
                }
            }
            if (bnn->requires_grad) {
                for (std::size_t i = 0; i < count; ++i) {
                    for (std::size_t c = 0; c < ch; ++c) {
                        bnn->grad[c] += g[i * ch + c];
                    }
                }
            }
            if (!xn->requires_grad) {
                return;
            }
            if (!use_batch_stats) {
                for (std::size_t i = 0; i < count; ++i) {
                    for (std::size_t c = 0; c < ch; ++c) {
                        xn->grad[i * ch + c] += g[i * ch + c] * gn->value[c] * (*inv_std)[c];
                    }
                }
                return;
            }
            // Batch statistics participate in the forward value, so their
            // dependence on x enters the gradient.
            std::vector<double> sum_g(ch, 0.0), sum_gx(ch, 0.0);
            for (std::size_t i = 0; i < count; ++i) {
                for (std::size_t c = 0; c < ch; ++c) {
                    sum_g[c] += g[i * ch + c];
                    sum_gx[c] += g[i * ch + c] * (*normalized)[i * ch + c];
                }
            }
            const double inv_count = 1.0 / static_cast<double>(count);
            for (std::size_t i = 0; i < count; ++i) {
                for (std::size_t c = 0; c < ch; ++c) {
                    const double xhat = (*normalized)[i * ch + c];
                    const double term =
                        g[i * ch + c] - inv_count * sum_g[c] - inv_count * xhat * sum_gx[c];
                    xn->grad[i * ch + c] += gn->value[c] * (*inv_std)[c] * term;
                }
            }
        });
}

TcnBlock make_tcn_block(std::size_t cin, std::size_t cout, std::size_t k, int dilation,
                        double dropout_p, bool canonical_residual, std::mt19937& rng) {
    if (dropout_p < 0.0 || dropout_p >= 1.0) {
        throw std::invalid_argument("make_tcn_block: dropout must lie in [0, 1)");
    }
    TcnBlock b;
    b.conv1 = make_conv1d(k, cin, cout, dilation, rng);
    b.conv2 = make_conv1d(k, cout, cout, dilation, rng);
    b.bn1 = make_batchnorm(cout);
    b.bn2 = make_batchnorm(cout);
    if (cin != cout) {
        b.projection = make_conv1d(1, cin, cout, 1, rng);
    }
    b.dropout_p = dropout_p;
    b.canonical_residual = canonical_residual;
    return b;
}

Tensor tcn_block_forward(TcnBlock& block, const Tensor& x, bool training, std::mt19937& rng) {
    Tensor h = conv1d_causal(x, block.conv1.kernel, block.conv1.bias, block.conv1.dilation);
    h = batchnorm_forward(block.bn1, h, training);
    h = relu(h);
    h = dropout(h, block.dropout_p, training, rng);
    h = conv1d_causal(h, block.conv2.kernel, block.conv2.bias, block.conv2.dilation);
    h = batchnorm_forward(block.bn2, h, training);
    h = relu(h);
    h = dropout(h, block.dropout_p, training, rng);

    Tensor skip = x;
    if (block.projection) {
        skip = conv1d_causal(x, block.projection->kernel, block.projection->bias, 1);
    }
    Tensor out = add(h, skip);
    if (block.canonical_residual) {
        out = relu(out);
    }
    return out;
}

LstmCell make_lstm(std::size_t input_dim, std::size_t hidden, std::mt19937& rng) {
    if (input_dim < 1 || hidden < 1) {
        throw std::invalid_argument("make_lstm: invalid dimensions");
    }
    const std::size_t fan_in = hidden + input_dim;
    const double limit = 1.0 / std::sqrt(static_cast<double>(fan_in));
    LstmCell c;
    c.hidden = hidden;
    for (Tensor* w : {&c.w_f, &c.w_i, &c.w_c, &c.w_o}) {
        *w = Tensor::from_values({hidden, fan_in}, uniform_values(hidden * fan_in, limit, rng),
                                 true);
    }
    c.b_f = Tensor::full({hidden}, 1.0, true);  // forget gate starts open
    c.b_i = Tensor::zeros({hidden}, true);
    c.b_c = Tensor::zeros({hidden}, true);
    c.b_o = Tensor::zeros({hidden}, true);
    return c;
}

LstmOutput lstm_forward(const LstmCell& cell, const Tensor& x_seq, Tensor h0, Tensor c0) {
    if (x_seq.shape().size() != 3) {
        throw std::invalid_argument("lstm_forward: expected [B, T, D]");
    }
    const std::size_t batch = x_seq.dim(0), steps = x_seq.dim(1), input_dim = x_seq.dim(2);
    if (cell.w_f.dim(1) != cell.hidden + input_dim) {
        throw std::invalid_argument("lstm_forward: input width does not match the gate matrices");
    }

    Tensor h = h0.defined() ? h0 : Tensor::zeros({batch, cell.hidden});
    Tensor c = c0.defined() ? c0 : Tensor::zeros({batch, cell.hidden});

    LstmOutput out;
    out.h_seq.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        const Tensor xt = time_slice(x_seq, t);
        const Tensor hx = concat_cols(h, xt);
        const Tensor f = sigmoid(linear(hx, cell.w_f, cell.b_f));
        const Tensor i = sigmoid(linear(hx, cell.w_i, cell.b_i));
        const Tensor cand = tanh_op(linear(hx, cell.w_c, cell.b_c));
        c = add(mul(f, c), mul(i, cand));
        const Tensor o = sigmoid(linear(hx, cell.w_o, cell.b_o));
        h = mul(o, tanh_op(c));
        out.h_seq.push_back(h);
    }
    out.h_last = h;
    out.c_last = c;
    return out;
}

Dense make_dense(std::size_t in, std::size_t out, std::mt19937& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in));
    Dense d;
    d.weight = Tensor::from_values({out, in}, uniform_values(out * in, limit, rng), true);
    d.bias = Tensor::zeros({out}, true);
    return d;
}

void collect_parameters(const Conv1d& c, std::vector<Tensor>& out) {
    out.push_back(c.kernel);
    out.push_back(c.bias);
}

void collect_parameters(const BatchNorm1d& bn, std::vector<Tensor>& out) {
    out.push_back(bn.gamma);
    out.push_back(bn.beta);
}

void collect_parameters(const TcnBlock& b, std::vector<Tensor>& out) {
    collect_parameters(b.conv1, out);
    collect_parameters(b.bn1, out);
    collect_parameters(b.conv2, out);
    collect_parameters(b.bn2, out);
    if (b.projection) {
        collect_parameters(*b.projection, out);
    }
}

void collect_parameters(const LstmCell& c, std::vector<Tensor>& out) {
    out.push_back(c.w_f);
    out.push_back(c.w_i);
    out.push_back(c.w_c);
    out.push_back(c.w_o);
    out.push_back(c.b_f);
    out.push_back(c.b_i);
    out.push_back(c.b_c);
    out.push_back(c.b_o);
}

void collect_parameters(const Dense& d, std::vector<Tensor>& out) {
    out.push_back(d.weight);
    out.push_back(d.bias);
}

}  // namespace wavecast::nn
