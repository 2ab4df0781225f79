#include "wavecast/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace wavecast::nn {

std::size_t shape_size(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) {
        n *= d;
    }
    return n;
}

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
    return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(std::vector<std::size_t> shape, double fill, bool requires_grad) {
    const std::size_t n = shape_size(shape);
    std::vector<double> values(n, fill);
    return from_values(std::move(shape), std::move(values), requires_grad);
}

Tensor Tensor::from_values(std::vector<std::size_t> shape, std::vector<double> values,
                           bool requires_grad) {
    if (shape_size(shape) != values.size()) {
        throw std::invalid_argument("Tensor: value count does not match shape");
    }
    Tensor t;
    t.node_ = std::make_shared<Node>();
    t.node_->shape = std::move(shape);
    t.node_->value = std::move(values);
    t.node_->requires_grad = requires_grad;
    if (requires_grad) {
        t.node_->grad.assign(t.node_->value.size(), 0.0);
    }
    return t;
}

const std::vector<std::size_t>& Tensor::shape() const {
    if (!node_) {
        throw std::runtime_error("Tensor: undefined");
    }
    return node_->shape;
}

std::size_t Tensor::size() const { return shape_size(shape()); }

std::vector<double>& Tensor::values() {
    if (!node_) {
        throw std::runtime_error("Tensor: undefined");
    }
    return node_->value;
}

const std::vector<double>& Tensor::values() const {
    if (!node_) {
        throw std::runtime_error("Tensor: undefined");
    }
    return node_->value;
}

std::vector<double>& Tensor::grad() {
    if (!node_ || !node_->requires_grad) {
        throw std::runtime_error("Tensor: gradient requested on a non-grad tensor");
    }
    return node_->grad;
}

const std::vector<double>& Tensor::grad() const {
    if (!node_ || !node_->requires_grad) {
        throw std::runtime_error("Tensor: gradient requested on a non-grad tensor");
    }
    return node_->grad;
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

void Tensor::zero_grad() {
    if (node_ && node_->requires_grad) {
        std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
    }
}

Tensor Tensor::make_node(std::vector<std::size_t> shape, std::vector<double> values,
                         std::vector<Tensor> parents,
                         std::function<void(Node&)> backward_step) {
    bool needs_grad = false;
    for (const Tensor& p : parents) {
        needs_grad = needs_grad || p.requires_grad();
    }
    Tensor t = from_values(std::move(shape), std::move(values), needs_grad);
    if (needs_grad) {
        for (const Tensor& p : parents) {
            t.node_->parents.push_back(p.node());
        }
        t.node_->backward_step = std::move(backward_step);
    }
    return t;
}

void Tensor::backward() {
    if (!node_) {
        throw std::runtime_error("backward: undefined tensor");
    }
    if (size() != 1) {
        throw std::runtime_error("backward: root must be a scalar");
    }
    if (!node_->requires_grad || !node_->backward_step) {
        throw std::runtime_error("backward: no recorded forward graph to differentiate");
    }

    // Post-order DFS; graph construction order makes the replay deterministic.
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(node_.get(), 0);
    seen.insert(node_.get());
    while (!stack.empty()) {
        auto& [cur, next_child] = stack.back();
        if (next_child < cur->parents.size()) {
            Node* child = cur->parents[next_child].get();
            ++next_child;
            if (child->requires_grad && seen.insert(child).second) {
                stack.emplace_back(child, 0);
            }
        } else {
            order.push_back(cur);
            stack.pop_back();
        }
    }

    node_->grad.assign(1, 1.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if ((*it)->backward_step) {
            (*it)->backward_step(**it);
        }
    }
}

namespace {

using Node = Tensor::Node;
using NodePtr = std::shared_ptr<Node>;

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
    }
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "add");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = a.values()[i] + b.values()[i];
    }
    NodePtr an = a.node(), bn = b.node();
    return Tensor::make_node(a.shape(), std::move(out), {a, b}, [an, bn](Node& n) {
        if (an->requires_grad) {
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                an->grad[i] += n.grad[i];
            }
        }
        if (bn->requires_grad) {
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                bn->grad[i] += n.grad[i];
            }
        }
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "sub");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = a.values()[i] - b.values()[i];
    }
    NodePtr an = a.node(), bn = b.node();
    return Tensor::make_node(a.shape(), std::move(out), {a, b}, [an, bn](Node& n) {
        if (an->requires_grad) {
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                an->grad[i] += n.grad[i];
            }
        }
        if (bn->requires_grad) {
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                bn->grad[i] -= n.grad[i];
            }
        }
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "mul");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = a.values()[i] * b.values()[i];
    }
    NodePtr an = a.node(), bn = b.node();
    return Tensor::make_node(a.shape(), std::move(out), {a, b}, [an, bn](Node& n) {
        if (an->requires_grad) {
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                an->grad[i] += n.grad[i] * bn->value[i];
            }
        }
        if (bn->requires_grad) {
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                bn->grad[i] += n.grad[i] * an->value[i];
            }
        }
    });
}

Tensor scale(const Tensor& a, double c) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = a.values()[i] * c;
    }
    NodePtr an = a.node();
    return Tensor::make_node(a.shape(), std::move(out), {a}, [an, c](Node& n) {
        if (an->requires_grad) {
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                an->grad[i] += n.grad[i] * c;
            }
        }
    });
}

Tensor relu(const Tensor& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = x.values()[i] > 0.0 ? x.values()[i] : 0.0;
    }
    NodePtr xn = x.node();
    return Tensor::make_node(x.shape(), std::move(out), {x}, [xn](Node& n) {
        if (xn->requires_grad) {
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                if (xn->value[i] > 0.0) {
                    xn->grad[i] += n.grad[i];
                }
            }
        }
    });
}

Tensor sigmoid(const Tensor& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = 1.0 / (1.0 + std::exp(-x.values()[i]));
    }
    NodePtr xn = x.node();
    return Tensor::make_node(x.shape(), std::move(out), {x}, [xn](Node& n) {
        if (xn->requires_grad) {
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                const double s = n.value[i];
                xn->grad[i] += n.grad[i] * s * (1.0 - s);
            }
        }
    });
}

Tensor tanh_op(const Tensor& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::tanh(x.values()[i]);
    }
    NodePtr xn = x.node();
    return Tensor::make_node(x.shape(), std::move(out), {x}, [xn](Node& n) {
        if (xn->requires_grad) {
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                const double t = n.value[i];
                xn->grad[i] += n.grad[i] * (1.0 - t * t);
            }
        }
    });
}

Tensor dropout(const Tensor& x, double p, bool training, std::mt19937& rng) {
    if (p < 0.0 || p >= 1.0) {
        throw std::invalid_argument("dropout: probability must lie in [0, 1)");
    }
    if (!training || p == 0.0) {
        return x;
    }
    const double keep = 1.0 - p;
    auto mask = std::make_shared<std::vector<double>>(x.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        (*mask)[i] = unit(rng) < keep ? 1.0 / keep : 0.0;
        out[i] = x.values()[i] * (*mask)[i];
    }
    NodePtr xn = x.node();
    return Tensor::make_node(x.shape(), std::move(out), {x}, [xn, mask](Node& n) {
        if (xn->requires_grad) {
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                xn->grad[i] += n.grad[i] * (*mask)[i];
            }
        }
    });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
    if (x.shape().size() != 2 || weight.shape().size() != 2 || bias.shape().size() != 1) {
        throw std::invalid_argument("linear: expected x[R,In], weight[Out,In], bias[Out]");
    }
    const std::size_t rows = x.dim(0), in = x.dim(1);
    const std::size_t out_dim = weight.dim(0);
    if (weight.dim(1) != in || bias.dim(0) != out_dim) {
        throw std::invalid_argument("linear: dimension mismatch");
    }

    std::vector<double> out(rows * out_dim);
    const auto& xv = x.values();
    const auto& wv = weight.values();
    const auto& bv = bias.values();
    for (std::size_t r = 0; r < rows; ++r) {
        const double* xrow = xv.data() + r * in;
        double* orow = out.data() + r * out_dim;
        for (std::size_t o = 0; o < out_dim; ++o) {
            const double* wrow = wv.data() + o * in;
            double acc = bv[o];
            for (std::size_t i = 0; i < in; ++i) {
                acc += xrow[i] * wrow[i];
            }
            orow[o] = acc;
        }
    }

    NodePtr xn = x.node(), wn = weight.node(), bn = bias.node();
    return Tensor::make_node(
        {rows, out_dim}, std::move(out), {x, weight, bias},
        [xn, wn, bn, rows, in, out_dim](Node& n) {
            const auto& g = n.grad;
            if (xn->requires_grad) {
                for (std::size_t r = 0; r < rows; ++r) {
                    double* dx = xn->grad.data() + r * in;
                    const double* grow = g.data() + r * out_dim;
                    for (std::size_t o = 0; o < out_dim; ++o) {
                        const double go = grow[o];
                        const double* wrow = wn->value.data() + o * in;
                        for (std::size_t i = 0; i < in; ++i) {
                            dx[i] += go * wrow[i];
                        }
                    }
                }
            }
            if (wn->requires_grad) {
                for (std::size_t r = 0; r < rows; ++r) {
                    const double* xrow = xn->value.data() + r * in;
                    const double* grow = g.data() + r * out_dim;
                    for (std::size_t o = 0; o < out_dim; ++o) {
                        const double go = grow[o];
                        double* dw = wn->grad.data() + o * in;
                        for (std::size_t i = 0; i < in; ++i) {
                            dw[i] += go * xrow[i];
                        }
                    }
                }
            }
            if (bn->requires_grad) {
                for (std::size_t r = 0; r < rows; ++r) {
                    const double* grow = g.data() + r * out_dim;
                    for (std::size_t o = 0; o < out_dim; ++o) {
                        bn->grad[o] += grow[o];
                    }
                }
            }
        });
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
    if (a.shape().size() != 2 || b.shape().size() != 2 || a.dim(0) != b.dim(0)) {
        throw std::invalid_argument("concat_cols: expected matching [R, *] matrices");
    }
    const std::size_t rows = a.dim(0), ca = a.dim(1), cb = b.dim(1);
    std::vector<double> out(rows * (ca + cb));
    for (std::size_t r = 0; r < rows; ++r) {
        std::copy_n(a.values().data() + r * ca, ca, out.data() + r * (ca + cb));
        std::copy_n(b.values().data() + r * cb, cb, out.data() + r * (ca + cb) + ca);
    }
    NodePtr an = a.node(), bn = b.node();
    return Tensor::make_node({rows, ca + cb}, std::move(out), {a, b},
                             [an, bn, rows, ca, cb](Node& n) {
                                 for (std::size_t r = 0; r < rows; ++r) {
                                     const double* grow = n.grad.data() + r * (ca + cb);
                                     if (an->requires_grad) {
                                         double* da = an->grad.data() + r * ca;
                                         for (std::size_t i = 0; i < ca; ++i) {
                                             da[i] += grow[i];
                                         }
                                     }
                                     if (bn->requires_grad) {
                                         double* db = bn->grad.data() + r * cb;
                                         for (std::size_t i = 0; i < cb; ++i) {
                                             db[i] += grow[ca + i];
                                         }
                                     }
                                 }
                             });
}

Tensor time_slice(const Tensor& x, std::size_t t) {
    if (x.shape().size() != 3) {
        throw std::invalid_argument("time_slice: expected [B, T, C]");
    }
    const std::size_t batch = x.dim(0), steps = x.dim(1), ch = x.dim(2);
    if (t >= steps) {
        throw std::invalid_argument("time_slice: index out of range");
    }
    std::vector<double> out(batch * ch);
    for (std::size_t b = 0; b < batch; ++b) {
        std::copy_n(x.values().data() + (b * steps + t) * ch, ch, out.data() + b * ch);
    }
    NodePtr xn = x.node();
    return Tensor::make_node({batch, ch}, std::move(out), {x},
                             [xn, batch, steps, ch, t](Node& n) {
                                 if (!xn->requires_grad) {
                                     return;
                                 }
                                 for (std::size_t b = 0; b < batch; ++b) {
                                     double* dx = xn->grad.data() + (b * steps + t) * ch;
                                     const double* grow = n.grad.data() + b * ch;
                                     for (std::size_t c = 0; c < ch; ++c) {
                                         dx[c] += grow[c];
                                     }
                                 }
                             });
}

Tensor conv1d_causal(const Tensor& x, const Tensor& kernel, const Tensor& bias, int dilation) {
    if (x.shape().size() != 3 || kernel.shape().size() != 3 || bias.shape().size() != 1) {
        throw std::invalid_argument(
            "conv1d_causal: expected x[B,T,Cin], kernel[k,Cin,Cout], bias[Cout]");
    }
    if (dilation < 1) {
        throw std::invalid_argument("conv1d_causal: dilation must be >= 1");
    }
    const std::size_t batch = x.dim(0), steps = x.dim(1), cin = x.dim(2);
    const std::size_t taps = kernel.dim(0), cout = kernel.dim(2);
    if (kernel.dim(1) != cin || bias.dim(0) != cout) {
        throw std::invalid_argument("conv1d_causal: channel mismatch");
    }
    const std::size_t d = static_cast<std::size_t>(dilation);

    std::vector<double> out(batch * steps * cout);
    const auto& xv = x.values();
    const auto& kv = kernel.values();
    const auto& bv = bias.values();
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t t = 0; t < steps; ++t) {
            double* orow = out.data() + (b * steps + t) * cout;
            std::copy_n(bv.data(), cout, orow);
            for (std::size_t i = 0; i < taps; ++i) {
                if (t < i * d) {
                    break;  // left zero padding
                }
                const double* xrow = xv.data() + (b * steps + (t - i * d)) * cin;
                const double* krow = kv.data() + i * cin * cout;
                for (std::size_t c = 0; c < cin; ++c) {
                    const double xc = xrow[c];
                    if (xc == 0.0) {
                        continue;
                    }
                    const double* kr = krow + c * cout;
                    for (std::size_t o = 0; o < cout; ++o) {
                        orow[o] += xc * kr[o];
                    }
                }
            }
        }
    }

    NodePtr xn = x.node(), kn = kernel.node(), bn = bias.node();
    return Tensor::make_node(
        {batch, steps, cout}, std::move(out), {x, kernel, bias},
        [xn, kn, bn, batch, steps, cin, taps, cout, d](Node& n) {
            const auto& g = n.grad;
            for (std::size_t b = 0; b < batch; ++b) {
                for (std::size_t t = 0; t < steps; ++t) {
                    const double* grow = g.data() + (b * steps + t) * cout;
                    for (std::size_t i = 0; i < taps; ++i) {
                        if (t < i * d) {
                            break;
                        }
                        const std::size_t src = b * steps + (t - i * d);
                        const double* krow = kn->value.data() + i * cin * cout;
                        if (xn->requires_grad) {
                            double* dx = xn->grad.data() + src * cin;
                            for (std::size_t c = 0; c < cin; ++c) {
                                const double* kr = krow + c * cout;
                                double acc = 0.0;
                                for (std::size_t o = 0; o < cout; ++o) {
                                    acc += grow[o] * kr[o];
                                }
                                dx[c] += acc;
                            }
                        }
                        if (kn->requires_grad) {
                            const double* xrow = xn->value.data() + src * cin;
                            double* dk = kn->grad.data() + i * cin * cout;
                            for (std::size_t c = 0; c < cin; ++c) {
                                const double xc = xrow[c];
                                if (xc == 0.0) {
                                    continue;
                                }
                                double* dkr = dk + c * cout;
                                for (std::size_t o = 0; o < cout; ++o) {
                                    dkr[o] += xc * grow[o];
                                }
                            }
                        }
                    }
                    if (bn->requires_grad) {
                        for (std::size_t o = 0; o < cout; ++o) {
                            bn->grad[o] += grow[o];
                        }
                    }
                }
            }
        });
}

Tensor conv1d_causal_seq(const Tensor& x, const Tensor& kernel, const Tensor& bias,
                         int dilation) {
    if (x.shape().size() != 2) {
        throw std::invalid_argument("conv1d_causal_seq: expected [T, Cin]");
    }
    const std::size_t steps = x.dim(0), cin = x.dim(1);
    Tensor batched = Tensor::make_node(
        {1, steps, cin}, std::vector<double>(x.values()), {x}, [xn = x.node()](Node& n) {
            if (xn->requires_grad) {
                for (std::size_t i = 0; i < n.grad.size(); ++i) {
                    xn->grad[i] += n.grad[i];
                }
            }
        });
    Tensor y = conv1d_causal(batched, kernel, bias, dilation);
    const std::size_t cout = y.dim(2);
    return Tensor::make_node({steps, cout}, std::vector<double>(y.values()), {y},
                             [yn = y.node()](Node& n) {
                                 if (yn->requires_grad) {
                                     for (std::size_t i = 0; i < n.grad.size(); ++i) {
                                         yn->grad[i] += n.grad[i];
                                     }
                                 }
                             });
}

Tensor mse_loss(const Tensor& pred, const Tensor& target) {
    check_same_shape(pred, target, "mse_loss");
    const std::size_t n = pred.size();
    if (n == 0) {
        throw std::invalid_argument("mse_loss: empty input");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = pred.values()[i] - target.values()[i];
        acc += e * e;
    }
    NodePtr pn = pred.node(), tn = target.node();
    return Tensor::make_node(
        {1}, {acc / static_cast<double>(n)}, {pred, target}, [pn, tn, n](Node& node) {
            const double g = node.grad[0] * 2.0 / static_cast<double>(n);
            if (pn->requires_grad) {
                for (std::size_t i = 0; i < n; ++i) {
                    pn->grad[i] += g * (pn->value[i] - tn->value[i]);
                }
            }
            if (tn->requires_grad) {
                for (std::size_t i = 0; i < n; ++i) {
                    tn->grad[i] -= g * (pn->value[i] - tn->value[i]);
                }
            }
        });
}

}  // namespace wavecast::nn
