#include "wavecast/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace wavecast::nn {

Adam::Adam(std::vector<Tensor> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
    if (!(config_.lr > 0.0)) {
        throw std::invalid_argument("Adam: learning rate must be positive");
    }
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Tensor& p : params_) {
        if (!p.requires_grad()) {
            throw std::invalid_argument("Adam: parameter without gradient buffer");
        }
        m_.emplace_back(p.size(), 0.0);
        v_.emplace_back(p.size(), 0.0);
    }
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (std::size_t p = 0; p < params_.size(); ++p) {
        auto& value = params_[p].values();
        const auto& grad = params_[p].grad();
        auto& m = m_[p];
        auto& v = v_[p];
        for (std::size_t i = 0; i < value.size(); ++i) {
            const double g = grad[i];
            m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
            v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            value[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
        }
    }
}

void Adam::zero_grad() {
    for (Tensor& p : params_) {
        p.zero_grad();
    }
}

}  // namespace wavecast::nn
