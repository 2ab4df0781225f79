#pragma once

#include <cstdint>
#include <vector>

#include "wavecast/nn/tensor.hpp"

namespace wavecast::nn {

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam with bias correction: m_hat = m/(1-b1^t), v_hat = v/(1-b2^t),
// theta -= lr * m_hat / (sqrt(v_hat) + eps).
class Adam {
public:
    explicit Adam(std::vector<Tensor> params, AdamConfig config = {});

    void step();
    void zero_grad();
    std::int64_t steps_taken() const { return t_; }

private:
    std::vector<Tensor> params_;
    AdamConfig config_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    std::int64_t t_ = 0;
};

}  // namespace wavecast::nn
