#pragma once

#include <cstdint>
#include <vector>

#include "amemnet/tensor.hpp"

namespace amemnet {

// v <- mu*v + g; theta <- theta - lr*v
class SgdMomentum {
public:
    SgdMomentum(double lr, double momentum) : lr_(lr), momentum_(momentum) {}

    void step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads);

    double lr() const { return lr_; }
    double momentum() const { return momentum_; }
    const std::vector<Tensor>& velocity() const { return velocity_; }

private:
    double lr_;
    double momentum_;
    std::vector<Tensor> velocity_;  // lazily sized to match params on first step
};

// Bias-corrected Adam: theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
class Adam {
public:
    explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads);

    std::int64_t step_count() const { return t_; }
    double lr() const { return lr_; }

private:
    double lr_;
    double beta1_;
    double beta2_;
    double eps_;
    std::int64_t t_ = 0;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
};

}  // namespace amemnet
