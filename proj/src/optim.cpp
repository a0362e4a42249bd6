#include "amemnet/optim.hpp"

#include <cmath>

namespace amemnet {

namespace {

void check_shapes(const std::vector<Tensor*>& params,
                  const std::vector<const Tensor*>& grads,
                  std::vector<Tensor>& state, const char* who) {
    if (params.size() != grads.size()) {
        throw DimensionError(std::string(who) + ": parameter/gradient count mismatch");
    }
    if (state.empty()) {
        state.reserve(params.size());
        for (const Tensor* p : params) state.push_back(Tensor::zeros_like(*p));
    }
    if (state.size() != params.size()) {
        throw DimensionError(std::string(who) + ": state size does not match parameters");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i]->same_shape(*grads[i]) || !params[i]->same_shape(state[i])) {
            throw DimensionError(std::string(who) + ": shape mismatch at parameter " +
                                 std::to_string(i));
        }
    }
}

}  // namespace

void SgdMomentum::step(const std::vector<Tensor*>& params,
                       const std::vector<const Tensor*>& grads) {
    check_shapes(params, grads, velocity_, "sgd_momentum_step");
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& theta = *params[i];
        const Tensor& g = *grads[i];
        Tensor& v = velocity_[i];
        for (std::size_t j = 0; j < theta.size(); ++j) {
            v[j] = momentum_ * v[j] + g[j];
            theta[j] -= lr_ * v[j];
        }
    }
}

void Adam::step(const std::vector<Tensor*>& params,
                const std::vector<const Tensor*>& grads) {
    check_shapes(params, grads, m_, "adam_step");
    if (v_.empty()) {
        v_.reserve(params.size());
        for (const Tensor* p : params) v_.push_back(Tensor::zeros_like(*p));
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& theta = *params[i];
        const Tensor& g = *grads[i];
        Tensor& m = m_[i];
        Tensor& v = v_[i];
        for (std::size_t j = 0; j < theta.size(); ++j) {
            m[j] = beta1_ * m[j] + (1.0 - beta1_) * g[j];
            v[j] = beta2_ * v[j] + (1.0 - beta2_) * g[j] * g[j];
            const double m_hat = m[j] / bc1;
            const double v_hat = v[j] / bc2;
            theta[j] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
        }
    }
}

}  // namespace amemnet
