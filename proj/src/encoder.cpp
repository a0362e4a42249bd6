#include "amemnet/encoder.hpp"

#include <cmath>

namespace amemnet {

EncoderLeaves encoder_leaves(GradTape& tape, const EncoderParams& p) {
    return EncoderLeaves{
        tape.leaf(p.W1), tape.leaf(p.b1), tape.leaf(p.gamma),
        tape.leaf(p.beta), tape.leaf(p.W2), tape.leaf(p.b2),
    };
}

NodeId encode_train(GradTape& tape, const EncoderLeaves& leaves, NodeId x_batch,
                    const ModelConfig& cfg, Tensor* batch_mean, Tensor* batch_var) {
    if (tape.value(x_batch).rows() < 2) {
        throw ConfigError("encode_train: batch norm requires a batch of at least 2");
    }
    if (tape.value(x_batch).cols() != cfg.d) {
        throw DimensionError("encode_train: feature dimension mismatch");
    }
    NodeId pre = tape.add_row(tape.matmul_nt(x_batch, leaves.W1), leaves.b1);
    NodeId bn = tape.batchnorm_train(pre, leaves.gamma, leaves.beta, cfg.bn_eps,
                                     batch_mean, batch_var);
    NodeId act = tape.leaky_relu(bn, cfg.leaky_slope);
    return tape.add_row(tape.matmul_nt(act, leaves.W2), leaves.b2);
}

Tensor encode_eval(const EncoderParams& p, const Tensor& x_batch, const ModelConfig& cfg) {
    if (x_batch.cols() != cfg.d) {
        throw DimensionError("encode_eval: feature dimension mismatch");
    }
    Tensor pre = kernels::add_row(kernels::matmul_nt(x_batch, p.W1), p.b1);
    Tensor scale({p.gamma.size()});
    Tensor shift({p.beta.size()});
    for (std::size_t j = 0; j < scale.size(); ++j) {
        const double invstd = 1.0 / std::sqrt(p.running_var[j] + cfg.bn_eps);
        scale[j] = p.gamma[j] * invstd;
        shift[j] = p.beta[j] - p.gamma[j] * p.running_mean[j] * invstd;
    }
    Tensor bn = kernels::add_row(kernels::mul_row(pre, scale), shift);
    Tensor act = kernels::leaky_relu(bn, cfg.leaky_slope);
    return kernels::add_row(kernels::matmul_nt(act, p.W2), p.b2);
}

void update_running_stats(EncoderParams& p, const Tensor& batch_mean,
                          const Tensor& batch_var, std::size_t batch_size,
                          double momentum) {
    const double nb = static_cast<double>(batch_size);
    const double unbias = nb > 1.0 ? nb / (nb - 1.0) : 1.0;
    for (std::size_t j = 0; j < p.running_mean.size(); ++j) {
        p.running_mean[j] = momentum * p.running_mean[j] + (1.0 - momentum) * batch_mean[j];
        p.running_var[j] =
            momentum * p.running_var[j] + (1.0 - momentum) * unbias * batch_var[j];
    }
}

}  // namespace amemnet
