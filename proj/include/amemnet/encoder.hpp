#pragma once

#include "amemnet/model.hpp"
#include "amemnet/tape.hpp"

namespace amemnet {

struct EncoderLeaves {
    NodeId W1, b1, gamma, beta, W2, b2;
};

EncoderLeaves encoder_leaves(GradTape& tape, const EncoderParams& p);

// Train-mode query encoding: q = W2 * lrelu(BN(W1 x + b1)) + b2, batch norm
// normalized by batch statistics. Reports those statistics so the caller can
// fold them into the running averages.
NodeId encode_train(GradTape& tape, const EncoderLeaves& leaves, NodeId x_batch,
                    const ModelConfig& cfg, Tensor* batch_mean = nullptr,
                    Tensor* batch_var = nullptr);

// Eval-mode encoding with running statistics; pure.
Tensor encode_eval(const EncoderParams& p, const Tensor& x_batch, const ModelConfig& cfg);

// running <- momentum * running + (1 - momentum) * batch. Variance uses the
// unbiased estimate (batch variance is biased by construction).
void update_running_stats(EncoderParams& p, const Tensor& batch_mean,
                          const Tensor& batch_var, std::size_t batch_size,
                          double momentum);

}  // namespace amemnet
