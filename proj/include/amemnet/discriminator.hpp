#pragma once

#include "amemnet/model.hpp"
#include "amemnet/tape.hpp"

namespace amemnet {

struct DiscriminatorLeaves {
    NodeId Wcls, bcls, wadv, badv;
};

DiscriminatorLeaves discriminator_leaves(GradTape& tape, const DiscriminatorParams& p);

// Class logits, B x K. Losses consume logits; probabilities via softmax.
NodeId classify_logits(GradTape& tape, const DiscriminatorLeaves& leaves, NodeId v_batch);
Tensor classify_logits_eval(const DiscriminatorParams& p, const Tensor& v_batch);
Tensor classify_probs_eval(const DiscriminatorParams& p, const Tensor& v_batch);

// Real/fake logit per sample, B x 1.
NodeId adversarial_logits(GradTape& tape, const DiscriminatorLeaves& leaves, NodeId v_batch);
Tensor adversarial_logits_eval(const DiscriminatorParams& p, const Tensor& v_batch);

// sigmoid(w . v + b) for one vector.
double adversarial_score_eval(const DiscriminatorParams& p, const Tensor& v);

}  // namespace amemnet
