#include "amemnet/discriminator.hpp"

namespace amemnet {

DiscriminatorLeaves discriminator_leaves(GradTape& tape, const DiscriminatorParams& p) {
    return DiscriminatorLeaves{tape.leaf(p.Wcls), tape.leaf(p.bcls), tape.leaf(p.wadv),
                               tape.leaf(p.badv)};
}

NodeId classify_logits(GradTape& tape, const DiscriminatorLeaves& leaves, NodeId v_batch) {
    return tape.add_row(tape.matmul_nt(v_batch, leaves.Wcls), leaves.bcls);
}

Tensor classify_logits_eval(const DiscriminatorParams& p, const Tensor& v_batch) {
    return kernels::add_row(kernels::matmul_nt(v_batch, p.Wcls), p.bcls);
}

Tensor classify_probs_eval(const DiscriminatorParams& p, const Tensor& v_batch) {
    return kernels::softmax_rows(classify_logits_eval(p, v_batch));
}

NodeId adversarial_logits(GradTape& tape, const DiscriminatorLeaves& leaves, NodeId v_batch) {
    return tape.add_row(tape.matmul_nt(v_batch, leaves.wadv), leaves.badv);
}

Tensor adversarial_logits_eval(const DiscriminatorParams& p, const Tensor& v_batch) {
    return kernels::add_row(kernels::matmul_nt(v_batch, p.wadv), p.badv);
}

double adversarial_score_eval(const DiscriminatorParams& p, const Tensor& v) {
    if (v.size() != p.wadv.size()) {
        throw DimensionError("adversarial_score: dimension mismatch");
    }
    double logit = p.badv[0];
    for (std::size_t i = 0; i < v.size(); ++i) logit += p.wadv[i] * v[i];
    Tensor z({1});
    z[0] = logit;
    return kernels::sigmoid(z)[0];
}

}  // namespace amemnet
