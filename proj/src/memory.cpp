#include "amemnet/memory.hpp"

namespace amemnet {

MemoryLeaves memory_leaves(GradTape& tape, const MemoryState& m) {
    return MemoryLeaves{tape.leaf(m.Mk), tape.leaf(m.Mv), tape.leaf(m.We), tape.leaf(m.Wa)};
}

NodeId address(GradTape& tape, NodeId q_batch, NodeId keys, Similarity sim) {
    NodeId scores = sim == Similarity::Dot ? tape.matmul_nt(q_batch, keys)
                                           : tape.neg_l2_rows(q_batch, keys);
    return tape.softmax_rows(scores);
}

Tensor address_eval(const Tensor& q_batch, const Tensor& keys, Similarity sim) {
    Tensor scores = sim == Similarity::Dot ? kernels::matmul_nt(q_batch, keys)
                                           : kernels::neg_l2_rows(q_batch, keys);
    return kernels::softmax_rows(scores);
}

WriteNodes write_memory(GradTape& tape, NodeId value_mem, NodeId alpha, NodeId v_batch,
                        NodeId We, NodeId Wa) {
    const std::size_t batch = tape.value(v_batch).rows();
    const std::size_t slots = tape.value(value_mem).rows();
    if (tape.value(alpha).rows() != batch || tape.value(alpha).cols() != slots) {
        throw DimensionError("write_memory: attention shape does not match batch/slots");
    }
    const double inv_b = 1.0 / static_cast<double>(batch);

    NodeId erase = tape.sigmoid(tape.matmul_nt(v_batch, We));
    NodeId addvec = tape.tanh(tape.matmul_nt(v_batch, Wa));
    // keep = 1 - (1/B) alpha^T erase, N x d
    NodeId keep = tape.affine_scalar(tape.matmul_tn(alpha, erase), -inv_b, 1.0);
    NodeId gain = tape.affine_scalar(tape.matmul_tn(alpha, addvec), inv_b, 0.0);
    NodeId post = tape.add(tape.mul(value_mem, keep), gain);
    return WriteNodes{erase, addvec, post};
}

NodeId read_memory(GradTape& tape, NodeId x_batch, NodeId alpha, NodeId value_mem) {
    return tape.add(x_batch, tape.matmul(alpha, value_mem));
}

Tensor read_eval(const Tensor& x_batch, const Tensor& alpha, const Tensor& value_mem) {
    return kernels::add(x_batch, kernels::matmul(alpha, value_mem));
}

}  // namespace amemnet
