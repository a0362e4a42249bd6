#pragma once

#include "amemnet/model.hpp"
#include "amemnet/tape.hpp"

namespace amemnet {

struct MemoryLeaves {
    NodeId Mk, Mv, We, Wa;
};

MemoryLeaves memory_leaves(GradTape& tape, const MemoryState& m);

// alpha[b] = softmax_i phi(q_b, Mk[i]); B x N simplex rows.
NodeId address(GradTape& tape, NodeId q_batch, NodeId keys, Similarity sim);
Tensor address_eval(const Tensor& q_batch, const Tensor& keys, Similarity sim);

struct WriteNodes {
    NodeId erase;    // B x d, sigmoid(We v)
    NodeId addvec;   // B x d, tanh(Wa v)
    NodeId post_mv;  // N x d, written value memory
};

// Gated batch-mean write:
//   M'[i] = M[i] . (1 - (1/B) sum_b alpha_b[i] e_b) + (1/B) sum_b alpha_b[i] a_b
// Reduces to the single-sample erase/add update at B = 1.
WriteNodes write_memory(GradTape& tape, NodeId value_mem, NodeId alpha, NodeId v_batch,
                        NodeId We, NodeId Wa);

// Skip-connected read: v_hat = x + alpha * Mv.
NodeId read_memory(GradTape& tape, NodeId x_batch, NodeId alpha, NodeId value_mem);
Tensor read_eval(const Tensor& x_batch, const Tensor& alpha, const Tensor& value_mem);

}  // namespace amemnet
