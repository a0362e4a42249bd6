#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "amemnet/tensor.hpp"

namespace amemnet {

using NodeId = std::size_t;

// Reverse-mode gradient tape. One tape per forward pass; single writer.
// Each op records its output value plus a closure that scatters the output
// gradient back to its inputs. backward() replays the records in reverse.
class GradTape {
public:
    NodeId leaf(Tensor value);

    const Tensor& value(NodeId id) const { return nodes_[id].value; }
    const Tensor& grad(NodeId id) const { return nodes_[id].grad; }
    std::size_t node_count() const { return nodes_.size(); }

    // Seeds d(root)/d(root) = 1 and propagates to every recorded input.
    void backward(NodeId root);

    // ---- primitive ops ----
    NodeId matmul(NodeId a, NodeId b);      // A * B
    NodeId matmul_nt(NodeId a, NodeId b);   // A * B^T
    NodeId matmul_tn(NodeId a, NodeId b);   // A^T * B
    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);         // elementwise
    NodeId add_row(NodeId m, NodeId v);     // broadcast row vector
    NodeId mul_row(NodeId m, NodeId v);
    NodeId affine_scalar(NodeId x, double scale, double shift);  // scale*x + shift
    NodeId sigmoid(NodeId x);
    NodeId tanh(NodeId x);
    NodeId leaky_relu(NodeId x, double slope);
    NodeId softplus(NodeId x);
    NodeId softmax_rows(NodeId x);
    NodeId neg_l2_rows(NodeId q, NodeId keys);
    NodeId sum_all(NodeId x);   // scalar (shape {1})
    NodeId mean_all(NodeId x);

    // Train-mode batch norm over rows (per-column statistics, biased
    // variance). Optionally reports the batch statistics for running-stat
    // bookkeeping outside the tape.
    NodeId batchnorm_train(NodeId x, NodeId gamma, NodeId beta, double eps,
                           Tensor* batch_mean = nullptr, Tensor* batch_var = nullptr);

    // Mean cross-entropy of row-wise softmax(logits) against integer labels.
    NodeId cross_entropy_logits(NodeId logits, const std::vector<int>& labels);

    // mean_b log(sigmoid(z_b)), computed in logit space via softplus.
    NodeId mean_log_sigmoid(NodeId logits);
    // mean_b log(1 - sigmoid(z_b))
    NodeId mean_log_one_minus_sigmoid(NodeId logits);

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void(GradTape&, const Tensor&)> backward;
    };

    NodeId record(Tensor value, std::function<void(GradTape&, const Tensor&)> back);
    void accumulate(NodeId id, const Tensor& g);

    std::vector<Node> nodes_;
};

}  // namespace amemnet
