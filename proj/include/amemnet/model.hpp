#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "amemnet/tensor.hpp"

namespace amemnet {

enum class Similarity { Dot, NegL2 };

Similarity similarity_from_string(const std::string& s);
std::string to_string(Similarity s);

// Architecture sizes and fixed numeric constants shared by all components.
struct ModelConfig {
    std::size_t d = 1024;     // feature dimension
    std::size_t hidden = 512; // encoder hidden width
    std::size_t h = 256;      // query embedding size
    std::size_t slots = 512;  // memory slot count N
    std::size_t classes = 0;  // K
    Similarity similarity = Similarity::Dot;
    double lambda_cls = 1.0;
    double lambda_rec = 0.1;
    double leaky_slope = 0.01;
    double bn_eps = 1e-5;
    double bn_momentum = 0.9;
};

// Two fully-connected layers with batch norm and leaky rectification on the
// hidden layer; the final embedding is left linear.
struct EncoderParams {
    Tensor W1, b1;                       // hidden x d, hidden
    Tensor gamma, beta;                  // batch-norm affine, length hidden
    Tensor running_mean, running_var;    // eval-mode statistics
    Tensor W2, b2;                       // h x hidden, h
};

// Key/value slots plus erase/add gate projections.
struct MemoryState {
    Tensor Mk;  // N x h
    Tensor Mv;  // N x d
    Tensor We;  // d x d
    Tensor Wa;  // d x d
};

// K-way classifier head and real/fake head over the same d-vector.
struct DiscriminatorParams {
    Tensor Wcls, bcls;  // K x d, K
    Tensor wadv, badv;  // 1 x d, 1
};

struct Model {
    ModelConfig cfg;
    EncoderParams enc;
    MemoryState mem;
    DiscriminatorParams disc;

    static Model init(const ModelConfig& cfg, std::uint64_t seed);

    // Stable naming shared by archives and tests.
    std::vector<std::pair<std::string, Tensor*>> named_tensors();
    std::vector<std::pair<std::string, const Tensor*>> named_tensors() const;

    // theta_G targets, in the fixed optimizer order. The returned Mv pointer
    // is the stored (post-write) matrix; gradients for it are taken w.r.t.
    // the pre-write leaf during training.
    std::vector<Tensor*> generator_params();
    std::vector<Tensor*> discriminator_params();
};

}  // namespace amemnet
