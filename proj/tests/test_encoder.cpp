#include <doctest.h>

#include <cmath>

#include "amemnet/encoder.hpp"
#include "amemnet/gradcheck.hpp"
#include "amemnet/rng.hpp"

using namespace amemnet;

namespace {

Model tiny_model(std::size_t d, std::size_t hidden, std::size_t h, std::uint64_t seed) {
    ModelConfig cfg;
    cfg.d = d;
    cfg.hidden = hidden;
    cfg.h = h;
    cfg.slots = 4;
    cfg.classes = 3;
    return Model::init(cfg, seed);
}

Tensor random_batch(Rng& rng, std::size_t b, std::size_t d) {
    Tensor x({b, d});
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.normal();
    return x;
}

}  // namespace

TEST_CASE("batch norm is identity up to eps-scaling on normalized input") {
    const double eps = 1e-5;
    // Columns already have zero mean and unit biased variance.
    Tensor x = Tensor::matrix(2, 3, {-1, 1, -1, 1, -1, 1});
    GradTape tape;
    NodeId xl = tape.leaf(x);
    NodeId gamma = tape.leaf(Tensor::vector({1, 1, 1}));
    NodeId beta = tape.leaf(Tensor::vector({0, 0, 0}));
    NodeId y = tape.batchnorm_train(xl, gamma, beta, eps);
    const double scale = 1.0 / std::sqrt(1.0 + eps);
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(tape.value(y)[i] == doctest::Approx(x[i] * scale).epsilon(1e-12));
    }
}

TEST_CASE("batch norm output is zero-mean unit-variance per feature before affine") {
    Rng rng(41);
    Tensor x = random_batch(rng, 16, 5);
    GradTape tape;
    NodeId gamma = tape.leaf(Tensor::vector({1, 1, 1, 1, 1}));
    NodeId beta = tape.leaf(Tensor::vector({0, 0, 0, 0, 0}));
    NodeId y = tape.batchnorm_train(tape.leaf(x), gamma, beta, 1e-12);
    const Tensor& out = tape.value(y);
    for (std::size_t c = 0; c < 5; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < 16; ++r) mean += out.at(r, c);
        mean /= 16.0;
        double var = 0.0;
        for (std::size_t r = 0; r < 16; ++r) {
            var += (out.at(r, c) - mean) * (out.at(r, c) - mean);
        }
        var /= 16.0;
        CHECK(std::abs(mean) < 1e-10);
        CHECK(var == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("encoder gradients match finite differences through batch norm") {
    Model m = tiny_model(8, 6, 4, 3);
    Rng rng(5);
    Tensor x = random_batch(rng, 3, 8);

    auto forward = [&](std::vector<Tensor>* grads) {
        GradTape tape;
        EncoderLeaves leaves = encoder_leaves(tape, m.enc);
        NodeId q = encode_train(tape, leaves, tape.leaf(x), m.cfg);
        NodeId loss = tape.sum_all(tape.mul(q, q));
        if (grads) {
            tape.backward(loss);
            *grads = {tape.grad(leaves.W1),    tape.grad(leaves.b1),
                      tape.grad(leaves.gamma), tape.grad(leaves.beta),
                      tape.grad(leaves.W2),    tape.grad(leaves.b2)};
        }
        return tape.value(loss)[0];
    };

    std::vector<Tensor> grads;
    forward(&grads);
    std::vector<Tensor*> params = {&m.enc.W1, &m.enc.b1,  &m.enc.gamma,
                                   &m.enc.beta, &m.enc.W2, &m.enc.b2};
    auto f = [&]() { return forward(nullptr); };
    CHECK(finite_diff_check(f, params, grads) < 1e-4);
}

TEST_CASE("encode_train rejects degenerate batches and wrong widths") {
    Model m = tiny_model(8, 6, 4, 3);
    GradTape tape;
    EncoderLeaves leaves = encoder_leaves(tape, m.enc);
    Rng rng(6);
    Tensor one_row = random_batch(rng, 1, 8);
    CHECK_THROWS_AS(encode_train(tape, leaves, tape.leaf(one_row), m.cfg), ConfigError);
    Tensor wrong_d = random_batch(rng, 3, 7);
    CHECK_THROWS_AS(encode_train(tape, leaves, tape.leaf(wrong_d), m.cfg), DimensionError);
    CHECK_THROWS_AS(encode_eval(m.enc, wrong_d, m.cfg), DimensionError);
}

TEST_CASE("encode_eval is pure and deterministic") {
    Model m = tiny_model(8, 6, 4, 9);
    Rng rng(10);
    Tensor x = random_batch(rng, 4, 8);
    Tensor q1 = encode_eval(m.enc, x, m.cfg);
    Tensor q2 = encode_eval(m.enc, x, m.cfg);
    REQUIRE(q1.same_shape(q2));
    for (std::size_t i = 0; i < q1.size(); ++i) CHECK(q1[i] == q2[i]);
}

TEST_CASE("running statistics blend with momentum and unbiased variance") {
    Model m = tiny_model(4, 3, 2, 12);
    for (std::size_t i = 0; i < 3; ++i) {
        m.enc.running_mean[i] = 1.0;
        m.enc.running_var[i] = 2.0;
    }
    Tensor batch_mean = Tensor::vector({0.5, 0.0, -0.5});
    Tensor batch_var = Tensor::vector({1.0, 4.0, 0.25});  // biased, over B=5
    update_running_stats(m.enc, batch_mean, batch_var, 5, 0.9);
    for (std::size_t i = 0; i < 3; ++i) {
        const double want_mean = 0.9 * 1.0 + 0.1 * batch_mean[i];
        const double want_var = 0.9 * 2.0 + 0.1 * (batch_var[i] * 5.0 / 4.0);
        CHECK(m.enc.running_mean[i] == doctest::Approx(want_mean).epsilon(1e-14));
        CHECK(m.enc.running_var[i] == doctest::Approx(want_var).epsilon(1e-14));
    }
}

TEST_CASE("eval encoding reduces to the train path at matching statistics") {
    // If running stats equal the batch stats, eval and train forwards agree.
    Model m = tiny_model(6, 5, 3, 15);
    Rng rng(16);
    Tensor x = random_batch(rng, 8, 6);

    GradTape tape;
    EncoderLeaves leaves = encoder_leaves(tape, m.enc);
    Tensor batch_mean, batch_var;
    NodeId q = encode_train(tape, leaves, tape.leaf(x), m.cfg, &batch_mean, &batch_var);

    m.enc.running_mean = batch_mean;
    m.enc.running_var = batch_var;
    Tensor q_eval = encode_eval(m.enc, x, m.cfg);
    REQUIRE(q_eval.same_shape(tape.value(q)));
    for (std::size_t i = 0; i < q_eval.size(); ++i) {
        CHECK(q_eval[i] == doctest::Approx(tape.value(q)[i]).epsilon(1e-10));
    }
}
