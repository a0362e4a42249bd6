#include <doctest.h>

#include <cmath>

#include "amemnet/discriminator.hpp"
#include "amemnet/rng.hpp"
#include "amemnet/tape.hpp"

using namespace amemnet;

namespace {

DiscriminatorParams zero_disc(std::size_t k, std::size_t d) {
    DiscriminatorParams p;
    p.Wcls = Tensor({k, d});
    p.bcls = Tensor({k});
    p.wadv = Tensor({1, d});
    p.badv = Tensor({1});
    return p;
}

}  // namespace

TEST_CASE("zero classifier head predicts the uniform distribution") {
    DiscriminatorParams p = zero_disc(5, 4);
    Tensor v = Tensor::matrix(2, 4, {1, -2, 3, 0.5, 0, 0, 7, -1});
    Tensor probs = classify_probs_eval(p, v);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        CHECK(probs[i] == doctest::Approx(0.2).epsilon(1e-14));
    }
}

TEST_CASE("class probabilities sum to one on random inputs") {
    Rng rng(61);
    DiscriminatorParams p = zero_disc(4, 6);
    for (std::size_t i = 0; i < p.Wcls.size(); ++i) p.Wcls[i] = rng.normal();
    for (std::size_t i = 0; i < p.bcls.size(); ++i) p.bcls[i] = rng.normal();
    for (int trial = 0; trial < 50; ++trial) {
        Tensor v({3, 6});
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = 5.0 * rng.normal();
        Tensor probs = classify_probs_eval(p, v);
        for (std::size_t r = 0; r < 3; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < 4; ++c) s += probs.at(r, c);
            CHECK(std::abs(s - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("K=3 d=2 hand instance matches the scalar softmax oracle") {
    DiscriminatorParams p = zero_disc(3, 2);
    p.Wcls = Tensor::matrix(3, 2, {1, 0, 0, 1, 1, 1});
    p.bcls = Tensor::vector({0, 0.5, -0.5});
    Tensor v = Tensor::matrix(1, 2, {2, -1});
    // logits: (2, -0.5, 0.5)
    Tensor logits = classify_logits_eval(p, v);
    CHECK(logits[0] == doctest::Approx(2.0));
    CHECK(logits[1] == doctest::Approx(-0.5));
    CHECK(logits[2] == doctest::Approx(0.5));
    Tensor probs = classify_probs_eval(p, v);
    const double z = std::exp(2.0) + std::exp(-0.5) + std::exp(0.5);
    CHECK(probs[0] == doctest::Approx(std::exp(2.0) / z).epsilon(1e-14));
    CHECK(probs[1] == doctest::Approx(std::exp(-0.5) / z).epsilon(1e-14));
    CHECK(probs[2] == doctest::Approx(std::exp(0.5) / z).epsilon(1e-14));
}

TEST_CASE("zero adversarial head is indifferent") {
    DiscriminatorParams p = zero_disc(3, 4);
    Tensor v = Tensor::vector({1, 2, 3, 4});
    CHECK(adversarial_score_eval(p, v) == doctest::Approx(0.5));
}

TEST_CASE("saturated adversarial head stays finite in logit space") {
    DiscriminatorParams p = zero_disc(3, 4);
    p.badv[0] = 20.0;
    Tensor v = Tensor::matrix(1, 4, {0, 0, 0, 0});
    CHECK(adversarial_score_eval(p, Tensor::vector({0, 0, 0, 0})) > 1.0 - 1e-8);

    GradTape tape;
    DiscriminatorLeaves leaves = discriminator_leaves(tape, p);
    NodeId logit = adversarial_logits(tape, leaves, tape.leaf(v));
    NodeId ll = tape.mean_log_sigmoid(logit);
    NodeId ll1m = tape.mean_log_one_minus_sigmoid(logit);
    CHECK(std::isfinite(tape.value(ll)[0]));
    CHECK(std::isfinite(tape.value(ll1m)[0]));
    CHECK(tape.value(ll1m)[0] == doctest::Approx(-20.0).epsilon(1e-6));
}

TEST_CASE("d=3 adversarial hand instance matches dot product plus sigmoid") {
    DiscriminatorParams p = zero_disc(2, 3);
    p.wadv = Tensor::matrix(1, 3, {0.5, -1.0, 2.0});
    p.badv = Tensor::vector({0.25});
    Tensor v = Tensor::vector({2.0, 1.0, -0.5});
    const double z = 0.5 * 2.0 - 1.0 * 1.0 + 2.0 * (-0.5) + 0.25;  // -0.75
    CHECK(adversarial_score_eval(p, v) ==
          doctest::Approx(1.0 / (1.0 + std::exp(-z))).epsilon(1e-14));

    Tensor batch = Tensor::matrix(1, 3, {2.0, 1.0, -0.5});
    Tensor logits = adversarial_logits_eval(p, batch);
    CHECK(logits[0] == doctest::Approx(z).epsilon(1e-14));
}
