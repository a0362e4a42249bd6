#include <doctest.h>

#include <cmath>

#include "amemnet/optim.hpp"

using namespace amemnet;

TEST_CASE("sgd without momentum is a plain gradient step") {
    Tensor theta = Tensor::vector({1.0});
    Tensor g = Tensor::vector({2.0});
    SgdMomentum opt(0.1, 0.0);
    opt.step({&theta}, {&g});
    CHECK(theta[0] == doctest::Approx(0.8));
}

TEST_CASE("sgd momentum follows the hand-rolled recurrence") {
    // mu=0.9, lr=1, g=1 each step: v goes 1, 1.9; theta drops by 1 then 1.9.
    Tensor theta = Tensor::vector({0.0});
    Tensor g = Tensor::vector({1.0});
    SgdMomentum opt(1.0, 0.9);
    opt.step({&theta}, {&g});
    CHECK(theta[0] == doctest::Approx(-1.0));
    opt.step({&theta}, {&g});
    CHECK(theta[0] == doctest::Approx(-2.9));
}

TEST_CASE("sgd with zero gradient and zero velocity is a fixed point") {
    Tensor theta = Tensor::vector({3.0, -1.5});
    Tensor g = Tensor::zeros_like(theta);
    SgdMomentum opt(0.5, 0.9);
    opt.step({&theta}, {&g});
    CHECK(theta[0] == 3.0);
    CHECK(theta[1] == -1.5);
}

TEST_CASE("adam with zero gradient from fresh state leaves parameters unchanged") {
    Tensor theta = Tensor::vector({1.0, 2.0, 3.0});
    Tensor g = Tensor::zeros_like(theta);
    Adam opt(0.1);
    opt.step({&theta}, {&g});
    CHECK(theta[0] == 1.0);
    CHECK(theta[1] == 2.0);
    CHECK(theta[2] == 3.0);
    CHECK(opt.step_count() == 1);
}

TEST_CASE("adam first-step magnitude is about lr regardless of gradient scale") {
    for (double c : {1e-6, 1.0, 250.0, -3.0}) {
        Tensor theta = Tensor::vector({0.0});
        Tensor g = Tensor::vector({c});
        Adam opt(0.01);
        opt.step({&theta}, {&g});
        // m_hat / sqrt(v_hat) = sign(c) up to the eps regularizer
        CHECK(std::abs(theta[0]) == doctest::Approx(0.01).epsilon(1e-2));
        CHECK(theta[0] * c < 0.0);
    }
}

TEST_CASE("adam matches the textbook scalar recurrence over several steps") {
    const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double grads[] = {2.0, 2.0, -1.0, 0.5};

    // Scalar reference implementation of the bias-corrected recurrence.
    double ref = 1.0, m = 0.0, v = 0.0;
    Tensor theta = Tensor::vector({1.0});
    Adam opt(lr, b1, b2, eps);
    int t = 0;
    for (double gv : grads) {
        ++t;
        m = b1 * m + (1 - b1) * gv;
        v = b2 * v + (1 - b2) * gv * gv;
        const double m_hat = m / (1 - std::pow(b1, t));
        const double v_hat = v / (1 - std::pow(b2, t));
        ref -= lr * m_hat / (std::sqrt(v_hat) + eps);

        Tensor g = Tensor::vector({gv});
        opt.step({&theta}, {&g});
        CHECK(theta[0] == doctest::Approx(ref).epsilon(1e-14));
    }
}

TEST_CASE("optimizers reject mismatched parameter and gradient shapes") {
    Tensor theta = Tensor::vector({1.0, 2.0});
    Tensor g = Tensor::vector({1.0});
    SgdMomentum sgd(0.1, 0.9);
    CHECK_THROWS_AS(sgd.step({&theta}, {&g}), DimensionError);
    Adam adam(0.1);
    CHECK_THROWS_AS(adam.step({&theta}, {&g}), DimensionError);
}
