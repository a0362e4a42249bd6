#include "amemnet/model.hpp"

#include <cmath>

#include "amemnet/rng.hpp"

namespace amemnet {

Similarity similarity_from_string(const std::string& s) {
    if (s == "dot") return Similarity::Dot;
    if (s == "neg_l2") return Similarity::NegL2;
    throw ConfigError("unknown similarity kind: " + s + " (expected dot or neg_l2)");
}

std::string to_string(Similarity s) {
    return s == Similarity::Dot ? "dot" : "neg_l2";
}

namespace {

// uniform(-sqrt(6/(fan_in+fan_out)), +...)
Tensor glorot(Rng& rng, std::size_t rows, std::size_t cols) {
    Tensor t({rows, cols});
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
    return t;
}

Tensor gaussian(Rng& rng, std::size_t rows, std::size_t cols, double stddev) {
    Tensor t({rows, cols});
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = stddev * rng.normal();
    return t;
}

Tensor constant(std::size_t n, double v) {
    Tensor t({n});
    for (std::size_t i = 0; i < n; ++i) t[i] = v;
    return t;
}

}  // namespace

Model Model::init(const ModelConfig& cfg, std::uint64_t seed) {
    if (cfg.d == 0 || cfg.hidden == 0 || cfg.h == 0 || cfg.slots == 0 || cfg.classes == 0) {
        throw ConfigError("model sizes must all be positive");
    }
    Rng rng(Rng::derive_seed(seed, 0x6d6f64656cULL));  // "model" stream
    Model m;
    m.cfg = cfg;

    m.enc.W1 = glorot(rng, cfg.hidden, cfg.d);
    m.enc.b1 = Tensor({cfg.hidden});
    m.enc.gamma = constant(cfg.hidden, 1.0);
    m.enc.beta = Tensor({cfg.hidden});
    m.enc.running_mean = Tensor({cfg.hidden});
    m.enc.running_var = constant(cfg.hidden, 1.0);
    m.enc.W2 = glorot(rng, cfg.h, cfg.hidden);
    m.enc.b2 = Tensor({cfg.h});

    m.mem.Mk = gaussian(rng, cfg.slots, cfg.h, 1.0 / std::sqrt(static_cast<double>(cfg.h)));
    m.mem.Mv = gaussian(rng, cfg.slots, cfg.d, 1.0 / std::sqrt(static_cast<double>(cfg.d)));
    m.mem.We = glorot(rng, cfg.d, cfg.d);
    m.mem.Wa = glorot(rng, cfg.d, cfg.d);

    m.disc.Wcls = glorot(rng, cfg.classes, cfg.d);
    m.disc.bcls = Tensor({cfg.classes});
    m.disc.wadv = glorot(rng, 1, cfg.d);
    m.disc.badv = Tensor({1});
    return m;
}

std::vector<std::pair<std::string, Tensor*>> Model::named_tensors() {
    return {
        {"enc.W1", &enc.W1},
        {"enc.b1", &enc.b1},
        {"enc.gamma", &enc.gamma},
        {"enc.beta", &enc.beta},
        {"enc.running_mean", &enc.running_mean},
        {"enc.running_var", &enc.running_var},
        {"enc.W2", &enc.W2},
        {"enc.b2", &enc.b2},
        {"mem.Mk", &mem.Mk},
        {"mem.Mv", &mem.Mv},
        {"mem.We", &mem.We},
        {"mem.Wa", &mem.Wa},
        {"disc.Wcls", &disc.Wcls},
        {"disc.bcls", &disc.bcls},
        {"disc.wadv", &disc.wadv},
        {"disc.badv", &disc.badv},
    };
}

std::vector<std::pair<std::string, const Tensor*>> Model::named_tensors() const {
    std::vector<std::pair<std::string, const Tensor*>> out;
    for (auto& [name, tensor] : const_cast<Model*>(this)->named_tensors()) {
        out.emplace_back(name, tensor);
    }
    return out;
}

std::vector<Tensor*> Model::generator_params() {
    return {&enc.W1, &enc.b1, &enc.gamma, &enc.beta, &enc.W2, &enc.b2,
            &mem.Mk, &mem.Mv, &mem.We, &mem.Wa};
}

std::vector<Tensor*> Model::discriminator_params() {
    return {&disc.Wcls, &disc.bcls, &disc.wadv, &disc.badv};
}

}  // namespace amemnet
