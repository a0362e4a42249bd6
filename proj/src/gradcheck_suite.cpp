#include "amemnet/gradcheck_suite.hpp"

#include "amemnet/gradcheck.hpp"
#include "amemnet/rng.hpp"
#include "amemnet/tape.hpp"
#include "amemnet/train.hpp"

namespace amemnet {

namespace {

Tensor random_tensor(Rng& rng, std::vector<std::size_t> shape, double scale = 1.0) {
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = scale * rng.normal();
    return t;
}

Batch random_batch(Rng& rng, std::size_t b, std::size_t d, std::size_t classes) {
    Batch batch;
    batch.x = random_tensor(rng, {b, d});
    batch.v = random_tensor(rng, {b, d});
    batch.labels.resize(b);
    for (std::size_t i = 0; i < b; ++i) {
        batch.labels[i] = static_cast<int>(rng.next_below(classes));
    }
    return batch;
}

// Check a single-tensor scalar function against finite differences.
template <typename LossFn>
double check_single(Tensor& param, LossFn&& build) {
    Tensor grad;
    {
        GradTape tape;
        NodeId leaf = tape.leaf(param);
        NodeId loss = build(tape, leaf);
        tape.backward(loss);
        grad = tape.grad(leaf);
    }
    auto f = [&]() {
        GradTape tape;
        NodeId leaf = tape.leaf(param);
        return tape.value(build(tape, leaf))[0];
    };
    return finite_diff_check(f, {&param}, {grad});
}

}  // namespace

std::vector<GradCheckGroup> run_gradcheck_suite(std::uint64_t seed) {
    std::vector<GradCheckGroup> groups;
    Rng rng(Rng::derive_seed(seed, 0x67636bULL));

    // Primitive spot checks on random shapes.
    {
        Tensor w = random_tensor(rng, {5, 7});
        Tensor x = random_tensor(rng, {3, 7});
        groups.push_back({"primitive.affine",
                          check_single(w, [&](GradTape& t, NodeId leaf) {
                              NodeId xl = t.leaf(x);
                              NodeId y = t.matmul_nt(xl, leaf);
                              return t.sum_all(t.mul(y, y));
                          })});
    }
    {
        Tensor s = random_tensor(rng, {4, 6}, 2.0);
        groups.push_back({"primitive.softmax",
                          check_single(s, [&](GradTape& t, NodeId leaf) {
                              NodeId y = t.softmax_rows(leaf);
                              NodeId sq = t.mul(y, y);
                              return t.sum_all(sq);
                          })});
    }
    {
        Tensor x = random_tensor(rng, {2, 5});
        groups.push_back({"primitive.tanh",
                          check_single(x, [&](GradTape& t, NodeId leaf) {
                              return t.sum_all(t.tanh(leaf));
                          })});
        groups.push_back({"primitive.sigmoid",
                          check_single(x, [&](GradTape& t, NodeId leaf) {
                              NodeId y = t.sigmoid(leaf);
                              return t.sum_all(t.mul(y, y));
                          })});
        groups.push_back({"primitive.leaky_relu",
                          check_single(x, [&](GradTape& t, NodeId leaf) {
                              NodeId y = t.leaky_relu(leaf, 0.01);
                              return t.sum_all(t.mul(y, y));
                          })});
    }
    {
        Tensor q = random_tensor(rng, {3, 4});
        Tensor keys = random_tensor(rng, {5, 4});
        groups.push_back({"primitive.neg_l2",
                          check_single(q, [&](GradTape& t, NodeId leaf) {
                              NodeId kl = t.leaf(keys);
                              NodeId s = t.neg_l2_rows(leaf, kl);
                              return t.sum_all(t.softmax_rows(s));
                          })});
    }

    // Full objectives on the miniature model, once per similarity kind.
    for (Similarity sim : {Similarity::Dot, Similarity::NegL2}) {
        ModelConfig cfg;
        cfg.d = 6;
        cfg.h = 3;
        cfg.hidden = 4;
        cfg.slots = 4;
        cfg.classes = 3;
        cfg.similarity = sim;
        Model model = Model::init(cfg, seed);
        Batch batch = random_batch(rng, 2, cfg.d, cfg.classes);
        const std::string tag = "." + to_string(sim);

        {
            std::vector<Tensor> grads;
            d_objective(model, batch, &grads);
            const std::vector<std::string> names = {"disc.Wcls", "disc.bcls", "disc.wadv",
                                                    "disc.badv"};
            std::vector<Tensor*> params = model.discriminator_params();
            auto f = [&]() { return d_objective(model, batch); };
            for (std::size_t i = 0; i < params.size(); ++i) {
                groups.push_back({"d_objective" + tag + "." + names[i],
                                  finite_diff_check(f, {params[i]}, {grads[i]})});
            }
        }
        {
            std::vector<Tensor> grads;
            g_objective(model, batch, false, &grads);
            const std::vector<std::string> names = {"enc.W1", "enc.b1", "enc.gamma",
                                                    "enc.beta", "enc.W2", "enc.b2",
                                                    "mem.Mk", "mem.Mv", "mem.We", "mem.Wa"};
            std::vector<Tensor*> params = model.generator_params();
            auto f = [&]() { return g_objective(model, batch); };
            for (std::size_t i = 0; i < params.size(); ++i) {
                groups.push_back({"g_objective" + tag + "." + names[i],
                                  finite_diff_check(f, {params[i]}, {grads[i]})});
            }
        }
    }
    return groups;
}

bool gradcheck_passes(const std::vector<GradCheckGroup>& groups, double tol) {
    for (const auto& g : groups) {
        if (!(g.max_rel_err < tol)) return false;
    }
    return true;
}

}  // namespace amemnet
