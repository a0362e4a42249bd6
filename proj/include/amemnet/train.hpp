#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "amemnet/dataset.hpp"
#include "amemnet/discriminator.hpp"
#include "amemnet/encoder.hpp"
#include "amemnet/memory.hpp"
#include "amemnet/model.hpp"
#include "amemnet/optim.hpp"

namespace amemnet {

// ---- loss values (scalar, logit-space where it matters) ----

// mean_b log sigmoid(real_b) + mean_b log(1 - sigmoid(fake_b))
double adv_loss_value(const std::vector<double>& real_logits,
                      const std::vector<double>& fake_logits);

// mean_b ||vhat_b - v_b||^2
double rec_loss_value(const Tensor& vhat, const Tensor& v);

// mean cross-entropy via log-softmax of logits
double cls_loss_value(const Tensor& logits, const std::vector<int>& labels);

// ---- training ----

struct TrainConfig {
    std::size_t batch = 64;
    std::size_t d_steps = 2;  // D updates per G update
    std::size_t epochs = 0;
    double lr_d = 1e-4;       // Adam
    double lr_g = 1e-4;       // SGD
    double momentum = 0.9;
    std::uint64_t seed = 1;
    bool non_saturating = false;
    double grad_clip = 0.0;   // global-norm clip for G; 0 disables

    void validate() const;
};

struct StepRecord {
    std::size_t step = 0;
    double loss_adv = 0.0;
    double loss_rec = 0.0;
    double loss_cls_v = 0.0;
    double loss_cls_x = 0.0;
    double d_acc_real = 0.0;
    double d_acc_fake = 0.0;
};

// Column order: step,loss_adv,loss_rec,loss_cls_v,loss_cls_x,d_acc_real,d_acc_fake
struct TrainReport {
    std::vector<StepRecord> rows;

    void write_csv(const std::filesystem::path& path) const;
    static TrainReport read_csv(const std::filesystem::path& path);
};

struct Batch {
    Tensor x;                 // B x d partial features
    Tensor v;                 // B x d full features
    std::vector<int> labels;  // length B
};

Batch assemble_batch(const std::vector<FeatureTriplet>& triplets,
                     const std::vector<std::size_t>& order, std::size_t first,
                     std::size_t count, std::size_t dim);

// One D update: Adam ascent on Ladv - lambda_cls * Lcls(real v) over theta_D
// only (the adversarial payoff is maximized, the classifier's cross-entropy
// minimized). The forward writes memory (committed) and updates BN running
// stats; no generator parameter receives an optimizer update.
StepRecord discriminator_step(Model& model, const Batch& batch, Adam& opt_d,
                              const TrainConfig& tcfg);

// One G update: SGD-momentum descent on Ladv + lambda_cls * Lcls(v_hat) +
// lambda_rec * Lrec over theta_G; theta_D frozen. The memory write is
// committed first; the Mv gradient (w.r.t. the pre-write matrix) is applied
// to the post-write matrix.
StepRecord generator_step(Model& model, const Batch& batch, SgdMomentum& opt_g,
                          const TrainConfig& tcfg);

// Pure objective evaluations (no state commit), shared with the gradient
// suite. Gradients, when requested, come back in discriminator_params() /
// generator_params() order; the Mv gradient is w.r.t. the pre-write matrix.
double d_objective(const Model& model, const Batch& batch,
                   std::vector<Tensor>* grads = nullptr);
double g_objective(const Model& model, const Batch& batch, bool non_saturating = false,
                   std::vector<Tensor>* grads = nullptr);

// Full alternating driver: per step, d_steps independent batches for D then
// one fresh batch for G. Deterministic for a fixed seed.
Model train(const FeatureDataset& ds, const ModelConfig& mcfg, const TrainConfig& tcfg,
            TrainReport* report = nullptr);

// Plain softmax head trained with Adam; the ablation baseline.
struct LinearClassifier {
    Tensor W;  // K x d
    Tensor b;  // K
};

LinearClassifier train_linear_classifier(const Tensor& features,
                                         const std::vector<int>& labels,
                                         std::size_t classes, std::size_t epochs,
                                         std::size_t batch, double lr,
                                         std::uint64_t seed);

Tensor classifier_probs(const LinearClassifier& clf, const Tensor& features);

}  // namespace amemnet
