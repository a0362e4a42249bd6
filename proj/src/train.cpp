#include "amemnet/train.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "amemnet/rng.hpp"

namespace amemnet {

double adv_loss_value(const std::vector<double>& real_logits,
                      const std::vector<double>& fake_logits) {
    if (real_logits.empty() || real_logits.size() != fake_logits.size()) {
        throw DimensionError("adv_loss: batches must be non-empty and equal-sized");
    }
    GradTape tape;
    NodeId real = tape.leaf(Tensor::vector(std::vector<double>(real_logits)));
    NodeId fake = tape.leaf(Tensor::vector(std::vector<double>(fake_logits)));
    NodeId loss = tape.add(tape.mean_log_sigmoid(real), tape.mean_log_one_minus_sigmoid(fake));
    return tape.value(loss)[0];
}

double rec_loss_value(const Tensor& vhat, const Tensor& v) {
    if (!vhat.same_shape(v)) throw DimensionError("rec_loss: shapes differ");
    const std::size_t b = vhat.rows();
    Tensor diff = kernels::sub(vhat, v);
    return kernels::sum_all(kernels::mul(diff, diff)) / static_cast<double>(b);
}

double cls_loss_value(const Tensor& logits, const std::vector<int>& labels) {
    GradTape tape;
    NodeId l = tape.leaf(logits);
    return tape.value(tape.cross_entropy_logits(l, labels))[0];
}

void TrainConfig::validate() const {
    if (batch < 2) throw ConfigError("batch size must be at least 2 (batch norm)");
    if (d_steps < 1) throw ConfigError("d_steps must be at least 1");
    if (lr_d <= 0.0 || lr_g <= 0.0) throw ConfigError("learning rates must be positive");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must lie in [0,1)");
    if (grad_clip < 0.0) throw ConfigError("grad_clip must be nonnegative");
}

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Shared train-mode forward through encoder, addressing, write, read.
struct TrainForward {
    GradTape tape;
    EncoderLeaves enc{};
    MemoryLeaves mem{};
    DiscriminatorLeaves disc{};
    NodeId x = 0, v = 0;
    NodeId alpha = 0;
    WriteNodes write{};
    NodeId vhat = 0;
    Tensor batch_mean, batch_var;
};

TrainForward forward_train(const Model& model, const Batch& batch) {
    if (batch.x.cols() != model.cfg.d || batch.v.cols() != model.cfg.d) {
        throw DimensionError("training batch dimension does not match model");
    }
    TrainForward f;
    f.enc = encoder_leaves(f.tape, model.enc);
    f.mem = memory_leaves(f.tape, model.mem);
    f.disc = discriminator_leaves(f.tape, model.disc);
    f.x = f.tape.leaf(batch.x);
    f.v = f.tape.leaf(batch.v);
    NodeId q = encode_train(f.tape, f.enc, f.x, model.cfg, &f.batch_mean, &f.batch_var);
    f.alpha = address(f.tape, q, f.mem.Mk, model.cfg.similarity);
    f.write = write_memory(f.tape, f.mem.Mv, f.alpha, f.v, f.mem.We, f.mem.Wa);
    f.vhat = read_memory(f.tape, f.x, f.alpha, f.write.post_mv);
    return f;
}

// Side effects shared by every train-mode forward: the memory write is
// committed and BN running stats advance.
void commit_forward_state(Model& model, const TrainForward& f, std::size_t batch_size) {
    model.mem.Mv = f.tape.value(f.write.post_mv);
    update_running_stats(model.enc, f.batch_mean, f.batch_var, batch_size,
                         model.cfg.bn_momentum);
}

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw TrainingError(std::string("training aborted: non-finite ") + what);
    }
}

double logit_accuracy(const Tensor& logits, bool expect_positive) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (expect_positive ? logits[i] > 0.0 : logits[i] < 0.0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(logits.size());
}

struct DObjectiveNodes {
    // Maximized form: L_adv - lambda_cls * L_cls^v. The classification term
    // enters negatively because D descends on its own cross-entropy (it wants
    // an accurate classifier) while ascending the adversarial payoff.
    NodeId objective = 0;
    NodeId l_adv = 0;
    NodeId cls_v = 0;
    NodeId real_logits = 0, fake_logits = 0;
};

DObjectiveNodes build_d_objective(TrainForward& f, const Model& model, const Batch& batch) {
    GradTape& tape = f.tape;
    DObjectiveNodes n;
    n.real_logits = adversarial_logits(tape, f.disc, f.v);
    n.fake_logits = adversarial_logits(tape, f.disc, f.vhat);
    n.l_adv = tape.add(tape.mean_log_sigmoid(n.real_logits),
                       tape.mean_log_one_minus_sigmoid(n.fake_logits));
    n.cls_v = tape.cross_entropy_logits(classify_logits(tape, f.disc, f.v), batch.labels);
    n.objective = tape.add(n.l_adv, tape.affine_scalar(n.cls_v, -model.cfg.lambda_cls, 0.0));
    return n;
}

struct GObjectiveNodes {
    NodeId loss = 0;  // minimized form
    NodeId l_adv = 0;
    NodeId cls_x = 0;
    NodeId l_rec = 0;
    NodeId real_logits = 0, fake_logits = 0;
};

GObjectiveNodes build_g_objective(TrainForward& f, const Model& model, const Batch& batch,
                                  bool non_saturating) {
    GradTape& tape = f.tape;
    GObjectiveNodes n;
    n.real_logits = adversarial_logits(tape, f.disc, f.v);
    n.fake_logits = adversarial_logits(tape, f.disc, f.vhat);
    n.l_adv = tape.add(tape.mean_log_sigmoid(n.real_logits),
                       tape.mean_log_one_minus_sigmoid(n.fake_logits));
    n.cls_x = tape.cross_entropy_logits(classify_logits(tape, f.disc, f.vhat), batch.labels);
    NodeId diff = tape.sub(f.vhat, f.v);
    n.l_rec = tape.affine_scalar(tape.sum_all(tape.mul(diff, diff)),
                                 1.0 / static_cast<double>(batch.labels.size()), 0.0);
    NodeId adv_term = non_saturating
        ? tape.affine_scalar(tape.mean_log_sigmoid(n.fake_logits), -1.0, 0.0)
        : n.l_adv;
    n.loss = tape.add(adv_term,
                      tape.add(tape.affine_scalar(n.cls_x, model.cfg.lambda_cls, 0.0),
                               tape.affine_scalar(n.l_rec, model.cfg.lambda_rec, 0.0)));
    return n;
}

std::vector<Tensor> collect_d_grads(const TrainForward& f) {
    return {f.tape.grad(f.disc.Wcls), f.tape.grad(f.disc.bcls), f.tape.grad(f.disc.wadv),
            f.tape.grad(f.disc.badv)};
}

std::vector<Tensor> collect_g_grads(const TrainForward& f) {
    return {f.tape.grad(f.enc.W1), f.tape.grad(f.enc.b1), f.tape.grad(f.enc.gamma),
            f.tape.grad(f.enc.beta), f.tape.grad(f.enc.W2), f.tape.grad(f.enc.b2),
            f.tape.grad(f.mem.Mk), f.tape.grad(f.mem.Mv), f.tape.grad(f.mem.We),
            f.tape.grad(f.mem.Wa)};
}

double global_norm(const std::vector<Tensor>& grads) {
    double s = 0.0;
    for (const Tensor& g : grads) {
        for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * g[i];
    }
    return std::sqrt(s);
}

}  // namespace

Batch assemble_batch(const std::vector<FeatureTriplet>& triplets,
                     const std::vector<std::size_t>& order, std::size_t first,
                     std::size_t count, std::size_t dim) {
    Batch b;
    b.x = Tensor({count, dim});
    b.v = Tensor({count, dim});
    b.labels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const FeatureTriplet& t = triplets[order[first + i]];
        for (std::size_t j = 0; j < dim; ++j) {
            b.x.at(i, j) = static_cast<double>(t.partial->feature[j]);
            b.v.at(i, j) = static_cast<double>(t.full->feature[j]);
        }
        b.labels[i] = static_cast<int>(t.label);
    }
    return b;
}

StepRecord discriminator_step(Model& model, const Batch& batch, Adam& opt_d,
                              const TrainConfig&) {
    TrainForward f = forward_train(model, batch);
    GradTape& tape = f.tape;
    DObjectiveNodes n = build_d_objective(f, model, batch);
    // Ascent implemented as descent on the negated objective.
    NodeId loss = tape.affine_scalar(n.objective, -1.0, 0.0);

    StepRecord rec;
    rec.loss_adv = tape.value(n.l_adv)[0];
    rec.loss_cls_v = tape.value(n.cls_v)[0];
    rec.d_acc_real = logit_accuracy(tape.value(n.real_logits), true);
    rec.d_acc_fake = logit_accuracy(tape.value(n.fake_logits), false);
    check_finite(rec.loss_adv, "adversarial loss (D step)");
    check_finite(rec.loss_cls_v, "classification loss (D step)");

    tape.backward(loss);
    std::vector<Tensor> grads = collect_d_grads(f);
    std::vector<const Tensor*> grad_ptrs;
    grad_ptrs.reserve(grads.size());
    for (const Tensor& g : grads) grad_ptrs.push_back(&g);
    opt_d.step(model.discriminator_params(), grad_ptrs);
    commit_forward_state(model, f, batch.labels.size());
    return rec;
}

StepRecord generator_step(Model& model, const Batch& batch, SgdMomentum& opt_g,
                          const TrainConfig& tcfg) {
    TrainForward f = forward_train(model, batch);
    GradTape& tape = f.tape;
    GObjectiveNodes n = build_g_objective(f, model, batch, tcfg.non_saturating);

    StepRecord rec;
    rec.loss_adv = tape.value(n.l_adv)[0];
    rec.loss_cls_x = tape.value(n.cls_x)[0];
    rec.loss_rec = tape.value(n.l_rec)[0];
    check_finite(rec.loss_adv, "adversarial loss (G step)");
    check_finite(rec.loss_cls_x, "classification loss (G step)");
    check_finite(rec.loss_rec, "reconstruction loss (G step)");

    tape.backward(n.loss);
    std::vector<Tensor> grads = collect_g_grads(f);
    if (tcfg.grad_clip > 0.0) {
        const double norm = global_norm(grads);
        if (norm > tcfg.grad_clip) {
            const double scale = tcfg.grad_clip / norm;
            for (Tensor& g : grads) {
                for (std::size_t i = 0; i < g.size(); ++i) g[i] *= scale;
            }
        }
    }

    // Commit the write before the update so the Mv gradient (taken w.r.t.
    // the pre-write matrix) lands on the post-write state.
    commit_forward_state(model, f, batch.labels.size());
    std::vector<const Tensor*> grad_ptrs;
    grad_ptrs.reserve(grads.size());
    for (const Tensor& g : grads) grad_ptrs.push_back(&g);
    opt_g.step(model.generator_params(), grad_ptrs);
    return rec;
}

double d_objective(const Model& model, const Batch& batch, std::vector<Tensor>* grads) {
    TrainForward f = forward_train(model, batch);
    DObjectiveNodes n = build_d_objective(f, model, batch);
    if (grads) {
        f.tape.backward(n.objective);
        *grads = collect_d_grads(f);
    }
    return f.tape.value(n.objective)[0];
}

double g_objective(const Model& model, const Batch& batch, bool non_saturating,
                   std::vector<Tensor>* grads) {
    TrainForward f = forward_train(model, batch);
    GObjectiveNodes n = build_g_objective(f, model, batch, non_saturating);
    if (grads) {
        f.tape.backward(n.loss);
        *grads = collect_g_grads(f);
    }
    return f.tape.value(n.loss)[0];
}

Model train(const FeatureDataset& ds, const ModelConfig& mcfg, const TrainConfig& tcfg,
            TrainReport* report) {
    tcfg.validate();
    if (ds.dim != mcfg.d) {
        throw ConfigError("dataset dim " + std::to_string(ds.dim) +
                          " does not match model d " + std::to_string(mcfg.d));
    }
    if (ds.classes != mcfg.classes) {
        throw ConfigError("dataset class count does not match model");
    }
    if (ds.train_ids.empty()) throw ConfigError("dataset has no training ids");

    Model model = Model::init(mcfg, tcfg.seed);
    std::vector<FeatureTriplet> triplets = build_triplets(ds, ds.train_ids);
    if (triplets.size() < tcfg.batch * (tcfg.d_steps + 1)) {
        throw ConfigError("training set too small for one step at this batch size");
    }

    Adam opt_d(tcfg.lr_d);
    SgdMomentum opt_g(tcfg.lr_g, tcfg.momentum);
    Rng shuffle_rng(Rng::derive_seed(tcfg.seed, 0x747261696eULL));  // "train" stream

    std::vector<std::size_t> order(triplets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    const std::size_t batches_per_step = tcfg.d_steps + 1;
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < tcfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        const std::size_t steps_in_epoch =
            triplets.size() / (tcfg.batch * batches_per_step);
        for (std::size_t s = 0; s < steps_in_epoch; ++s) {
            const std::size_t base = s * tcfg.batch * batches_per_step;
            StepRecord d_rec;
            for (std::size_t k = 0; k < tcfg.d_steps; ++k) {
                Batch b = assemble_batch(triplets, order, base + k * tcfg.batch,
                                         tcfg.batch, ds.dim);
                d_rec = discriminator_step(model, b, opt_d, tcfg);
            }
            Batch gb = assemble_batch(triplets, order, base + tcfg.d_steps * tcfg.batch,
                                      tcfg.batch, ds.dim);
            StepRecord g_rec = generator_step(model, gb, opt_g, tcfg);
            if (report) {
                StepRecord row = g_rec;
                row.step = step;
                row.loss_cls_v = d_rec.loss_cls_v;
                row.d_acc_real = d_rec.d_acc_real;
                row.d_acc_fake = d_rec.d_acc_fake;
                report->rows.push_back(row);
            }
            ++step;
        }
    }
    return model;
}

void TrainReport::write_csv(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot write " + path.string());
    os << "step,loss_adv,loss_rec,loss_cls_v,loss_cls_x,d_acc_real,d_acc_fake\n";
    for (const StepRecord& r : rows) {
        os << r.step << ',' << format_double(r.loss_adv) << ',' << format_double(r.loss_rec)
           << ',' << format_double(r.loss_cls_v) << ',' << format_double(r.loss_cls_x)
           << ',' << format_double(r.d_acc_real) << ',' << format_double(r.d_acc_fake)
           << '\n';
    }
}

TrainReport TrainReport::read_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot read " + path.string());
    TrainReport report;
    std::string line;
    if (!std::getline(is, line)) throw FormatError("empty train report: " + path.string());
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        StepRecord r;
        auto next = [&]() {
            if (!std::getline(row, cell, ',')) {
                throw FormatError("malformed train report row: " + line);
            }
            return cell;
        };
        r.step = std::stoul(next());
        r.loss_adv = std::stod(next());
        r.loss_rec = std::stod(next());
        r.loss_cls_v = std::stod(next());
        r.loss_cls_x = std::stod(next());
        r.d_acc_real = std::stod(next());
        r.d_acc_fake = std::stod(next());
        report.rows.push_back(r);
    }
    return report;
}

LinearClassifier train_linear_classifier(const Tensor& features,
                                         const std::vector<int>& labels,
                                         std::size_t classes, std::size_t epochs,
                                         std::size_t batch, double lr,
                                         std::uint64_t seed) {
    const std::size_t n = features.rows();
    const std::size_t d = features.cols();
    if (labels.size() != n) throw DimensionError("classifier: label count mismatch");

    LinearClassifier clf;
    {
        Rng rng(Rng::derive_seed(seed, 0x636c66ULL));
        clf.W = Tensor({classes, d});
        const double bound = std::sqrt(6.0 / static_cast<double>(classes + d));
        for (std::size_t i = 0; i < clf.W.size(); ++i) clf.W[i] = rng.uniform(-bound, bound);
        clf.b = Tensor({classes});
    }

    Adam opt(lr);
    Rng shuffle_rng(Rng::derive_seed(seed, 0x636c6673ULL));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t base = 0; base + batch <= n; base += batch) {
            Tensor xb({batch, d});
            std::vector<int> yb(batch);
            for (std::size_t i = 0; i < batch; ++i) {
                const std::size_t src = order[base + i];
                for (std::size_t j = 0; j < d; ++j) xb.at(i, j) = features.at(src, j);
                yb[i] = labels[src];
            }
            GradTape tape;
            NodeId w = tape.leaf(clf.W);
            NodeId b = tape.leaf(clf.b);
            NodeId x = tape.leaf(xb);
            NodeId loss = tape.cross_entropy_logits(
                tape.add_row(tape.matmul_nt(x, w), b), yb);
            check_finite(tape.value(loss)[0], "classifier loss");
            tape.backward(loss);
            std::vector<Tensor*> params = {&clf.W, &clf.b};
            std::vector<const Tensor*> grads = {&tape.grad(w), &tape.grad(b)};
            opt.step(params, grads);
        }
    }
    return clf;
}

Tensor classifier_probs(const LinearClassifier& clf, const Tensor& features) {
    return kernels::softmax_rows(
        kernels::add_row(kernels::matmul_nt(features, clf.W), clf.b));
}

}  // namespace amemnet
