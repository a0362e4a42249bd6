#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "amemnet/gradcheck_suite.hpp"
#include "amemnet/rng.hpp"
#include "amemnet/train.hpp"

using namespace amemnet;
namespace fs = std::filesystem;

namespace {

ModelConfig small_cfg() {
    ModelConfig cfg;
    cfg.d = 8;
    cfg.hidden = 6;
    cfg.h = 4;
    cfg.slots = 4;
    cfg.classes = 2;
    return cfg;
}

SynthConfig small_synth(std::uint64_t seed) {
    SynthConfig cfg;
    cfg.d = 8;
    cfg.classes = 2;
    cfg.progress = 4;
    cfg.train_per_class = 12;
    cfg.test_per_class = 2;
    cfg.seed = seed;
    return cfg;
}

// Real features cluster at +mu, partial inputs at -mu: trivially separable.
Batch separable_batch(Rng& rng, std::size_t b, std::size_t d) {
    Batch batch;
    batch.x = Tensor({b, d});
    batch.v = Tensor({b, d});
    batch.labels.resize(b);
    for (std::size_t r = 0; r < b; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            batch.v.at(r, c) = 3.0 + 0.1 * rng.normal();
            batch.x.at(r, c) = -3.0 + 0.1 * rng.normal();
        }
        batch.labels[r] = static_cast<int>(rng.next_below(2));
    }
    return batch;
}

}  // namespace

TEST_CASE("finite-difference suite passes for both objectives and similarities") {
    const auto groups = run_gradcheck_suite(1);
    CHECK(!groups.empty());
    for (const auto& g : groups) {
        INFO(g.name, " max rel err ", g.max_rel_err);
        CHECK(g.max_rel_err < 1e-4);
    }
    CHECK(gradcheck_passes(groups));
}

TEST_CASE("discriminator separates an obviously bad frozen generator") {
    ModelConfig mcfg = small_cfg();
    Model model = Model::init(mcfg, 301);
    TrainConfig tcfg;
    tcfg.batch = 8;
    Adam opt_d(1e-2);
    Rng rng(302);

    StepRecord rec;
    for (int i = 0; i < 200; ++i) {
        Batch b = separable_batch(rng, 8, mcfg.d);
        rec = discriminator_step(model, b, opt_d, tcfg);
    }
    CHECK(rec.d_acc_real > 0.95);
    CHECK(rec.d_acc_fake > 0.95);
}

TEST_CASE("generator steps against a flat critic shrink the reconstruction loss") {
    ModelConfig mcfg = small_cfg();
    mcfg.lambda_cls = 0.0;
    mcfg.lambda_rec = 1.0;
    Model model = Model::init(mcfg, 303);
    for (std::size_t i = 0; i < model.disc.wadv.size(); ++i) model.disc.wadv[i] = 0.0;
    model.disc.badv[0] = 0.0;

    Rng rng(304);
    Batch batch;
    batch.x = Tensor({6, mcfg.d});
    batch.v = Tensor({6, mcfg.d});
    batch.labels.assign(6, 0);
    for (std::size_t i = 0; i < batch.x.size(); ++i) {
        batch.x[i] = rng.normal();
        batch.v[i] = rng.normal();
    }

    TrainConfig tcfg;
    SgdMomentum opt_g(5e-3, 0.9);
    std::vector<double> rec_losses;
    for (int i = 0; i < 500; ++i) {
        rec_losses.push_back(generator_step(model, batch, opt_g, tcfg).loss_rec);
    }
    auto window_mean = [&](std::size_t first) {
        double s = 0.0;
        for (std::size_t i = first; i < first + 20; ++i) s += rec_losses[i];
        return s / 20.0;
    };
    const double early = window_mean(0);
    const double late = window_mean(rec_losses.size() - 20);
    INFO("early ", early, " late ", late);
    CHECK(late <= 0.5 * early);
}

TEST_CASE("zero epochs returns the initialized model bit-exactly") {
    auto [rgb, flow] = generate_synthetic(small_synth(305));
    ModelConfig mcfg = small_cfg();
    TrainConfig tcfg;
    tcfg.batch = 4;
    tcfg.epochs = 0;
    tcfg.seed = 9;
    Model trained = train(rgb, mcfg, tcfg);
    Model fresh = Model::init(mcfg, 9);
    auto a = trained.named_tensors();
    auto b = fresh.named_tensors();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].second->same_shape(*b[i].second));
        for (std::size_t j = 0; j < a[i].second->size(); ++j) {
            CHECK((*a[i].second)[j] == (*b[i].second)[j]);
        }
    }
}

TEST_CASE("training is bit-deterministic for a fixed seed") {
    auto [rgb, flow] = generate_synthetic(small_synth(306));
    ModelConfig mcfg = small_cfg();
    TrainConfig tcfg;
    tcfg.batch = 4;
    tcfg.epochs = 2;
    tcfg.seed = 11;

    TrainReport rep1, rep2;
    Model m1 = train(rgb, mcfg, tcfg, &rep1);
    Model m2 = train(rgb, mcfg, tcfg, &rep2);
    auto a = m1.named_tensors();
    auto b = m2.named_tensors();
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].second->size(); ++j) {
            CHECK((*a[i].second)[j] == (*b[i].second)[j]);
        }
    }
    REQUIRE(rep1.rows.size() == rep2.rows.size());
    REQUIRE(!rep1.rows.empty());
    for (std::size_t i = 0; i < rep1.rows.size(); ++i) {
        CHECK(rep1.rows[i].loss_adv == rep2.rows[i].loss_adv);
        CHECK(rep1.rows[i].loss_rec == rep2.rows[i].loss_rec);
    }
}

TEST_CASE("a short synthetic run keeps every logged loss finite") {
    auto [rgb, flow] = generate_synthetic(small_synth(307));
    ModelConfig mcfg = small_cfg();
    TrainConfig tcfg;
    tcfg.batch = 4;
    tcfg.epochs = 2;
    TrainReport report;
    train(rgb, mcfg, tcfg, &report);
    REQUIRE(!report.rows.empty());
    for (const StepRecord& r : report.rows) {
        CHECK(std::isfinite(r.loss_adv));
        CHECK(std::isfinite(r.loss_rec));
        CHECK(std::isfinite(r.loss_cls_v));
        CHECK(std::isfinite(r.loss_cls_x));
    }
}

TEST_CASE("train report survives a CSV round trip") {
    TrainReport report;
    for (std::size_t i = 0; i < 3; ++i) {
        StepRecord r;
        r.step = i;
        r.loss_adv = -1.386294361119890572 + 0.001 * static_cast<double>(i);
        r.loss_rec = 17.25 / (1.0 + static_cast<double>(i));
        r.loss_cls_v = 0.693;
        r.loss_cls_x = 1.1e-7;
        r.d_acc_real = 0.75;
        r.d_acc_fake = 0.5;
        report.rows.push_back(r);
    }
    const fs::path path = fs::temp_directory_path() / "amemnet_report_roundtrip.csv";
    report.write_csv(path);
    TrainReport back = TrainReport::read_csv(path);
    REQUIRE(back.rows.size() == report.rows.size());
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        CHECK(back.rows[i].step == report.rows[i].step);
        CHECK(back.rows[i].loss_adv == report.rows[i].loss_adv);
        CHECK(back.rows[i].loss_rec == report.rows[i].loss_rec);
        CHECK(back.rows[i].loss_cls_v == report.rows[i].loss_cls_v);
        CHECK(back.rows[i].loss_cls_x == report.rows[i].loss_cls_x);
        CHECK(back.rows[i].d_acc_real == report.rows[i].d_acc_real);
        CHECK(back.rows[i].d_acc_fake == report.rows[i].d_acc_fake);
    }
    fs::remove(path);
}

TEST_CASE("train config validation rejects bad hyperparameters") {
    TrainConfig tcfg;
    tcfg.batch = 1;
    CHECK_THROWS_AS(tcfg.validate(), ConfigError);
    tcfg = TrainConfig{};
    tcfg.d_steps = 0;
    CHECK_THROWS_AS(tcfg.validate(), ConfigError);
    tcfg = TrainConfig{};
    tcfg.lr_g = 0.0;
    CHECK_THROWS_AS(tcfg.validate(), ConfigError);
    tcfg = TrainConfig{};
    tcfg.momentum = 1.0;
    CHECK_THROWS_AS(tcfg.validate(), ConfigError);
}

TEST_CASE("assemble_batch picks triplets in the given order") {
    auto [rgb, flow] = generate_synthetic(small_synth(308));
    auto triplets = build_triplets(rgb, rgb.train_ids);
    REQUIRE(triplets.size() >= 4);
    std::vector<std::size_t> order = {2, 0, 3, 1};
    Batch b = assemble_batch(triplets, order, 1, 2, rgb.dim);
    CHECK(b.labels[0] == static_cast<int>(triplets[0].label));
    CHECK(b.labels[1] == static_cast<int>(triplets[3].label));
    for (std::size_t j = 0; j < rgb.dim; ++j) {
        CHECK(b.x.at(0, j) == static_cast<double>(triplets[0].partial->feature[j]));
        CHECK(b.v.at(1, j) == static_cast<double>(triplets[3].full->feature[j]));
    }
}
