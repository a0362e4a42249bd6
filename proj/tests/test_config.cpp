#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "amemnet/config.hpp"

using namespace amemnet;
namespace fs = std::filesystem;

TEST_CASE("defaults match the reference setup") {
    RunConfig cfg;
    CHECK(cfg.d == 1024);
    CHECK(cfg.hidden == 512);
    CHECK(cfg.h == 256);
    CHECK(cfg.slots == 512);
    CHECK(cfg.batch == 64);
    CHECK(cfg.d_steps == 2);
    CHECK(cfg.lr_d == 1e-4);
    CHECK(cfg.lr_g == 1e-4);
    CHECK(cfg.momentum == 0.9);
    CHECK(cfg.lambda_cls == 1.0);
    CHECK(cfg.lambda_rec == 0.1);
    CHECK(cfg.beta == 1.5);
    CHECK(cfg.progress == 10);
    CHECK(cfg.similarity == "dot");
}

TEST_CASE("set parses every key type and rejects unknown keys") {
    RunConfig cfg;
    cfg.set("slots", "64");
    CHECK(cfg.slots == 64);
    cfg.set("lr_g", "0.001");
    CHECK(cfg.lr_g == doctest::Approx(0.001));
    cfg.set("similarity", "neg_l2");
    CHECK(cfg.similarity == "neg_l2");
    cfg.set("non_saturating", "true");
    CHECK(cfg.non_saturating);
    cfg.set("non_saturating", "off");
    CHECK(!cfg.non_saturating);

    CHECK_THROWS_AS(cfg.set("learning_rate", "0.1"), ConfigError);
    CHECK_THROWS_AS(cfg.set("slots", "many"), ConfigError);
    CHECK_THROWS_AS(cfg.set("lr_g", "fast"), ConfigError);
    CHECK_THROWS_AS(cfg.set("non_saturating", "maybe"), ConfigError);
}

TEST_CASE("config files support comments and blank lines") {
    const fs::path path = fs::temp_directory_path() / "amemnet_test_config.txt";
    {
        std::ofstream os(path);
        os << "# desk-scale run\n"
           << "\n"
           << "d=64\n"
           << "classes=8\n"
           << "slots=64  # trailing comment\n"
           << "epochs=5\n";
    }
    RunConfig cfg = load_config(path);
    CHECK(cfg.d == 64);
    CHECK(cfg.classes == 8);
    CHECK(cfg.slots == 64);
    CHECK(cfg.epochs == 5);
    CHECK(cfg.batch == 64);  // untouched default
    fs::remove(path);
}

TEST_CASE("malformed config lines carry their line number") {
    const fs::path path = fs::temp_directory_path() / "amemnet_bad_config.txt";
    {
        std::ofstream os(path);
        os << "d=64\n"
           << "not an assignment\n";
    }
    try {
        load_config(path);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
    fs::remove(path);
    CHECK_THROWS_AS(load_config(path), ConfigError);  // now missing
}

TEST_CASE("overrides apply on top of file values") {
    RunConfig cfg;
    apply_override(cfg, "epochs=42");
    CHECK(cfg.epochs == 42);
    apply_override(cfg, "lambda_rec=0.01");
    CHECK(cfg.lambda_rec == doctest::Approx(0.01));
    CHECK_THROWS_AS(apply_override(cfg, "epochs"), ConfigError);
}

TEST_CASE("derived configs inherit and validate run settings") {
    RunConfig cfg;
    cfg.d = 32;
    cfg.classes = 4;
    cfg.slots = 16;
    cfg.similarity = "neg_l2";
    cfg.lambda_rec = 0.5;
    cfg.seed = 77;

    ModelConfig mcfg = cfg.model_config();
    CHECK(mcfg.d == 32);
    CHECK(mcfg.slots == 16);
    CHECK(mcfg.similarity == Similarity::NegL2);
    CHECK(mcfg.lambda_rec == 0.5);

    TrainConfig tcfg = cfg.train_config();
    CHECK(tcfg.seed == 77);
    CHECK(tcfg.batch == 64);

    SynthConfig scfg = cfg.synth_config();
    CHECK(scfg.d == 32);
    CHECK(scfg.classes == 4);
    CHECK(scfg.seed == 77);

    cfg.similarity = "cosine";
    CHECK_THROWS_AS(cfg.model_config(), ConfigError);
    cfg.similarity = "dot";
    cfg.lambda_cls = -1.0;
    CHECK_THROWS_AS(cfg.model_config(), ConfigError);
    cfg.lambda_cls = 1.0;
    cfg.batch = 1;
    CHECK_THROWS_AS(cfg.train_config(), ConfigError);
    cfg.batch = 64;
    cfg.ramp = 0.0;
    CHECK_THROWS_AS(cfg.synth_config(), ConfigError);
}
