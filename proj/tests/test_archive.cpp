#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "amemnet/archive.hpp"
#include "amemnet/evaluate.hpp"
#include "amemnet/rng.hpp"

using namespace amemnet;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ModelConfig small_cfg() {
    ModelConfig cfg;
    cfg.d = 10;
    cfg.hidden = 6;
    cfg.h = 4;
    cfg.slots = 5;
    cfg.classes = 3;
    cfg.similarity = Similarity::NegL2;
    cfg.lambda_cls = 0.5;
    cfg.lambda_rec = 0.25;
    return cfg;
}

bool same_params(const Model& a, const Model& b) {
    auto ta = a.named_tensors();
    auto tb = b.named_tensors();
    if (ta.size() != tb.size()) return false;
    for (std::size_t i = 0; i < ta.size(); ++i) {
        if (ta[i].first != tb[i].first) return false;
        if (!ta[i].second->same_shape(*tb[i].second)) return false;
        for (std::size_t j = 0; j < ta[i].second->size(); ++j) {
            if ((*ta[i].second)[j] != (*tb[i].second)[j]) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("model archive round-trips bit-exactly after f32 quantization") {
    Model m = quantize_f32(Model::init(small_cfg(), 501));
    const fs::path dir = temp_dir("amemnet_model_roundtrip");
    save_model(m, dir);
    Model back = load_model(dir);
    CHECK(back.cfg.d == m.cfg.d);
    CHECK(back.cfg.hidden == m.cfg.hidden);
    CHECK(back.cfg.h == m.cfg.h);
    CHECK(back.cfg.slots == m.cfg.slots);
    CHECK(back.cfg.classes == m.cfg.classes);
    CHECK(back.cfg.similarity == m.cfg.similarity);
    CHECK(back.cfg.lambda_cls == m.cfg.lambda_cls);
    CHECK(back.cfg.lambda_rec == m.cfg.lambda_rec);
    CHECK(same_params(m, back));

    // Saving the loaded model again changes nothing (quantization idempotent).
    const fs::path dir2 = temp_dir("amemnet_model_roundtrip2");
    save_model(back, dir2);
    CHECK(same_params(back, load_model(dir2)));
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("a payload shorter than the metadata promises is rejected") {
    Model m = Model::init(small_cfg(), 502);
    const fs::path dir = temp_dir("amemnet_model_truncated");
    save_model(m, dir);
    // Drop one value slot row's worth of bytes from the end of the payload.
    const auto full = fs::file_size(dir / "model.bin");
    fs::resize_file(dir / "model.bin", full - 4 * m.cfg.d);
    CHECK_THROWS_AS(load_model(dir), FormatError);
    fs::remove_all(dir);
}

TEST_CASE("archives with missing or unknown tensors are rejected") {
    Model m = Model::init(small_cfg(), 503);
    const fs::path dir = temp_dir("amemnet_model_badmeta");
    save_model(m, dir);

    // Rewrite model.meta without the value-memory index line.
    std::vector<std::string> lines;
    {
        std::ifstream is(dir / "model.meta");
        std::string line;
        while (std::getline(is, line)) {
            if (line.find("mem.Mv") == std::string::npos) lines.push_back(line);
        }
    }
    {
        std::ofstream os(dir / "model.meta");
        for (const std::string& line : lines) os << line << "\n";
    }
    CHECK_THROWS_AS(load_model(dir), FormatError);
    fs::remove_all(dir);
}

TEST_CASE("predictions are identical before and after a round trip") {
    Model m = quantize_f32(Model::init(small_cfg(), 504));
    const fs::path dir = temp_dir("amemnet_model_predict");
    save_model(m, dir);
    Model back = load_model(dir);

    Rng rng(505);
    Tensor x({100, m.cfg.d});
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.normal();
    Tensor p1 = predict_probs(m, x);
    Tensor p2 = predict_probs(back, x);
    REQUIRE(p1.same_shape(p2));
    for (std::size_t i = 0; i < p1.size(); ++i) CHECK(p1[i] == p2[i]);
    fs::remove_all(dir);
}
