#pragma once

#include <filesystem>
#include <string>

#include "amemnet/dataset.hpp"
#include "amemnet/model.hpp"
#include "amemnet/train.hpp"

namespace amemnet {

// Flat key=value run configuration. Unknown keys are rejected. Defaults
// follow the reference setup where one exists; synthetic-data fields default
// to the desk-scale benchmark.
struct RunConfig {
    // architecture
    std::size_t d = 1024;
    std::size_t hidden = 512;
    std::size_t h = 256;
    std::size_t slots = 512;
    std::size_t classes = 8;
    std::string similarity = "dot";
    double lambda_cls = 1.0;
    double lambda_rec = 0.1;

    // training
    std::size_t batch = 64;
    std::size_t d_steps = 2;
    std::size_t epochs = 30;
    double lr_d = 1e-4;
    double lr_g = 1e-4;
    double momentum = 0.9;
    std::uint64_t seed = 1;
    bool non_saturating = false;
    double grad_clip = 0.0;

    // synthetic data
    std::size_t progress = 10;
    std::size_t train_per_class = 100;
    std::size_t test_per_class = 50;
    double sigma_v = 0.1;
    double sigma_x = 0.2;
    double ramp = 1.0;

    // fusion
    double beta = 1.5;

    void set(const std::string& key, const std::string& value);

    ModelConfig model_config() const;
    TrainConfig train_config() const;
    SynthConfig synth_config() const;
};

// Parses `key=value` lines; '#' starts a comment; blank lines ignored.
RunConfig load_config(const std::filesystem::path& path);

// Applies a "key=value" override string.
void apply_override(RunConfig& cfg, const std::string& assignment);

}  // namespace amemnet
