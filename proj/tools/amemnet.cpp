#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "amemnet/archive.hpp"
#include "amemnet/config.hpp"
#include "amemnet/dataset.hpp"
#include "amemnet/evaluate.hpp"
#include "amemnet/gradcheck_suite.hpp"
#include "amemnet/train.hpp"

namespace fs = std::filesystem;
using namespace amemnet;

namespace {

RunConfig resolve_config(const std::string& config_path,
                         const std::vector<std::string>& overrides) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const std::string& o : overrides) apply_override(cfg, o);
    return cfg;
}

int cmd_synth(const RunConfig& cfg, const std::string& out_dir) {
    auto [rgb, flow] = generate_synthetic(cfg.synth_config());
    save_dataset(rgb, fs::path(out_dir) / "rgb");
    save_dataset(flow, fs::path(out_dir) / "flow");
    std::cout << "wrote " << rgb.records().size() << " records per stream to " << out_dir
              << " (streams rgb, flow)\n";
    return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& data_dir,
              const std::string& out_dir) {
    FeatureDataset ds = load_dataset(data_dir);
    TrainReport report;
    Model model = train(ds, cfg.model_config(), cfg.train_config(), &report);
    fs::create_directories(out_dir);
    save_model(model, out_dir);
    report.write_csv(fs::path(out_dir) / "train_report.csv");
    std::cout << "trained " << report.rows.size() << " steps on stream '" << ds.stream
              << "', model saved to " << out_dir << "\n";
    return 0;
}

int cmd_eval(const std::string& data_dir, const std::string& model_dir,
             const std::string& report_path, const std::string& scores_path) {
    FeatureDataset ds = load_dataset(data_dir);
    Model model = load_model(model_dir);
    EvalResult result = evaluate_by_ratio(ds, ds.test_ids, model);
    write_report_csv(result.accuracy, ds.progress, report_path);
    if (!scores_path.empty()) write_scores_csv(result.scores, scores_path);
    std::cout << "evaluated " << ds.test_ids.size() << " samples over " << ds.progress
              << " ratios; accuracy at full observation: "
              << result.accuracy.back() << "\n";
    return 0;
}

int cmd_fuse(const std::string& rgb_path, const std::string& flow_path, double beta,
             const std::string& report_path, const std::string& scores_path) {
    ScoreTable rgb = read_scores_csv(rgb_path);
    ScoreTable flow = read_scores_csv(flow_path);
    FusionResult fused = fuse_streams(rgb, flow, beta);
    write_report_csv(fused.accuracy, fused.accuracy.size(), report_path);
    if (!scores_path.empty()) write_scores_csv(fused.table, scores_path);
    std::cout << "fused " << fused.table.rows.size() << " rows with beta=" << beta << "\n";
    return 0;
}

int cmd_gradcheck(std::uint64_t seed) {
    const auto groups = run_gradcheck_suite(seed);
    for (const auto& g : groups) {
        std::printf("%-32s max rel err %.3e\n", g.name.c_str(), g.max_rel_err);
    }
    if (!gradcheck_passes(groups)) {
        std::cerr << "gradcheck FAILED: at least one group exceeds 1e-4\n";
        return 1;
    }
    std::cout << "gradcheck passed (" << groups.size() << " groups, tolerance 1e-4)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AMemNet: memory-augmented adversarial action prediction on "
                 "precomputed feature vectors"};
    app.require_subcommand(1);

    std::string config_path, data_dir, out_dir, model_dir;
    std::string report_path, scores_path, rgb_path, flow_path;
    std::vector<std::string> overrides;
    std::uint64_t seed = 1;
    bool seed_given = false;
    std::size_t epochs = 0;
    bool epochs_given = false;
    double beta = 1.5;

    auto* synth = app.add_subcommand("synth", "Generate the two-stream synthetic benchmark");
    synth->add_option("--config", config_path, "key=value config file");
    synth->add_option("--out", out_dir, "output directory (rgb/ and flow/ subdirs)")
        ->required();
    synth->add_option("--set", overrides, "config override key=value (repeatable)");
    synth->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { seed_given = true; });

    auto* train_cmd = app.add_subcommand("train", "Train one stream");
    train_cmd->add_option("--data", data_dir, "dataset directory")->required();
    train_cmd->add_option("--config", config_path, "key=value config file");
    train_cmd->add_option("--out", out_dir, "model output directory")->required();
    train_cmd->add_option("--set", overrides, "config override key=value (repeatable)");
    train_cmd->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { seed_given = true; });
    train_cmd->add_option("--epochs", epochs, "override the config epoch count")
        ->each([&](const std::string&) { epochs_given = true; });

    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model per observation ratio");
    eval_cmd->add_option("--data", data_dir, "dataset directory")->required();
    eval_cmd->add_option("--model", model_dir, "model directory")->required();
    eval_cmd->add_option("--report", report_path, "accuracy CSV output")->required();
    eval_cmd->add_option("--scores", scores_path, "per-sample score CSV output");

    auto* fuse_cmd = app.add_subcommand("fuse", "Late-fuse two streams' score tables");
    fuse_cmd->add_option("--rgb", rgb_path, "RGB-stream scores CSV")->required();
    fuse_cmd->add_option("--flow", flow_path, "flow-stream scores CSV")->required();
    fuse_cmd->add_option("--beta", beta, "fusion weight");
    fuse_cmd->add_option("--report", report_path, "fused accuracy CSV output")->required();
    fuse_cmd->add_option("--scores", scores_path, "fused score CSV output");

    auto* gradcheck_cmd =
        app.add_subcommand("gradcheck", "Finite-difference gradient suite on a tiny model");
    gradcheck_cmd->add_option("--seed", seed, "randomization seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gradcheck_cmd->parsed()) return cmd_gradcheck(seed);
        if (eval_cmd->parsed()) return cmd_eval(data_dir, model_dir, report_path, scores_path);
        if (fuse_cmd->parsed()) return cmd_fuse(rgb_path, flow_path, beta, report_path,
                                                scores_path);
        RunConfig cfg = resolve_config(config_path, overrides);
        if (seed_given) cfg.seed = seed;
        if (epochs_given) cfg.epochs = epochs;
        if (synth->parsed()) return cmd_synth(cfg, out_dir);
        if (train_cmd->parsed()) return cmd_train(cfg, data_dir, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
