#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "amemnet/dataset.hpp"
#include "amemnet/model.hpp"

namespace amemnet {

struct ScoreRow {
    std::uint32_t sample_id = 0;
    std::size_t p = 0;
    std::uint16_t label = 0;
    std::vector<double> scores;  // length K
};

// One row per (sample_id, p), sorted by that key.
struct ScoreTable {
    std::size_t classes = 0;
    std::vector<ScoreRow> rows;
};

// Eval-mode pipeline D_cls(G_mem(f_q(x))): running-stat batch norm, frozen
// value memory, no writes. Pure; rows of the result are simplex points.
Tensor predict_probs(const Model& model, const Tensor& x_batch);

// Ties broken toward the lowest class index.
std::size_t argmax_class(const std::vector<double>& scores);

struct EvalResult {
    std::vector<double> accuracy;  // length P, index p-1
    ScoreTable scores;
};

// Per-progress accuracy over the given sample ids (typically the test split).
EvalResult evaluate_by_ratio(const FeatureDataset& ds, const std::vector<std::uint32_t>& ids,
                             const Model& model);

struct FusionResult {
    ScoreTable table;              // fused rows: rgb + beta * flow (unnormalized)
    std::vector<double> accuracy;  // on fused argmax
};

FusionResult fuse_streams(const ScoreTable& rgb, const ScoreTable& flow, double beta);

// CSV: `ratio,accuracy` with ratios p/P; exactly P rows.
void write_report_csv(const std::vector<double>& accuracy, std::size_t progress,
                      const std::filesystem::path& path);
std::vector<double> read_report_csv(const std::filesystem::path& path);

// CSV: `sample_id,p,label,score_0..score_{K-1}`, round-trip-safe decimals.
void write_scores_csv(const ScoreTable& table, const std::filesystem::path& path);
ScoreTable read_scores_csv(const std::filesystem::path& path);

// Thread cap from AMEMNET_THREADS (0 or unset = auto).
unsigned eval_thread_count();

}  // namespace amemnet
