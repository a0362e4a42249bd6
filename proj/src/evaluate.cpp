#include "amemnet/evaluate.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "amemnet/discriminator.hpp"
#include "amemnet/encoder.hpp"
#include "amemnet/memory.hpp"

namespace amemnet {

namespace fs = std::filesystem;

Tensor predict_probs(const Model& model, const Tensor& x_batch) {
    Tensor q = encode_eval(model.enc, x_batch, model.cfg);
    Tensor alpha = address_eval(q, model.mem.Mk, model.cfg.similarity);
    Tensor vhat = read_eval(x_batch, alpha, model.mem.Mv);
    return classify_probs_eval(model.disc, vhat);
}

std::size_t argmax_class(const std::vector<double>& scores) {
    if (scores.empty()) throw DimensionError("argmax over empty score vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
    }
    return best;
}

unsigned eval_thread_count() {
    const char* env = std::getenv("AMEMNET_THREADS");
    unsigned n = 0;
    if (env && *env) {
        n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

EvalResult evaluate_by_ratio(const FeatureDataset& ds, const std::vector<std::uint32_t>& ids,
                             const Model& model) {
    if (ids.empty()) throw ConfigError("evaluate_by_ratio: empty split");
    if (ds.dim != model.cfg.d) throw DimensionError("evaluate: dataset/model dim mismatch");
    if (ds.progress == 0) throw ConfigError("evaluate: dataset has no progress levels");

    const std::size_t P = ds.progress;
    EvalResult result;
    result.accuracy.assign(P, 0.0);
    result.scores.classes = model.cfg.classes;
    result.scores.rows.resize(ids.size() * P);

    const unsigned threads = std::min<unsigned>(eval_thread_count(),
                                                static_cast<unsigned>(ids.size()));
    auto worker = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = 1; p <= P; ++p) {
            const std::size_t count = hi - lo;
            Tensor x({count, ds.dim});
            for (std::size_t i = 0; i < count; ++i) {
                const FeatureRecord& rec = ds.record(ids[lo + i], p);
                for (std::size_t j = 0; j < ds.dim; ++j) {
                    x.at(i, j) = static_cast<double>(rec.feature[j]);
                }
            }
            Tensor probs = predict_probs(model, x);
            for (std::size_t i = 0; i < count; ++i) {
                ScoreRow& row = result.scores.rows[(lo + i) * P + (p - 1)];
                row.sample_id = ids[lo + i];
                row.p = p;
                row.label = ds.record(ids[lo + i], p).label;
                row.scores.assign(probs.data() + i * model.cfg.classes,
                                  probs.data() + (i + 1) * model.cfg.classes);
            }
        }
    };

    if (threads <= 1) {
        worker(0, ids.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (ids.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t lo = t * chunk;
            const std::size_t hi = std::min(ids.size(), lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    for (const ScoreRow& row : result.scores.rows) {
        if (argmax_class(row.scores) == row.label) {
            result.accuracy[row.p - 1] += 1.0;
        }
    }
    for (double& a : result.accuracy) a /= static_cast<double>(ids.size());

    std::sort(result.scores.rows.begin(), result.scores.rows.end(),
              [](const ScoreRow& a, const ScoreRow& b) {
                  return std::tie(a.sample_id, a.p) < std::tie(b.sample_id, b.p);
              });
    return result;
}

FusionResult fuse_streams(const ScoreTable& rgb, const ScoreTable& flow, double beta) {
    if (beta <= 0.0) throw ConfigError("fusion weight beta must be positive");
    if (rgb.classes != flow.classes) {
        throw FormatError("fusion: streams have different class counts");
    }
    if (rgb.rows.size() != flow.rows.size()) {
        std::ostringstream os;
        os << "fusion: row count mismatch (rgb " << rgb.rows.size() << ", flow "
           << flow.rows.size() << ")";
        throw FormatError(os.str());
    }

    FusionResult result;
    result.table.classes = rgb.classes;
    result.table.rows.reserve(rgb.rows.size());
    std::size_t max_p = 0;
    for (std::size_t i = 0; i < rgb.rows.size(); ++i) {
        const ScoreRow& a = rgb.rows[i];
        const ScoreRow& b = flow.rows[i];
        if (a.sample_id != b.sample_id || a.p != b.p) {
            std::ostringstream os;
            os << "fusion: key mismatch at row " << i << " (rgb sample " << a.sample_id
               << " p " << a.p << ", flow sample " << b.sample_id << " p " << b.p << ")";
            throw FormatError(os.str());
        }
        if (a.label != b.label) {
            throw FormatError("fusion: streams disagree on the label of sample " +
                              std::to_string(a.sample_id));
        }
        ScoreRow fused = a;
        for (std::size_t k = 0; k < fused.scores.size(); ++k) {
            fused.scores[k] += beta * b.scores[k];
        }
        max_p = std::max(max_p, fused.p);
        result.table.rows.push_back(std::move(fused));
    }

    result.accuracy.assign(max_p, 0.0);
    std::vector<std::size_t> counts(max_p, 0);
    for (const ScoreRow& row : result.table.rows) {
        ++counts[row.p - 1];
        if (argmax_class(row.scores) == row.label) result.accuracy[row.p - 1] += 1.0;
    }
    for (std::size_t p = 0; p < max_p; ++p) {
        if (counts[p] == 0) throw FormatError("fusion: no rows at progress " + std::to_string(p + 1));
        result.accuracy[p] /= static_cast<double>(counts[p]);
    }
    return result;
}

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string format_ratio(std::size_t p, std::size_t progress) {
    std::ostringstream os;
    os << static_cast<double>(p) / static_cast<double>(progress);
    return os.str();
}

}  // namespace

void write_report_csv(const std::vector<double>& accuracy, std::size_t progress,
                      const fs::path& path) {
    if (accuracy.size() != progress) {
        throw DimensionError("report must have exactly one accuracy per progress level");
    }
    std::ofstream os(path);
    if (!os) throw FormatError("cannot write " + path.string());
    os << "ratio,accuracy\n";
    for (std::size_t p = 1; p <= progress; ++p) {
        os << format_ratio(p, progress) << ',' << format_double(accuracy[p - 1]) << '\n';
    }
}

std::vector<double> read_report_csv(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot read " + path.string());
    std::string line;
    if (!std::getline(is, line) || line != "ratio,accuracy") {
        throw FormatError("malformed report header in " + path.string());
    }
    std::vector<double> acc;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw FormatError("malformed report row: " + line);
        acc.push_back(std::stod(line.substr(comma + 1)));
    }
    return acc;
}

void write_scores_csv(const ScoreTable& table, const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot write " + path.string());
    os << "sample_id,p,label";
    for (std::size_t k = 0; k < table.classes; ++k) os << ",score_" << k;
    os << '\n';
    for (const ScoreRow& row : table.rows) {
        os << row.sample_id << ',' << row.p << ',' << row.label;
        for (double s : row.scores) os << ',' << format_double(s);
        os << '\n';
    }
}

ScoreTable read_scores_csv(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot read " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw FormatError("empty scores file: " + path.string());
    std::size_t classes = 0;
    {
        std::istringstream header(line);
        std::string cell;
        while (std::getline(header, cell, ',')) {
            if (cell.rfind("score_", 0) == 0) ++classes;
        }
    }
    if (classes == 0) throw FormatError("scores header has no score columns: " + line);
    ScoreTable table;
    table.classes = classes;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row_s(line);
        std::string cell;
        ScoreRow row;
        auto next = [&]() {
            if (!std::getline(row_s, cell, ',')) {
                throw FormatError("malformed scores row: " + line);
            }
            return cell;
        };
        row.sample_id = static_cast<std::uint32_t>(std::stoul(next()));
        row.p = std::stoul(next());
        row.label = static_cast<std::uint16_t>(std::stoul(next()));
        row.scores.reserve(classes);
        for (std::size_t k = 0; k < classes; ++k) row.scores.push_back(std::stod(next()));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace amemnet
