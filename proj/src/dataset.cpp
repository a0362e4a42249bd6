#include "amemnet/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "amemnet/rng.hpp"

namespace amemnet {

namespace fs = std::filesystem;

void FeatureDataset::add_record(FeatureRecord rec) {
    const auto key = std::make_pair(rec.sample_id, static_cast<std::size_t>(rec.p));
    if (index_.count(key)) {
        throw FormatError("duplicate record for sample " + std::to_string(rec.sample_id) +
                          " progress " + std::to_string(rec.p));
    }
    index_[key] = records_.size();
    records_.push_back(std::move(rec));
}

const FeatureRecord& FeatureDataset::record(std::uint32_t sample_id, std::size_t p) const {
    auto it = index_.find({sample_id, p});
    if (it == index_.end()) {
        throw FormatError("missing record for sample " + std::to_string(sample_id) +
                          " progress " + std::to_string(p));
    }
    return records_[it->second];
}

bool FeatureDataset::has_record(std::uint32_t sample_id, std::size_t p) const {
    return index_.count({sample_id, p}) != 0;
}

std::vector<std::uint32_t> FeatureDataset::sample_ids() const {
    std::vector<std::uint32_t> ids;
    for (const auto& [key, idx] : index_) {
        if (ids.empty() || ids.back() != key.first) ids.push_back(key.first);
    }
    return ids;
}

void FeatureDataset::validate() const {
    for (const auto& rec : records_) {
        if (rec.feature.size() != dim) {
            throw FormatError("record feature length " + std::to_string(rec.feature.size()) +
                              " does not match dim " + std::to_string(dim));
        }
        if (rec.p < 1 || rec.p > progress) {
            throw FormatError("record progress index out of range");
        }
        if (rec.label >= classes) {
            throw FormatError("record label out of range");
        }
    }
    for (std::uint32_t id : sample_ids()) {
        if (!has_record(id, progress)) {
            throw FormatError("corrupt dataset: sample " + std::to_string(id) +
                              " has no full-video record (p = P)");
        }
        const std::uint16_t label = record(id, progress).label;
        for (std::size_t p = 1; p <= progress; ++p) {
            if (has_record(id, p) && record(id, p).label != label) {
                throw FormatError("sample " + std::to_string(id) +
                                  " has inconsistent labels across progress levels");
            }
        }
    }
}

Tensor FeatureDataset::feature_f64(std::uint32_t sample_id, std::size_t p) const {
    const FeatureRecord& rec = record(sample_id, p);
    Tensor t({1, dim});
    for (std::size_t i = 0; i < dim; ++i) t[i] = static_cast<double>(rec.feature[i]);
    return t;
}

std::vector<FeatureTriplet> build_triplets(const FeatureDataset& ds,
                                           const std::vector<std::uint32_t>& ids) {
    std::vector<FeatureTriplet> out;
    out.reserve(ids.size() * ds.progress);
    for (std::uint32_t id : ids) {
        const FeatureRecord& full = ds.record(id, ds.progress);
        for (std::size_t p = 1; p <= ds.progress; ++p) {
            const FeatureRecord& partial = ds.record(id, p);
            out.push_back(FeatureTriplet{id, p, full.label, &partial, &full});
        }
    }
    return out;
}

namespace {

void put_u16(std::ostream& os, std::uint16_t v) {
    const char bytes[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
    os.write(bytes, 2);
}

void put_u32(std::ostream& os, std::uint32_t v) {
    char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(bytes, 4);
}

void put_f32(std::ostream& os, float f) {
    put_u32(os, std::bit_cast<std::uint32_t>(f));
}

bool get_bytes(std::istream& is, unsigned char* dst, std::size_t n) {
    is.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(is.gcount()) == n;
}

std::uint32_t decode_u32(const unsigned char* b) {
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_id_file(const fs::path& path, const std::vector<std::uint32_t>& ids) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot write " + path.string());
    for (std::uint32_t id : ids) os << id << "\n";
}

std::vector<std::uint32_t> read_id_file(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot read " + path.string());
    std::vector<std::uint32_t> ids;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        ids.push_back(static_cast<std::uint32_t>(std::stoul(line)));
    }
    return ids;
}

}  // namespace

void save_dataset(const FeatureDataset& ds, const fs::path& dir) {
    fs::create_directories(dir);
    {
        std::ofstream manifest(dir / "manifest.txt");
        if (!manifest) throw FormatError("cannot write manifest in " + dir.string());
        manifest << "dim=" << ds.dim << "\n"
                 << "classes=" << ds.classes << "\n"
                 << "progress=" << ds.progress << "\n"
                 << "stream=" << ds.stream << "\n"
                 << "count=" << ds.records().size() << "\n";
    }
    {
        std::ofstream bin(dir / "features.bin", std::ios::binary);
        if (!bin) throw FormatError("cannot write features.bin in " + dir.string());
        for (const FeatureRecord& rec : ds.records()) {
            put_u32(bin, rec.sample_id);
            bin.put(static_cast<char>(rec.p));
            put_u16(bin, rec.label);
            for (float f : rec.feature) put_f32(bin, f);
        }
    }
    write_id_file(dir / "train_ids.txt", ds.train_ids);
    write_id_file(dir / "test_ids.txt", ds.test_ids);
}

FeatureDataset load_dataset(const fs::path& dir) {
    FeatureDataset ds;
    std::size_t expected_count = 0;
    {
        std::ifstream manifest(dir / "manifest.txt");
        if (!manifest) throw FormatError("cannot read manifest in " + dir.string());
        std::string line;
        while (std::getline(manifest, line)) {
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw FormatError("malformed manifest line: " + line);
            const std::string key = line.substr(0, eq);
            const std::string value = line.substr(eq + 1);
            if (key == "dim") ds.dim = std::stoul(value);
            else if (key == "classes") ds.classes = std::stoul(value);
            else if (key == "progress") ds.progress = std::stoul(value);
            else if (key == "stream") ds.stream = value;
            else if (key == "count") expected_count = std::stoul(value);
            else throw FormatError("unknown manifest key: " + key);
        }
    }
    if (ds.dim == 0) throw FormatError("manifest missing dim");

    const fs::path bin_path = dir / "features.bin";
    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin) throw FormatError("cannot read " + bin_path.string());
    const std::size_t record_bytes = 4 + 1 + 2 + 4 * ds.dim;
    std::vector<unsigned char> buf(record_bytes);
    std::size_t offset = 0;
    for (;;) {
        bin.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(record_bytes));
        const std::size_t got = static_cast<std::size_t>(bin.gcount());
        if (got == 0) break;
        if (got != record_bytes) {
            throw FormatError("truncated features.bin: partial record at byte offset " +
                              std::to_string(offset));
        }
        FeatureRecord rec;
        rec.sample_id = decode_u32(buf.data());
        rec.p = buf[4];
        rec.label = static_cast<std::uint16_t>(buf[5] | (buf[6] << 8));
        rec.feature.resize(ds.dim);
        for (std::size_t i = 0; i < ds.dim; ++i) {
            rec.feature[i] = std::bit_cast<float>(decode_u32(buf.data() + 7 + 4 * i));
        }
        ds.add_record(std::move(rec));
        offset += record_bytes;
    }
    if (ds.records().size() != expected_count) {
        throw FormatError("features.bin holds " + std::to_string(ds.records().size()) +
                          " records but manifest says " + std::to_string(expected_count));
    }
    ds.train_ids = read_id_file(dir / "train_ids.txt");
    ds.test_ids = read_id_file(dir / "test_ids.txt");
    ds.validate();
    return ds;
}

void SynthConfig::validate() const {
    if (d == 0 || classes == 0 || progress == 0) {
        throw ConfigError("synthetic config: d, classes, progress must be positive");
    }
    if (train_per_class == 0 || test_per_class == 0) {
        throw ConfigError("synthetic config: per-class sample counts must be positive");
    }
    if (sigma_v < 0.0 || sigma_x < 0.0) {
        throw ConfigError("synthetic config: noise scales must be nonnegative");
    }
    if (ramp <= 0.0) throw ConfigError("synthetic config: ramp exponent must be positive");
}

namespace {

FeatureDataset generate_stream(const SynthConfig& cfg, std::uint64_t stream_seed,
                               const std::string& name) {
    FeatureDataset ds;
    ds.dim = cfg.d;
    ds.classes = cfg.classes;
    ds.progress = cfg.progress;
    ds.stream = name;

    // Class prototypes from their own substream.
    Rng proto_rng(Rng::derive_seed(stream_seed, 0));
    std::vector<std::vector<double>> prototypes(cfg.classes, std::vector<double>(cfg.d));
    for (auto& c : prototypes) {
        for (double& v : c) v = proto_rng.normal();
    }

    const std::size_t per_class = cfg.train_per_class + cfg.test_per_class;
    const std::size_t total = cfg.classes * per_class;
    std::vector<double> v(cfg.d), u(cfg.d);
    for (std::uint32_t id = 0; id < total; ++id) {
        const std::size_t k = id / per_class;
        const bool is_train = (id % per_class) < cfg.train_per_class;
        // Per-sample substream keeps generation order-independent.
        Rng rng(Rng::derive_seed(stream_seed, 1 + id));
        for (std::size_t i = 0; i < cfg.d; ++i) {
            v[i] = prototypes[k][i] + cfg.sigma_v * rng.normal();
        }
        for (std::size_t i = 0; i < cfg.d; ++i) u[i] = rng.normal();
        for (std::size_t p = 1; p <= cfg.progress; ++p) {
            const double rho = std::pow(static_cast<double>(p) /
                                        static_cast<double>(cfg.progress), cfg.ramp);
            FeatureRecord rec;
            rec.sample_id = id;
            rec.p = static_cast<std::uint8_t>(p);
            rec.label = static_cast<std::uint16_t>(k);
            rec.feature.resize(cfg.d);
            for (std::size_t i = 0; i < cfg.d; ++i) {
                const double x = rho * v[i] + (1.0 - rho) * u[i] + cfg.sigma_x * rng.normal();
                rec.feature[i] = static_cast<float>(x);
            }
            ds.add_record(std::move(rec));
        }
        (is_train ? ds.train_ids : ds.test_ids).push_back(id);
    }
    ds.validate();
    return ds;
}

}  // namespace

std::pair<FeatureDataset, FeatureDataset> generate_synthetic(const SynthConfig& cfg) {
    cfg.validate();
    return {generate_stream(cfg, Rng::derive_seed(cfg.seed, 0x726762ULL), "rgb"),
            generate_stream(cfg, Rng::derive_seed(cfg.seed, 0x666c6f77ULL), "flow")};
}

}  // namespace amemnet
