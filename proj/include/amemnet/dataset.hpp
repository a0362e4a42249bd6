#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "amemnet/tensor.hpp"

namespace amemnet {

// One (sample, progress) feature record. Features are stored as 32-bit
// floats exactly as they live on disk and promoted to f64 when used.
struct FeatureRecord {
    std::uint32_t sample_id = 0;
    std::uint8_t p = 0;           // progress index, 1..P
    std::uint16_t label = 0;
    std::vector<float> feature;
};

class FeatureDataset {
public:
    std::size_t dim = 0;
    std::size_t classes = 0;
    std::size_t progress = 10;  // P
    std::string stream;

    std::vector<std::uint32_t> train_ids;
    std::vector<std::uint32_t> test_ids;

    void add_record(FeatureRecord rec);
    const std::vector<FeatureRecord>& records() const { return records_; }

    const FeatureRecord& record(std::uint32_t sample_id, std::size_t p) const;
    bool has_record(std::uint32_t sample_id, std::size_t p) const;

    std::vector<std::uint32_t> sample_ids() const;

    // Every sample must have a p = P record, one shared label, length-d
    // vectors. Throws FormatError on violation.
    void validate() const;

    // Promote one record's feature to a 1 x d tensor row.
    Tensor feature_f64(std::uint32_t sample_id, std::size_t p) const;

private:
    std::vector<FeatureRecord> records_;
    std::map<std::pair<std::uint32_t, std::size_t>, std::size_t> index_;
};

// One training unit: partial feature x, full feature v, label, progress.
// p is evaluation bookkeeping only; the model never consumes it.
struct FeatureTriplet {
    std::uint32_t sample_id = 0;
    std::size_t p = 0;
    std::uint16_t label = 0;
    const FeatureRecord* partial = nullptr;
    const FeatureRecord* full = nullptr;
};

std::vector<FeatureTriplet> build_triplets(const FeatureDataset& ds,
                                           const std::vector<std::uint32_t>& ids);

// Directory layout: manifest.txt, features.bin, train_ids.txt, test_ids.txt.
// Binary record: sample_id u32 LE, p u8, label u16 LE, then d f32 LE.
void save_dataset(const FeatureDataset& ds, const std::filesystem::path& dir);
FeatureDataset load_dataset(const std::filesystem::path& dir);

// Synthetic stand-in for precomputed two-stream video features.
struct SynthConfig {
    std::size_t d = 64;
    std::size_t classes = 8;
    std::size_t progress = 10;
    std::size_t train_per_class = 100;
    std::size_t test_per_class = 50;
    double sigma_v = 0.1;   // full-feature noise
    double sigma_x = 0.2;   // partial-feature noise
    double ramp = 1.0;      // progress ramp exponent
    std::uint64_t seed = 1;

    void validate() const;
};

// Per class k: prototype c_k ~ N(0, I). Per sample: nuisance u ~ N(0, I),
// v = c_k + sigma_v * eps, x_p = rho_p * v + (1 - rho_p) * u + sigma_x * eta
// with rho_p = (p/P)^ramp. The two streams draw from independent sub-seeds.
std::pair<FeatureDataset, FeatureDataset> generate_synthetic(const SynthConfig& cfg);

}  // namespace amemnet
