#include "amemnet/config.hpp"

#include <fstream>

namespace amemnet {

namespace {

std::size_t parse_size(const std::string& key, const std::string& value) {
    try {
        return std::stoul(value);
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": expected integer, got '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        return std::stod(value);
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": expected number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw ConfigError("config key " + key + ": expected boolean, got '" + value + "'");
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "d") d = parse_size(key, value);
    else if (key == "hidden") hidden = parse_size(key, value);
    else if (key == "h") h = parse_size(key, value);
    else if (key == "slots") slots = parse_size(key, value);
    else if (key == "classes") classes = parse_size(key, value);
    else if (key == "similarity") similarity = value;
    else if (key == "lambda_cls") lambda_cls = parse_double(key, value);
    else if (key == "lambda_rec") lambda_rec = parse_double(key, value);
    else if (key == "batch") batch = parse_size(key, value);
    else if (key == "d_steps") d_steps = parse_size(key, value);
    else if (key == "epochs") epochs = parse_size(key, value);
    else if (key == "lr_d") lr_d = parse_double(key, value);
    else if (key == "lr_g") lr_g = parse_double(key, value);
    else if (key == "momentum") momentum = parse_double(key, value);
    else if (key == "seed") seed = parse_size(key, value);
    else if (key == "non_saturating") non_saturating = parse_bool(key, value);
    else if (key == "grad_clip") grad_clip = parse_double(key, value);
    else if (key == "progress") progress = parse_size(key, value);
    else if (key == "train_per_class") train_per_class = parse_size(key, value);
    else if (key == "test_per_class") test_per_class = parse_size(key, value);
    else if (key == "sigma_v") sigma_v = parse_double(key, value);
    else if (key == "sigma_x") sigma_x = parse_double(key, value);
    else if (key == "ramp") ramp = parse_double(key, value);
    else if (key == "beta") beta = parse_double(key, value);
    else throw ConfigError("unknown config key: " + key);
}

ModelConfig RunConfig::model_config() const {
    ModelConfig cfg;
    cfg.d = d;
    cfg.hidden = hidden;
    cfg.h = h;
    cfg.slots = slots;
    cfg.classes = classes;
    cfg.similarity = similarity_from_string(similarity);
    if (lambda_cls < 0.0 || lambda_rec < 0.0) {
        throw ConfigError("loss weights must be nonnegative");
    }
    cfg.lambda_cls = lambda_cls;
    cfg.lambda_rec = lambda_rec;
    return cfg;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig cfg;
    cfg.batch = batch;
    cfg.d_steps = d_steps;
    cfg.epochs = epochs;
    cfg.lr_d = lr_d;
    cfg.lr_g = lr_g;
    cfg.momentum = momentum;
    cfg.seed = seed;
    cfg.non_saturating = non_saturating;
    cfg.grad_clip = grad_clip;
    cfg.validate();
    return cfg;
}

SynthConfig RunConfig::synth_config() const {
    SynthConfig cfg;
    cfg.d = d;
    cfg.classes = classes;
    cfg.progress = progress;
    cfg.train_per_class = train_per_class;
    cfg.test_per_class = test_per_class;
    cfg.sigma_v = sigma_v;
    cfg.sigma_x = sigma_x;
    cfg.ramp = ramp;
    cfg.seed = seed;
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path.string());
    RunConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected key=value");
        }
        cfg.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return cfg;
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override must be key=value, got '" + assignment + "'");
    }
    cfg.set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

}  // namespace amemnet
