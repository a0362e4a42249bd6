#include "amemnet/archive.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

namespace amemnet {

namespace fs = std::filesystem;

namespace {

void put_f32(std::ostream& os, float f) {
    const std::uint32_t v = std::bit_cast<std::uint32_t>(f);
    char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(bytes, 4);
}

float get_f32(std::istream& is, const std::string& name) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (is.gcount() != 4) throw FormatError("model.bin truncated while reading " + name);
    const std::uint32_t v = static_cast<std::uint32_t>(b[0]) |
                            (static_cast<std::uint32_t>(b[1]) << 8) |
                            (static_cast<std::uint32_t>(b[2]) << 16) |
                            (static_cast<std::uint32_t>(b[3]) << 24);
    return std::bit_cast<float>(v);
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void save_model(const Model& model, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream meta(dir / "model.meta");
    if (!meta) throw FormatError("cannot write model.meta in " + dir.string());
    const ModelConfig& cfg = model.cfg;
    meta << "format=amemnet-model-v1\n"
         << "d=" << cfg.d << "\n"
         << "hidden=" << cfg.hidden << "\n"
         << "h=" << cfg.h << "\n"
         << "slots=" << cfg.slots << "\n"
         << "classes=" << cfg.classes << "\n"
         << "similarity=" << to_string(cfg.similarity) << "\n"
         << "lambda_cls=" << format_double(cfg.lambda_cls) << "\n"
         << "lambda_rec=" << format_double(cfg.lambda_rec) << "\n";

    std::ofstream bin(dir / "model.bin", std::ios::binary);
    if (!bin) throw FormatError("cannot write model.bin in " + dir.string());
    std::size_t offset = 0;
    for (const auto& [name, tensor] : model.named_tensors()) {
        meta << "tensor " << name;
        for (std::size_t d : tensor->shape()) meta << " " << d;
        meta << " @" << offset << "\n";
        for (std::size_t i = 0; i < tensor->size(); ++i) {
            put_f32(bin, static_cast<float>((*tensor)[i]));
        }
        offset += 4 * tensor->size();
    }
}

Model load_model(const fs::path& dir) {
    std::ifstream meta(dir / "model.meta");
    if (!meta) throw FormatError("cannot read model.meta in " + dir.string());

    ModelConfig cfg;
    struct IndexEntry {
        std::vector<std::size_t> shape;
        std::size_t offset = 0;
    };
    std::map<std::string, IndexEntry> index;

    std::string line;
    while (std::getline(meta, line)) {
        if (line.empty()) continue;
        if (line.rfind("tensor ", 0) == 0) {
            std::istringstream row(line.substr(7));
            std::string name;
            row >> name;
            IndexEntry entry;
            std::string tok;
            while (row >> tok) {
                if (tok[0] == '@') {
                    entry.offset = std::stoul(tok.substr(1));
                } else {
                    entry.shape.push_back(std::stoul(tok));
                }
            }
            if (index.count(name)) throw FormatError("duplicate tensor in archive: " + name);
            index[name] = std::move(entry);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("malformed model.meta line: " + line);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "format") {
            if (value != "amemnet-model-v1") throw FormatError("unknown archive format: " + value);
        } else if (key == "d") cfg.d = std::stoul(value);
        else if (key == "hidden") cfg.hidden = std::stoul(value);
        else if (key == "h") cfg.h = std::stoul(value);
        else if (key == "slots") cfg.slots = std::stoul(value);
        else if (key == "classes") cfg.classes = std::stoul(value);
        else if (key == "similarity") cfg.similarity = similarity_from_string(value);
        else if (key == "lambda_cls") cfg.lambda_cls = std::stod(value);
        else if (key == "lambda_rec") cfg.lambda_rec = std::stod(value);
        else throw FormatError("unknown model.meta key: " + key);
    }

    Model model = Model::init(cfg, 0);
    std::ifstream bin(dir / "model.bin", std::ios::binary);
    if (!bin) throw FormatError("cannot read model.bin in " + dir.string());

    for (auto& [name, tensor] : model.named_tensors()) {
        auto it = index.find(name);
        if (it == index.end()) throw FormatError("archive missing tensor: " + name);
        if (it->second.shape != tensor->shape()) {
            throw FormatError("archive tensor " + name + " has shape mismatch (expected " +
                              tensor->shape_str() + ")");
        }
        bin.seekg(static_cast<std::streamoff>(it->second.offset));
        for (std::size_t i = 0; i < tensor->size(); ++i) {
            (*tensor)[i] = static_cast<double>(get_f32(bin, name));
        }
        index.erase(it);
    }
    if (!index.empty()) {
        throw FormatError("archive holds unknown tensor: " + index.begin()->first);
    }
    return model;
}

Model quantize_f32(const Model& model) {
    Model out = model;
    for (auto& [name, tensor] : out.named_tensors()) {
        for (std::size_t i = 0; i < tensor->size(); ++i) {
            (*tensor)[i] = static_cast<double>(static_cast<float>((*tensor)[i]));
        }
    }
    return out;
}

}  // namespace amemnet
