#include "spo/policy/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace spo::policy {

namespace {
constexpr char kMagic[8] = {'S', 'P', 'O', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_checkpoint(const std::string& path, const PolicyParams& params, const FeatureSpace& fs) {
    if (params.w.size() != fs.dim()) throw CheckpointError("params dimension does not match feature space");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot write " + path);
    out.write(kMagic, sizeof kMagic);
    std::uint32_t version = kVersion;
    std::uint64_t dim = params.w.size();
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
    out.write(reinterpret_cast<const char*>(params.w.data()),
              static_cast<std::streamsize>(params.w.size() * sizeof(double)));
    if (!out) throw CheckpointError("short write to " + path);

    std::ofstream txt(path + ".txt", std::ios::binary);
    txt << checkpoint_text_dump(params);
}

PolicyParams load_checkpoint(const std::string& path, const FeatureSpace& expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot read " + path);
    char magic[8];
    std::uint32_t version = 0;
    std::uint64_t dim = 0;
    in.read(magic, sizeof magic);
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&dim), sizeof dim);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw CheckpointError(path + ": not a checkpoint file (bad magic)");
    if (version != kVersion)
        throw CheckpointError(path + ": unsupported checkpoint version " + std::to_string(version));
    if (dim != expected.dim())
        throw CheckpointError(path + ": dimension " + std::to_string(dim) + " does not match configured " +
                              std::to_string(expected.dim()));
    PolicyParams params(expected.dim());
    in.read(reinterpret_cast<char*>(params.w.data()), static_cast<std::streamsize>(dim * sizeof(double)));
    if (!in) throw CheckpointError(path + ": truncated weight array");
    return params;
}

std::string checkpoint_text_dump(const PolicyParams& params) {
    std::string out = "dim " + std::to_string(params.w.size()) + "\n";
    char line[64];
    for (std::size_t i = 0; i < params.w.size(); ++i) {
        if (params.w[i] == 0.0) continue;
        std::snprintf(line, sizeof line, "%zu %.17g\n", i, params.w[i]);
        out += line;
    }
    return out;
}

}  // namespace spo::policy
