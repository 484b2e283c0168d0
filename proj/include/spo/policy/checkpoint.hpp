#pragma once

#include <string>

#include "spo/policy/policy.hpp"

namespace spo::policy {

// Binary checkpoint: 8-byte magic "SPOCKPT1", u32 version, u64 dimension,
// then the little-endian weight array. save_checkpoint also writes a
// canonical text dump (<path>.txt) listing nonzero weights for diffing.
void save_checkpoint(const std::string& path, const PolicyParams& params, const FeatureSpace& fs);
PolicyParams load_checkpoint(const std::string& path, const FeatureSpace& expected);

std::string checkpoint_text_dump(const PolicyParams& params);

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace spo::policy
