#pragma once

namespace spo {

// (s_text, s_image, overall), each in [0, 1].
struct ScoreTriple {
    double s_text = 0.0;
    double s_image = 0.0;
    double overall = 0.0;

    bool operator==(const ScoreTriple&) const = default;
};

}  // namespace spo
