#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace gk {

enum class SampleMode { IidUniform, Deterministic, StratifiedUniform };

std::string_view to_string(SampleMode mode) noexcept;
SampleMode sample_mode_from_string(std::string_view text);

/// Latent positions x_1 <= ... <= x_n in [0,1] shared by the frequencies and
/// the graph sample.
struct SamplePoints {
    std::vector<double> points;
    SampleMode mode = SampleMode::IidUniform;

    std::size_t size() const noexcept { return points.size(); }

    /// IidUniform: sorted i.i.d. U(0,1) draws. Deterministic: x_j = j/n.
    /// StratifiedUniform: x_j ~ U((j-1)/n, j/n).
    static SamplePoints generate(std::size_t n, SampleMode mode, std::uint64_t seed);

    /// x_j = (j - 1/2)/n.
    static SamplePoints midpoints(std::size_t n);
};

}  // namespace gk
