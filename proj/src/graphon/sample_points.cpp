#include "gk/sample_points.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "gk/rng.hpp"

namespace gk {

std::string_view to_string(SampleMode mode) noexcept {
    switch (mode) {
        case SampleMode::IidUniform: return "iid_uniform";
        case SampleMode::Deterministic: return "deterministic";
        case SampleMode::StratifiedUniform: return "stratified_uniform";
    }
    return "unknown";
}

SampleMode sample_mode_from_string(std::string_view text) {
    if (text == "iid_uniform" || text == "iid") return SampleMode::IidUniform;
    if (text == "deterministic") return SampleMode::Deterministic;
    if (text == "stratified_uniform" || text == "stratified") return SampleMode::StratifiedUniform;
    throw std::invalid_argument("unknown sample mode '" + std::string(text) + "'");
}

SamplePoints SamplePoints::generate(std::size_t n, SampleMode mode, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample size must be at least 1");
    SamplePoints out;
    out.mode = mode;
    out.points.resize(n);
    const CounterRng rng(seed, streams::kSamplePoints);
    const double dn = static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto idx = static_cast<std::uint32_t>(j);
        switch (mode) {
            case SampleMode::IidUniform: out.points[j] = rng.uniform(idx); break;
            case SampleMode::Deterministic: out.points[j] = static_cast<double>(j + 1) / dn; break;
            case SampleMode::StratifiedUniform:
                out.points[j] = (static_cast<double>(j) + rng.uniform(idx)) / dn;
                break;
        }
    }
    std::sort(out.points.begin(), out.points.end());
    return out;
}

SamplePoints SamplePoints::midpoints(std::size_t n) {
    if (n == 0) throw std::invalid_argument("sample size must be at least 1");
    SamplePoints out;
    out.mode = SampleMode::Deterministic;
    out.points.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.points[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    return out;
}

}  // namespace gk
