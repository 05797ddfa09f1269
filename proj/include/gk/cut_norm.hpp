#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gk/graphon.hpp"

namespace gk {

/// A certified lower bound on ||S - T||_box together with the vertex sets
/// (unions of cells) that attain it.
struct CutNormEstimate {
    double lower_bound = 0.0;
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    bool exact = false;
};

/// Largest n handled by exhaustive enumeration.
inline constexpr std::size_t kCutNormExactMax = 14;

/// Exhaustive over all row subsets for n <= kCutNormExactMax (the best column
/// set for fixed rows is read off the signs of the column sums). Above that:
/// `budget` random restarts of alternating best response, which also leaves
/// no improving single-vertex flip. Throws on size mismatch.
CutNormEstimate cut_norm_estimate(const StepGraphon& s, const StepGraphon& t, int budget, std::uint64_t seed);

/// |sum_{j in rows, k in cols} (S - T)_{jk}| / n^2.
double cut_value(const StepGraphon& s, const StepGraphon& t, const std::vector<std::size_t>& rows,
                 const std::vector<std::size_t>& cols);

/// 22/sqrt(log n): the high-probability cut distance bound for G(n, W).
double simple_sample_cut_bound(std::size_t n);
/// 20/sqrt(log n) for H(n, W).
double weighted_sample_cut_bound(std::size_t n);

}  // namespace gk
