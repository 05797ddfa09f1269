#include "gk/cut_norm.hpp"

#include <cmath>
#include <stdexcept>

#include "gk/kernels.hpp"
#include "gk/rng.hpp"

namespace gk {

namespace {

std::vector<double> difference(const StepGraphon& s, const StepGraphon& t) {
    if (s.size() != t.size())
        throw std::invalid_argument("cut norm needs step graphons of equal size (" + std::to_string(s.size()) +
                                    " vs " + std::to_string(t.size()) + ")");
    const auto a = s.weights();
    const auto b = t.weights();
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

std::vector<std::size_t> members(const std::vector<double>& mask) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i] != 0.0) out.push_back(i);
    return out;
}

// Best column set for the given column sums: positive part for sign +1,
// negative part for sign -1. Returns the (signed) attained sum.
double best_response(const std::vector<double>& sums, double sign, std::vector<double>& mask) {
    double total = 0.0;
    for (std::size_t k = 0; k < sums.size(); ++k) {
        const bool take = sign * sums[k] > 0.0;
        mask[k] = take ? 1.0 : 0.0;
        if (take) total += sign * sums[k];
    }
    return total;
}

CutNormEstimate exhaustive(const std::vector<double>& d, std::size_t n) {
    CutNormEstimate best;
    best.exact = true;
    std::vector<double> colsum(n, 0.0);
    std::uint32_t rows_mask = 0;
    double best_raw = 0.0;
    std::uint32_t best_rows = 0;
    double best_sign = 1.0;
    const std::uint32_t count = 1u << n;
    // Gray-code walk: one row toggles per step.
    for (std::uint32_t i = 1; i < count; ++i) {
        const auto bit = static_cast<std::size_t>(__builtin_ctz(i));
        rows_mask ^= (1u << bit);
        const double dir = (rows_mask >> bit) & 1u ? 1.0 : -1.0;
        for (std::size_t k = 0; k < n; ++k) colsum[k] += dir * d[bit * n + k];
        double pos = 0.0;
        double neg = 0.0;
        for (std::size_t k = 0; k < n; ++k) (colsum[k] > 0.0 ? pos : neg) += colsum[k];
        if (pos > best_raw) {
            best_raw = pos;
            best_rows = rows_mask;
            best_sign = 1.0;
        }
        if (-neg > best_raw) {
            best_raw = -neg;
            best_rows = rows_mask;
            best_sign = -1.0;
        }
    }
    if (best_raw > 0.0) {
        std::vector<double> sums(n, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if ((best_rows >> j) & 1u) {
                best.rows.push_back(j);
                for (std::size_t k = 0; k < n; ++k) sums[k] += d[j * n + k];
            }
        std::vector<double> mask(n);
        best_response(sums, best_sign, mask);
        best.cols = members(mask);
    }
    best.lower_bound = best_raw / static_cast<double>(n * n);
    return best;
}

CutNormEstimate local_search(const std::vector<double>& d, std::size_t n, int budget, std::uint64_t seed) {
    CutNormEstimate best;
    double best_raw = 0.0;
    const CounterRng rng(seed, streams::kCutNorm);
    std::vector<double> rows(n), cols(n), sums(n);
    // D is symmetric, so column sums over a row set are D * mask.
    for (int restart = 0; restart < std::max(budget, 1); ++restart) {
        for (const double sign : {1.0, -1.0}) {
            for (std::size_t j = 0; j < n; ++j)
                rows[j] = rng.uniform(static_cast<std::uint32_t>(restart), static_cast<std::uint32_t>(j)) < 0.5 ? 1.0 : 0.0;
            double value = -1.0;
            for (int sweep = 0; sweep < 200; ++sweep) {
                kernels::matvec(d, n, rows, sums);
                best_response(sums, sign, cols);
                kernels::matvec(d, n, cols, sums);
                const double next = best_response(sums, sign, rows);
                const bool improved = next > value + 1e-15 * std::abs(value);
                value = next;
                if (!improved) break;
            }
            if (value > best_raw) {
                best_raw = value;
                best.rows = members(rows);
                best.cols = members(cols);
            }
        }
    }
    best.lower_bound = best_raw / static_cast<double>(n * n);
    return best;
}

}  // namespace

CutNormEstimate cut_norm_estimate(const StepGraphon& s, const StepGraphon& t, int budget, std::uint64_t seed) {
    const auto d = difference(s, t);
    const std::size_t n = s.size();
    if (n == 0) return {};
    if (n <= kCutNormExactMax) return exhaustive(d, n);
    return local_search(d, n, budget, seed);
}

double cut_value(const StepGraphon& s, const StepGraphon& t, const std::vector<std::size_t>& rows,
                 const std::vector<std::size_t>& cols) {
    if (s.size() != t.size()) throw std::invalid_argument("cut value needs step graphons of equal size");
    double sum = 0.0;
    for (const auto j : rows)
        for (const auto k : cols) sum += s(j, k) - t(j, k);
    const double n = static_cast<double>(s.size());
    return std::abs(sum) / (n * n);
}

double simple_sample_cut_bound(std::size_t n) { return 22.0 / std::sqrt(std::log(static_cast<double>(n))); }
double weighted_sample_cut_bound(std::size_t n) { return 20.0 / std::sqrt(std::log(static_cast<double>(n))); }

}  // namespace gk
