#pragma once

// Graphon kernels W: [0,1]^2 -> [0,1], their finite samples and the degree
// diagnostics used to judge how close a sample is to its limit.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gk/sample_points.hpp"

namespace gk {

struct ErdosRenyi {
    double p;
};

/// hi within circle distance `radius` of the diagonal, lo elsewhere.
struct SmallWorld {
    double hi;
    double lo;
    double radius;
};

/// Piecewise constant on an m x m grid of equal cells.
struct GridKernel {
    std::size_t m;
    std::vector<double> values;  // row-major
};

class Graphon {
public:
    using Kind = std::variant<ErdosRenyi, SmallWorld, GridKernel>;

    static Graphon erdos_renyi(double p);
    static Graphon small_world(double hi, double lo, double radius);
    static Graphon grid(std::size_t m, std::vector<double> values);

    double operator()(double x, double y) const;

    const Kind& kind() const noexcept { return kind_; }
    std::string describe() const;

    /// Degree when it does not depend on x (ER, small-world).
    std::optional<double> constant_degree() const;

    /// Points in (0,1) where y -> W(x, y) may jump.
    std::vector<double> row_breakpoints(double x) const;

private:
    explicit Graphon(Kind kind) : kind_(std::move(kind)) {}
    Kind kind_;
};

/// Circle distance min(|x-y|, 1-|x-y|) on [0,1).
double circle_distance(double x, double y) noexcept;

/// An n x n symmetric weight matrix read as a step function on the cells
/// I_j x I_k, I_j = [(j-1)/n, j/n).
class StepGraphon {
public:
    StepGraphon() = default;
    /// Validates size, symmetry and range; throws std::invalid_argument.
    StepGraphon(std::size_t n, std::vector<double> weights);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t j, std::size_t k) const noexcept { return weights_[j * n_ + k]; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const double> row(std::size_t j) const noexcept { return {weights_.data() + j * n_, n_}; }

    bool has_zero_diagonal() const noexcept;
    bool is_binary() const noexcept;
    /// Fraction of unordered off-diagonal pairs with weight 1 (binary graphs)
    /// or mean off-diagonal weight in general.
    double edge_density() const noexcept;

private:
    std::size_t n_ = 0;
    std::vector<double> weights_;
};

/// Weighted sample H(n, W): weights W(x_j, x_k), zero diagonal.
StepGraphon sample_weighted(const Graphon& w, const SamplePoints& pts);

/// Simple sample G(n, W): one Bernoulli(W(x_j, x_k)) draw per unordered
/// pair, keyed by (min(j,k), max(j,k)) under `seed`.
StepGraphon sample_simple(const Graphon& w, const SamplePoints& pts, std::uint64_t seed);

/// Cell averages of W over I_j x I_k (32 x 32 Gauss-Legendre per cell).
/// The diagonal keeps its average: this is the graphon, not a graph.
StepGraphon embed(const Graphon& w, std::size_t n);

/// Degree function: a constant, or one value per interval I_j.
struct DegreeFunction {
    std::optional<double> constant;
    std::vector<double> values;

    static DegreeFunction from_constant(double c) { return {c, {}}; }
    static DegreeFunction from_steps(std::vector<double> v) { return {std::nullopt, std::move(v)}; }
    bool is_constant() const noexcept { return constant.has_value(); }
};

/// d_W; closed form for ER and small-world, exact row means for grid kernels.
DegreeFunction degree(const Graphon& w);
/// d_W(x) by adaptive quadrature over y (split at the jumps of W(x, .)).
double degree_at(const Graphon& w, double x);
/// d_j = (1/n) sum_k weights[j][k].
DegreeFunction degree_step(const StepGraphon& s);

/// Sup-norm distance. Step representations must be nested partitions (one
/// size divides the other); otherwise std::invalid_argument.
double degree_distance(const DegreeFunction& a, const DegreeFunction& b);

/// sqrt(log(2n/nu)/n): the probability-(1-nu) bound on the degree gap
/// between weighted and simple samples.
double degree_gap_bound(std::size_t n, double nu);

}  // namespace gk
