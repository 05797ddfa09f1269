#pragma once

// Mean-field (graphon) synchronisation theory for Erdos-Renyi kernels W = p:
// the coupling functional gamma(q), its maximum, the critical coupling, the
// phase-locked profile u*(x) = arcsin((Omega(x) - mean)/kappa) and its
// linear stability.

#include <cstddef>
#include <vector>

#include "gk/freqdist.hpp"

namespace gk {

/// gamma(q) = (1/q^2) int_{-1}^{1} sqrt(q^2 - s^2) f(s) ds, evaluated as
/// (1/q^2) int_0^1 sqrt(q^2 - Omega(x)^2) dx. Throws for q < 1.
double gamma_of_q(const FrequencyModel& model, double q);

/// d gamma / dq = (1/q^3) int_0^1 (2 Omega^2 - q^2) / sqrt(q^2 - Omega^2) dx.
double gamma_derivative(const FrequencyModel& model, double q);

struct GammaSearchOptions {
    double q_lo = 1.0;
    double q_hi = 10.0;
    double q_tol = 1e-8;
};

struct GammaMaximum {
    double gamma_star;
    double q_star;
    bool at_boundary;  // maximiser is q = 1
};

/// Golden-section search on [q_lo, q_hi], refined by bisection on gamma'.
GammaMaximum maximize_gamma(const FrequencyModel& model, const GammaSearchOptions& opts = {});

/// K_crit = 1/(p gamma*).
double critical_coupling(const FrequencyModel& model, double p);

enum class ProfileBranch { Upper, Lower };

/// q solving gamma(q) = 1/(K p). Upper: q >= q* (the branch continuous from
/// q* towards large K, kappa = q grows). Lower: 1 <= q <= q*.
/// Throws std::domain_error below K_crit or when the branch has no root.
double consistent_q(const FrequencyModel& model, double p, double K, ProfileBranch branch = ProfileBranch::Upper);

/// u*(x) = arcsin((Omega(x) - mean)/kappa), kappa = K p q gamma(q).
class SyncProfile {
public:
    SyncProfile(FrequencyModel model, double kappa);

    double kappa() const noexcept { return kappa_; }
    const FrequencyModel& model() const noexcept { return model_; }

    double operator()(double x) const;
    std::vector<double> sample(const std::vector<double>& xs) const;
    /// Profile on the grid x_i = i/(m-1), i = 0..m-1.
    std::vector<double> on_uniform_grid(std::size_t m) const;

private:
    FrequencyModel model_;
    double kappa_;
    double mean_;
};

/// Throws std::domain_error ("no synchronous profile at this (K,q)") when
/// kappa < sup|Omega - mean|.
SyncProfile sync_profile(const FrequencyModel& model, double p, double K, double q);

/// Sup-norm of F(u*) = Omega - mean + K p int sin(u*(y) - u*(x)) dy on an
/// m-point uniform grid (the profile residual).
double profile_residual(const SyncProfile& profile, double p, double K, std::size_t m = 1001);

struct MeanFieldReport {
    double p;
    double gamma_star;
    double q_star;
    double K_crit;
    double K;
    double q;
    double kappa;
};

/// Report at coupling K >= K_crit on the upper branch.
MeanFieldReport meanfield_report(const FrequencyModel& model, double p, double K);

struct SpectrumReport {
    double kappa;
    double C;  // int_0^1 cos u*(y) dy
    double ess_lo;
    double ess_hi;
    double zero_eig_lhs;  // (1/(kappa C)) int Omega^2 / sqrt(kappa^2 - Omega^2)
    bool stable;
    /// Eigenvalues lambda = K p lambda* with I(lambda*) = 1, outside the
    /// essential interval.
    std::vector<double> point_eigs;
};

/// Requires an even density (Omega odd about 1/2); throws std::domain_error
/// for kappa < 1 or asymmetric models.
SpectrumReport spectrum_report(const FrequencyModel& model, double p, double K, double q);

/// I(lambda*) = (1/kappa^2) int_0^1 Omega^2 / (C c(y) + lambda*) dy.
double point_spectrum_function(const FrequencyModel& model, double kappa, double C, double lambda_star);

/// A function on [0,1] given by values at increasing nodes, linearly
/// interpolated and linearly extrapolated past the outer nodes.
struct GridFunction {
    std::vector<double> nodes;
    std::vector<double> values;

    double operator()(double x) const;
    /// Exact L2 norm of the interpolant over [0,1].
    double l2_norm() const;
};

/// The kernel direction v* of the linearisation about the profile, from the
/// m-point midpoint discretisation: eigenvector of the eigenvalue nearest 0
/// on the mean-zero subspace, unit L2 norm, oriented so int Omega v* > 0.
struct DiscreteKernelMode {
    GridFunction mode;
    double eigenvalue;      // of the discretised linearisation
    double next_eigenvalue; // closest other eigenvalue (spectral gap check)
};
DiscreteKernelMode kernel_mode(const FrequencyModel& model, double p, double K, double q, std::size_t m = 2048);

struct CMCoefficients {
    double a;          // int int W sin(u*(y) - u*(x)) v*(x)
    double a_forcing;  // -(1/K_crit) int (Omega - mean) v*
    double b;          // -(K_crit/2) int int W sin(u*(y) - u*(x)) (v*(y) - v*(x))^2 v*(x)
    int product_sign;  // sign(a b)
};

/// Tensor Gauss-Legendre (256 x 256). Throws std::invalid_argument unless
/// |‖v*‖_2 - 1| <= 1e-6.
CMCoefficients cm_coefficients(const FrequencyModel& model, double p, double K_crit, double q, const GridFunction& v);

}  // namespace gk
