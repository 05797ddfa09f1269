#pragma once

// The n-oscillator Kuramoto network
//   theta_j' = omega_j + (K/n) sum_k A_jk sin(theta_k - theta_j)
// and its phase-locked states in the co-rotating, mean-zero gauge.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gk/graphon.hpp"

namespace gk {

class FiniteSystem {
public:
    /// Throws std::invalid_argument on size mismatch, |omega_j| > 1 or K < 0.
    /// Diagonal weights are allowed (cell-averaged graphons keep them) and
    /// drop out of G and J since sin(0) = 0.
    FiniteSystem(std::vector<double> omega, StepGraphon adjacency, double K);

    std::size_t size() const noexcept { return omega_.size(); }
    const std::vector<double>& omega() const noexcept { return omega_; }
    const StepGraphon& adjacency() const noexcept { return *adjacency_; }
    double coupling() const noexcept { return K_; }
    double mean_omega() const noexcept { return mean_omega_; }

    /// Same frequencies and graph at another coupling; shares the adjacency.
    FiniteSystem with_coupling(double K) const;

private:
    FiniteSystem(std::vector<double> omega, std::shared_ptr<const StepGraphon> adjacency, double K, double mean);

    std::vector<double> omega_;
    std::shared_ptr<const StepGraphon> adjacency_;
    double K_;
    double mean_omega_;
};

/// (1/n) sum_k A_jk sin(u_k - u_j), without the factor K.
std::vector<double> coupling_term(const FiniteSystem& sys, std::span<const double> u);

/// G_j = omega_j - omega_star + (K/n) sum_k A_jk sin(u_k - u_j).
std::vector<double> rhs(const FiniteSystem& sys, std::span<const double> u, double omega_star);

/// dG/du: J_jk = (K/n) A_jk cos(u_k - u_j) off the diagonal, rows sum to 0.
Eigen::MatrixXd jacobian(const FiniteSystem& sys, std::span<const double> u);

enum class Stability { Stable, Marginal, Unstable };
std::string_view to_string(Stability s) noexcept;

inline constexpr double kStabilityThreshold = 1e-8;

/// Stable if every eigenvalue < -1e-8, unstable if any > 1e-8, else marginal.
Stability classify(std::span<const double> eigenvalues) noexcept;

/// Ascending eigenvalues of J on the mean-zero subspace (the translation
/// mode removed).
Eigen::VectorXd reduced_spectrum(const FiniteSystem& sys, std::span<const double> u);

double order_parameter(std::span<const double> theta);

struct SyncState {
    std::vector<double> u;  // sum u_j = 0
    double omega_star = 0.0;
    double K = 0.0;
    double residual_norm = 0.0;
    double r = 0.0;
    std::vector<double> leading_eigs;  // smallest |lambda| first
    double max_eig = 0.0;              // rightmost gauge-reduced eigenvalue
    Stability stability = Stability::Marginal;

    bool stable() const noexcept { return stability == Stability::Stable; }
};

/// Fills r, leading_eigs, max_eig and stability from the spectrum at st.u.
void attach_spectrum(const FiniteSystem& sys, SyncState& st, std::size_t n_eigs = 5);

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 50;
    /// Give up early when the best residual has not halved for this many
    /// iterations (0 disables).
    int stall_iterations = 12;
    double max_condition = 1e14;
    bool compute_spectrum = true;
    std::size_t n_eigs = 5;
};

enum class SolveStatus { Converged, MaxIter, Stalled, NearFold, NonFinite };
std::string_view to_string(SolveStatus s) noexcept;

struct SolveResult {
    SolveStatus status = SolveStatus::MaxIter;
    int iterations = 0;
    double residual_norm = 0.0;
    std::optional<SyncState> state;  // set on Converged

    bool ok() const noexcept { return status == SolveStatus::Converged; }
};

/// Undamped Newton on {G(u, omega_star) = 0, sum u = 0} with the bordered
/// matrix [J, -1; 1^T, 0]. u0 is projected to mean zero first and omega_star
/// starts at mean(omega).
SolveResult newton_solve(const FiniteSystem& sys, std::span<const double> u0, const NewtonOptions& opts = {});

struct IntegrateOptions {
    double dt = 1e-2;
    /// Integrate in the frame rotating at this frequency.
    double frame_frequency = 0.0;
    /// Record r every this many steps (and at the end).
    std::size_t record_every = 10;
};

struct Trajectory {
    std::vector<double> theta;  // at t_end
    std::vector<double> times;
    std::vector<double> r;
    /// max_j |theta_j' - mean(theta')| at t_end.
    double frequency_spread = 0.0;
};

/// Fixed-step RK4. The step is shrunk slightly so that t_end is hit exactly.
Trajectory integrate(const FiniteSystem& sys, std::span<const double> theta0, double t_end,
                     const IntegrateOptions& opts = {});

}  // namespace gk
