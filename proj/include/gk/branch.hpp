#pragma once

// Branches of phase-locked states of a FiniteSystem followed in K.

#include <cstddef>
#include <vector>

#include "gk/continuation.hpp"
#include "gk/finite_system.hpp"

namespace gk {

/// The extended system y = (u, omega_star, K) -> (G(u, omega_star, K), sum u).
/// The coupling stored in `sys` is ignored; K is read from y.
class KuramotoProblem final : public cont::Problem {
public:
    explicit KuramotoProblem(FiniteSystem sys);

    std::size_t dimension() const override { return sys_.size() + 2; }
    Eigen::VectorXd residual(const Eigen::VectorXd& y) const override;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& y) const override;
    /// Eigenvalues of J on the mean-zero subspace.
    cont::EigSummary eig_summary(const Eigen::VectorXd& y) const override;
    /// Euclidean on (u, omega_star, K).
    Eigen::VectorXd metric() const override;
    void canonicalize(Eigen::VectorXd& y) const override;

    Eigen::VectorXd pack(const SyncState& st) const;
    const FiniteSystem& system() const noexcept { return sys_; }

private:
    FiniteSystem sys_;
};

struct BranchPoint {
    double K = 0.0;
    std::vector<double> u;
    double omega_star = 0.0;
    double r = 0.0;
    double smallest_eig = 0.0;  // gauge-reduced eigenvalue of smallest magnitude
    double max_eig = 0.0;
    int unstable = 0;           // eigenvalues > 0
    Stability stability = Stability::Marginal;
    double arclength = 0.0;
};

struct BranchFold {
    double K = 0.0;
    std::vector<double> u;
    double omega_star = 0.0;
    double eig = 0.0;           // smallest-magnitude eigenvalue at the refined fold
    double quadratic_K = 0.0;   // parabola vertex through the three bracketing points
    std::size_t index = 0;      // branch point nearest the turn
    double arclength = 0.0;
    bool eig_crossing = false;
    bool suspect = false;
};

struct Branch {
    std::vector<BranchPoint> points;
    std::vector<BranchFold> folds;
    int direction = -1;
    cont::Termination termination = cont::Termination::MaxPoints;
    double ds_max = 0.0;
};

/// Continues from a converged state (residual <= 1e-9 at start.K, else
/// std::invalid_argument). opts.param_min/max bound K.
Branch continue_branch(const FiniteSystem& sys, const SyncState& start, const cont::Options& opts);

/// Refines a fold between branch points lo < hi; throws std::runtime_error
/// when K does not turn inside the bracket.
BranchFold locate_fold(const FiniteSystem& sys, const Branch& branch, std::size_t lo, std::size_t hi,
                       const cont::Options& opts = {});

}  // namespace gk
