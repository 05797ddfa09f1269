#pragma once

// Pseudo-arclength continuation of the solution curve of F(y) = 0,
// F: R^{N+1} -> R^N, where the last coordinate of y is the parameter.
// Secant predictor, Newton corrector on F plus the arclength equation.

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gk::cont {

struct EigSummary {
    double smallest = 0.0;   // signed eigenvalue of smallest magnitude
    double rightmost = 0.0;  // largest eigenvalue
    int unstable = 0;        // number of eigenvalues > 0
};

class Problem {
public:
    virtual ~Problem() = default;

    /// Number of unknowns N + 1 (the parameter is the last one).
    virtual std::size_t dimension() const = 0;
    virtual Eigen::VectorXd residual(const Eigen::VectorXd& y) const = 0;
    /// N x (N + 1).
    virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& y) const = 0;
    /// Spectral summary of the state part of y; at a fold one eigenvalue
    /// crosses zero.
    virtual EigSummary eig_summary(const Eigen::VectorXd& y) const = 0;
    /// Diagonal of the metric used for arclength.
    virtual Eigen::VectorXd metric() const { return Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dimension())); }
    /// Called on every accepted corrector result (e.g. to re-impose a gauge).
    virtual void canonicalize(Eigen::VectorXd&) const {}
};

struct Options {
    double ds = 0.05;
    double ds_min_factor = 1.0 / 64.0;
    double ds_max_factor = 4.0;
    double grow = 1.3;
    int easy_steps = 4;        // consecutive easy steps before growing ds
    int easy_iterations = 3;   // a step is easy when Newton needs at most this many
    double tol = 1e-10;        // sup-norm of F at accepted points
    int max_iter = 12;
    double max_condition = 1e14;
    double param_min = 0.0;
    double param_max = 1e300;
    int direction = -1;        // initial sign of d(parameter)/ds
    std::size_t max_points = 1000;
    std::size_t max_folds = 0;  // stop after this many folds (0: no limit)
    std::size_t points_after_fold = 3;
    double fold_tol = 1e-8;     // arclength width when refining a fold
};

struct Point {
    Eigen::VectorXd y;
    EigSummary eig;
    double arclength = 0.0;
    int iterations = 0;
};

struct Fold {
    double param = 0.0;
    Eigen::VectorXd y;
    double eig = 0.0;              // smallest-magnitude eigenvalue at the fold
    double arclength = 0.0;
    std::size_t index = 0;     // the turning point on the curve
    double quadratic_param = 0.0;  // vertex of the parabola through three points
    bool eig_crossing = false;     // an eigenvalue crosses zero nearby
    bool suspect = false;          // turning and eigenvalue crossing disagree
};

enum class Termination { ParameterRange, MaxPoints, Stalled, FoldLimit };
std::string_view to_string(Termination t) noexcept;

struct Curve {
    std::vector<Point> points;
    std::vector<Fold> folds;
    int direction = -1;
    Termination termination = Termination::MaxPoints;
    double ds_max = 0.0;
};

/// Newton on F(y) = 0 with one extra linear equation t^T (y - y_ref) = s.
/// Returns the number of iterations, or -1 on failure.
int correct(const Problem& problem, Eigen::VectorXd& y, const Eigen::VectorXd& t, const Eigen::VectorXd& y_ref,
            double s, const Options& opts);

/// y0 must satisfy |F(y0)| <= max(tol, 1e-9); throws std::invalid_argument otherwise.
Curve trace(const Problem& problem, const Eigen::VectorXd& y0, const Options& opts);

/// Unit tangent (in the metric) oriented so that its projection on `along`
/// is positive.
Eigen::VectorXd tangent(const Problem& problem, const Eigen::VectorXd& y, const Eigen::VectorXd& along);

/// Refines a parameter turning point between ya and yb by bisection on the
/// arclength along their chord, solving for a zero of the tangent's
/// parameter component. Throws std::runtime_error when the tangent does not
/// change sign in the bracket.
Fold locate_fold(const Problem& problem, const Eigen::VectorXd& ya, const Eigen::VectorXd& yb, const Options& opts);

}  // namespace gk::cont
