#include "gk/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gk::cont {

namespace {

double sup_norm(const Eigen::VectorXd& v) {
    if (!v.allFinite()) return std::numeric_limits<double>::infinity();
    return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

double wnorm(const Eigen::VectorXd& v, const Eigen::VectorXd& w) { return std::sqrt((w.array() * v.array().square()).sum()); }

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Vertex of the parabola through (s_i, p_i), i = 0..2.
double parabola_vertex(double s0, double p0, double s1, double p1, double s2, double p2) {
    const double d01 = (p1 - p0) / (s1 - s0);
    const double d12 = (p2 - p1) / (s2 - s1);
    const double a = (d12 - d01) / (s2 - s0);
    if (a == 0.0) return p1;
    const double b = d01 - a * (s0 + s1);
    const double c = p0 - a * s0 * s0 - b * s0;
    const double sv = -b / (2.0 * a);
    return a * sv * sv + b * sv + c;
}

// Parameter component of the tangent normalised by t^T W tau = 1.
double tangent_param(const Problem& problem, const Eigen::VectorXd& y, const Eigen::VectorXd& wt) {
    const Eigen::Index m = y.size();
    Eigen::MatrixXd a(m, m);
    a.topRows(m - 1) = problem.jacobian(y);
    a.row(m - 1) = wt.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs(m - 1) = 1.0;
    const Eigen::VectorXd tau = a.partialPivLu().solve(rhs);
    return tau(m - 1);
}

}  // namespace

std::string_view to_string(Termination t) noexcept {
    switch (t) {
        case Termination::ParameterRange: return "parameter-range";
        case Termination::MaxPoints: return "max-points";
        case Termination::Stalled: return "stalled";
        case Termination::FoldLimit: return "fold-limit";
    }
    return "unknown";
}

int correct(const Problem& problem, Eigen::VectorXd& y, const Eigen::VectorXd& wt, const Eigen::VectorXd& y_ref,
            double s, const Options& opts) {
    const Eigen::Index m = y.size();
    Eigen::MatrixXd a(m, m);
    Eigen::VectorXd rhs(m);
    double first = -1.0;
    for (int iter = 0; iter <= opts.max_iter; ++iter) {
        const Eigen::VectorXd f = problem.residual(y);
        const double arc = wt.dot(y - y_ref) - s;
        const double res = sup_norm(f);
        if (!std::isfinite(res) || !std::isfinite(arc)) return -1;
        if (first < 0.0) first = std::max(res, 1e-300);
        if (res <= opts.tol && std::abs(arc) <= std::max(opts.tol, 1e-12 * std::abs(s))) return iter;
        if (iter == opts.max_iter || res > 1e6 * first + 1.0) return -1;

        a.topRows(m - 1) = problem.jacobian(y);
        a.row(m - 1) = wt.transpose();
        rhs.head(m - 1) = -f;
        rhs(m - 1) = -arc;
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
        if (!(lu.rcond() * opts.max_condition > 1.0)) return -1;
        const Eigen::VectorXd step = lu.solve(rhs);
        if (!step.allFinite()) return -1;
        y += step;
    }
    return -1;
}

Eigen::VectorXd tangent(const Problem& problem, const Eigen::VectorXd& y, const Eigen::VectorXd& along) {
    const Eigen::VectorXd w = problem.metric();
    const Eigen::Index m = y.size();
    Eigen::MatrixXd a(m, m);
    a.topRows(m - 1) = problem.jacobian(y);
    a.row(m - 1) = (w.array() * along.array()).matrix().transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs(m - 1) = 1.0;
    Eigen::VectorXd tau = a.partialPivLu().solve(rhs);
    return tau / wnorm(tau, w);
}

Fold locate_fold(const Problem& problem, const Eigen::VectorXd& ya, const Eigen::VectorXd& yb, const Options& opts) {
    const Eigen::VectorXd w = problem.metric();
    const Eigen::VectorXd chord = yb - ya;
    const double length = wnorm(chord, w);
    if (!(length > 0.0)) throw std::runtime_error("fold bracket has zero length");
    const Eigen::VectorXd wt = (w.array() * chord.array()).matrix() / length;

    double lo = 0.0;
    double hi = length;
    Eigen::VectorXd y_lo = ya;
    Eigen::VectorXd y_hi = yb;
    const double f_lo = tangent_param(problem, y_lo, wt);
    const double f_hi = tangent_param(problem, y_hi, wt);
    if (sign_of(f_lo) * sign_of(f_hi) >= 0.0)
        throw std::runtime_error("no parameter turning point inside the bracket");

    Options tight = opts;
    tight.max_iter = std::max(opts.max_iter, 20);
    while (hi - lo > opts.fold_tol) {
        const double mid = 0.5 * (lo + hi);
        Eigen::VectorXd y = 0.5 * (y_lo + y_hi);
        if (correct(problem, y, wt, ya, mid, tight) < 0) throw std::runtime_error("corrector failed while refining a fold");
        problem.canonicalize(y);
        if (sign_of(tangent_param(problem, y, wt)) == sign_of(f_lo)) {
            lo = mid;
            y_lo = std::move(y);
        } else {
            hi = mid;
            y_hi = std::move(y);
        }
    }

    Fold fold;
    fold.y = std::abs(tangent_param(problem, y_lo, wt)) <= std::abs(tangent_param(problem, y_hi, wt)) ? y_lo : y_hi;
    fold.param = fold.y(fold.y.size() - 1);
    fold.eig = problem.eig_summary(fold.y).smallest;
    fold.arclength = wnorm(fold.y - ya, w);
    return fold;
}

Curve trace(const Problem& problem, const Eigen::VectorXd& y0, const Options& opts) {
    const auto dim = static_cast<Eigen::Index>(problem.dimension());
    if (y0.size() != dim) throw std::invalid_argument("starting point has the wrong dimension");
    if (!(opts.ds > 0.0)) throw std::invalid_argument("ds must be positive");
    if (opts.direction != 1 && opts.direction != -1) throw std::invalid_argument("direction must be +1 or -1");
    if (sup_norm(problem.residual(y0)) > std::max(opts.tol, 1e-9))
        throw std::invalid_argument("continuation start is not a converged solution");

    const Eigen::VectorXd w = problem.metric();
    const Eigen::Index last = dim - 1;
    const double ds_min = opts.ds * opts.ds_min_factor;
    const double ds_max = opts.ds * opts.ds_max_factor;

    Curve curve;
    curve.direction = opts.direction;
    curve.ds_max = ds_max;

    Eigen::VectorXd y = y0;
    problem.canonicalize(y);
    curve.points.push_back({y, problem.eig_summary(y), 0.0, 0});

    // The first step is a natural-parameter step; later steps use the secant.
    Eigen::VectorXd t = Eigen::VectorXd::Zero(dim);
    t(last) = opts.direction / std::sqrt(w(last));

    double ds = opts.ds;
    int easy = 0;
    std::size_t countdown = std::numeric_limits<std::size_t>::max();
    std::size_t jumped_fold_at = std::numeric_limits<std::size_t>::max();
    curve.termination = Termination::MaxPoints;

    while (curve.points.size() < opts.max_points) {
        const Eigen::VectorXd wt = (w.array() * t.array()).matrix();
        const Eigen::VectorXd y_pred = y + ds * t;
        Eigen::VectorXd y_new = y_pred;
        const int iters = correct(problem, y_new, wt, y, ds, opts);
        bool accepted = iters >= 0;
        Eigen::VectorXd step;
        double step_len = 0.0;
        if (accepted) {
            problem.canonicalize(y_new);
            step = y_new - y;
            step_len = wnorm(step, w);
            // Reject corrector results that wandered off or turned back.
            accepted = step_len > 0.0 && wnorm(y_new - y_pred, w) <= ds && step.dot(wt) > 0.0;
        }
        if (!accepted) {
            ds *= 0.5;
            easy = 0;
            if (ds < ds_min) {
                curve.termination = Termination::Stalled;
                break;
            }
            continue;
        }

        const double p_new = y_new(last);
        if (p_new < opts.param_min || p_new > opts.param_max) {
            curve.termination = Termination::ParameterRange;
            break;
        }

        const double s_new = curve.points.back().arclength + step_len;
        curve.points.push_back({y_new, problem.eig_summary(y_new), s_new, iters});
        t = step / step_len;
        y = std::move(y_new);

        const std::size_t k = curve.points.size() - 1;
        bool turned = false;
        if (k >= 2 && k - 1 != jumped_fold_at) {
            const Point& p0 = curve.points[k - 2];
            const Point& p1 = curve.points[k - 1];
            const Point& p2 = curve.points[k];
            const double d01 = p1.y(last) - p0.y(last);
            const double d12 = p2.y(last) - p1.y(last);
            if (sign_of(d01) * sign_of(d12) < 0.0) {
                Fold fold;
                try {
                    fold = locate_fold(problem, p0.y, p2.y, opts);
                } catch (const std::runtime_error&) {
                    // The turning point lies outside the chord tangents'
                    // resolution; keep the vertex estimate.
                    fold.y = p1.y;
                    fold.param = p1.y(last);
                    fold.eig = p1.eig.smallest;
                    fold.suspect = true;
                }
                fold.arclength = p0.arclength + wnorm(fold.y - p0.y, w);
                fold.index = k - 1;
                fold.quadratic_param = parabola_vertex(p0.arclength, p0.y(last), p1.arclength, p1.y(last),
                                                       p2.arclength, p2.y(last));
                curve.folds.push_back(std::move(fold));
                turned = true;
            }
        }
        // A step can jump over a turning point and still move the parameter
        // the same way. The stability change gives it away; the tangent
        // bisection on that step confirms the turn.
        if (!turned && k >= 1 && curve.points[k - 1].eig.unstable != curve.points[k].eig.unstable) {
            const Point& p1 = curve.points[k - 1];
            const Point& p2 = curve.points[k];
            try {
                Fold fold = locate_fold(problem, p1.y, p2.y, opts);
                fold.arclength = p1.arclength + wnorm(fold.y - p1.y, w);
                fold.index = k;
                fold.quadratic_param = fold.param;
                if (k >= 2) {
                    const Point& p0 = curve.points[k - 2];
                    fold.quadratic_param = parabola_vertex(p0.arclength, p0.y(last), p1.arclength, p1.y(last),
                                                           fold.arclength, fold.param);
                }
                curve.folds.push_back(std::move(fold));
                jumped_fold_at = k;
                turned = true;
            } catch (const std::runtime_error&) {
                // No turn inside the step: a simple eigenvalue crossing.
            }
        }
        if (turned && opts.max_folds > 0 && curve.folds.size() >= opts.max_folds &&
            countdown == std::numeric_limits<std::size_t>::max())
            countdown = opts.points_after_fold;
        if (countdown != std::numeric_limits<std::size_t>::max()) {
            if (countdown == 0) {
                curve.termination = Termination::FoldLimit;
                break;
            }
            --countdown;
        }

        if (iters <= opts.easy_iterations) {
            if (++easy >= opts.easy_steps) {
                ds = std::min(ds * opts.grow, ds_max);
                easy = 0;
            }
        } else {
            easy = 0;
        }
    }

    // Cross-check each turning point against a change in the number of
    // unstable eigenvalues within 10 ds of it.
    for (Fold& fold : curve.folds) {
        for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
            const Point& a = curve.points[i];
            const Point& b = curve.points[i + 1];
            if (a.eig.unstable == b.eig.unstable) continue;
            double s_cross = 0.5 * (a.arclength + b.arclength);
            if (sign_of(a.eig.smallest) * sign_of(b.eig.smallest) < 0.0)
                s_cross = a.arclength +
                          (b.arclength - a.arclength) * a.eig.smallest / (a.eig.smallest - b.eig.smallest);
            if (std::abs(s_cross - fold.arclength) <= 10.0 * opts.ds) {
                fold.eig_crossing = true;
                break;
            }
        }
        if (!fold.eig_crossing) fold.suspect = true;
    }
    return curve;
}

}  // namespace gk::cont
