#include "gk/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gk::linalg {

namespace {

// w with H = I - 2 w w^T and H (1/sqrt(n)) = e_n.
Eigen::VectorXd reflector(Eigen::Index n) {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    w(n - 1) -= 1.0;
    const double norm = w.norm();
    if (norm == 0.0) return Eigen::VectorXd::Zero(n);
    return w / norm;
}

}  // namespace

Eigen::MatrixXd restrict_to_mean_zero(const Eigen::MatrixXd& m) {
    const Eigen::Index n = m.rows();
    if (n != m.cols() || n < 2) throw std::invalid_argument("restrict_to_mean_zero needs a square matrix, n >= 2");
    const Eigen::VectorXd w = reflector(n);
    const Eigen::VectorXd mw = m * w;
    const double wmw = w.dot(mw);
    // H M H = M - 2 w (M w)^T - 2 (M w) w^T + 4 (w^T M w) w w^T  (M symmetric)
    Eigen::MatrixXd hmh = m;
    hmh.noalias() -= 2.0 * w * mw.transpose();
    hmh.noalias() -= 2.0 * mw * w.transpose();
    hmh.noalias() += (4.0 * wmw) * w * w.transpose();
    return hmh.topLeftCorner(n - 1, n - 1);
}

Eigen::VectorXd lift_from_mean_zero(const Eigen::VectorXd& y) {
    const Eigen::Index n = y.size() + 1;
    Eigen::VectorXd z(n);
    z.head(n - 1) = y;
    z(n - 1) = 0.0;
    const Eigen::VectorXd w = reflector(n);
    return z - 2.0 * w * w.dot(z);
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("symmetric eigenvalue solve failed");
    return solver.eigenvalues();
}

Eigenpair symmetric_eigenpair_near(const Eigen::MatrixXd& m, double target) {
    const Eigen::VectorXd values = symmetric_eigenvalues(m);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < values.size(); ++i)
        if (std::abs(values(i) - target) < std::abs(values(best) - target)) best = i;
    const double lambda = values(best);

    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    const double shift = lambda - 1e-10 * scale;
    Eigen::MatrixXd shifted = m;
    shifted.diagonal().array() -= shift;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);

    Eigen::VectorXd x = Eigen::VectorXd::Ones(m.rows());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += 0.01 * std::sin(1.0 + static_cast<double>(i));
    x.normalize();
    for (int iter = 0; iter < 8; ++iter) {
        Eigen::VectorXd next = lu.solve(x);
        const double norm = next.norm();
        if (!std::isfinite(norm) || norm == 0.0) throw std::runtime_error("inverse iteration broke down");
        next /= norm;
        const double change = std::min((next - x).norm(), (next + x).norm());
        x = next;
        if (change < 1e-13) break;
    }
    return {lambda, x};
}

}  // namespace gk::linalg
