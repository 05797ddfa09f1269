#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gk/branch.hpp"
#include "gk/linalg.hpp"

namespace gk {

namespace {

std::span<const double> head(const Eigen::VectorXd& y, std::size_t n) { return {y.data(), n}; }

BranchFold to_branch_fold(const cont::Fold& f, std::size_t n) {
    BranchFold out;
    out.K = f.param;
    out.u.assign(f.y.data(), f.y.data() + n);
    out.omega_star = f.y(static_cast<Eigen::Index>(n));
    out.eig = f.eig;
    out.quadratic_K = f.quadratic_param;
    out.index = f.index;
    out.arclength = f.arclength;
    out.eig_crossing = f.eig_crossing;
    out.suspect = f.suspect;
    return out;
}

}  // namespace

KuramotoProblem::KuramotoProblem(FiniteSystem sys) : sys_(std::move(sys)) {}

Eigen::VectorXd KuramotoProblem::residual(const Eigen::VectorXd& y) const {
    const std::size_t n = sys_.size();
    const auto N = static_cast<Eigen::Index>(n);
    const double K = y(N + 1);
    const std::vector<double> g = rhs(sys_.with_coupling(std::max(K, 0.0)), head(y, n), y(N));
    Eigen::VectorXd out(N + 1);
    for (std::size_t j = 0; j < n; ++j) out(static_cast<Eigen::Index>(j)) = g[j];
    // K < 0 is outside the model; keep the map smooth by linear extension.
    if (K < 0.0) {
        const std::vector<double> c = coupling_term(sys_, head(y, n));
        for (std::size_t j = 0; j < n; ++j) out(static_cast<Eigen::Index>(j)) += K * c[j];
    }
    out(N) = y.head(N).sum();
    return out;
}

Eigen::MatrixXd KuramotoProblem::jacobian(const Eigen::VectorXd& y) const {
    const std::size_t n = sys_.size();
    const auto N = static_cast<Eigen::Index>(n);
    const double K = y(N + 1);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(N + 1, N + 2);
    if (K > 0.0) {
        out.topLeftCorner(N, N) = gk::jacobian(sys_.with_coupling(K), head(y, n));
    } else {
        out.topLeftCorner(N, N) = K * gk::jacobian(sys_.with_coupling(1.0), head(y, n));
    }
    out.block(0, N, N, 1).setConstant(-1.0);
    const std::vector<double> c = coupling_term(sys_, head(y, n));
    for (std::size_t j = 0; j < n; ++j) out(static_cast<Eigen::Index>(j), N + 1) = c[j];
    out.block(N, 0, 1, N).setConstant(1.0);
    return out;
}

cont::EigSummary KuramotoProblem::eig_summary(const Eigen::VectorXd& y) const {
    const std::size_t n = sys_.size();
    const auto N = static_cast<Eigen::Index>(n);
    const Eigen::VectorXd eig = reduced_spectrum(sys_.with_coupling(std::max(y(N + 1), 0.0)), head(y, n));
    cont::EigSummary out;
    if (eig.size() == 0) return out;
    out.rightmost = eig(eig.size() - 1);
    Eigen::Index nearest = 0;
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        if (std::abs(eig(i)) < std::abs(eig(nearest))) nearest = i;
        if (eig(i) > 0.0) ++out.unstable;
    }
    out.smallest = eig(nearest);
    return out;
}

Eigen::VectorXd KuramotoProblem::metric() const {
    const auto N = static_cast<Eigen::Index>(sys_.size());
    Eigen::VectorXd w(N + 2);
    // Plain Euclidean: a 1/n weight on u would shrink the arclength of a
    // fold carried by a few oscillators below any usable step.
    w.head(N).setConstant(1.0);
    w(N) = 1.0;
    w(N + 1) = 1.0;
    return w;
}

void KuramotoProblem::canonicalize(Eigen::VectorXd& y) const {
    const auto N = static_cast<Eigen::Index>(sys_.size());
    y.head(N).array() -= y.head(N).mean();
}

Eigen::VectorXd KuramotoProblem::pack(const SyncState& st) const {
    const std::size_t n = sys_.size();
    if (st.u.size() != n) throw std::invalid_argument("state size does not match the system");
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::VectorXd y(N + 2);
    for (std::size_t j = 0; j < n; ++j) y(static_cast<Eigen::Index>(j)) = st.u[j];
    y(N) = st.omega_star;
    y(N + 1) = st.K;
    return y;
}

Branch continue_branch(const FiniteSystem& sys, const SyncState& start, const cont::Options& opts) {
    const std::size_t n = sys.size();
    if (start.u.size() != n) throw std::invalid_argument("start state size does not match the system");
    const std::vector<double> g = rhs(sys.with_coupling(start.K), start.u, start.omega_star);
    double res = 0.0;
    for (const double v : g) res = std::max(res, std::abs(v));
    if (!(res <= 1e-9)) throw std::invalid_argument("continuation start is not converged (residual > 1e-9)");

    const KuramotoProblem problem(sys);
    const cont::Curve curve = cont::trace(problem, problem.pack(start), opts);

    Branch branch;
    branch.direction = curve.direction;
    branch.termination = curve.termination;
    branch.ds_max = curve.ds_max;
    const auto N = static_cast<Eigen::Index>(n);
    branch.points.reserve(curve.points.size());
    for (const auto& p : curve.points) {
        BranchPoint bp;
        bp.u.assign(p.y.data(), p.y.data() + n);
        bp.omega_star = p.y(N);
        bp.K = p.y(N + 1);
        bp.r = order_parameter(bp.u);
        bp.smallest_eig = p.eig.smallest;
        bp.max_eig = p.eig.rightmost;
        bp.unstable = p.eig.unstable;
        const double e[1] = {p.eig.rightmost};
        bp.stability = classify(e);
        bp.arclength = p.arclength;
        branch.points.push_back(std::move(bp));
    }
    for (const auto& f : curve.folds) branch.folds.push_back(to_branch_fold(f, n));
    return branch;
}

BranchFold locate_fold(const FiniteSystem& sys, const Branch& branch, std::size_t lo, std::size_t hi,
                       const cont::Options& opts) {
    if (!(lo < hi && hi < branch.points.size())) throw std::invalid_argument("fold bracket out of range");
    const KuramotoProblem problem(sys);
    auto pack = [&](const BranchPoint& p) {
        SyncState st;
        st.u = p.u;
        st.omega_star = p.omega_star;
        st.K = p.K;
        return problem.pack(st);
    };
    cont::Fold f = cont::locate_fold(problem, pack(branch.points[lo]), pack(branch.points[hi]), opts);
    f.index = lo;
    f.eig_crossing = branch.points[lo].unstable != branch.points[hi].unstable;
    return to_branch_fold(f, sys.size());
}

}  // namespace gk
