#include "gk/finite_system.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gk/kernels.hpp"
#include "gk/linalg.hpp"

namespace gk {

namespace {

double mean_of(std::span<const double> v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (const double x : v) {
        if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(x));
    }
    return m;
}

// s = sin u, c = cos u, as = A s, ac = A c.
struct CouplingWork {
    std::vector<double> s, c, as, ac;

    explicit CouplingWork(std::size_t n) : s(n), c(n), as(n), ac(n) {}

    void evaluate(const StepGraphon& a, std::span<const double> u) {
        for (std::size_t j = 0; j < u.size(); ++j) {
            s[j] = std::sin(u[j]);
            c[j] = std::cos(u[j]);
        }
        kernels::coupling_sums(a.weights(), a.size(), s, c, as, ac);
    }

    // sum_k A_jk sin(u_k - u_j) = c_j (A s)_j - s_j (A c)_j
    double sine_sum(std::size_t j) const { return c[j] * as[j] - s[j] * ac[j]; }
};

void require_size(const FiniteSystem& sys, std::size_t got) {
    if (got != sys.size()) throw std::invalid_argument("phase vector length does not match the system size");
}

}  // namespace

FiniteSystem::FiniteSystem(std::vector<double> omega, StepGraphon adjacency, double K)
    : omega_(std::move(omega)), K_(K) {
    if (adjacency.size() != omega_.size()) throw std::invalid_argument("omega and adjacency sizes differ");
    if (omega_.empty()) throw std::invalid_argument("empty system");
    if (!(K_ >= 0.0)) throw std::invalid_argument("coupling K must be >= 0");
    for (const double w : omega_)
        if (!(std::abs(w) <= 1.0)) throw std::invalid_argument("natural frequencies must lie in [-1,1]");
    adjacency_ = std::make_shared<const StepGraphon>(std::move(adjacency));
    mean_omega_ = mean_of(omega_);
}

FiniteSystem::FiniteSystem(std::vector<double> omega, std::shared_ptr<const StepGraphon> adjacency, double K,
                           double mean)
    : omega_(std::move(omega)), adjacency_(std::move(adjacency)), K_(K), mean_omega_(mean) {}

FiniteSystem FiniteSystem::with_coupling(double K) const {
    if (!(K >= 0.0)) throw std::invalid_argument("coupling K must be >= 0");
    return FiniteSystem(omega_, adjacency_, K, mean_omega_);
}

std::vector<double> coupling_term(const FiniteSystem& sys, std::span<const double> u) {
    require_size(sys, u.size());
    const std::size_t n = sys.size();
    CouplingWork w(n);
    w.evaluate(sys.adjacency(), u);
    std::vector<double> out(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = inv_n * w.sine_sum(j);
    return out;
}

std::vector<double> rhs(const FiniteSystem& sys, std::span<const double> u, double omega_star) {
    require_size(sys, u.size());
    const std::size_t n = sys.size();
    CouplingWork w(n);
    w.evaluate(sys.adjacency(), u);
    const double scale = sys.coupling() / static_cast<double>(n);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = sys.omega()[j] - omega_star + scale * w.sine_sum(j);
    return out;
}

Eigen::MatrixXd jacobian(const FiniteSystem& sys, std::span<const double> u) {
    require_size(sys, u.size());
    const std::size_t n = sys.size();
    std::vector<double> s(n), c(n);
    for (std::size_t j = 0; j < n; ++j) {
        s[j] = std::sin(u[j]);
        c[j] = std::cos(u[j]);
    }
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd jac(N, N);
    // The kernel writes row-major; J is symmetric so the layouts coincide.
    kernels::jacobian_fill(sys.adjacency().weights(), n, s, c, sys.coupling() / static_cast<double>(n),
                           std::span<double>(jac.data(), n * n));
    return jac;
}

std::string_view to_string(Stability s) noexcept {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Marginal: return "marginal";
        case Stability::Unstable: return "unstable";
    }
    return "unknown";
}

Stability classify(std::span<const double> eigenvalues) noexcept {
    bool all_negative = true;
    for (const double l : eigenvalues) {
        if (l > kStabilityThreshold) return Stability::Unstable;
        if (l >= -kStabilityThreshold) all_negative = false;
    }
    return all_negative ? Stability::Stable : Stability::Marginal;
}

Eigen::VectorXd reduced_spectrum(const FiniteSystem& sys, std::span<const double> u) {
    if (sys.size() < 2) return Eigen::VectorXd(0);
    return linalg::symmetric_eigenvalues(linalg::restrict_to_mean_zero(jacobian(sys, u)));
}

double order_parameter(std::span<const double> theta) {
    if (theta.empty()) return 0.0;
    double re = 0.0;
    double im = 0.0;
    for (const double t : theta) {
        re += std::cos(t);
        im += std::sin(t);
    }
    return std::min(1.0, std::hypot(re, im) / static_cast<double>(theta.size()));
}

void attach_spectrum(const FiniteSystem& sys, SyncState& st, std::size_t n_eigs) {
    st.r = order_parameter(st.u);
    const Eigen::VectorXd eig = reduced_spectrum(sys, st.u);
    std::vector<double> values(eig.data(), eig.data() + eig.size());
    st.max_eig = values.empty() ? 0.0 : values.back();
    st.stability = classify(values);
    std::sort(values.begin(), values.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    values.resize(std::min(values.size(), n_eigs));
    st.leading_eigs = std::move(values);
}

std::string_view to_string(SolveStatus s) noexcept {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIter: return "max-iter";
        case SolveStatus::Stalled: return "stalled";
        case SolveStatus::NearFold: return "near-fold";
        case SolveStatus::NonFinite: return "non-finite";
    }
    return "unknown";
}

SolveResult newton_solve(const FiniteSystem& sys, std::span<const double> u0, const NewtonOptions& opts) {
    require_size(sys, u0.size());
    const std::size_t n = sys.size();
    const auto N = static_cast<Eigen::Index>(n);

    std::vector<double> u(u0.begin(), u0.end());
    const double shift = mean_of(u);
    for (double& x : u) x -= shift;
    double omega_star = sys.mean_omega();

    SolveResult result;
    Eigen::MatrixXd bordered(N + 1, N + 1);
    Eigen::VectorXd b(N + 1);
    double best = std::numeric_limits<double>::infinity();
    int best_iter = 0;
    for (int iter = 0;; ++iter) {
        const std::vector<double> g = rhs(sys, u, omega_star);
        const double res = sup_norm(g);
        result.iterations = iter;
        result.residual_norm = res;
        if (!std::isfinite(res)) {
            result.status = SolveStatus::NonFinite;
            return result;
        }
        if (res <= opts.tol) break;
        if (iter >= opts.max_iter) {
            result.status = SolveStatus::MaxIter;
            return result;
        }
        if (res < 0.5 * best) {
            best = res;
            best_iter = iter;
        } else if (opts.stall_iterations > 0 && iter - best_iter >= opts.stall_iterations) {
            result.status = SolveStatus::Stalled;
            return result;
        }

        bordered.topLeftCorner(N, N) = jacobian(sys, u);
        bordered.topRightCorner(N, 1).setConstant(-1.0);
        bordered.bottomLeftCorner(1, N).setConstant(1.0);
        bordered(N, N) = 0.0;
        double gauge = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            b(static_cast<Eigen::Index>(j)) = -g[j];
            gauge += u[j];
        }
        b(N) = -gauge;

        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(bordered);
        const double rcond = lu.rcond();
        if (!(rcond * opts.max_condition > 1.0)) {
            result.status = SolveStatus::NearFold;
            return result;
        }
        const Eigen::VectorXd step = lu.solve(b);
        if (!step.allFinite()) {
            result.status = SolveStatus::NonFinite;
            return result;
        }
        for (std::size_t j = 0; j < n; ++j) u[j] += step(static_cast<Eigen::Index>(j));
        omega_star += step(N);
    }

    const double drift = mean_of(u);
    for (double& x : u) x -= drift;

    SyncState st;
    st.u = std::move(u);
    st.omega_star = omega_star;
    st.K = sys.coupling();
    st.residual_norm = sup_norm(rhs(sys, st.u, omega_star));
    if (st.residual_norm > opts.tol) {
        // The gauge shift moved the residual by rounding only; report honestly.
        result.status = SolveStatus::MaxIter;
        result.residual_norm = st.residual_norm;
        return result;
    }
    if (opts.compute_spectrum)
        attach_spectrum(sys, st, opts.n_eigs);
    else
        st.r = order_parameter(st.u);
    result.status = SolveStatus::Converged;
    result.residual_norm = st.residual_norm;
    result.state = std::move(st);
    return result;
}

Trajectory integrate(const FiniteSystem& sys, std::span<const double> theta0, double t_end,
                     const IntegrateOptions& opts) {
    require_size(sys, theta0.size());
    if (!(opts.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
    const std::size_t n = sys.size();
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / opts.dt - 1e-12));
    const double dt = steps > 0 ? t_end / static_cast<double>(steps) : 0.0;
    const std::size_t every = std::max<std::size_t>(1, opts.record_every);

    CouplingWork work(n);
    const double scale = sys.coupling() / static_cast<double>(n);
    auto field = [&](std::span<const double> th, std::vector<double>& out) {
        work.evaluate(sys.adjacency(), th);
        for (std::size_t j = 0; j < n; ++j) out[j] = sys.omega()[j] - opts.frame_frequency + scale * work.sine_sum(j);
    };

    Trajectory traj;
    std::vector<double> th(theta0.begin(), theta0.end());
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    traj.times.push_back(0.0);
    traj.r.push_back(order_parameter(th));
    for (std::size_t step = 1; step <= steps; ++step) {
        field(th, k1);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = th[j] + 0.5 * dt * k1[j];
        field(tmp, k2);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = th[j] + 0.5 * dt * k2[j];
        field(tmp, k3);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = th[j] + dt * k3[j];
        field(tmp, k4);
        for (std::size_t j = 0; j < n; ++j) th[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        if (step % every == 0 || step == steps) {
            traj.times.push_back(static_cast<double>(step) * dt);
            traj.r.push_back(order_parameter(th));
        }
    }

    field(th, k1);
    const double mean_rate = mean_of(k1);
    for (const double v : k1) traj.frequency_spread = std::max(traj.frequency_spread, std::abs(v - mean_rate));
    traj.theta = std::move(th);
    return traj;
}

}  // namespace gk
