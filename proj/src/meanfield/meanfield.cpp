#include "gk/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "gk/kernels.hpp"
#include "gk/linalg.hpp"
#include "gk/quadrature.hpp"

namespace gk {

namespace {

constexpr double kQuadTol = 1e-14;

// q^2 - Omega^2 written as (q^2 - 1) + (1 - Omega^2) so the edge of the
// support does not cancel catastrophically.
double gap_sq(double q, const FrequencyModel::QuantileSample& s) {
    return std::max(0.0, (q - 1.0) * (q + 1.0) + s.one_minus_sq);
}

void require_q(double q) {
    if (!(q >= 1.0)) throw std::domain_error("gamma(q) is defined for q >= 1");
}

}  // namespace

double gamma_of_q(const FrequencyModel& model, double q) {
    require_q(q);
    const double integral = quad::integrate_gaps(
        [&](double, double l, double r) { return std::sqrt(gap_sq(q, model.quantile_at(l, r))); }, 0.0, 1.0, kQuadTol);
    return integral / (q * q);
}

double gamma_derivative(const FrequencyModel& model, double q) {
    require_q(q);
    const double integral = quad::integrate_gaps(
        [&](double, double l, double r) {
            const auto s = model.quantile_at(l, r);
            const double g = gap_sq(q, s);
            if (g <= 0.0) return 0.0;
            return (2.0 * s.omega * s.omega - q * q) / std::sqrt(g);
        },
        0.0, 1.0, kQuadTol);
    return integral / (q * q * q);
}

GammaMaximum maximize_gamma(const FrequencyModel& model, const GammaSearchOptions& opts) {
    if (!(opts.q_lo >= 1.0 && opts.q_hi > opts.q_lo)) throw std::invalid_argument("bad q search bracket");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = opts.q_lo;
    double b = opts.q_hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = gamma_of_q(model, c);
    double fd = gamma_of_q(model, d);
    while (b - a > 1e-6) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = gamma_of_q(model, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = gamma_of_q(model, d);
        }
    }

    // gamma' <= 0 just above the lower end: the maximiser is the boundary.
    if (a - opts.q_lo < 1e-5 && gamma_derivative(model, opts.q_lo + opts.q_tol) <= 0.0) {
        return {gamma_of_q(model, opts.q_lo), opts.q_lo, opts.q_lo == 1.0};
    }

    double lo = std::max(opts.q_lo, a - 1e-5);
    double hi = std::min(opts.q_hi, b + 1e-5);
    double dlo = gamma_derivative(model, lo);
    double dhi = gamma_derivative(model, hi);
    for (int widen = 0; widen < 60 && !(dlo > 0.0 && dhi < 0.0); ++widen) {
        if (dlo <= 0.0) lo = std::max(opts.q_lo, lo - 2.0 * (hi - lo));
        if (dhi >= 0.0) hi = std::min(opts.q_hi, hi + 2.0 * (hi - lo));
        dlo = gamma_derivative(model, lo);
        dhi = gamma_derivative(model, hi);
    }
    if (!(dlo > 0.0 && dhi < 0.0)) {
        const double q = 0.5 * (a + b);
        return {gamma_of_q(model, q), q, false};
    }
    while (hi - lo > 0.01 * opts.q_tol) {
        const double mid = 0.5 * (lo + hi);
        if (gamma_derivative(model, mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double q = 0.5 * (lo + hi);
    return {gamma_of_q(model, q), q, false};
}

double critical_coupling(const FrequencyModel& model, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("edge probability must lie in (0,1]");
    return 1.0 / (p * maximize_gamma(model).gamma_star);
}

double consistent_q(const FrequencyModel& model, double p, double K, ProfileBranch branch) {
    if (!(p > 0.0 && p <= 1.0) || !(K > 0.0)) throw std::domain_error("need p in (0,1] and K > 0");
    const auto best = maximize_gamma(model);
    const double target = 1.0 / (K * p);
    if (target > best.gamma_star * (1.0 + 1e-12))
        throw std::domain_error("K is below the mean-field critical coupling; no synchronous profile");
    if (target >= best.gamma_star) return best.q_star;

    double lo;
    double hi;
    if (branch == ProfileBranch::Upper) {
        lo = best.q_star;
        hi = std::max(2.0 * best.q_star, 2.0);
        while (gamma_of_q(model, hi) > target) hi *= 2.0;
    } else {
        lo = 1.0;
        hi = best.q_star;
        if (gamma_of_q(model, lo) > target)
            throw std::domain_error("lower profile branch does not reach this coupling");
    }
    // gamma - target changes sign on [lo, hi]; orientation depends on branch.
    const bool decreasing = branch == ProfileBranch::Upper;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        const bool above = gamma_of_q(model, mid) > target;
        if (above == decreasing)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

SyncProfile::SyncProfile(FrequencyModel model, double kappa)
    : model_(std::move(model)), kappa_(kappa), mean_(model_.mean_frequency()) {
    if (!(kappa_ >= model_.sup_deviation() * (1.0 - 1e-12)))
        throw std::domain_error("no synchronous profile at this (K,q): kappa < sup|Omega - mean|");
}

double SyncProfile::operator()(double x) const {
    const double arg = (model_.quantile(x) - mean_) / kappa_;
    return std::asin(std::clamp(arg, -1.0, 1.0));
}

std::vector<double> SyncProfile::sample(const std::vector<double>& xs) const {
    std::vector<double> out;
    out.reserve(xs.size());
    for (const double x : xs) out.push_back((*this)(x));
    return out;
}

std::vector<double> SyncProfile::on_uniform_grid(std::size_t m) const {
    std::vector<double> xs(m);
    for (std::size_t i = 0; i < m; ++i) xs[i] = m > 1 ? static_cast<double>(i) / static_cast<double>(m - 1) : 0.5;
    return sample(xs);
}

SyncProfile sync_profile(const FrequencyModel& model, double p, double K, double q) {
    if (!(p > 0.0 && p <= 1.0) || !(K > 0.0)) throw std::domain_error("need p in (0,1] and K > 0");
    const double kappa = K * p * q * gamma_of_q(model, q);
    return SyncProfile(model, kappa);
}

double profile_residual(const SyncProfile& profile, double p, double K, std::size_t m) {
    const auto& model = profile.model();
    const double kappa = profile.kappa();
    const double mean = model.mean_frequency();
    // sin u* = (Omega - mean)/kappa integrates to zero up to quadrature error.
    const double int_sin =
        quad::integrate([&](double y) { return (model.quantile(y) - mean) / kappa; }, 0.0, 1.0, kQuadTol);
    const double int_cos = quad::integrate_gaps(
        [&](double, double l, double r) {
            const auto s = model.quantile_at(l, r);
            if (mean == 0.0) return std::sqrt(gap_sq(kappa, s)) / kappa;
            const double arg = (s.omega - mean) / kappa;
            return std::sqrt(std::max(0.0, 1.0 - arg * arg));
        },
        0.0, 1.0, kQuadTol);
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = m > 1 ? static_cast<double>(i) / static_cast<double>(m - 1) : 0.5;
        const double u = profile(x);
        // int sin(u(y) - u(x)) dy = cos u(x) int sin u - sin u(x) int cos u
        const double coupling = std::cos(u) * int_sin - std::sin(u) * int_cos;
        const double residual = model.quantile(x) - mean + K * p * coupling;
        worst = std::max(worst, std::abs(residual));
    }
    return worst;
}

MeanFieldReport meanfield_report(const FrequencyModel& model, double p, double K) {
    const auto best = maximize_gamma(model);
    const double q = consistent_q(model, p, K, ProfileBranch::Upper);
    return {p, best.gamma_star, best.q_star, 1.0 / (p * best.gamma_star), K, q, K * p * q * gamma_of_q(model, q)};
}

double point_spectrum_function(const FrequencyModel& model, double kappa, double C, double lambda_star) {
    const double integral = quad::integrate_gaps(
        [&](double, double l, double r) {
            const auto s = model.quantile_at(l, r);
            const double c = std::sqrt(gap_sq(kappa, s)) / kappa;
            return s.omega * s.omega / (C * c + lambda_star);
        },
        0.0, 1.0, 1e-12);
    return integral / (kappa * kappa);
}

SpectrumReport spectrum_report(const FrequencyModel& model, double p, double K, double q) {
    if (!model.odd_about_half())
        throw std::domain_error("spectral formulas need Omega odd about x = 1/2 (even density)");
    const double kappa = K * p * q * gamma_of_q(model, q);
    const double sup_omega = model.sup_deviation();
    if (kappa < 1.0 - 1e-12 || kappa < sup_omega * (1.0 - 1e-12))
        throw std::domain_error("kappa < 1: no synchronous profile");

    SpectrumReport rep{};
    rep.kappa = kappa;
    rep.C = quad::integrate_gaps(
                [&](double, double l, double r) { return std::sqrt(gap_sq(kappa, model.quantile_at(l, r))); }, 0.0, 1.0,
                kQuadTol) /
            kappa;
    const double c_min = std::sqrt(std::max(0.0, 1.0 - (sup_omega / kappa) * (sup_omega / kappa)));
    rep.ess_lo = -K * p * rep.C;
    rep.ess_hi = -K * p * c_min * rep.C;
    rep.zero_eig_lhs = quad::integrate_gaps(
                           [&](double, double l, double r) {
                               const auto s = model.quantile_at(l, r);
                               const double g = gap_sq(kappa, s);
                               if (g <= 0.0) return 0.0;
                               return s.omega * s.omega / std::sqrt(g);
                           },
                           0.0, 1.0, kQuadTol) /
                       (kappa * rep.C);
    rep.stable = rep.zero_eig_lhs < 1.0 && kappa > 1.0;

    // I is strictly decreasing on (-C c_min, inf); bracket its crossing of 1.
    const double floor = -rep.C * c_min;
    double lo = floor + 1e-12 * (1.0 + std::abs(floor));
    double hi = std::max(1.0, std::abs(floor));
    const auto excess = [&](double ls) { return point_spectrum_function(model, kappa, rep.C, ls) - 1.0; };
    if (c_min > 0.0 && excess(lo) > 0.0) {
        while (excess(hi) > 0.0) hi *= 2.0;
        for (int i = 0; i < 200 && hi - lo > 1e-14 * (1.0 + std::abs(hi)); ++i) {
            const double mid = 0.5 * (lo + hi);
            if (excess(mid) > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        rep.point_eigs.push_back(K * p * 0.5 * (lo + hi));
    }
    return rep;
}

double GridFunction::operator()(double x) const {
    const std::size_t m = nodes.size();
    if (m == 0) return 0.0;
    if (m == 1) return values[0];
    std::size_t i;
    if (x <= nodes.front())
        i = 0;
    else if (x >= nodes.back())
        i = m - 2;
    else
        i = static_cast<std::size_t>(std::upper_bound(nodes.begin(), nodes.end(), x) - nodes.begin()) - 1;
    const double t = (x - nodes[i]) / (nodes[i + 1] - nodes[i]);
    return values[i] + t * (values[i + 1] - values[i]);
}

double GridFunction::l2_norm() const {
    const std::size_t m = nodes.size();
    if (m == 0) return 0.0;
    // Exact integral of a squared linear function between two points.
    const auto piece = [](double x0, double x1, double f0, double f1) {
        return (x1 - x0) * (f0 * f0 + f0 * f1 + f1 * f1) / 3.0;
    };
    double sum = 0.0;
    if (nodes.front() > 0.0) sum += piece(0.0, nodes.front(), (*this)(0.0), values.front());
    for (std::size_t i = 0; i + 1 < m; ++i) sum += piece(nodes[i], nodes[i + 1], values[i], values[i + 1]);
    if (nodes.back() < 1.0) sum += piece(nodes.back(), 1.0, values.back(), (*this)(1.0));
    return std::sqrt(sum);
}

DiscreteKernelMode kernel_mode(const FrequencyModel& model, double p, double K, double q, std::size_t m) {
    if (m < 4) throw std::invalid_argument("kernel_mode needs m >= 4");
    const auto profile = sync_profile(model, p, K, q);
    std::vector<double> xs(m), s(m), c(m);
    for (std::size_t j = 0; j < m; ++j) {
        xs[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
        const double u = profile(xs[j]);
        s[j] = std::sin(u);
        c[j] = std::cos(u);
    }
    // Midpoint discretisation of L v = K p int cos(u(y) - u(x)) (v(y) - v(x)) dy.
    std::vector<double> weights(m * m, 1.0);
    std::vector<double> jac(m * m);
    kernels::jacobian_fill(weights, m, s, c, K * p / static_cast<double>(m), jac);
    Eigen::MatrixXd L = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        jac.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));

    const Eigen::MatrixXd reduced = linalg::restrict_to_mean_zero(L);
    const Eigen::VectorXd values = linalg::symmetric_eigenvalues(reduced);
    const auto pair = linalg::symmetric_eigenpair_near(reduced, 0.0);
    double next = 0.0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values(i) == pair.value) continue;
        if (std::abs(values(i)) < best_gap) {
            best_gap = std::abs(values(i));
            next = values(i);
        }
    }

    Eigen::VectorXd v = linalg::lift_from_mean_zero(pair.vector);
    double corr = 0.0;
    for (std::size_t j = 0; j < m; ++j) corr += model.quantile(xs[j]) * v(static_cast<Eigen::Index>(j));
    if (corr < 0.0) v = -v;

    GridFunction g{xs, std::vector<double>(v.data(), v.data() + v.size())};
    const double norm = g.l2_norm();
    for (double& value : g.values) value /= norm;
    return {std::move(g), pair.value, next};
}

CMCoefficients cm_coefficients(const FrequencyModel& model, double p, double K_crit, double q, const GridFunction& v) {
    if (std::abs(v.l2_norm() - 1.0) > 1e-6) throw std::invalid_argument("v* must have unit L2 norm (to 1e-6)");
    const auto profile = sync_profile(model, p, K_crit, q);
    static const quad::UnitGaussRule<256> rule;
    constexpr unsigned N = 256;
    const double mean = model.mean_frequency();
    std::array<double, N> u{}, vv{}, om{};
    for (unsigned i = 0; i < N; ++i) {
        u[i] = profile(rule.nodes[i]);
        vv[i] = v(rule.nodes[i]);
        om[i] = model.quantile(rule.nodes[i]) - mean;
    }
    double a = 0.0;
    double a_forcing = 0.0;
    double b = 0.0;
    for (unsigned i = 0; i < N; ++i) {
        double inner_a = 0.0;
        double inner_b = 0.0;
        for (unsigned k = 0; k < N; ++k) {
            const double sn = p * std::sin(u[k] - u[i]);
            const double dv = vv[k] - vv[i];
            inner_a += rule.weights[k] * sn;
            inner_b += rule.weights[k] * sn * dv * dv;
        }
        a += rule.weights[i] * inner_a * vv[i];
        b += rule.weights[i] * inner_b * vv[i];
        a_forcing += rule.weights[i] * om[i] * vv[i];
    }
    b *= -0.5 * K_crit;
    a_forcing *= -1.0 / K_crit;
    const double prod = a * b;
    return {a, a_forcing, b, prod > 0.0 ? 1 : (prod < 0.0 ? -1 : 0)};
}

}  // namespace gk
