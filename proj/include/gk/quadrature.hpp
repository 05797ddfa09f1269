#pragma once

// Thin wrappers over Boost.Math quadrature. Integrands with integrable
// endpoint singularities (1/sqrt at the edge of the support) go through
// tanh-sinh; smooth tensor-product integrals use fixed Gauss-Legendre.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace gk::quad {

/// Integral of f over [a,b] to relative tolerance `tol` (tanh-sinh).
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-13) {
    static thread_local boost::math::quadrature::tanh_sinh<double> engine(15);
    double err = 0.0;
    const double value = engine.integrate(f, a, b, tol, &err);
    if (!std::isfinite(value)) throw std::runtime_error("quadrature produced a non-finite value");
    return value;
}

/// As integrate(), but f(x, from_left, from_right) also receives the exact
/// distances to both endpoints, which x itself cannot resolve near b.
template <class F>
double integrate_gaps(F&& f, double a, double b, double tol = 1e-13) {
    static thread_local boost::math::quadrature::tanh_sinh<double> engine(15);
    const double width = b - a;
    auto g = [&](double x, double xc) {
        if (xc < 0.0) return f(x, -xc, width + xc);
        return f(x, width - xc, xc);
    };
    double err = 0.0;
    const double value = engine.integrate(g, a, b, tol, &err);
    if (!std::isfinite(value)) throw std::runtime_error("quadrature produced a non-finite value");
    return value;
}

/// Integral over [0,1] split at interior points; keeps kinks off the nodes.
template <class F>
double integrate_unit_split(F&& f, const std::vector<double>& breaks, double tol = 1e-13) {
    double total = 0.0;
    double lo = 0.0;
    for (const double b : breaks) {
        if (b > lo && b < 1.0) {
            total += integrate(f, lo, b, tol);
            lo = b;
        }
    }
    return total + integrate(f, lo, 1.0, tol);
}

/// Gauss-Legendre rule with N points mapped to [0,1].
template <unsigned N>
struct UnitGaussRule {
    std::array<double, N> nodes{};
    std::array<double, N> weights{};

    UnitGaussRule() {
        using rule = boost::math::quadrature::gauss<double, N>;
        const auto& abscissa = rule::abscissa();
        const auto& weight = rule::weights();
        // Boost stores the non-negative half of the symmetric rule.
        std::size_t idx = 0;
        const std::size_t half = abscissa.size();
        const bool has_zero = (N % 2 == 1);
        for (std::size_t i = half; i-- > 0;) {
            if (has_zero && i == 0) continue;
            nodes[idx] = 0.5 * (1.0 - abscissa[i]);
            weights[idx] = 0.5 * weight[i];
            ++idx;
        }
        if (has_zero) {
            nodes[idx] = 0.5;
            weights[idx] = 0.5 * weight[0];
            ++idx;
        }
        for (std::size_t i = has_zero ? 1 : 0; i < half; ++i) {
            nodes[idx] = 0.5 * (1.0 + abscissa[i]);
            weights[idx] = 0.5 * weight[i];
            ++idx;
        }
    }
};

}  // namespace gk::quad
