#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gk/kernels.hpp"
#include "gk/rng.hpp"

using namespace gk;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo, double hi) {
    PhiloxEngine eng(seed, 99);
    std::vector<double> v(n);
    for (auto& x : v) x = lo + (hi - lo) * eng.uniform();
    return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("scalar kernels against direct loops") {
    const std::size_t n = 37;
    const auto a = random_vector(n * n, 1, 0.0, 1.0);
    const auto theta = random_vector(n, 2, -3.0, 3.0);
    std::vector<double> s(n), c(n);
    for (std::size_t j = 0; j < n; ++j) {
        s[j] = std::sin(theta[j]);
        c[j] = std::cos(theta[j]);
    }
    const auto& k = kernels::detail::scalar_table();

    std::vector<double> y(n);
    k.matvec(a.data(), n, s.data(), y.data());
    for (std::size_t j = 0; j < n; ++j) {
        double ref = 0.0;
        for (std::size_t l = 0; l < n; ++l) ref += a[j * n + l] * s[l];
        CHECK(y[j] == doctest::Approx(ref).epsilon(1e-14));
    }

    std::vector<double> as(n), ac(n);
    k.coupling_sums(a.data(), n, s.data(), c.data(), as.data(), ac.data());
    for (std::size_t j = 0; j < n; ++j) {
        // c_j (As)_j - s_j (Ac)_j = sum_l A_jl sin(theta_l - theta_j)
        double ref = 0.0;
        for (std::size_t l = 0; l < n; ++l) ref += a[j * n + l] * std::sin(theta[l] - theta[j]);
        CHECK(c[j] * as[j] - s[j] * ac[j] == doctest::Approx(ref).epsilon(1e-12));
    }

    std::vector<double> jac(n * n);
    k.jacobian_fill(a.data(), n, s.data(), c.data(), 0.5, jac.data());
    for (std::size_t j = 0; j < n; ++j) {
        double row = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
            row += jac[j * n + l];
            if (l != j) CHECK(jac[j * n + l] == doctest::Approx(0.5 * a[j * n + l] * std::cos(theta[l] - theta[j])));
        }
        CHECK(std::abs(row) < 1e-13);
    }
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
    const kernels::KernelTable* avx = kernels::detail::avx2_table();
    if (avx == nullptr || !kernels::avx2_supported()) {
        MESSAGE("AVX2 backend not available on this host; equivalence test skipped");
        return;
    }
    const auto& ref = kernels::detail::scalar_table();
    for (const std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 31u, 64u, 101u}) {
        CAPTURE(n);
        const auto a = random_vector(n * n, 10 + n, -1.0, 1.0);
        const auto theta = random_vector(n, 20 + n, -3.0, 3.0);
        std::vector<double> s(n), c(n);
        for (std::size_t j = 0; j < n; ++j) {
            s[j] = std::sin(theta[j]);
            c[j] = std::cos(theta[j]);
        }
        std::vector<double> y0(n), y1(n);
        ref.matvec(a.data(), n, s.data(), y0.data());
        avx->matvec(a.data(), n, s.data(), y1.data());
        CHECK(max_abs_diff(y0, y1) <= 1e-13 * static_cast<double>(n));

        std::vector<double> as0(n), ac0(n), as1(n), ac1(n);
        ref.coupling_sums(a.data(), n, s.data(), c.data(), as0.data(), ac0.data());
        avx->coupling_sums(a.data(), n, s.data(), c.data(), as1.data(), ac1.data());
        CHECK(max_abs_diff(as0, as1) <= 1e-13 * static_cast<double>(n));
        CHECK(max_abs_diff(ac0, ac1) <= 1e-13 * static_cast<double>(n));

        std::vector<double> j0(n * n), j1(n * n);
        ref.jacobian_fill(a.data(), n, s.data(), c.data(), 0.3, j0.data());
        avx->jacobian_fill(a.data(), n, s.data(), c.data(), 0.3, j1.data());
        CHECK(max_abs_diff(j0, j1) <= 1e-13 * static_cast<double>(n));
    }
}

TEST_CASE("backend selection") {
    const auto before = kernels::active_backend();
    kernels::set_backend(kernels::Backend::Scalar);
    CHECK(kernels::active_backend() == kernels::Backend::Scalar);
    CHECK(kernels::backend_name(kernels::Backend::Scalar) == "scalar");
    if (!kernels::avx2_supported())
        CHECK_THROWS_AS(kernels::set_backend(kernels::Backend::Avx2), std::invalid_argument);
    kernels::set_backend(before);
}
