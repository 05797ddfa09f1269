#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "gk/finite_system.hpp"
#include "gk/graphon.hpp"
#include "gk/kcrit.hpp"
#include "gk/rng.hpp"

using namespace gk;

namespace {

StepGraphon complete(std::size_t n) {
    std::vector<double> w(n * n, 1.0);
    for (std::size_t j = 0; j < n; ++j) w[j * n + j] = 0.0;
    return StepGraphon(n, std::move(w));
}

std::vector<double> random_phases(std::size_t n, std::uint64_t seed, double spread) {
    PhiloxEngine eng(seed, streams::kInitialPhases);
    std::vector<double> u(n);
    for (auto& x : u) x = spread * (2.0 * eng.uniform() - 1.0);
    return u;
}

FiniteSystem er_system(std::size_t n, std::uint64_t seed, double K) {
    return make_realization(n, Graphon::erdos_renyi(0.5), FrequencyModel::arcsine_cosine(), seed).system.with_coupling(K);
}

}  // namespace

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(FiniteSystem({0.1, 0.2}, complete(3), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(FiniteSystem({0.1, 1.5}, complete(2), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(FiniteSystem({0.1, 0.2}, complete(2), -1.0), std::invalid_argument);
}

TEST_CASE("Jacobian against central finite differences") {
    const FiniteSystem sys = er_system(50, 11, 4.0);
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto u = random_phases(50, 100 + s, 1.5);
        const Eigen::MatrixXd J = jacobian(sys, u);
        const double h = 1e-6;
        double worst = 0.0;
        for (std::size_t k = 0; k < 50; ++k) {
            auto up = u, dn = u;
            up[k] += h;
            dn[k] -= h;
            const auto gp = rhs(sys, up, 0.0);
            const auto gm = rhs(sys, dn, 0.0);
            for (std::size_t j = 0; j < 50; ++j)
                worst = std::max(worst, std::abs((gp[j] - gm[j]) / (2 * h) - J(static_cast<Eigen::Index>(j),
                                                                                  static_cast<Eigen::Index>(k))));
        }
        CAPTURE(s);
        CHECK(worst <= 1e-6);
        // symmetric, zero row sums
        CHECK((J - J.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK(J.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("two oscillators lock at sin(delta) = 2a/K") {
    const double a = 0.3, K = 1.0;
    const FiniteSystem sys({-a, a}, complete(2), K);
    const double delta = std::asin(2 * a / K);
    const SolveResult sr = newton_solve(sys, std::vector<double>{-0.1, 0.1});
    REQUIRE(sr.ok());
    const SyncState& st = *sr.state;
    CHECK(st.u[1] - st.u[0] == doctest::Approx(delta).epsilon(1e-12));
    CHECK(std::abs(st.omega_star) < 1e-14);
    REQUIRE(st.leading_eigs.size() == 1);
    CHECK(st.leading_eigs[0] == doctest::Approx(-K * std::cos(delta)).epsilon(1e-12));
    CHECK(st.stable());
    CHECK(st.r == doctest::Approx(std::cos(delta / 2)).epsilon(1e-12));

    // Past the lock there is nothing to find.
    const SolveResult none = newton_solve(sys.with_coupling(0.5), std::vector<double>{-0.1, 0.1});
    CHECK(!none.ok());
}

TEST_CASE("complete graph at the synchronous state has spectrum {0, -K}") {
    const std::size_t n = 12;
    const double K = 2.5;
    const FiniteSystem sys(std::vector<double>(n, 0.2), complete(n), K);
    const std::vector<double> u(n, 0.0);
    const Eigen::MatrixXd J = jacobian(sys, u);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    CHECK(std::abs(es.eigenvalues()(n - 1)) < 1e-12);
    for (std::size_t i = 0; i + 1 < n; ++i) CHECK(es.eigenvalues()(static_cast<Eigen::Index>(i)) == doctest::Approx(-K));
    const Eigen::VectorXd red = reduced_spectrum(sys, u);
    CHECK(red.size() == static_cast<Eigen::Index>(n - 1));
    for (Eigen::Index i = 0; i < red.size(); ++i) CHECK(red(i) == doctest::Approx(-K));
}

TEST_CASE("order parameter") {
    CHECK(order_parameter(std::vector<double>(7, 1.3)) == doctest::Approx(1.0));
    std::vector<double> spread(8);
    for (std::size_t j = 0; j < 8; ++j) spread[j] = 2 * std::numbers::pi * j / 8;
    CHECK(order_parameter(spread) < 1e-14);
    CHECK(order_parameter(std::vector<double>{0.0, std::numbers::pi / 2}) == doctest::Approx(std::sqrt(0.5)));
    for (std::uint64_t s = 0; s < 20; ++s) {
        const double r = order_parameter(random_phases(30, s, 4.0));
        CHECK((r >= 0.0 && r <= 1.0));
    }
}

TEST_CASE("stability classification") {
    CHECK(classify(std::vector<double>{-1.0, -1e-7}) == Stability::Stable);
    CHECK(classify(std::vector<double>{-1.0, -1e-9}) == Stability::Marginal);
    CHECK(classify(std::vector<double>{-1.0, 2e-8}) == Stability::Unstable);
}

TEST_CASE("Newton residual and gauge on every success") {
    int successes = 0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto real = make_realization(120, Graphon::erdos_renyi(0.5), FrequencyModel::arcsine_cosine(), seed);
        for (const double K : {3.5, 5.0, 8.0}) {
            const auto guess = mean_field_guess(FrequencyModel::arcsine_cosine(), 0.5, real.frequencies, K);
            const SolveResult sr = newton_solve(real.system.with_coupling(K), guess);
            if (!sr.ok()) continue;
            ++successes;
            const SyncState& st = *sr.state;
            const auto g = rhs(real.system.with_coupling(K), st.u, st.omega_star);
            double res = 0.0;
            for (const double v : g) res = std::max(res, std::abs(v));
            CHECK(res <= 1e-10);
            CHECK(st.residual_norm <= 1e-10);
            CHECK(std::abs(std::accumulate(st.u.begin(), st.u.end(), 0.0)) <= 1e-12 * 120);
            CHECK((st.r >= 0.0 && st.r <= 1.0));
        }
    }
    CHECK(successes >= 20);
}

TEST_CASE("RK4 without coupling is exact rotation") {
    const std::vector<double> omega{-0.5, 0.1, 0.7};
    const FiniteSystem sys(omega, complete(3), 0.0);
    const std::vector<double> theta0{0.3, -1.0, 2.0};
    const Trajectory tr = integrate(sys, theta0, 3.7);
    for (std::size_t j = 0; j < 3; ++j) CHECK(tr.theta[j] == doctest::Approx(theta0[j] + omega[j] * 3.7).epsilon(1e-13));
    CHECK(tr.times.back() == doctest::Approx(3.7));
}

TEST_CASE("a locked state does not drift under RK4") {
    const auto real = make_realization(80, Graphon::erdos_renyi(0.5), FrequencyModel::arcsine_cosine(), 4);
    const double K = 6.0;
    const auto sys = real.system.with_coupling(K);
    const SolveResult sr = newton_solve(sys, mean_field_guess(FrequencyModel::arcsine_cosine(), 0.5, real.frequencies, K));
    REQUIRE(sr.ok());
    IntegrateOptions io;
    io.frame_frequency = sr.state->omega_star;
    const Trajectory tr = integrate(sys, sr.state->u, 20.0, io);
    double drift = 0.0;
    for (std::size_t j = 0; j < 80; ++j) drift = std::max(drift, std::abs(tr.theta[j] - sr.state->u[j]));
    CHECK(drift < 1e-6);
    CHECK(tr.frequency_spread < 1e-6);
    CHECK(tr.r.back() == doctest::Approx(sr.state->r).epsilon(1e-8));
}
