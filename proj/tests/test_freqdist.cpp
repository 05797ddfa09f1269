#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gk/freqdist.hpp"
#include "gk/rng.hpp"
#include "gk/sample_points.hpp"

using namespace gk;

TEST_CASE("closed-form quantiles") {
    const auto u = FrequencyModel::uniform();
    const auto a = FrequencyModel::arcsine_cosine();
    const auto c = FrequencyModel::cauchy_like();
    for (const double x : {0.01, 0.2, 0.5, 0.73, 0.99}) {
        CHECK(u.quantile(x) == doctest::Approx(2 * x - 1));
        CHECK(a.quantile(x) == doctest::Approx(-std::cos(std::numbers::pi * x)));
        CHECK(c.quantile(x) == doctest::Approx(std::tan(std::numbers::pi / 4 * (2 * x - 1))));
    }
    CHECK(u.mean_frequency() == doctest::Approx(0.0));
    CHECK(std::abs(a.mean_frequency()) < 1e-14);
}

TEST_CASE("quantile round trip to 1e-10") {
    std::vector<double> nodes, values;
    for (int i = 0; i <= 20; ++i) {
        const double w = -1.0 + 0.1 * i;
        nodes.push_back(w);
        values.push_back(1.0 + 0.5 * w * w + 0.3 * w);  // asymmetric
    }
    for (const auto& model : {FrequencyModel::uniform(), FrequencyModel::arcsine_cosine(),
                              FrequencyModel::cauchy_like(), FrequencyModel::table(nodes, values)}) {
        CAPTURE(model.name());
        for (int i = 1; i < 200; ++i) {
            const double x = i / 200.0;
            CHECK(std::abs(model.cdf(model.quantile(x)) - x) <= 1e-10);
            const double w = -1.0 + 2.0 * i / 200.0;
            CHECK(std::abs(model.quantile(model.cdf(w)) - w) <= 1e-10);
        }
        CHECK(model.cdf(-1.0) == doctest::Approx(0.0));
        CHECK(model.cdf(1.0) == doctest::Approx(1.0));
    }
}

TEST_CASE("table density validation") {
    CHECK_THROWS_AS(FrequencyModel::table({-1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(FrequencyModel::table({-1.0, 0.5}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(FrequencyModel::table({-1.0, 0.0, 0.0, 1.0}, {1, 1, 1, 1}), std::invalid_argument);
    const auto flat = FrequencyModel::table({-1.0, 1.0}, {3.0, 3.0});
    CHECK(flat.quantile(0.25) == doctest::Approx(-0.5));
    CHECK(flat.odd_about_half());
}

TEST_CASE("empirical quantile distance shrinks with n") {
    const auto model = FrequencyModel::arcsine_cosine();
    double previous = 1e9;
    for (const std::size_t n : {50u, 200u, 800u, 3200u}) {
        // median over a few seeds to smooth single-draw noise
        std::vector<double> d;
        for (std::uint64_t s = 0; s < 9; ++s) {
            const auto pts = SamplePoints::generate(n, SampleMode::IidUniform, derive_seed(3, n, s, "quantile"));
            d.push_back(sup_distance_to_continuum(empirical_step(model, pts), model));
        }
        std::sort(d.begin(), d.end());
        CAPTURE(n);
        CHECK(d[4] < previous);
        previous = d[4];
    }
    // Deterministic points x_j on the grid are within O(1/n) of the continuum.
    const auto grid = SamplePoints::generate(1000, SampleMode::Deterministic, 0);
    CHECK(sup_distance_to_continuum(empirical_step(model, grid), model) < 0.01);
}
