#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>

#include "gk/rng.hpp"
#include "gk/sample_points.hpp"

using namespace gk;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    // Published test vectors of the Random123 reference implementation.
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::apply(C{0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::apply(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::apply(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("unit interval mapping") {
    CHECK(to_unit_interval(0, 0) == 0.0);
    CHECK(to_unit_interval(0xffffffffu, 0xffffffffu) < 1.0);
    PhiloxEngine eng(7, 1);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = eng.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("counter-based streams are reproducible and independent") {
    CounterRng a(42, streams::kEdges), b(42, streams::kEdges), c(42, streams::kSamplePoints);
    CHECK(a.uniform(3, 4) == b.uniform(3, 4));
    CHECK(a.uniform(3, 4) != c.uniform(3, 4));
    CHECK(a.uniform(3, 4) != a.uniform(4, 3));
}

TEST_CASE("derived task seeds") {
    CHECK(derive_seed(1, 500, 3, "fig1") == derive_seed(1, 500, 3, "fig1"));
    std::set<std::uint64_t> seen;
    for (std::uint64_t n : {100u, 200u})
        for (std::uint64_t i = 0; i < 50; ++i)
            for (const char* name : {"a", "b"}) seen.insert(derive_seed(9, n, i, name));
    CHECK(seen.size() == 200);
    CHECK(derive_seed(1, 500, 3, "fig1") != derive_seed(2, 500, 3, "fig1"));
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("latent sample points") {
    const auto iid = SamplePoints::generate(200, SampleMode::IidUniform, 5);
    CHECK(iid.size() == 200);
    CHECK(std::is_sorted(iid.points.begin(), iid.points.end()));
    CHECK(iid.points == SamplePoints::generate(200, SampleMode::IidUniform, 5).points);
    CHECK(iid.points != SamplePoints::generate(200, SampleMode::IidUniform, 6).points);
    for (const double x : iid.points) CHECK((x >= 0.0 && x < 1.0));

    const auto strat = SamplePoints::generate(64, SampleMode::StratifiedUniform, 5);
    for (std::size_t j = 0; j < 64; ++j) {
        CHECK(strat.points[j] >= static_cast<double>(j) / 64);
        CHECK(strat.points[j] < static_cast<double>(j + 1) / 64);
    }
    const auto mid = SamplePoints::midpoints(4);
    CHECK(mid.points == std::vector<double>{0.125, 0.375, 0.625, 0.875});
    CHECK(sample_mode_from_string("stratified") == SampleMode::StratifiedUniform);
    CHECK_THROWS_AS(sample_mode_from_string("sobol"), std::invalid_argument);
}
