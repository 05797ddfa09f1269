#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "gk/cut_norm.hpp"
#include "gk/graphon.hpp"
#include "gk/graphon_io.hpp"
#include "gk/rng.hpp"
#include "gk/sample_points.hpp"

using namespace gk;

namespace {

StepGraphon random_step(std::size_t n, std::uint64_t seed, bool binary) {
    PhiloxEngine eng(seed, 77);
    std::vector<double> w(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j; k < n; ++k) {
            double v = eng.uniform();
            if (binary) v = v < 0.5 ? 0.0 : 1.0;
            w[j * n + k] = w[k * n + j] = v;
        }
    return StepGraphon(n, std::move(w));
}

// max over row and column subsets of |sum (S - T)| / n^2, by brute force
// over both subsets for small n and over row subsets (best columns read off
// by sign) above that.
double brute_force_cut(const StepGraphon& s, const StepGraphon& t) {
    const std::size_t n = s.size();
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n * n; ++i) d[i] = s.weights()[i] - t.weights()[i];
    double best = 0.0;
    if (n <= 8) {
        for (unsigned rows = 0; rows < (1u << n); ++rows)
            for (unsigned cols = 0; cols < (1u << n); ++cols) {
                double sum = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    if (rows >> j & 1u)
                        for (std::size_t k = 0; k < n; ++k)
                            if (cols >> k & 1u) sum += d[j * n + k];
                best = std::max(best, std::abs(sum));
            }
    } else {
        std::vector<double> col(n);
        for (unsigned rows = 0; rows < (1u << n); ++rows) {
            std::fill(col.begin(), col.end(), 0.0);
            for (std::size_t j = 0; j < n; ++j)
                if (rows >> j & 1u)
                    for (std::size_t k = 0; k < n; ++k) col[k] += d[j * n + k];
            double pos = 0.0, neg = 0.0;
            for (const double v : col) (v > 0 ? pos : neg) += v;
            best = std::max({best, pos, -neg});
        }
    }
    return best / static_cast<double>(n * n);
}

}  // namespace

TEST_CASE("analytic graphons") {
    const Graphon er = Graphon::erdos_renyi(0.3);
    CHECK(er(0.1, 0.9) == 0.3);
    CHECK(er.constant_degree() == 0.3);
    const Graphon sw = Graphon::small_world(0.9, 0.1, 0.25);
    CHECK(sw(0.1, 0.3) == 0.9);
    CHECK(sw(0.05, 0.95) == 0.9);  // wraps around the circle
    CHECK(sw(0.0, 0.5) == 0.1);
    CHECK(sw(0.3, 0.1) == sw(0.1, 0.3));
    CHECK(*sw.constant_degree() == doctest::Approx(0.5));
    for (const double x : {0.0, 0.13, 0.5, 0.77}) CHECK(degree_at(sw, x) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(circle_distance(0.05, 0.95) == doctest::Approx(0.1));
    CHECK_THROWS(Graphon::erdos_renyi(1.5));
}

TEST_CASE("step graphon embedding and samples") {
    const Graphon sw = Graphon::small_world(0.9, 0.1, 0.25);
    const StepGraphon e = embed(sw, 40);
    CHECK(e.size() == 40);
    CHECK(!e.is_binary());
    const DegreeFunction d = degree_step(e);
    for (const double v : d.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-9));
    // cell averages against a fine midpoint rule inside each cell
    for (const auto [j, k] : {std::pair{0, 0}, std::pair{3, 12}, std::pair{5, 15}, std::pair{0, 39}, std::pair{20, 31}}) {
        const int f = 400;
        double acc = 0.0;
        for (int a = 0; a < f; ++a)
            for (int b = 0; b < f; ++b) acc += sw((j + (a + 0.5) / f) / 40.0, (k + (b + 0.5) / f) / 40.0);
        CAPTURE(j);
        CAPTURE(k);
        CHECK(e(j, k) == doctest::Approx(acc / (f * f)).epsilon(2e-3));
    }

    const auto pts = SamplePoints::generate(120, SampleMode::IidUniform, 3);
    const StepGraphon h = sample_weighted(sw, pts);
    const StepGraphon g = sample_simple(sw, pts, 3);
    CHECK(h.has_zero_diagonal());
    CHECK(g.has_zero_diagonal());
    CHECK(g.is_binary());
    CHECK(h(4, 9) == sw(pts.points[4], pts.points[9]));
    CHECK(g.weights().size() == 120u * 120u);
    CHECK(sample_simple(sw, pts, 3).weights()[5 * 120 + 17] == g(5, 17));
    // Edge density of G(n, W) concentrates around that of H(n, W).
    CHECK(std::abs(g.edge_density() - h.edge_density()) < 0.03);
}

TEST_CASE("degree gap bound holds in at least 95% of trials") {
    const Graphon w = Graphon::small_world(0.9, 0.1, 0.25);
    const std::size_t n = 200;
    const double nu = 0.05;
    const double bound = degree_gap_bound(n, nu);
    int ok = 0;
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        const std::uint64_t seed = derive_seed(2024, n, trial, "degree-bound");
        const auto pts = SamplePoints::generate(n, SampleMode::IidUniform, seed);
        const double gap = degree_distance(degree_step(sample_simple(w, pts, seed)), degree_step(sample_weighted(w, pts)));
        ok += gap <= bound;
    }
    MESSAGE("degree bound held in " << ok << "/200 trials");
    CHECK(ok >= 190);
}

TEST_CASE("degree distance needs nested partitions") {
    const auto a = DegreeFunction::from_steps({0.1, 0.3});
    const auto b = DegreeFunction::from_steps({0.1, 0.1, 0.3, 0.4});
    CHECK(degree_distance(a, b) == doctest::Approx(0.1));
    CHECK(degree_distance(a, DegreeFunction::from_constant(0.2)) == doctest::Approx(0.1));
    CHECK_THROWS_AS(degree_distance(a, DegreeFunction::from_steps({0.1, 0.2, 0.3})), std::invalid_argument);
}

TEST_CASE("cut norm equals exhaustive enumeration on a 50-case corpus") {
    int cases = 0;
    for (std::uint64_t c = 0; c < 50; ++c) {
        const std::size_t n = 2 + c % 13;  // 2..14
        const bool binary = c % 3 == 0;
        const StepGraphon s = random_step(n, 1000 + c, binary);
        const StepGraphon t = random_step(n, 5000 + c, c % 2 == 0);
        const CutNormEstimate est = cut_norm_estimate(s, t, 8, c);
        CAPTURE(n);
        CAPTURE(c);
        CHECK(est.exact);
        CHECK(est.lower_bound == doctest::Approx(brute_force_cut(s, t)).epsilon(1e-12));
        CHECK(cut_value(s, t, est.rows, est.cols) == doctest::Approx(est.lower_bound).epsilon(1e-12));
        ++cases;
    }
    CHECK(cases == 50);
}

TEST_CASE("heuristic cut norm is a certified lower bound") {
    const StepGraphon s = random_step(40, 1, true);
    const StepGraphon t = random_step(40, 2, false);
    const CutNormEstimate est = cut_norm_estimate(s, t, 16, 3);
    CHECK(!est.exact);
    CHECK(est.lower_bound > 0.0);
    CHECK(cut_value(s, t, est.rows, est.cols) == doctest::Approx(est.lower_bound));
    CHECK(simple_sample_cut_bound(100) == doctest::Approx(22.0 / std::sqrt(std::log(100.0))));
}

TEST_CASE("step graphon round trip") {
    const StepGraphon s = random_step(9, 4, false);
    const auto dir = std::filesystem::temp_directory_path() / "gk_graphon_io_test";
    std::filesystem::create_directories(dir);
    for (const char* name : {"s.csv", "s.bin"}) {
        const auto path = dir / name;
        save_step_graphon(path, s);
        const StepGraphon back = load_step_graphon(path);
        REQUIRE(back.size() == s.size());
        for (std::size_t i = 0; i < 81; ++i) CHECK(back.weights()[i] == s.weights()[i]);
    }
    std::filesystem::remove_all(dir);
}
