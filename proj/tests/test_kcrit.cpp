#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gk/csv.hpp"
#include "gk/kcrit.hpp"
#include "gk/meanfield.hpp"
#include "gk/rng.hpp"

using namespace gk;

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

SweepConfig small_sweep(unsigned workers) {
    SweepConfig sc;
    sc.name = "bookkeeping";
    sc.ns = {40, 60};
    sc.seeds_per_n = 3;
    sc.master_seed = 99;
    sc.graphon = Graphon::erdos_renyi(0.5);
    sc.model = FrequencyModel::arcsine_cosine();
    sc.workers = workers;
    return sc;
}

}  // namespace

TEST_CASE("sweep bookkeeping and determinism") {
    const SweepResult a = sweep_realizations(small_sweep(1));
    CHECK(a.rows.size() == 6);
    CHECK(a.failed.empty());
    REQUIRE(a.aggregate.size() == 2);
    CHECK(a.aggregate[0].n == 40);
    CHECK(a.aggregate[1].n == 60);
    for (const auto& g : a.aggregate) {
        CHECK(g.count == 3);
        CHECK(g.std >= 0.0);
    }
    CHECK(a.rows[4].seed == derive_seed(99, 60, 1, "bookkeeping"));
    const double Kc = critical_coupling(FrequencyModel::arcsine_cosine(), 0.5);
    for (const auto& r : a.rows) {
        CHECK(r.reference_K_crit == doctest::Approx(Kc));
        CHECK(r.relative_error == doctest::Approx(r.K_crit_n / Kc - 1.0));
        CHECK(r.method == KcritMethod::FoldTracking);
    }

    const SweepResult b = sweep_realizations(small_sweep(3));
    CHECK(io::sweep_rows_table(a).str() == io::sweep_rows_table(b).str());
    CHECK(io::sweep_aggregate_table(a).str() == io::sweep_aggregate_table(b).str());

    SweepConfig empty = small_sweep(1);
    empty.seeds_per_n = 0;
    CHECK_THROWS_AS(sweep_realizations(empty), std::invalid_argument);
}

TEST_CASE("aggregate uses the sample standard deviation of successful rows") {
    std::vector<CriticalCouplingResult> rows(4);
    rows[0].n = rows[1].n = rows[2].n = 10;
    rows[3].n = 20;
    rows[0].K_crit_n = 1.0;
    rows[1].K_crit_n = 3.0;
    rows[2].K_crit_n = 100.0;  // failed, ignored
    rows[3].K_crit_n = 2.0;
    const auto agg = aggregate_rows(rows, {true, true, false, true});
    REQUIRE(agg.size() == 2);
    CHECK(agg[0].mean == doctest::Approx(2.0));
    CHECK(agg[0].std == doctest::Approx(std::sqrt(2.0)));
    CHECK(agg[0].count == 2);
    CHECK(agg[1].std == 0.0);
    CHECK(agg[1].count == 1);
}

TEST_CASE("seed-state failure below the lock") {
    KcritOptions o;
    o.K_hi = 0.2;
    CHECK_THROWS_WITH_AS(measure_kcrit(50, Graphon::erdos_renyi(0.5), FrequencyModel::arcsine_cosine(), 1, o),
                         doctest::Contains("seed-state failure"), std::runtime_error);
    CHECK_THROWS_AS(measure_kcrit(50, Graphon::small_world(0.9, 0.1, 0.25), FrequencyModel::arcsine_cosine(), 1),
                    std::invalid_argument);
}

TEST_CASE("fold tracking and bisection agree to 5e-3 at n = 200") {
    const Graphon w = Graphon::erdos_renyi(0.5);
    const auto model = FrequencyModel::arcsine_cosine();
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 10; ++i) {
        const std::uint64_t seed = derive_seed(5, 200, i, "cross-method");
        KcritOptions fold;
        fold.method = KcritMethod::FoldTracking;
        KcritOptions bis;
        bis.method = KcritMethod::SweepBisection;
        const auto a = measure_kcrit(200, w, model, seed, fold);
        const auto b = measure_kcrit(200, w, model, seed, bis);
        CHECK(a.method == KcritMethod::FoldTracking);
        CHECK(b.method == KcritMethod::SweepBisection);
        worst = std::max(worst, std::abs(a.K_crit_n - b.K_crit_n));
    }
    MESSAGE("largest fold/bisection difference " << worst);
    CHECK(worst <= 5e-3);
}

TEST_CASE("median distance to the graphon K_crit decreases from n = 100 to 400") {
    const Graphon w = Graphon::erdos_renyi(0.5);
    const auto model = FrequencyModel::arcsine_cosine();
    const double Kc = critical_coupling(model, 0.5);
    std::vector<double> med;
    for (const std::size_t n : {100u, 400u}) {
        SweepConfig sc;
        sc.name = "trend";
        sc.ns = {n};
        sc.seeds_per_n = 20;
        sc.master_seed = 7;
        sc.graphon = w;
        sc.model = model;
        sc.workers = 4;
        const SweepResult r = sweep_realizations(sc);
        CHECK(r.failed.empty());
        std::vector<double> dev;
        for (std::size_t i = 0; i < r.rows.size(); ++i)
            if (r.ok[i]) dev.push_back(std::abs(r.rows[i].K_crit_n - Kc));
        med.push_back(median(dev));
    }
    MESSAGE("median |K_crit,n - K_crit|: n=100 " << med[0] << ", n=400 " << med[1]);
    CHECK(med[1] < med[0]);
}
