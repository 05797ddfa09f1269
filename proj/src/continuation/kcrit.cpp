#include "gk/kcrit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "gk/meanfield.hpp"
#include "gk/parallel.hpp"
#include "gk/rng.hpp"

namespace gk {

std::string_view to_string(GraphSample g) noexcept {
    switch (g) {
        case GraphSample::Simple: return "simple";
        case GraphSample::Weighted: return "weighted";
        case GraphSample::CellAverage: return "cell-average";
    }
    return "unknown";
}

GraphSample graph_sample_from_string(std::string_view text) {
    if (text == "simple" || text == "G") return GraphSample::Simple;
    if (text == "weighted" || text == "H") return GraphSample::Weighted;
    if (text == "cell-average" || text == "grid") return GraphSample::CellAverage;
    throw std::invalid_argument("unknown graph sample '" + std::string(text) + "' (simple|weighted|cell-average)");
}

std::string_view to_string(KcritMethod m) noexcept {
    return m == KcritMethod::FoldTracking ? "FoldTracking" : "SweepBisection";
}

KcritMethod kcrit_method_from_string(std::string_view text) {
    if (text == "FoldTracking" || text == "fold") return KcritMethod::FoldTracking;
    if (text == "SweepBisection" || text == "bisection") return KcritMethod::SweepBisection;
    throw std::invalid_argument("unknown K_crit method '" + std::string(text) + "' (FoldTracking|SweepBisection)");
}

KcritMethod default_kcrit_method(const FrequencyModel& model) noexcept {
    return model.kind() == FrequencyModel::Kind::Uniform ? KcritMethod::SweepBisection : KcritMethod::FoldTracking;
}

Realization make_realization(std::size_t n, const Graphon& w, const FrequencyModel& model, std::uint64_t seed,
                             SampleMode mode, GraphSample graph) {
    if (n < 2) throw std::invalid_argument("a realization needs n >= 2");
    SamplePoints pts = SamplePoints::generate(n, mode, seed);
    StepFrequency freq = empirical_step(model, pts);
    StepGraphon adj;
    switch (graph) {
        case GraphSample::Simple: adj = sample_simple(w, pts, seed); break;
        case GraphSample::Weighted: adj = sample_weighted(w, pts); break;
        case GraphSample::CellAverage: adj = embed(w, n); break;
    }
    FiniteSystem sys(freq.values, std::move(adj), 0.0);
    return {std::move(pts), std::move(freq), std::move(sys)};
}

std::vector<double> mean_field_guess(const FrequencyModel& model, double degree, const StepFrequency& freq, double K) {
    double spread = 0.0;
    for (const double w : freq.values) spread = std::max(spread, std::abs(w - freq.mean));
    double kappa = spread;
    const double p = std::clamp(degree, 1e-12, 1.0);
    if (K * p * maximize_gamma(model).gamma_star >= 1.0) {
        const double q = consistent_q(model, p, K, ProfileBranch::Upper);
        kappa = std::max(kappa, K * p * q * gamma_of_q(model, q));
    }
    std::vector<double> u(freq.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double arg = kappa > 0.0 ? (freq.values[j] - freq.mean) / kappa : 0.0;
        u[j] = std::asin(std::clamp(arg, -1.0, 1.0));
    }
    return u;
}

double reference_kcrit(const Graphon& w, const FrequencyModel& model) {
    if (const auto* er = std::get_if<ErdosRenyi>(&w.kind())) return critical_coupling(model, er->p);
    return std::numeric_limits<double>::quiet_NaN();
}

double kcrit_lower_bound(const FiniteSystem& sys) {
    const std::size_t n = sys.size();
    const StepGraphon& a = sys.adjacency();
    double bound = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double d = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            if (k != j) d += a(j, k);
        d /= static_cast<double>(n);
        const double dev = std::abs(sys.omega()[j] - sys.mean_omega());
        if (dev == 0.0) continue;
        if (d == 0.0) return std::numeric_limits<double>::infinity();
        bound = std::max(bound, dev / d);
    }
    return bound;
}

namespace {

bool stable_at(const FiniteSystem& sys, double K, const std::vector<double>& u0, const NewtonOptions& newton,
               SyncState& out) {
    const SolveResult res = newton_solve(sys.with_coupling(K), u0, newton);
    if (!res.ok() || !res.state->stable()) return false;
    out = *res.state;
    return true;
}

KcritMeasurement bisect(const FiniteSystem& sys, SyncState hi_state, double K_lo, const KcritOptions& opts) {
    double lo = K_lo;
    double hi = hi_state.K;
    while (hi - lo > opts.bisect_width) {
        const double mid = 0.5 * (lo + hi);
        // Warm start from the lowest known stable state; if Newton misses,
        // walk down through intermediate couplings (each success is a new hi).
        bool reached = false;
        for (int attempt = 0; attempt <= opts.bisect_retries && !reached; ++attempt) {
            SyncState st;
            if (stable_at(sys, mid, hi_state.u, opts.newton, st)) {
                hi_state = std::move(st);
                reached = true;
                break;
            }
            const double step_K = 0.5 * (hi_state.K + mid);
            if (hi_state.K - step_K < 0.25 * opts.bisect_width) break;
            if (stable_at(sys, step_K, hi_state.u, opts.newton, st)) hi_state = std::move(st);
            else break;
        }
        if (reached) {
            hi = mid;
        } else {
            lo = mid;
            hi = std::min(hi, hi_state.K);
        }
    }
    return {0.5 * (lo + hi), KcritMethod::SweepBisection, false, std::nullopt, std::move(hi_state)};
}

}  // namespace

KcritMeasurement measure_kcrit_system(const FiniteSystem& sys, const std::vector<double>& guess, double K_hi,
                                      double K_lo, KcritMethod method, const KcritOptions& opts) {
    if (!(K_hi > K_lo)) throw std::invalid_argument("K_hi must exceed the lower bound");
    NewtonOptions seed_newton = opts.newton;
    seed_newton.compute_spectrum = true;
    const SolveResult seed = newton_solve(sys.with_coupling(K_hi), guess, seed_newton);
    if (!seed.ok() || !seed.state->stable())
        throw std::runtime_error("seed-state failure: no stable locked state at K_hi = " + std::to_string(K_hi) +
                                 " (" + std::string(to_string(seed.status)) + ")");

    if (method == KcritMethod::FoldTracking) {
        cont::Options c = opts.continuation;
        c.direction = -1;
        c.param_min = std::max(0.0, K_lo * 0.5);
        c.param_max = std::max(c.param_max, K_hi * 4.0);
        if (c.max_folds == 0) c.max_folds = 1;
        Branch br = continue_branch(sys, *seed.state, c);
        if (!br.folds.empty()) {
            const BranchFold& f = br.folds.front();
            KcritMeasurement out{f.K, KcritMethod::FoldTracking, f.suspect, std::nullopt, *seed.state};
            for (std::size_t i = 0; i <= f.index && i < br.points.size(); ++i) {
                const BranchPoint& p = br.points[i];
                if (p.stability != Stability::Stable) continue;
                SyncState st;
                st.u = p.u;
                st.omega_star = p.omega_star;
                st.K = p.K;
                out.last_stable = std::move(st);
            }
            const auto g = rhs(sys.with_coupling(out.last_stable.K), out.last_stable.u, out.last_stable.omega_star);
            out.last_stable.residual_norm = 0.0;
            for (const double v : g) out.last_stable.residual_norm = std::max(out.last_stable.residual_norm, std::abs(v));
            attach_spectrum(sys.with_coupling(out.last_stable.K), out.last_stable);
            out.branch = std::move(br);
            return out;
        }
        // Continuation stalled or ran out of range: fall back to bisection.
    }
    return bisect(sys, *seed.state, K_lo, opts);
}

KcritDetail measure_kcrit_detailed(std::size_t n, const Graphon& w, const FrequencyModel& model, std::uint64_t seed,
                                   const KcritOptions& opts) {
    Realization real = make_realization(n, w, model, seed, opts.sample_mode, opts.graph);
    const double reference = reference_kcrit(w, model);
    double K_hi = 0.0;
    if (opts.K_hi) {
        K_hi = *opts.K_hi;
    } else if (std::isfinite(reference)) {
        K_hi = 3.0 * reference;
    } else {
        throw std::invalid_argument("K_hi is required when the graphon has no closed-form K_crit");
    }
    const double degree = w.constant_degree().value_or(real.system.adjacency().edge_density());
    const auto guess = mean_field_guess(model, degree, real.frequencies, K_hi);
    const KcritMethod method = opts.method.value_or(default_kcrit_method(model));
    const double K_lo = std::min(kcrit_lower_bound(real.system), 0.5 * K_hi);
    KcritMeasurement m = measure_kcrit_system(real.system, guess, K_hi, K_lo, method, opts);

    CriticalCouplingResult out;
    out.n = n;
    out.seed = seed;
    out.K_crit_n = m.K;
    out.method = m.method;
    out.reference_K_crit = reference;
    out.relative_error = std::isfinite(reference) ? (m.K - reference) / reference
                                                  : std::numeric_limits<double>::quiet_NaN();
    out.fold_suspect = m.fold_suspect;
    return {out, std::move(real), std::move(m)};
}

CriticalCouplingResult measure_kcrit(std::size_t n, const Graphon& w, const FrequencyModel& model,
                                     std::uint64_t seed, const KcritOptions& opts) {
    return measure_kcrit_detailed(n, w, model, seed, opts).result;
}

std::vector<SweepAggregate> aggregate_rows(const std::vector<CriticalCouplingResult>& rows,
                                           const std::vector<bool>& ok) {
    std::map<std::size_t, std::vector<double>> by_n;
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (by_n.find(rows[i].n) == by_n.end()) order.push_back(rows[i].n);
        auto& bucket = by_n[rows[i].n];
        if (i < ok.size() && ok[i]) bucket.push_back(rows[i].K_crit_n);
    }
    std::vector<SweepAggregate> out;
    for (const std::size_t n : order) {
        const auto& v = by_n[n];
        SweepAggregate a;
        a.n = n;
        a.count = v.size();
        if (!v.empty()) {
            double sum = 0.0;
            for (const double x : v) sum += x;
            a.mean = sum / static_cast<double>(v.size());
            double ss = 0.0;
            for (const double x : v) ss += (x - a.mean) * (x - a.mean);
            a.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        } else {
            a.mean = std::numeric_limits<double>::quiet_NaN();
            a.std = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(a);
    }
    return out;
}

SweepResult sweep_realizations(const SweepConfig& cfg) {
    const std::size_t per_n = cfg.indices.empty() ? cfg.seeds_per_n : cfg.indices.size();
    if (cfg.ns.empty() || per_n == 0) throw std::invalid_argument("sweep needs at least one n and one seed");
    const std::size_t total = cfg.ns.size() * per_n;
    SweepResult res;
    res.rows.resize(total);
    res.errors.assign(total, {});
    std::vector<unsigned char> done(total, 0);  // vector<bool> packs bits; not safe to share

    parallel_for(total, cfg.workers, [&](std::size_t task) {
        const std::size_t n = cfg.ns[task / per_n];
        const std::size_t slot = task % per_n;
        const std::uint64_t index = cfg.indices.empty() ? slot : cfg.indices[slot];
        const std::uint64_t seed = derive_seed(cfg.master_seed, n, index, cfg.name);
        try {
            res.rows[task] = measure_kcrit(n, cfg.graphon, cfg.model, seed, cfg.options);
            done[task] = 1;
        } catch (const std::exception& e) {
            res.rows[task].n = n;
            res.rows[task].seed = seed;
            res.rows[task].method = cfg.options.method.value_or(default_kcrit_method(cfg.model));
            res.rows[task].K_crit_n = std::numeric_limits<double>::quiet_NaN();
            res.rows[task].relative_error = std::numeric_limits<double>::quiet_NaN();
            res.errors[task] = e.what();
        }
    });
    res.ok.assign(done.begin(), done.end());
    for (std::size_t i = 0; i < total; ++i)
        if (!res.ok[i]) res.failed.push_back(i);
    res.aggregate = aggregate_rows(res.rows, res.ok);
    return res;
}

}  // namespace gk
