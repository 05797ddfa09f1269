#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>

#include "gk/csv.hpp"
#include "gk/cut_norm.hpp"
#include "gk/experiments.hpp"
#include "gk/kernels.hpp"
#include "gk/meanfield.hpp"
#include "gk/parallel.hpp"
#include "gk/rng.hpp"

#ifndef GK_VERSION
#define GK_VERSION "0.0.0"
#endif

namespace gk::exp {

namespace {

std::string slug(std::string_view spec) {
    std::string out;
    for (const char c : spec) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return out;
}

std::string num(double v, int digits = 6) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

// Values printed in the literature for the graphon critical coupling, shown
// next to the computed ones (some of the printed decimals disagree with the
// closed form).
struct Quoted {
    double value;
    const char* note;
};
std::optional<Quoted> quoted_kcrit(const FrequencyModel& model, double p) {
    using Kind = FrequencyModel::Kind;
    auto near = [&](double q) { return std::abs(p - q) < 1e-12; };
    switch (model.kind()) {
        case Kind::Uniform:
            if (near(1.0)) return Quoted{1.2372, "quoted as the decimal of 4/pi, which is 1.27324"};
            if (near(0.5)) return Quoted{2.5465, "quoted for 8/pi"};
            break;
        case Kind::ArcsineCosine:
            if (near(1.0)) return Quoted{1.4892, "quoted"};
            if (near(0.5)) return Quoted{2.9784, "quoted"};
            break;
        case Kind::CauchyLike:
            if (near(0.5)) return Quoted{2.4272, "quoted; 1/(0.5 * 0.8284) = 2.4143"};
            break;
        default: break;
    }
    return std::nullopt;
}

struct TaskLog {
    std::vector<std::string> labels;
    std::vector<std::string> errors;

    std::size_t add(std::string label) {
        labels.push_back(std::move(label));
        errors.emplace_back();
        return labels.size() - 1;
    }
};

class Runner {
public:
    Runner(const ExperimentConfig& cfg, RunReport& report)
        : cfg_(cfg), report_(report), model_(parse_frequency(cfg.frequency)) {
        for (const auto& g : cfg.graphons) graphons_.push_back(parse_graphon(g));
    }

    void run() {
        switch (cfg_.experiment) {
            case Experiment::KcritSweep: kcrit_sweep(); break;
            case Experiment::ProfileUniform:
            case Experiment::ProfileCauchy: profiles(); break;
            case Experiment::BifurcationCosine: bifurcation(); break;
            case Experiment::SmallWorld: small_world(); break;
            case Experiment::ConvergenceDiag: convergence(); break;
        }
    }

    const TaskLog& tasks() const { return tasks_; }
    std::string summary() const { return summary_.str(); }

private:
    const ExperimentConfig& cfg_;
    RunReport& report_;
    FrequencyModel model_;
    std::vector<Graphon> graphons_;
    TaskLog tasks_;
    std::ostringstream summary_;
    std::mutex write_mutex_;

    std::string name() const { return std::string(to_string(cfg_.experiment)); }

    void emit(const std::string& rel, const io::CsvTable& table) {
        const std::string text = table.str();
        io::validate_csv(text, table.schema());
        std::lock_guard lock(write_mutex_);
        io::write_atomic(cfg_.output_dir / rel, text);
        report_.files.emplace_back(rel);
    }

    KcritOptions kcrit_options(GraphSample graph) const {
        KcritOptions o;
        o.method = cfg_.method;
        o.K_hi = cfg_.K_hi;
        o.bisect_width = cfg_.bisect_width;
        o.newton.tol = cfg_.newton_tol;
        o.continuation.ds = cfg_.ds;
        o.continuation.tol = cfg_.newton_tol;
        o.continuation.fold_tol = cfg_.fold_tol;
        o.continuation.max_points = cfg_.max_points;
        o.sample_mode = cfg_.sample_mode;
        o.graph = graph;
        return o;
    }

    cont::Options branch_options(double K_hi, double K_min) const {
        cont::Options o;
        o.ds = cfg_.ds;
        o.tol = cfg_.newton_tol;
        o.fold_tol = cfg_.fold_tol;
        o.max_points = cfg_.max_points;
        o.param_min = K_min;
        o.param_max = 2.0 * K_hi;
        o.direction = -1;
        return o;
    }

    // Coupling at which the stable state is seeded: K.hi, else 3 K_crit of
    // the graphon's degree.
    double seed_coupling(const Graphon& w) const {
        if (cfg_.K_hi) return *cfg_.K_hi;
        return 3.0 * critical_coupling(model_, graphon_degree(w));
    }

    void record(std::size_t task, const std::exception& e) { tasks_.errors[task] = e.what(); }

    // ---------------------------------------------------------------- fig1
    void kcrit_sweep() {
        for (std::size_t gi = 0; gi < graphons_.size(); ++gi) {
            const Graphon& w = graphons_[gi];
            const std::string tag = graphons_.size() > 1 ? "_" + slug(cfg_.graphons[gi]) : "";
            SweepConfig sc;
            sc.name = name() + ":" + cfg_.graphons[gi];
            sc.ns = cfg_.ns;
            sc.indices = cfg_.seeds;
            sc.master_seed = cfg_.master_seed;
            sc.graphon = w;
            sc.model = model_;
            sc.options = kcrit_options(cfg_.graphs.front());
            sc.workers = cfg_.workers;
            const SweepResult res = sweep_realizations(sc);

            const std::size_t first = tasks_.labels.size();
            for (std::size_t i = 0; i < res.rows.size(); ++i) {
                const std::size_t t = tasks_.add(cfg_.graphons[gi] + " n=" + std::to_string(res.rows[i].n) +
                                                 " index=" + std::to_string(cfg_.seeds[i % cfg_.seeds.size()]));
                tasks_.errors[t] = res.errors[i];
            }
            emit("sweep_rows" + tag + ".csv", io::sweep_rows_table(res));
            emit("sweep_aggregate" + tag + ".csv", io::sweep_aggregate_table(res));

            const double p = graphon_degree(w);
            const double Kc = critical_coupling(model_, p);
            summary_ << "Critical coupling sweep, " << w.describe() << ", " << model_.name() << " frequencies\n";
            summary_ << "  graphon K_crit = 1/(p gamma*) = " << num(Kc) << "\n";
            if (const auto q = quoted_kcrit(model_, p))
                summary_ << "  literature value " << num(q->value) << " (" << q->note << ")\n";
            for (const auto& a : res.aggregate) {
                summary_ << "  n=" << a.n << ": mean " << num(a.mean) << ", std " << num(a.std) << ", count "
                         << a.count << ", mean/K_crit - 1 = " << num(a.mean / Kc - 1.0, 4);
                if (const auto q = quoted_kcrit(model_, p))
                    summary_ << ", mean/literature - 1 = " << num(a.mean / q->value - 1.0, 4);
                summary_ << "\n";
            }
            std::size_t failed = 0;
            for (std::size_t i = first; i < tasks_.labels.size(); ++i) failed += !tasks_.errors[i].empty();
            if (failed) summary_ << "  " << failed << " realization(s) failed\n";
        }
    }

    // ------------------------------------------------------------- fig2/3
    struct ProfileTask {
        std::size_t gi;
        std::size_t n;
        std::uint64_t index;
    };

    void profiles() {
        std::vector<ProfileTask> jobs;
        for (std::size_t gi = 0; gi < graphons_.size(); ++gi)
            for (const std::size_t n : cfg_.ns)
                for (const auto idx : cfg_.seeds) {
                    jobs.push_back({gi, n, idx});
                    tasks_.add(cfg_.graphons[gi] + " n=" + std::to_string(n) + " index=" + std::to_string(idx));
                }
        std::vector<std::string> lines(jobs.size());
        parallel_for(jobs.size(), cfg_.workers, [&](std::size_t t) {
            try {
                lines[t] = profile_task(jobs[t]);
            } catch (const std::exception& e) {
                record(t, e);
            }
        });
        summary_ << "Synchronous profiles, " << model_.name() << " frequencies";
        summary_ << (cfg_.K_value ? " at K = " + num(*cfg_.K_value) : std::string(" at the critical coupling")) << "\n";
        summary_ << "  deviations are taken after removing the common phase shift\n";
        for (std::size_t t = 0; t < jobs.size(); ++t)
            summary_ << "  " << tasks_.labels[t] << ": "
                     << (tasks_.errors[t].empty() ? lines[t] : "FAILED: " + tasks_.errors[t]) << "\n";
    }

    std::string profile_task(const ProfileTask& job) {
        const Graphon& w = graphons_[job.gi];
        const double p = graphon_degree(w);
        const std::uint64_t seed = derive_seed(cfg_.master_seed, job.n, job.index, name() + ":" + cfg_.graphons[job.gi]);
        KcritOptions opts = kcrit_options(cfg_.graphs.front());
        if (!opts.K_hi) opts.K_hi = seed_coupling(w);

        SyncState state;
        std::vector<double> x;
        std::vector<double> omega;
        double q = 0.0;
        std::string head;
        if (cfg_.K_value) {
            const Realization real = make_realization(job.n, w, model_, seed, cfg_.sample_mode, cfg_.graphs.front());
            const auto guess = mean_field_guess(model_, p, real.frequencies, *cfg_.K_value);
            NewtonOptions no;
            no.tol = cfg_.newton_tol;
            const SolveResult sr = newton_solve(real.system.with_coupling(*cfg_.K_value), guess, no);
            if (!sr.ok()) throw std::runtime_error("Newton failed at K = " + num(*cfg_.K_value) + " (" +
                                                   std::string(to_string(sr.status)) + ")");
            state = *sr.state;
            x = real.points.points;
            omega = real.frequencies.values;
            q = consistent_q(model_, p, *cfg_.K_value);
            head = "K = " + num(state.K);
        } else {
            KcritDetail d = measure_kcrit_detailed(job.n, w, model_, seed, opts);
            x = d.realization.points.points;
            omega = d.realization.frequencies.values;
            const auto& m = d.measurement;
            if (m.branch && !m.branch->folds.empty()) {
                const BranchFold& f = m.branch->folds.front();
                state.u = f.u;
                state.omega_star = f.omega_star;
                state.K = f.K;
                const auto sys = d.realization.system.with_coupling(f.K);
                for (const double v : rhs(sys, state.u, state.omega_star))
                    state.residual_norm = std::max(state.residual_norm, std::abs(v));
                attach_spectrum(sys, state);
            } else {
                state = m.last_stable;
            }
            q = maximize_gamma(model_).q_star;
            head = "K_crit,n = " + num(d.result.K_crit_n) + " (" + std::string(to_string(d.result.method)) +
                   "), graphon " + num(critical_coupling(model_, p));
        }
        const SyncProfile profile(model_, q);
        std::vector<double> cont = profile.sample(x);
        const double shift = std::accumulate(cont.begin(), cont.end(), 0.0) / static_cast<double>(cont.size());
        double sup = 0.0;
        double ss = 0.0;
        io::CsvTable cmp(io::schema::profile_compare());
        for (std::size_t j = 0; j < x.size(); ++j) {
            cont[j] -= shift;
            const double d = state.u[j] - cont[j];
            sup = std::max(sup, std::abs(d));
            ss += d * d;
            cmp.add_row({std::to_string(j), io::fmt(x[j]), io::fmt(state.u[j]), io::fmt(cont[j])});
        }
        const std::string tag = slug(cfg_.graphons[job.gi]) + "_n" + std::to_string(job.n) + "_s" + std::to_string(job.index);
        emit("profile_" + tag + ".csv", io::sync_state_table(state, x, omega));
        emit("profile_compare_" + tag + ".csv", cmp);
        return head + "; sup |u_j - u*(x_j)| = " + num(sup, 4) +
               ", rms = " + num(std::sqrt(ss / static_cast<double>(x.size())), 4) + ", r = " + num(state.r, 6);
    }

    // ---------------------------------------------------------------- fig4
    void meanfield_curve(const Graphon& w, double K_hi, const std::string& rel) {
        const double p = graphon_degree(w);
        const GammaMaximum g = maximize_gamma(model_);
        const double Kc = 1.0 / (p * g.gamma_star);
        constexpr std::size_t kMid = 20000;
        auto order = [&](double q) {
            double s = 0.0;
            for (std::size_t i = 0; i < kMid; ++i) {
                const double x = (static_cast<double>(i) + 0.5) / kMid;
                const double z = (model_.quantile(x) - model_.mean_frequency()) / q;
                s += std::sqrt(std::max(0.0, 1.0 - z * z));
            }
            return s / kMid;
        };
        io::CsvTable t(io::schema::meanfield_curve());
        constexpr int kSteps = 200;
        for (const auto branch : {ProfileBranch::Lower, ProfileBranch::Upper}) {
            for (int i = 0; i <= kSteps; ++i) {
                const double K = Kc + (K_hi - Kc) * static_cast<double>(i) / kSteps;
                double q = 0.0;
                try {
                    q = i == 0 ? g.q_star : consistent_q(model_, p, K, branch);
                } catch (const std::domain_error&) {
                    continue;
                }
                if (branch == ProfileBranch::Lower && (g.at_boundary || i == 0)) continue;
                t.add_row({io::fmt(K), io::fmt(q), io::fmt(q), io::fmt(order(q)),
                           branch == ProfileBranch::Upper ? "1" : "0"});
            }
        }
        emit(rel, t);
    }

    void describe_folds(const Branch& br, double reference) {
        if (br.folds.empty()) summary_ << "    no folds (termination: " << cont::to_string(br.termination) << ")\n";
        for (const auto& f : br.folds) {
            summary_ << "    fold at K = " << num(f.K, 7) << " (quadratic " << num(f.quadratic_K, 7)
                     << ", eigenvalue " << num(f.eig, 3) << (f.suspect ? ", suspect" : "") << ")";
            if (std::isfinite(reference)) summary_ << ", relative to graphon " << num(f.K / reference - 1.0, 4);
            summary_ << "\n";
        }
        summary_ << "    " << br.points.size() << " points, termination " << cont::to_string(br.termination) << "\n";
    }

    void bifurcation() {
        struct Job {
            std::size_t gi;
            std::size_t n;
            std::uint64_t index;
        };
        std::vector<Job> jobs;
        for (std::size_t gi = 0; gi < graphons_.size(); ++gi)
            for (const std::size_t n : cfg_.ns)
                for (const auto idx : cfg_.seeds) {
                    jobs.push_back({gi, n, idx});
                    tasks_.add(cfg_.graphons[gi] + " n=" + std::to_string(n) + " index=" + std::to_string(idx));
                }
        std::vector<Branch> branches(jobs.size());
        parallel_for(jobs.size(), cfg_.workers, [&](std::size_t t) {
            try {
                const Job& job = jobs[t];
                const Graphon& w = graphons_[job.gi];
                const double K_hi = seed_coupling(w);
                const std::uint64_t seed =
                    derive_seed(cfg_.master_seed, job.n, job.index, name() + ":" + cfg_.graphons[job.gi]);
                branches[t] = trace_from_top(w, job.n, seed, cfg_.sample_mode, cfg_.graphs.front(), K_hi);
                const std::string tag =
                    slug(cfg_.graphons[job.gi]) + "_n" + std::to_string(job.n) + "_s" + std::to_string(job.index);
                emit("branch_" + tag + ".csv", io::branch_table(branches[t]));
                emit("folds_" + tag + ".csv", io::fold_table(branches[t]));
            } catch (const std::exception& e) {
                record(t, e);
            }
        });
        for (std::size_t gi = 0; gi < graphons_.size(); ++gi) {
            try {
                meanfield_curve(graphons_[gi], seed_coupling(graphons_[gi]),
                                "meanfield_" + slug(cfg_.graphons[gi]) + ".csv");
            } catch (const std::exception& e) {
                record(tasks_.add(cfg_.graphons[gi] + " mean-field curve"), e);
            }
        }
        summary_ << "Bifurcation diagrams, " << model_.name() << " frequencies\n";
        for (std::size_t t = 0; t < jobs.size(); ++t) {
            const Graphon& w = graphons_[jobs[t].gi];
            const double p = graphon_degree(w);
            const double Kc = critical_coupling(model_, p);
            summary_ << "  " << tasks_.labels[t] << ": graphon K_crit " << num(Kc);
            if (const auto q = quoted_kcrit(model_, p)) summary_ << " (literature " << num(q->value) << ")";
            summary_ << "\n";
            if (!tasks_.errors[t].empty()) {
                summary_ << "    FAILED: " << tasks_.errors[t] << "\n";
                continue;
            }
            describe_folds(branches[t], Kc);
        }
    }

    Branch trace_from_top(const Graphon& w, std::size_t n, std::uint64_t seed, SampleMode mode, GraphSample graph,
                          double K_hi) const {
        const Realization real = make_realization(n, w, model_, seed, mode, graph);
        const double degree = w.constant_degree().value_or(real.system.adjacency().edge_density());
        const auto guess = mean_field_guess(model_, degree, real.frequencies, K_hi);
        NewtonOptions no;
        no.tol = cfg_.newton_tol;
        const SolveResult sr = newton_solve(real.system.with_coupling(K_hi), guess, no);
        if (!sr.ok() || !sr.state->stable())
            throw std::runtime_error("seed-state failure: no stable locked state at K = " + num(K_hi));
        const double K_min = cfg_.K_min.value_or(0.5 * K_hi / 3.0);
        return continue_branch(real.system, *sr.state, branch_options(K_hi, K_min));
    }

    // ---------------------------------------------------------------- fig5
    void small_world() {
        struct Job {
            GraphSample graph;
            std::size_t n;
            std::uint64_t index;
        };
        std::vector<Job> jobs;
        const Graphon& w = graphons_.front();
        for (const GraphSample g : cfg_.graphs) {
            if (g == GraphSample::CellAverage) {
                jobs.push_back({g, cfg_.grid_m, 0});
                tasks_.add("grid m=" + std::to_string(cfg_.grid_m));
                continue;
            }
            for (const std::size_t n : cfg_.ns)
                for (const auto idx : cfg_.seeds) {
                    jobs.push_back({g, n, idx});
                    tasks_.add(std::string(to_string(g)) + " n=" + std::to_string(n) + " index=" + std::to_string(idx));
                }
        }
        const double K_hi = seed_coupling(w);
        std::vector<Branch> branches(jobs.size());
        parallel_for(jobs.size(), cfg_.workers, [&](std::size_t t) {
            try {
                const Job& job = jobs[t];
                std::string tag;
                if (job.graph == GraphSample::CellAverage) {
                    branches[t] = trace_from_top(w, job.n, 0, SampleMode::Deterministic, job.graph, K_hi);
                    tag = "grid_m" + std::to_string(job.n);
                } else {
                    const std::uint64_t seed = derive_seed(cfg_.master_seed, job.n, job.index,
                                                           name() + ":" + std::string(to_string(job.graph)));
                    branches[t] = trace_from_top(w, job.n, seed, cfg_.sample_mode, job.graph, K_hi);
                    tag = std::string(job.graph == GraphSample::Simple ? "G" : "H") + "_n" + std::to_string(job.n) +
                          "_s" + std::to_string(job.index);
                }
                emit("branch_" + tag + ".csv", io::branch_table(branches[t]));
                emit("folds_" + tag + ".csv", io::fold_table(branches[t]));
            } catch (const std::exception& e) {
                record(t, e);
            }
        });
        summary_ << "Small-world branches, " << w.describe() << ", " << model_.name() << " frequencies, seeded at K = "
                 << num(K_hi) << "\n";
        summary_ << "  literature folds: K = 4.99, 5.01, 7.30\n";
        for (std::size_t t = 0; t < jobs.size(); ++t) {
            summary_ << "  " << tasks_.labels[t] << ":\n";
            if (!tasks_.errors[t].empty()) {
                summary_ << "    FAILED: " << tasks_.errors[t] << "\n";
                continue;
            }
            describe_folds(branches[t], std::numeric_limits<double>::quiet_NaN());
        }
    }

    // ---------------------------------------------------------- diagnostics
    void convergence() {
        struct Job {
            std::size_t gi;
            std::size_t n;
            std::uint64_t index;
        };
        std::vector<Job> jobs;
        for (std::size_t gi = 0; gi < graphons_.size(); ++gi)
            for (const std::size_t n : cfg_.ns)
                for (const auto idx : cfg_.seeds) {
                    jobs.push_back({gi, n, idx});
                    tasks_.add(cfg_.graphons[gi] + " n=" + std::to_string(n) + " index=" + std::to_string(idx));
                }
        struct Row {
            double degree_distance, degree_bound, cut, cut_bound, freq;
            std::uint64_t seed;
        };
        std::vector<Row> rows(jobs.size());
        parallel_for(jobs.size(), cfg_.workers, [&](std::size_t t) {
            try {
                const Job& job = jobs[t];
                const Graphon& w = graphons_[job.gi];
                const std::uint64_t seed =
                    derive_seed(cfg_.master_seed, job.n, job.index, name() + ":" + cfg_.graphons[job.gi]);
                const SamplePoints pts = SamplePoints::generate(job.n, cfg_.sample_mode, seed);
                const StepGraphon h = sample_weighted(w, pts);
                const StepGraphon g = sample_simple(w, pts, seed);
                Row& r = rows[t];
                r.seed = seed;
                r.degree_distance = degree_distance(degree_step(g), degree_step(h));
                r.degree_bound = degree_gap_bound(job.n, cfg_.nu);
                r.cut = cut_norm_estimate(g, h, cfg_.cut_budget, seed).lower_bound;
                r.cut_bound = simple_sample_cut_bound(job.n);
                r.freq = sup_distance_to_continuum(empirical_step(model_, pts), model_);
            } catch (const std::exception& e) {
                record(t, e);
            }
        });
        for (std::size_t gi = 0; gi < graphons_.size(); ++gi) {
            io::CsvTable table(io::schema::convergence());
            summary_ << "Convergence diagnostics, " << graphons_[gi].describe() << ", nu = " << cfg_.nu << "\n";
            summary_ << "  degree: sup |d_G - d_H| against sqrt(log(2n/nu)/n); cut: estimated ||G - H||_box (a lower"
                        " bound) against 22/sqrt(log n); frequencies: sup |omega_j - Omega(x)| on I_j\n";
            for (const std::size_t n : cfg_.ns) {
                std::size_t count = 0, deg_ok = 0, cut_ok = 0;
                std::vector<double> freq;
                double deg_max = 0.0, cut_max = 0.0;
                for (std::size_t t = 0; t < jobs.size(); ++t) {
                    if (jobs[t].gi != gi || jobs[t].n != n || !tasks_.errors[t].empty()) continue;
                    const Row& r = rows[t];
                    const bool dok = r.degree_distance <= r.degree_bound;
                    const bool cok = r.cut <= r.cut_bound;
                    table.add_row({std::to_string(n), std::to_string(r.seed), io::fmt(r.degree_distance),
                                   io::fmt(r.degree_bound), io::fmt(r.cut), io::fmt(r.cut_bound), io::fmt(r.freq),
                                   dok ? "1" : "0", cok ? "1" : "0"});
                    ++count;
                    deg_ok += dok;
                    cut_ok += cok;
                    deg_max = std::max(deg_max, r.degree_distance);
                    cut_max = std::max(cut_max, r.cut);
                    freq.push_back(r.freq);
                }
                if (count == 0) continue;
                std::sort(freq.begin(), freq.end());
                summary_ << "  n=" << n << ": degree within bound " << deg_ok << "/" << count << " (max "
                         << num(deg_max, 4) << " vs " << num(degree_gap_bound(n, cfg_.nu), 4) << "), cut within bound "
                         << cut_ok << "/" << count << " (max " << num(cut_max, 4) << " vs "
                         << num(simple_sample_cut_bound(n), 4) << "), median frequency distance "
                         << num(freq[freq.size() / 2], 4) << "\n";
            }
            emit("convergence" + (graphons_.size() > 1 ? "_" + slug(cfg_.graphons[gi]) : std::string()) + ".csv",
                 table);
        }
    }
};

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void check_output_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError(0, "output_dir: cannot create " + dir.string() + ": " + ec.message());
    const auto probe = dir / ".write_probe";
    {
        std::ofstream os(probe);
        if (!os) throw ConfigError(0, "output_dir: " + dir.string() + " is not writable");
    }
    std::filesystem::remove(probe, ec);
}

}  // namespace

RunReport run(const ExperimentConfig& cfg) {
    check_output_dir(cfg.output_dir);
    const auto t0 = std::chrono::steady_clock::now();
    RunReport report;
    Runner runner(cfg, report);
    runner.run();
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const TaskLog& tasks = runner.tasks();
    nlohmann::ordered_json failed = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < tasks.labels.size(); ++i) {
        if (tasks.errors[i].empty()) continue;
        failed.push_back({{"index", i}, {"label", tasks.labels[i]}, {"error", tasks.errors[i]}});
        report.failures.push_back("task " + std::to_string(i) + " (" + tasks.labels[i] + "): " + tasks.errors[i]);
    }
    std::sort(report.files.begin(), report.files.end());

    nlohmann::ordered_json manifest;
    manifest["experiment"] = std::string(to_string(cfg.experiment));
    manifest["config_hash"] = hex64(fnv1a64(cfg.source));
    manifest["version"] = GK_VERSION;
    manifest["compiler"] = __VERSION__;
    manifest["kernel_backend"] = std::string(kernels::backend_name(kernels::active_backend()));
    manifest["master_seed"] = cfg.master_seed;
    manifest["workers"] = cfg.workers;
    manifest["tasks"] = tasks.labels.size();
    manifest["failed_tasks"] = failed;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& f : report.files) files.push_back(f.generic_string());
    manifest["files"] = files;
    manifest["wall_time_s"] = wall;
    io::write_atomic(cfg.output_dir / "manifest.json", manifest.dump(2) + "\n");

    std::ostringstream summary;
    summary << runner.summary();
    summary << "\n" << tasks.labels.size() - failed.size() << "/" << tasks.labels.size() << " tasks succeeded";
    summary << ", wall time " << num(wall, 4) << " s\n";
    for (const auto& f : report.failures) summary << "  failed " << f << "\n";
    report.summary = summary.str();
    io::write_atomic(cfg.output_dir / "summary.txt", report.summary);
    report.exit_code = report.failures.empty() ? kExitOk : kExitTaskFailure;
    return report;
}

}  // namespace gk::exp
