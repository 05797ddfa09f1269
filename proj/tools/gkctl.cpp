// gkctl: command-line front end.
//
//   gkctl kcrit-graphon --frequency arcsine_cosine --p 0.5
//   gkctl solve --graphon er:0.5 --frequency uniform --n 500 --K 3 --out state.csv
//   gkctl run configs/fig4.json --workers 4

#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gk/branch.hpp"
#include "gk/csv.hpp"
#include "gk/experiments.hpp"
#include "gk/graphon_io.hpp"
#include "gk/kcrit.hpp"
#include "gk/meanfield.hpp"

namespace {

using namespace gk;
using nlohmann::ordered_json;

struct Common {
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::string out;
    double tol = 1e-10;
};

struct Network {
    std::string graphon = "er:1";
    std::string frequency = "uniform";
    std::size_t n = 100;
    std::string graph = "simple";
    std::string mode = "iid";
};

void add_network(CLI::App* sub, Network& net) {
    sub->add_option("--graphon", net.graphon, "er:<p> | complete | smallworld:<hi>,<lo>,<r> | grid:<file>")
        ->capture_default_str();
    sub->add_option("--frequency", net.frequency, "uniform | arcsine_cosine | cauchy_like | table:<file>")
        ->capture_default_str();
    sub->add_option("--n", net.n, "number of oscillators")->capture_default_str()->check(CLI::Range(2, 1 << 20));
    sub->add_option("--graph", net.graph, "simple | weighted | cell-average")->capture_default_str();
    sub->add_option("--mode", net.mode, "latent points: iid | stratified | deterministic")->capture_default_str();
}

Realization build(const Network& net, std::uint64_t seed) {
    return make_realization(net.n, exp::parse_graphon(net.graphon), exp::parse_frequency(net.frequency), seed,
                            sample_mode_from_string(net.mode), graph_sample_from_string(net.graph));
}

void write_or_print(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-")
        std::cout << text;
    else
        io::write_atomic(out, text);
}

double degree_of(const Network& net, const Realization& real) {
    return exp::parse_graphon(net.graphon).constant_degree().value_or(real.system.adjacency().edge_density());
}

int cmd_sample(const Network& net, const Common& c) {
    const Graphon w = exp::parse_graphon(net.graphon);
    const Realization real = build(net, c.seed);
    const StepGraphon& a = real.system.adjacency();
    if (!c.out.empty()) save_step_graphon(c.out, a);
    ordered_json j;
    j["n"] = a.size();
    j["graph"] = net.graph;
    j["graphon"] = w.describe();
    j["edge_density"] = a.edge_density();
    if (const auto d = w.constant_degree())
        j["degree_distance"] = degree_distance(degree_step(a), DegreeFunction::from_constant(*d));
    j["frequency_sup_distance"] = sup_distance_to_continuum(real.frequencies, exp::parse_frequency(net.frequency));
    if (!c.out.empty()) j["written"] = c.out;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_solve(const Network& net, const Common& c, double K) {
    const Realization real = build(net, c.seed);
    const FrequencyModel model = exp::parse_frequency(net.frequency);
    const auto guess = mean_field_guess(model, degree_of(net, real), real.frequencies, K);
    NewtonOptions opts;
    opts.tol = c.tol;
    const SolveResult sr = newton_solve(real.system.with_coupling(K), guess, opts);
    if (!sr.ok()) {
        std::cerr << "newton: " << to_string(sr.status) << " after " << sr.iterations << " iterations, residual "
                  << sr.residual_norm << "\n";
        return exp::kExitTaskFailure;
    }
    write_or_print(c.out, io::sync_state_table(*sr.state, real.points.points, real.frequencies.values).str());
    if (!c.out.empty())
        std::cout << "K " << K << ", r " << sr.state->r << ", " << to_string(sr.state->stability) << ", "
                  << sr.iterations << " iterations\n";
    return 0;
}

int cmd_continue(const Network& net, const Common& c, double K, double K_min, std::optional<double> K_max, double ds,
                 std::size_t max_points, int direction) {
    const Realization real = build(net, c.seed);
    const FrequencyModel model = exp::parse_frequency(net.frequency);
    const auto guess = mean_field_guess(model, degree_of(net, real), real.frequencies, K);
    NewtonOptions nopts;
    nopts.tol = c.tol;
    const SolveResult sr = newton_solve(real.system.with_coupling(K), guess, nopts);
    if (!sr.ok()) {
        std::cerr << "no converged start at K = " << K << " (" << to_string(sr.status) << ")\n";
        return exp::kExitTaskFailure;
    }
    cont::Options o;
    o.ds = ds;
    o.tol = c.tol;
    o.param_min = K_min;
    o.param_max = K_max.value_or(2.0 * K);
    o.max_points = max_points;
    o.direction = direction;
    const Branch br = continue_branch(real.system, *sr.state, o);
    const std::filesystem::path dir = c.out.empty() ? "." : c.out;
    io::write_atomic(dir / "branch.csv", io::branch_table(br).str());
    io::write_atomic(dir / "folds.csv", io::fold_table(br).str());
    ordered_json j;
    j["points"] = br.points.size();
    j["termination"] = std::string(cont::to_string(br.termination));
    j["folds"] = ordered_json::array();
    for (const auto& f : br.folds)
        j["folds"].push_back({{"K", f.K}, {"quadratic_K", f.quadratic_K}, {"eig", f.eig}, {"suspect", f.suspect}});
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const Network& net, const Common& c, const std::vector<std::size_t>& ns, std::size_t seeds,
              const std::string& method, std::optional<double> K_hi) {
    SweepConfig sc;
    sc.name = "sweep";
    sc.ns = ns;
    sc.seeds_per_n = seeds;
    sc.master_seed = c.seed;
    sc.graphon = exp::parse_graphon(net.graphon);
    sc.model = exp::parse_frequency(net.frequency);
    if (!method.empty()) sc.options.method = kcrit_method_from_string(method);
    sc.options.K_hi = K_hi;
    sc.options.newton.tol = c.tol;
    sc.options.sample_mode = sample_mode_from_string(net.mode);
    sc.options.graph = graph_sample_from_string(net.graph);
    sc.workers = c.workers;
    const SweepResult res = sweep_realizations(sc);
    const std::filesystem::path dir = c.out.empty() ? "." : c.out;
    io::write_atomic(dir / "sweep_rows.csv", io::sweep_rows_table(res).str());
    io::write_atomic(dir / "sweep_aggregate.csv", io::sweep_aggregate_table(res).str());
    std::cout << io::sweep_aggregate_table(res).str();
    for (const std::size_t i : res.failed) std::cerr << "task " << i << " failed: " << res.errors[i] << "\n";
    return res.failed.empty() ? 0 : exp::kExitTaskFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kuramoto networks on graphons: mean-field predictions and finite-n checks"};
    app.require_subcommand(1);
    Common c;
    app.add_option("--seed", c.seed, "master seed")->capture_default_str();
    app.add_option("--workers", c.workers, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--out", c.out, "output file or directory");
    app.add_option("--tol", c.tol, "Newton residual tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    app.fallthrough();

    Network net;

    auto* sample = app.add_subcommand("sample", "sample a graph from a graphon (saved with --out)");
    add_network(sample, net);

    auto* kg = app.add_subcommand("kcrit-graphon", "graphon critical coupling 1/(p gamma*) as JSON");
    std::string freq = "uniform";
    double p = 1.0;
    kg->add_option("--frequency", freq)->capture_default_str();
    kg->add_option("--p", p, "edge probability")->capture_default_str()->check(CLI::Range(1e-12, 1.0));

    auto* solve = app.add_subcommand("solve", "Newton solve from the mean-field profile; writes a sync-state CSV");
    add_network(solve, net);
    double K = 0.0;
    solve->add_option("--K", K, "coupling")->required()->check(CLI::PositiveNumber);

    auto* cont_cmd = app.add_subcommand("continue", "continue the locked branch in K; writes branch.csv, folds.csv");
    add_network(cont_cmd, net);
    double K_min = 0.0;
    std::optional<double> K_max;
    double ds = 0.05;
    std::size_t max_points = 1000;
    int direction = -1;
    cont_cmd->add_option("--K", K, "starting coupling")->required()->check(CLI::PositiveNumber);
    cont_cmd->add_option("--K-min", K_min)->capture_default_str();
    cont_cmd->add_option("--K-max", K_max, "default 2 K");
    cont_cmd->add_option("--ds", ds)->capture_default_str()->check(CLI::PositiveNumber);
    cont_cmd->add_option("--max-points", max_points)->capture_default_str();
    cont_cmd->add_option("--direction", direction, "-1 (decreasing K) or 1")->capture_default_str()->check(
        CLI::IsMember({-1, 1}));

    auto* sweep = app.add_subcommand("sweep", "K_crit,n over sizes and seeds; writes sweep CSVs");
    add_network(sweep, net);
    std::vector<std::size_t> ns;
    std::size_t seeds = 10;
    std::string method;
    std::optional<double> K_hi;
    sweep->add_option("--sizes", ns, "list of n")->required();
    sweep->add_option("--seeds", seeds, "realizations per n")->capture_default_str();
    sweep->add_option("--method", method, "FoldTracking | SweepBisection (default by frequency model)");
    sweep->add_option("--K-hi", K_hi, "seeding coupling (default 3 K_crit)");

    auto* spec = app.add_subcommand("spectrum", "mean-field profile and spectrum at K as JSON");
    std::optional<double> K_spec;
    bool cm = false;
    std::size_t m = 2048;
    spec->add_option("--frequency", freq)->capture_default_str();
    spec->add_option("--p", p)->capture_default_str()->check(CLI::Range(1e-12, 1.0));
    spec->add_option("--K", K_spec, "coupling (default K_crit)");
    spec->add_flag("--cm", cm, "also the kernel mode and center-manifold coefficients at K_crit");
    spec->add_option("--m", m, "grid size for --cm")->capture_default_str();

    auto* run = app.add_subcommand("run", "run an experiment config");
    std::string config;
    run->add_option("config", config, "config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*sample) return cmd_sample(net, c);
        if (*kg) {
            std::cout << exp::kcrit_graphon_json(exp::parse_frequency(freq), p).dump(2) << "\n";
            return 0;
        }
        if (*solve) return cmd_solve(net, c, K);
        if (*cont_cmd) return cmd_continue(net, c, K, K_min, K_max, ds, max_points, direction);
        if (*sweep) return cmd_sweep(net, c, ns, seeds, method, K_hi);
        if (*spec) {
            const FrequencyModel model = exp::parse_frequency(freq);
            const double Kv = K_spec.value_or(critical_coupling(model, p));
            std::cout << exp::spectrum_json(model, p, Kv, cm, m).dump(2) << "\n";
            return 0;
        }
        if (*run) {
            exp::ExperimentConfig cfg;
            try {
                cfg = exp::load_config(config);
            } catch (const exp::ConfigError& e) {
                std::cerr << config << ": " << e.what() << "\n";
                return exp::kExitConfig;
            }
            if (app.count("--workers")) cfg.workers = c.workers;
            if (!c.out.empty()) cfg.output_dir = c.out;
            if (app.count("--seed")) cfg.master_seed = c.seed;
            if (app.count("--tol")) cfg.newton_tol = c.tol;
            exp::RunReport rep;
            try {
                rep = exp::run(cfg);
            } catch (const exp::ConfigError& e) {
                std::cerr << config << ": " << e.what() << "\n";
                return exp::kExitConfig;
            }
            std::cout << rep.summary;
            return rep.exit_code;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exp::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exp::kExitTaskFailure;
    }
    return 0;
}
