#pragma once

// Critical coupling of finite random networks: build a realization, seed a
// locked state at high coupling and find where it disappears.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gk/branch.hpp"
#include "gk/freqdist.hpp"
#include "gk/graphon.hpp"

namespace gk {

/// Simple: G(n, W). Weighted: H(n, W). CellAverage: the graphon embedded on
/// n equal cells (no randomness in the graph).
enum class GraphSample { Simple, Weighted, CellAverage };
std::string_view to_string(GraphSample g) noexcept;
GraphSample graph_sample_from_string(std::string_view text);

struct Realization {
    SamplePoints points;
    StepFrequency frequencies;
    FiniteSystem system;
};

/// Latent points (mode, seed), frequencies omega_j = Omega(x_j) and the graph.
Realization make_realization(std::size_t n, const Graphon& w, const FrequencyModel& model, std::uint64_t seed,
                             SampleMode mode = SampleMode::IidUniform, GraphSample graph = GraphSample::Simple);

/// u_j = arcsin((omega_j - mean)/kappa) with kappa from the mean-field
/// relation for a kernel of constant degree d (the ER formula with p = d).
/// Below the mean-field threshold kappa falls back to sup|omega_j - mean|.
std::vector<double> mean_field_guess(const FrequencyModel& model, double degree, const StepFrequency& freq, double K);

enum class KcritMethod { FoldTracking, SweepBisection };
std::string_view to_string(KcritMethod m) noexcept;
KcritMethod kcrit_method_from_string(std::string_view text);

/// SweepBisection for Uniform frequencies, FoldTracking otherwise.
KcritMethod default_kcrit_method(const FrequencyModel& model) noexcept;

struct KcritOptions {
    std::optional<KcritMethod> method;   // default_kcrit_method when empty
    std::optional<double> K_hi;          // default 3 K_crit of the graphon
    double bisect_width = 1e-4;
    int bisect_retries = 3;              // intermediate warm starts per probe
    cont::Options continuation{};
    NewtonOptions newton{};
    SampleMode sample_mode = SampleMode::IidUniform;
    GraphSample graph = GraphSample::Simple;
};

struct CriticalCouplingResult {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double K_crit_n = 0.0;
    KcritMethod method = KcritMethod::FoldTracking;
    double reference_K_crit = 0.0;  // graphon value; NaN when unknown
    double relative_error = 0.0;
    bool fold_suspect = false;
};

/// Graphon K_crit = 1/(p gamma*) for Erdos-Renyi kernels; NaN otherwise.
double reference_kcrit(const Graphon& w, const FrequencyModel& model);

/// K_crit,n of a given system. `guess` produces the Newton start at K_hi.
/// Throws std::runtime_error("seed-state failure ...") when Newton does not
/// reach a stable state at K_hi.
struct KcritMeasurement {
    double K = 0.0;
    KcritMethod method = KcritMethod::FoldTracking;
    bool fold_suspect = false;
    std::optional<Branch> branch;  // FoldTracking only
    SyncState last_stable;         // lowest-K stable state reached
};
KcritMeasurement measure_kcrit_system(const FiniteSystem& sys, const std::vector<double>& guess, double K_hi,
                                      double K_lo, KcritMethod method, const KcritOptions& opts);

/// Lower bound max_j |omega_j - mean| / d_j (no lock is possible below it).
double kcrit_lower_bound(const FiniteSystem& sys);

CriticalCouplingResult measure_kcrit(std::size_t n, const Graphon& w, const FrequencyModel& model,
                                     std::uint64_t seed, const KcritOptions& opts = {});

/// The measurement together with the realization and the lowest stable state.
struct KcritDetail {
    CriticalCouplingResult result;
    Realization realization;
    KcritMeasurement measurement;
};
KcritDetail measure_kcrit_detailed(std::size_t n, const Graphon& w, const FrequencyModel& model, std::uint64_t seed,
                                   const KcritOptions& opts = {});

struct SweepConfig {
    std::string name = "sweep";
    std::vector<std::size_t> ns;
    std::size_t seeds_per_n = 0;
    std::vector<std::uint64_t> indices;  // realization indices; empty: 0 .. seeds_per_n - 1
    std::uint64_t master_seed = 0;
    Graphon graphon = Graphon::erdos_renyi(1.0);
    FrequencyModel model = FrequencyModel::uniform();
    KcritOptions options{};
    unsigned workers = 1;
};

struct SweepAggregate {
    std::size_t n = 0;
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation (n - 1)
    std::size_t count = 0;
};

struct SweepResult {
    std::vector<CriticalCouplingResult> rows;     // task order: n-major, then index
    std::vector<bool> ok;
    std::vector<std::string> errors;              // empty for successful tasks
    std::vector<SweepAggregate> aggregate;        // one per n, successful rows only
    std::vector<std::size_t> failed;              // task indices
};

SweepResult sweep_realizations(const SweepConfig& cfg);

std::vector<SweepAggregate> aggregate_rows(const std::vector<CriticalCouplingResult>& rows,
                                           const std::vector<bool>& ok);

}  // namespace gk
