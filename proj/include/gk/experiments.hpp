#pragma once

// Experiment drivers behind `gkctl run <config.json>`: text specs for
// graphons and frequency models, the JSON config, and the runners that write
// CSVs, a manifest and a summary.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gk/freqdist.hpp"
#include "gk/graphon.hpp"
#include "gk/kcrit.hpp"

namespace gk::exp {

/// "er:<p>", "complete", "smallworld:<hi>,<lo>,<radius>", "grid:<file>"
/// (a step graphon saved by save_step_graphon).
Graphon parse_graphon(std::string_view spec);
/// "uniform", "arcsine_cosine", "cauchy_like" (dashes accepted) or
/// "table:<file>" with rows "node,value".
FrequencyModel parse_frequency(std::string_view spec);

/// Constant degree of the graphon (the p in K_crit = 1/(p gamma*)).
/// Throws std::invalid_argument when the degree is not constant.
double graphon_degree(const Graphon& w);

nlohmann::ordered_json kcrit_graphon_json(const FrequencyModel& model, double p);
/// Mean-field report and essential spectrum at K >= K_crit; with
/// `center_manifold` also the discretised kernel mode and a, b at K_crit.
nlohmann::ordered_json spectrum_json(const FrequencyModel& model, double p, double K, bool center_manifold = false,
                                     std::size_t m = 2048);

enum class Experiment {
    KcritSweep,       // fig1_kcrit_sweep
    ProfileUniform,   // fig2_profile_uniform
    ProfileCauchy,    // fig3_profile_cauchy
    BifurcationCosine,  // fig4_bifurcation_cosine
    SmallWorld,       // fig5_smallworld
    ConvergenceDiag,  // convergence_diag
};
std::string_view to_string(Experiment e) noexcept;
std::optional<Experiment> experiment_from_string(std::string_view text) noexcept;

struct ExperimentConfig {
    Experiment experiment = Experiment::KcritSweep;
    std::vector<std::string> graphons;  // specs; one panel each
    std::string frequency;
    std::vector<std::size_t> ns;
    std::vector<std::uint64_t> seeds;   // realization indices
    std::uint64_t master_seed = 0;
    std::optional<double> K_hi;         // start of downward continuation / bisection
    std::optional<double> K_min;        // lower end of continuation
    std::optional<double> K_value;      // fixed coupling (profile runs); default: critical
    double ds = 0.05;
    std::size_t max_points = 2000;
    double newton_tol = 1e-10;
    double bisect_width = 1e-4;
    double fold_tol = 1e-8;
    std::optional<KcritMethod> method;
    std::vector<GraphSample> graphs;    // fig5: one branch per entry
    std::size_t grid_m = 800;
    SampleMode sample_mode = SampleMode::IidUniform;
    double nu = 0.05;
    int cut_budget = 32;
    unsigned workers = 1;
    std::filesystem::path output_dir = "out";
    std::string source;                 // the JSON text, hashed into the manifest
};

/// A schema violation; `line` is 1-based (0 when unknown).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Exit codes of `run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitTaskFailure = 2;

struct RunReport {
    int exit_code = kExitOk;
    std::vector<std::filesystem::path> files;  // written, relative to the output directory
    std::vector<std::string> failures;         // "task <i> (<label>): <error>"
    std::string summary;
};

/// Runs the experiment, writes its CSVs, manifest.json and summary.txt into
/// cfg.output_dir. Task failures are recorded and give kExitTaskFailure;
/// everything that succeeded is still written.
RunReport run(const ExperimentConfig& cfg);

}  // namespace gk::exp
