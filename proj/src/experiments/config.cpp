#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gk/experiments.hpp"

namespace gk::exp {

namespace {

using nlohmann::json;

std::size_t line_at(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Locates "key" in the source, optionally after its parent's position.
struct Locator {
    std::string_view text;

    std::size_t offset(std::string_view key, std::size_t from = 0) const {
        const std::string quoted = "\"" + std::string(key) + "\"";
        const std::size_t pos = text.find(quoted, from);
        return pos == std::string_view::npos ? from : pos;
    }
    std::size_t line(std::string_view key, std::size_t from = 0) const {
        const std::size_t pos = text.find("\"" + std::string(key) + "\"", from);
        return pos == std::string_view::npos ? 0 : line_at(text, pos);
    }
};

[[noreturn]] void fail(const Locator& loc, std::string_view key, const std::string& what, std::size_t from = 0) {
    throw ConfigError(loc.line(key, from), std::string(key) + ": " + what);
}

double positive(const json& v, const Locator& loc, std::string_view key, std::size_t from = 0) {
    if (!v.is_number()) fail(loc, key, "expected a number", from);
    const double x = v.get<double>();
    if (!(x > 0.0) || !std::isfinite(x)) fail(loc, key, "must be a finite number > 0", from);
    return x;
}

std::uint64_t unsigned_int(const json& v, const Locator& loc, std::string_view key) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        fail(loc, key, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

std::vector<std::string> strings(const json& v, const Locator& loc, std::string_view key) {
    std::vector<std::string> out;
    if (v.is_string()) {
        out.push_back(v.get<std::string>());
    } else if (v.is_array() && !v.empty()) {
        for (const auto& e : v) {
            if (!e.is_string()) fail(loc, key, "expected strings");
            out.push_back(e.get<std::string>());
        }
    } else {
        fail(loc, key, "expected a string or a nonempty list of strings");
    }
    return out;
}

void apply_defaults(ExperimentConfig& cfg) {
    if (cfg.graphons.empty()) {
        switch (cfg.experiment) {
            case Experiment::KcritSweep: cfg.graphons = {"er:1"}; break;
            case Experiment::ProfileUniform:
            case Experiment::ProfileCauchy: cfg.graphons = {"er:1", "er:0.5"}; break;
            case Experiment::BifurcationCosine:
            case Experiment::ConvergenceDiag: cfg.graphons = {"er:0.5"}; break;
            case Experiment::SmallWorld: cfg.graphons = {"smallworld:0.9,0.1,0.25"}; break;
        }
    }
    if (cfg.frequency.empty()) {
        switch (cfg.experiment) {
            case Experiment::KcritSweep:
            case Experiment::ProfileUniform:
            case Experiment::ConvergenceDiag: cfg.frequency = "uniform"; break;
            case Experiment::ProfileCauchy: cfg.frequency = "cauchy_like"; break;
            case Experiment::BifurcationCosine:
            case Experiment::SmallWorld: cfg.frequency = "arcsine_cosine"; break;
        }
    }
    if (cfg.graphs.empty()) {
        if (cfg.experiment == Experiment::SmallWorld)
            cfg.graphs = {GraphSample::CellAverage, GraphSample::Weighted, GraphSample::Simple};
        else
            cfg.graphs = {GraphSample::Simple};
    }
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(line_at(text, e.byte > 0 ? e.byte - 1 : 0), std::string("invalid JSON: ") + e.what());
    }
    const Locator loc{text};
    if (!doc.is_object()) throw ConfigError(1, "config must be a JSON object");

    ExperimentConfig cfg;
    cfg.source = std::string(text);
    if (!doc.contains("experiment")) throw ConfigError(1, "missing required key 'experiment'");
    {
        const json& v = doc["experiment"];
        const auto e = v.is_string() ? experiment_from_string(v.get<std::string>()) : std::nullopt;
        if (!e)
            fail(loc, "experiment",
                 "expected one of fig1_kcrit_sweep, fig2_profile_uniform, fig3_profile_cauchy, "
                 "fig4_bifurcation_cosine, fig5_smallworld, convergence_diag");
        cfg.experiment = *e;
    }

    bool have_n = false;
    bool have_seeds = false;
    for (const auto& [key, v] : doc.items()) {
        if (key == "experiment") continue;
        if (key == "graphon") {
            cfg.graphons = strings(v, loc, key);
            for (const auto& g : cfg.graphons) {
                try {
                    if (g.rfind("grid:", 0) != 0) (void)parse_graphon(g);
                } catch (const std::invalid_argument& e) {
                    fail(loc, key, e.what());
                }
            }
        } else if (key == "frequency") {
            if (!v.is_string()) fail(loc, key, "expected a string");
            cfg.frequency = v.get<std::string>();
            try {
                if (cfg.frequency.rfind("table:", 0) != 0) (void)parse_frequency(cfg.frequency);
            } catch (const std::invalid_argument& e) {
                fail(loc, key, e.what());
            }
        } else if (key == "n") {
            if (!v.is_array() || v.empty()) fail(loc, key, "expected a nonempty list of sizes");
            for (const auto& e : v) {
                const auto n = unsigned_int(e, loc, key);
                if (n < 2) fail(loc, key, "sizes must be >= 2");
                cfg.ns.push_back(static_cast<std::size_t>(n));
            }
            have_n = true;
        } else if (key == "seeds") {
            // A count k means realizations 0..k-1.
            if (v.is_array()) {
                for (const auto& e : v) cfg.seeds.push_back(unsigned_int(e, loc, key));
            } else {
                const auto k = unsigned_int(v, loc, key);
                for (std::uint64_t i = 0; i < k; ++i) cfg.seeds.push_back(i);
            }
            if (cfg.seeds.empty()) fail(loc, key, "seeds must be nonempty");
            have_seeds = true;
        } else if (key == "master_seed") {
            cfg.master_seed = unsigned_int(v, loc, key);
        } else if (key == "K") {
            if (!v.is_object()) fail(loc, key, "expected an object with hi / min / value");
            const std::size_t from = loc.offset("K");
            for (const auto& [sub, x] : v.items()) {
                if (sub == "hi") cfg.K_hi = positive(x, loc, sub, from);
                else if (sub == "min") cfg.K_min = positive(x, loc, sub, from);
                else if (sub == "value") cfg.K_value = positive(x, loc, sub, from);
                else fail(loc, sub, "unknown key in K (expected hi, min, value)", from);
            }
            if (cfg.K_hi && cfg.K_min && !(*cfg.K_min < *cfg.K_hi)) fail(loc, "min", "K.min must be below K.hi", from);
        } else if (key == "ds") {
            cfg.ds = positive(v, loc, key);
        } else if (key == "max_points") {
            cfg.max_points = static_cast<std::size_t>(unsigned_int(v, loc, key));
            if (cfg.max_points < 3) fail(loc, key, "must be at least 3");
        } else if (key == "tolerances") {
            if (!v.is_object()) fail(loc, key, "expected an object");
            const std::size_t from = loc.offset("tolerances");
            for (const auto& [sub, x] : v.items()) {
                if (sub == "newton") cfg.newton_tol = positive(x, loc, sub, from);
                else if (sub == "bisect_width") cfg.bisect_width = positive(x, loc, sub, from);
                else if (sub == "fold") cfg.fold_tol = positive(x, loc, sub, from);
                else fail(loc, sub, "unknown tolerance (expected newton, bisect_width, fold)", from);
            }
        } else if (key == "method") {
            if (!v.is_string()) fail(loc, key, "expected a string");
            try {
                cfg.method = kcrit_method_from_string(v.get<std::string>());
            } catch (const std::invalid_argument& e) {
                fail(loc, key, e.what());
            }
        } else if (key == "graphs") {
            for (const auto& s : strings(v, loc, key)) {
                try {
                    cfg.graphs.push_back(graph_sample_from_string(s));
                } catch (const std::invalid_argument& e) {
                    fail(loc, key, e.what());
                }
            }
        } else if (key == "grid_m") {
            cfg.grid_m = static_cast<std::size_t>(unsigned_int(v, loc, key));
            if (cfg.grid_m < 2) fail(loc, key, "must be at least 2");
        } else if (key == "sample_mode") {
            if (!v.is_string()) fail(loc, key, "expected a string");
            try {
                cfg.sample_mode = sample_mode_from_string(v.get<std::string>());
            } catch (const std::invalid_argument& e) {
                fail(loc, key, e.what());
            }
        } else if (key == "nu") {
            cfg.nu = positive(v, loc, key);
            if (!(cfg.nu < 1.0)) fail(loc, key, "must be in (0, 1)");
        } else if (key == "cut_budget") {
            cfg.cut_budget = static_cast<int>(unsigned_int(v, loc, key));
            if (cfg.cut_budget < 1) fail(loc, key, "must be >= 1");
        } else if (key == "workers") {
            cfg.workers = static_cast<unsigned>(unsigned_int(v, loc, key));
            if (cfg.workers < 1) fail(loc, key, "must be >= 1");
        } else if (key == "output_dir") {
            if (!v.is_string() || v.get<std::string>().empty()) fail(loc, key, "expected a nonempty path");
            cfg.output_dir = v.get<std::string>();
        } else {
            fail(loc, key, "unknown key");
        }
    }
    if (!have_n) throw ConfigError(1, "missing required key 'n'");
    if (!have_seeds) throw ConfigError(1, "missing required key 'seeds'");
    apply_defaults(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError(0, "cannot read config " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

}  // namespace gk::exp
