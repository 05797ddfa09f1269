#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gk/experiments.hpp"
#include "gk/graphon_io.hpp"
#include "gk/meanfield.hpp"

namespace gk::exp {

namespace {

double parse_number(std::string_view text, std::string_view context) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty())
        throw std::invalid_argument("bad number '" + std::string(text) + "' in " + std::string(context));
    return v;
}

std::vector<double> parse_list(std::string_view text, std::string_view context) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        out.push_back(parse_number(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start), context));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string normalise(std::string_view text) {
    std::string out(text);
    std::replace(out.begin(), out.end(), '-', '_');
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

Graphon parse_graphon(std::string_view spec) {
    const std::size_t colon = spec.find(':');
    const std::string head = normalise(spec.substr(0, colon));
    const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
    if (head == "complete" && rest.empty()) return Graphon::erdos_renyi(1.0);
    if (head == "er" || head == "erdos_renyi") {
        const auto v = parse_list(rest, spec);
        if (v.size() != 1) throw std::invalid_argument("er graphon takes one parameter: er:<p>");
        return Graphon::erdos_renyi(v[0]);
    }
    if (head == "smallworld" || head == "small_world") {
        const auto v = parse_list(rest, spec);
        if (v.size() != 3) throw std::invalid_argument("small-world graphon takes smallworld:<hi>,<lo>,<radius>");
        return Graphon::small_world(v[0], v[1], v[2]);
    }
    if (head == "grid" && !rest.empty()) {
        const StepGraphon s = load_step_graphon(std::string(rest));
        const auto w = s.weights();
        return Graphon::grid(s.size(), std::vector<double>(w.begin(), w.end()));
    }
    throw std::invalid_argument("unknown graphon spec '" + std::string(spec) +
                                "' (expected er:<p>, complete, smallworld:<hi>,<lo>,<radius> or grid:<file>)");
}

FrequencyModel parse_frequency(std::string_view spec) {
    const std::size_t colon = spec.find(':');
    const std::string head = normalise(spec.substr(0, colon));
    if (colon == std::string_view::npos) {
        if (head == "uniform") return FrequencyModel::uniform();
        if (head == "arcsine_cosine" || head == "cosine") return FrequencyModel::arcsine_cosine();
        if (head == "cauchy_like" || head == "cauchy") return FrequencyModel::cauchy_like();
    } else if (head == "table") {
        const std::string path(spec.substr(colon + 1));
        std::ifstream is(path);
        if (!is) throw std::invalid_argument("cannot open density table " + path);
        std::vector<double> nodes;
        std::vector<double> values;
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty() || line.front() == '#' || std::isalpha(static_cast<unsigned char>(line.front()))) continue;
            const auto v = parse_list(line, path);
            if (v.size() != 2) throw std::invalid_argument("density table rows must be node,value: " + path);
            nodes.push_back(v[0]);
            values.push_back(v[1]);
        }
        return FrequencyModel::table(std::move(nodes), std::move(values));
    }
    throw std::invalid_argument("unknown frequency spec '" + std::string(spec) +
                                "' (expected uniform, arcsine_cosine, cauchy_like or table:<file>)");
}

double graphon_degree(const Graphon& w) {
    if (const auto c = w.constant_degree()) return *c;
    const DegreeFunction d = degree(w);
    if (d.is_constant()) return *d.constant;
    const auto [lo, hi] = std::minmax_element(d.values.begin(), d.values.end());
    if (*hi - *lo > 1e-12 * std::max(1.0, std::abs(*hi)))
        throw std::invalid_argument("graphon degree is not constant: " + w.describe());
    return *lo;
}

nlohmann::ordered_json kcrit_graphon_json(const FrequencyModel& model, double p) {
    const GammaMaximum g = maximize_gamma(model);
    nlohmann::ordered_json out;
    out["model"] = std::string(model.name());
    out["p"] = p;
    out["gamma_star"] = g.gamma_star;
    out["q_star"] = g.q_star;
    out["K_crit"] = 1.0 / (p * g.gamma_star);
    return out;
}

nlohmann::ordered_json spectrum_json(const FrequencyModel& model, double p, double K, bool center_manifold,
                                     std::size_t m) {
    const MeanFieldReport mf = meanfield_report(model, p, K);
    const SpectrumReport sp = spectrum_report(model, p, K, mf.q);
    nlohmann::ordered_json out;
    out["model"] = std::string(model.name());
    out["p"] = p;
    out["K"] = K;
    out["gamma_star"] = mf.gamma_star;
    out["q_star"] = mf.q_star;
    out["K_crit"] = mf.K_crit;
    out["q"] = mf.q;
    out["kappa"] = sp.kappa;
    out["C"] = sp.C;
    out["ess_lo"] = sp.ess_lo;
    out["ess_hi"] = sp.ess_hi;
    out["zero_eig_lhs"] = sp.zero_eig_lhs;
    out["stable"] = sp.stable;
    out["point_eigs"] = sp.point_eigs;
    if (center_manifold) {
        const DiscreteKernelMode mode = kernel_mode(model, p, mf.K_crit, mf.q_star, m);
        const CMCoefficients cm = cm_coefficients(model, p, mf.K_crit, mf.q_star, mode.mode);
        out["grid_m"] = m;
        out["mode_eigenvalue"] = mode.eigenvalue;
        out["next_eigenvalue"] = mode.next_eigenvalue;
        out["a"] = cm.a;
        out["a_forcing"] = cm.a_forcing;
        out["b"] = cm.b;
        out["sign_ab"] = cm.product_sign;
    }
    return out;
}

std::string_view to_string(Experiment e) noexcept {
    switch (e) {
        case Experiment::KcritSweep: return "fig1_kcrit_sweep";
        case Experiment::ProfileUniform: return "fig2_profile_uniform";
        case Experiment::ProfileCauchy: return "fig3_profile_cauchy";
        case Experiment::BifurcationCosine: return "fig4_bifurcation_cosine";
        case Experiment::SmallWorld: return "fig5_smallworld";
        case Experiment::ConvergenceDiag: return "convergence_diag";
    }
    return "unknown";
}

std::optional<Experiment> experiment_from_string(std::string_view text) noexcept {
    for (const Experiment e : {Experiment::KcritSweep, Experiment::ProfileUniform, Experiment::ProfileCauchy,
                               Experiment::BifurcationCosine, Experiment::SmallWorld, Experiment::ConvergenceDiag})
        if (to_string(e) == text) return e;
    return std::nullopt;
}

}  // namespace gk::exp
