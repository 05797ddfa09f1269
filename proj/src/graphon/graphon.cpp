#include "gk/graphon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gk/quadrature.hpp"
#include "gk/rng.hpp"

namespace gk {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// int_a^b |[c,d] ∩ {y : circle_distance(x, y) <= r}| dx for r < 1/2. Each
// periodic copy of the arc contributes a piecewise linear function of x, so
// the trapezoid rule between its kinks is exact.
double arc_overlap(double a, double b, double c, double d, double r) {
    double total = 0.0;
    for (const double s : {-1.0, 0.0, 1.0}) {
        auto len = [&](double x) { return std::max(0.0, std::min(d, x + r + s) - std::max(c, x - r + s)); };
        std::vector<double> cuts{a, b};
        for (const double k : {c - r - s, d - r - s, c + r - s, d + r - s})
            if (k > a && k < b) cuts.push_back(k);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            total += 0.5 * (cuts[i + 1] - cuts[i]) * (len(cuts[i]) + len(cuts[i + 1]));
    }
    return total;
}

}  // namespace

double circle_distance(double x, double y) noexcept {
    const double d = std::abs(x - y);
    return std::min(d, 1.0 - d);
}

Graphon Graphon::erdos_renyi(double p) {
    require(p > 0.0 && p <= 1.0, "Erdos-Renyi probability must lie in (0,1]");
    return Graphon(ErdosRenyi{p});
}

Graphon Graphon::small_world(double hi, double lo, double radius) {
    require(hi >= 0.0 && hi <= 1.0 && lo >= 0.0 && lo <= 1.0, "small-world weights must lie in [0,1]");
    require(radius > 0.0 && radius <= 0.5, "small-world radius must lie in (0,1/2]");
    return Graphon(SmallWorld{hi, lo, radius});
}

Graphon Graphon::grid(std::size_t m, std::vector<double> values) {
    require(m >= 1 && values.size() == m * m, "grid kernel needs m*m values");
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) {
            const double v = values[j * m + k];
            require(v >= 0.0 && v <= 1.0, "grid kernel values must lie in [0,1]");
            require(v == values[k * m + j], "grid kernel must be symmetric");
        }
    return Graphon(GridKernel{m, std::move(values)});
}

double Graphon::operator()(double x, double y) const {
    return std::visit(Overloaded{
                          [](const ErdosRenyi& er) { return er.p; },
                          [&](const SmallWorld& sw) { return circle_distance(x, y) <= sw.radius ? sw.hi : sw.lo; },
                          [&](const GridKernel& g) {
                              const auto cell = [&](double t) {
                                  const auto i = static_cast<std::size_t>(std::max(0.0, t) * static_cast<double>(g.m));
                                  return std::min(i, g.m - 1);
                              };
                              return g.values[cell(x) * g.m + cell(y)];
                          },
                      },
                      kind_);
}

std::string Graphon::describe() const {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const ErdosRenyi& er) { os << "erdos_renyi(p=" << er.p << ")"; },
                   [&](const SmallWorld& sw) {
                       os << "small_world(hi=" << sw.hi << ", lo=" << sw.lo << ", radius=" << sw.radius << ")";
                   },
                   [&](const GridKernel& g) { os << "grid(m=" << g.m << ")"; },
               },
               kind_);
    return os.str();
}

std::optional<double> Graphon::constant_degree() const {
    if (const auto* er = std::get_if<ErdosRenyi>(&kind_)) return er->p;
    if (const auto* sw = std::get_if<SmallWorld>(&kind_)) {
        const double near = 2.0 * sw->radius;
        return sw->hi * near + sw->lo * (1.0 - near);
    }
    return std::nullopt;
}

std::vector<double> Graphon::row_breakpoints(double x) const {
    std::vector<double> out;
    if (const auto* sw = std::get_if<SmallWorld>(&kind_)) {
        for (const double y : {x - sw->radius, x + sw->radius}) {
            const double wrapped = y - std::floor(y);
            if (wrapped > 0.0 && wrapped < 1.0) out.push_back(wrapped);
        }
    } else if (const auto* g = std::get_if<GridKernel>(&kind_)) {
        for (std::size_t i = 1; i < g->m; ++i) out.push_back(static_cast<double>(i) / static_cast<double>(g->m));
    }
    std::sort(out.begin(), out.end());
    return out;
}

StepGraphon::StepGraphon(std::size_t n, std::vector<double> weights) : n_(n), weights_(std::move(weights)) {
    require(weights_.size() == n_ * n_, "step graphon needs n*n weights");
    for (std::size_t j = 0; j < n_; ++j)
        for (std::size_t k = j; k < n_; ++k) {
            const double v = weights_[j * n_ + k];
            require(v >= 0.0 && v <= 1.0, "step graphon weights must lie in [0,1]");
            require(v == weights_[k * n_ + j], "step graphon must be symmetric");
        }
}

bool StepGraphon::has_zero_diagonal() const noexcept {
    for (std::size_t j = 0; j < n_; ++j)
        if (weights_[j * n_ + j] != 0.0) return false;
    return true;
}

bool StepGraphon::is_binary() const noexcept {
    return std::all_of(weights_.begin(), weights_.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

double StepGraphon::edge_density() const noexcept {
    if (n_ < 2) return 0.0;
    double sum = 0.0;
    for (std::size_t j = 0; j < n_; ++j)
        for (std::size_t k = j + 1; k < n_; ++k) sum += weights_[j * n_ + k];
    return sum / (0.5 * static_cast<double>(n_) * static_cast<double>(n_ - 1));
}

StepGraphon sample_weighted(const Graphon& w, const SamplePoints& pts) {
    const std::size_t n = pts.size();
    require(n >= 1, "need at least one sample point");
    std::vector<double> weights(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
            const double v = w(pts.points[j], pts.points[k]);
            weights[j * n + k] = v;
            weights[k * n + j] = v;
        }
    return StepGraphon(n, std::move(weights));
}

StepGraphon sample_simple(const Graphon& w, const SamplePoints& pts, std::uint64_t seed) {
    const std::size_t n = pts.size();
    require(n >= 1, "need at least one sample point");
    const CounterRng rng(seed, streams::kEdges);
    std::vector<double> weights(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
            const double prob = w(pts.points[j], pts.points[k]);
            const double draw = rng.uniform(static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k));
            const double v = draw < prob ? 1.0 : 0.0;
            weights[j * n + k] = v;
            weights[k * n + j] = v;
        }
    return StepGraphon(n, std::move(weights));
}

StepGraphon embed(const Graphon& w, std::size_t n) {
    require(n >= 1, "embedding size must be at least 1");
    std::vector<double> weights(n * n, 0.0);
    if (const auto* er = std::get_if<ErdosRenyi>(&w.kind())) {
        std::fill(weights.begin(), weights.end(), er->p);
        return StepGraphon(n, std::move(weights));
    }
    const double h = 1.0 / static_cast<double>(n);
    if (const auto* sw = std::get_if<SmallWorld>(&w.kind()); sw && sw->radius < 0.5) {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = j; k < n; ++k) {
                const double xj = static_cast<double>(j) * h;
                const double xk = static_cast<double>(k) * h;
                const double frac = arc_overlap(xj, xj + h, xk, xk + h, sw->radius) / (h * h);
                weights[j * n + k] = weights[k * n + j] = sw->lo + (sw->hi - sw->lo) * std::clamp(frac, 0.0, 1.0);
            }
        return StepGraphon(n, std::move(weights));
    }
    static const quad::UnitGaussRule<32> rule;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j; k < n; ++k) {
            double acc = 0.0;
            for (unsigned a = 0; a < 32; ++a) {
                const double x = (static_cast<double>(j) + rule.nodes[a]) * h;
                double inner = 0.0;
                for (unsigned b = 0; b < 32; ++b)
                    inner += rule.weights[b] * w(x, (static_cast<double>(k) + rule.nodes[b]) * h);
                acc += rule.weights[a] * inner;
            }
            acc = std::clamp(acc, 0.0, 1.0);
            weights[j * n + k] = acc;
            weights[k * n + j] = acc;
        }
    return StepGraphon(n, std::move(weights));
}

DegreeFunction degree(const Graphon& w) {
    if (const auto c = w.constant_degree()) return DegreeFunction::from_constant(*c);
    const auto& g = std::get<GridKernel>(w.kind());
    std::vector<double> rows(g.m);
    for (std::size_t j = 0; j < g.m; ++j)
        rows[j] = std::accumulate(g.values.begin() + static_cast<std::ptrdiff_t>(j * g.m),
                                  g.values.begin() + static_cast<std::ptrdiff_t>((j + 1) * g.m), 0.0) /
                  static_cast<double>(g.m);
    return DegreeFunction::from_steps(std::move(rows));
}

double degree_at(const Graphon& w, double x) {
    return quad::integrate_unit_split([&](double y) { return w(x, y); }, w.row_breakpoints(x), 1e-12);
}

DegreeFunction degree_step(const StepGraphon& s) {
    const std::size_t n = s.size();
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto row = s.row(j);
        d[j] = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(n);
    }
    return DegreeFunction::from_steps(std::move(d));
}

double degree_distance(const DegreeFunction& a, const DegreeFunction& b) {
    const auto step_vs_const = [](const std::vector<double>& v, double c) {
        double worst = 0.0;
        for (const double x : v) worst = std::max(worst, std::abs(x - c));
        return worst;
    };
    if (a.is_constant() && b.is_constant()) return std::abs(*a.constant - *b.constant);
    if (a.is_constant()) return step_vs_const(b.values, *a.constant);
    if (b.is_constant()) return step_vs_const(a.values, *b.constant);

    const std::vector<double>& coarse = a.values.size() <= b.values.size() ? a.values : b.values;
    const std::vector<double>& fine = a.values.size() <= b.values.size() ? b.values : a.values;
    require(!coarse.empty(), "degree function has no values");
    if (fine.size() % coarse.size() != 0)
        throw std::invalid_argument("degree functions on " + std::to_string(a.values.size()) + " and " +
                                    std::to_string(b.values.size()) + " intervals are not nested");
    const std::size_t ratio = fine.size() / coarse.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) worst = std::max(worst, std::abs(fine[i] - coarse[i / ratio]));
    return worst;
}

double degree_gap_bound(std::size_t n, double nu) {
    require(n >= 1 && nu > 0.0 && nu < 1.0, "degree bound needs n >= 1 and nu in (0,1)");
    const double dn = static_cast<double>(n);
    return std::sqrt(std::log(2.0 * dn / nu) / dn);
}

}  // namespace gk
