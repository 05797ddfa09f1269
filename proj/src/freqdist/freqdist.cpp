#include "gk/freqdist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gk {

namespace {
constexpr double kPi = std::numbers::pi;
}

FrequencyModel FrequencyModel::uniform() { return FrequencyModel(Kind::Uniform); }
FrequencyModel FrequencyModel::arcsine_cosine() { return FrequencyModel(Kind::ArcsineCosine); }
FrequencyModel FrequencyModel::cauchy_like() { return FrequencyModel(Kind::CauchyLike); }

FrequencyModel FrequencyModel::table(std::vector<double> nodes, std::vector<double> values) {
    if (nodes.size() < 2 || nodes.size() != values.size())
        throw std::invalid_argument("density table needs at least two (node, value) pairs");
    if (nodes.front() != -1.0 || nodes.back() != 1.0)
        throw std::invalid_argument("density table must span exactly [-1, 1]");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1])) throw std::invalid_argument("density table nodes must increase");
    for (const double v : values)
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("density values must be finite and >= 0");

    FrequencyModel model(Kind::TableDensity);
    model.nodes_ = std::move(nodes);
    model.values_ = std::move(values);
    model.finish_table();
    return model;
}

void FrequencyModel::finish_table() {
    const std::size_t m = nodes_.size();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) total += 0.5 * (values_[i] + values_[i + 1]) * (nodes_[i + 1] - nodes_[i]);
    if (!(total > 0.0)) throw std::invalid_argument("density table integrates to zero");
    for (double& v : values_) v /= total;

    cumulative_.assign(m, 0.0);
    for (std::size_t i = 0; i + 1 < m; ++i)
        cumulative_[i + 1] = cumulative_[i] + 0.5 * (values_[i] + values_[i + 1]) * (nodes_[i + 1] - nodes_[i]);
    cumulative_.back() = 1.0;

    // Mean by Simpson per segment (exact: w * f(w) is quadratic there).
    double mean = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double a = nodes_[i];
        const double b = nodes_[i + 1];
        const double mid = 0.5 * (a + b);
        const double fmid = 0.5 * (values_[i] + values_[i + 1]);
        mean += (b - a) / 6.0 * (a * values_[i] + 4.0 * mid * fmid + b * values_[i + 1]);
    }
    mean_ = mean;

    symmetric_table_ = true;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t k = m - 1 - i;
        if (std::abs(nodes_[i] + nodes_[k]) > 1e-12 || std::abs(values_[i] - values_[k]) > 1e-12 * (1.0 + values_[i]))
            symmetric_table_ = false;
    }
    if (symmetric_table_) mean_ = 0.0;
}

std::string_view FrequencyModel::name() const noexcept {
    switch (kind_) {
        case Kind::Uniform: return "uniform";
        case Kind::ArcsineCosine: return "arcsine_cosine";
        case Kind::CauchyLike: return "cauchy_like";
        case Kind::TableDensity: return "table";
    }
    return "unknown";
}

double FrequencyModel::density(double w) const {
    if (w < -1.0 || w > 1.0) return 0.0;
    switch (kind_) {
        case Kind::Uniform: return 0.5;
        case Kind::ArcsineCosine: return 1.0 / (kPi * std::sqrt((1.0 - w) * (1.0 + w)));
        case Kind::CauchyLike: return 2.0 / (kPi * (1.0 + w * w));
        case Kind::TableDensity: {
            const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), w);
            const std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - nodes_.begin(), 1) - 1, nodes_.size() - 2);
            const double t = (w - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
            return values_[i] + t * (values_[i + 1] - values_[i]);
        }
    }
    return 0.0;
}

double FrequencyModel::cdf(double w) const {
    if (w <= -1.0) return 0.0;
    if (w >= 1.0) return 1.0;
    switch (kind_) {
        case Kind::Uniform: return 0.5 * (w + 1.0);
        case Kind::ArcsineCosine: return 0.5 + std::asin(w) / kPi;
        case Kind::CauchyLike: return 0.5 + 2.0 * std::atan(w) / kPi;
        case Kind::TableDensity: {
            const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), w);
            const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
            const double h = nodes_[i + 1] - nodes_[i];
            const double t = w - nodes_[i];
            return cumulative_[i] + values_[i] * t + (values_[i + 1] - values_[i]) * t * t / (2.0 * h);
        }
    }
    return 0.0;
}

double FrequencyModel::table_quantile(double x) const {
    if (x <= 0.0) return -1.0;
    if (x >= 1.0) return 1.0;
    // First segment whose right cumulative value reaches x.
    const auto it = std::lower_bound(cumulative_.begin() + 1, cumulative_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    const double h = nodes_[i + 1] - nodes_[i];
    const double f0 = values_[i];
    const double alpha = (values_[i + 1] - values_[i]) / (2.0 * h);
    const double d = x - cumulative_[i];
    // alpha t^2 + f0 t - d = 0, stable root.
    const double disc = std::max(0.0, f0 * f0 + 4.0 * alpha * d);
    const double denom = f0 + std::sqrt(disc);
    const double t = denom > 0.0 ? 2.0 * d / denom : 0.0;
    return std::clamp(nodes_[i] + t, nodes_[i], nodes_[i + 1]);
}

double FrequencyModel::quantile(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("quantile argument must lie in [0,1]");
    switch (kind_) {
        case Kind::Uniform: return 2.0 * x - 1.0;
        case Kind::ArcsineCosine: return -std::cos(kPi * x);
        case Kind::CauchyLike: return std::tan(0.25 * kPi * (2.0 * x - 1.0));
        case Kind::TableDensity: return table_quantile(x);
    }
    return 0.0;
}

FrequencyModel::QuantileSample FrequencyModel::quantile_at(double from_left, double from_right) const {
    const bool left = from_left <= from_right;
    const double edge = left ? from_left : from_right;
    switch (kind_) {
        case Kind::Uniform: {
            const double omega = left ? 2.0 * from_left - 1.0 : 1.0 - 2.0 * from_right;
            return {omega, 4.0 * from_left * from_right};
        }
        case Kind::ArcsineCosine: {
            const double omega = left ? -std::cos(kPi * from_left) : std::cos(kPi * from_right);
            const double s = std::sin(kPi * edge);
            return {omega, s * s};
        }
        case Kind::CauchyLike: {
            const double theta = left ? -0.25 * kPi * (1.0 - 2.0 * from_left) : 0.25 * kPi * (1.0 - 2.0 * from_right);
            const double c = std::cos(theta);
            return {std::tan(theta), std::sin(kPi * edge) / (c * c)};
        }
        case Kind::TableDensity: {
            const double omega = table_quantile(left ? from_left : 1.0 - from_right);
            return {omega, (1.0 - omega) * (1.0 + omega)};
        }
    }
    return {0.0, 1.0};
}

double FrequencyModel::sup_deviation() const {
    return std::max(std::abs(quantile(0.0) - mean_), std::abs(quantile(1.0) - mean_));
}

StepFrequency empirical_step(const FrequencyModel& model, const SamplePoints& pts) {
    std::vector<double> sorted = pts.points;
    std::stable_sort(sorted.begin(), sorted.end());
    StepFrequency step;
    step.values.reserve(sorted.size());
    double sum = 0.0;
    for (const double x : sorted) {
        const double w = model.quantile(x);
        step.values.push_back(w);
        sum += w;
    }
    step.mean = sorted.empty() ? 0.0 : sum / static_cast<double>(sorted.size());
    return step;
}

double sup_distance_to_continuum(const StepFrequency& step, const FrequencyModel& model) {
    const std::size_t n = step.size();
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = model.quantile(static_cast<double>(j) / static_cast<double>(n));
        const double hi = model.quantile(static_cast<double>(j + 1) / static_cast<double>(n));
        worst = std::max({worst, std::abs(step.values[j] - lo), std::abs(step.values[j] - hi)});
    }
    return worst;
}

}  // namespace gk
