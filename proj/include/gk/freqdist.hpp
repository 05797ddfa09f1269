#pragma once

// Natural-frequency distributions on [-1,1] and their quantile functions
// Omega = F^{-1}: [0,1] -> [-1,1].

#include <string>
#include <string_view>
#include <vector>

#include "gk/sample_points.hpp"

namespace gk {

class FrequencyModel {
public:
    enum class Kind { Uniform, ArcsineCosine, CauchyLike, TableDensity };

    /// f = 1/2, Omega(x) = 2x - 1.
    static FrequencyModel uniform();
    /// f = 1/(pi sqrt(1 - w^2)), Omega(x) = -cos(pi x).
    static FrequencyModel arcsine_cosine();
    /// Cauchy truncated to [-1,1]: f = 2/(pi (1 + w^2)), Omega(x) = tan(pi/4 (2x - 1)).
    static FrequencyModel cauchy_like();
    /// Piecewise-linear density through (nodes[i], values[i]); nodes must
    /// start at -1, end at 1 and increase. Normalised on construction.
    static FrequencyModel table(std::vector<double> nodes, std::vector<double> values);

    Kind kind() const noexcept { return kind_; }
    std::string_view name() const noexcept;

    double density(double w) const;
    double cdf(double w) const;
    /// Throws std::domain_error for x outside [0,1].
    double quantile(double x) const;

    /// Omega(x) together with 1 - Omega(x)^2, evaluated from the distances of
    /// x to 0 and 1 so that the edge of the support is resolved exactly.
    struct QuantileSample {
        double omega;
        double one_minus_sq;
    };
    QuantileSample quantile_at(double from_left, double from_right) const;

    /// Integral of Omega over [0,1].
    double mean_frequency() const noexcept { return mean_; }
    /// sup_x |Omega(x) - mean|; Omega is monotone so this is an endpoint value.
    double sup_deviation() const;
    /// Omega(x) + Omega(1-x) = 0 (even density).
    bool odd_about_half() const noexcept { return kind_ != Kind::TableDensity || symmetric_table_; }

    const std::vector<double>& table_nodes() const noexcept { return nodes_; }
    const std::vector<double>& table_values() const noexcept { return values_; }

private:
    explicit FrequencyModel(Kind kind) : kind_(kind) {}
    void finish_table();
    double table_quantile(double x) const;

    Kind kind_;
    double mean_ = 0.0;
    // TableDensity only.
    std::vector<double> nodes_;
    std::vector<double> values_;
    std::vector<double> cumulative_;
    bool symmetric_table_ = false;
};

/// omega_j = Omega(x_(j)) on the sorted sample, plus its mean omega*_n.
struct StepFrequency {
    std::vector<double> values;
    double mean = 0.0;

    std::size_t size() const noexcept { return values.size(); }
};

StepFrequency empirical_step(const FrequencyModel& model, const SamplePoints& pts);

/// max_j sup_{x in I_j} |omega_j - Omega(x)|, with I_j = [(j-1)/n, j/n).
double sup_distance_to_continuum(const StepFrequency& step, const FrequencyModel& model);

}  // namespace gk
