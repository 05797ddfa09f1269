#pragma once

// CSV artifacts consumed by the plotting scripts, their column schemas and
// atomic file output.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gk/branch.hpp"
#include "gk/finite_system.hpp"
#include "gk/kcrit.hpp"

namespace gk::io {

struct CsvSchema {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::string> text_columns;  // all others must parse as numbers

    bool is_text(std::string_view column) const;
};

namespace schema {
const CsvSchema& sync_state();      // j, x_j, omega_j, u_j
const CsvSchema& branch();          // idx, K, r, smallest_eig, stable, fold_flag
const CsvSchema& sweep_rows();      // n, seed, K_crit_n, method, rel_err
const CsvSchema& sweep_aggregate(); // n, mean, std, count
const CsvSchema& folds();           // idx, K, quadratic_K, eig, eig_crossing, suspect
const CsvSchema& convergence();     // n, seed, degree/cut-norm/frequency distances and bounds
const CsvSchema& profile_compare(); // j, x_j, u_j, u_continuum
const CsvSchema& meanfield_curve(); // K, q, kappa, r, stable
/// Lookup by name; throws std::invalid_argument for unknown names.
const CsvSchema& by_name(std::string_view name);
}  // namespace schema

/// Shortest text that round-trips the double ("nan", "inf" for non-finite).
std::string fmt(double v);

class CsvTable {
public:
    explicit CsvTable(const CsvSchema& schema);

    /// Throws std::invalid_argument when the field count is wrong.
    void add_row(std::vector<std::string> fields);
    /// Comment line emitted before the header ("# " is prepended).
    void set_preamble(std::string line) { preamble_ = std::move(line); }

    const CsvSchema& schema() const noexcept { return *schema_; }
    std::size_t rows() const noexcept { return rows_.size(); }
    std::string str() const;

private:
    const CsvSchema* schema_;
    std::string preamble_;
    std::vector<std::vector<std::string>> rows_;
};

/// Header must match the schema exactly and every data row must have the
/// right number of fields, numeric where the schema says so. Lines starting
/// with '#' are skipped. Throws std::runtime_error naming line and column.
void validate_csv(std::string_view text, const CsvSchema& schema);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

/// `# {json}` preamble with K, omega_star, residual, r, stable, leading_eigs.
CsvTable sync_state_table(const SyncState& st, const std::vector<double>& x, const std::vector<double>& omega);
CsvTable branch_table(const Branch& br);
CsvTable fold_table(const Branch& br);
CsvTable sweep_rows_table(const SweepResult& res);
CsvTable sweep_aggregate_table(const SweepResult& res);

}  // namespace gk::io
