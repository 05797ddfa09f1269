#include "gk/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace gk::io {

bool CsvSchema::is_text(std::string_view column) const {
    return std::find(text_columns.begin(), text_columns.end(), column) != text_columns.end();
}

namespace schema {

const CsvSchema& sync_state() {
    static const CsvSchema s{"sync_state", {"j", "x_j", "omega_j", "u_j"}, {}};
    return s;
}
const CsvSchema& branch() {
    static const CsvSchema s{"branch", {"idx", "K", "r", "smallest_eig", "stable", "fold_flag"}, {}};
    return s;
}
const CsvSchema& sweep_rows() {
    static const CsvSchema s{"sweep_rows", {"n", "seed", "K_crit_n", "method", "rel_err"}, {"method"}};
    return s;
}
const CsvSchema& sweep_aggregate() {
    static const CsvSchema s{"sweep_aggregate", {"n", "mean", "std", "count"}, {}};
    return s;
}
const CsvSchema& folds() {
    static const CsvSchema s{"folds", {"idx", "K", "quadratic_K", "eig", "eig_crossing", "suspect"}, {}};
    return s;
}
const CsvSchema& convergence() {
    static const CsvSchema s{"convergence",
                             {"n", "seed", "degree_distance", "degree_bound", "cut_norm", "cut_bound",
                              "freq_sup_distance", "degree_ok", "cut_ok"},
                             {}};
    return s;
}
const CsvSchema& profile_compare() {
    static const CsvSchema s{"profile_compare", {"j", "x_j", "u_j", "u_continuum"}, {}};
    return s;
}

const CsvSchema& meanfield_curve() {
    static const CsvSchema s{"meanfield_curve", {"K", "q", "kappa", "r", "stable"}, {}};
    return s;
}

const CsvSchema& by_name(std::string_view name) {
    for (const CsvSchema* s : {&sync_state(), &branch(), &sweep_rows(), &sweep_aggregate(), &folds(),
                               &convergence(), &profile_compare(), &meanfield_curve()})
        if (s->name == name) return *s;
    throw std::invalid_argument("unknown CSV schema '" + std::string(name) + "'");
}

}  // namespace schema

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(const CsvSchema& schema) : schema_(&schema) {}

void CsvTable::add_row(std::vector<std::string> fields) {
    if (fields.size() != schema_->columns.size())
        throw std::invalid_argument(schema_->name + ": row has " + std::to_string(fields.size()) + " fields, expected " +
                                    std::to_string(schema_->columns.size()));
    rows_.push_back(std::move(fields));
}

std::string CsvTable::str() const {
    std::string out;
    if (!preamble_.empty()) out += "# " + preamble_ + "\n";
    for (std::size_t i = 0; i < schema_->columns.size(); ++i) {
        if (i) out += ',';
        out += schema_->columns[i];
    }
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool is_number(std::string_view field) {
    if (field == "nan" || field == "inf" || field == "-inf") return true;
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    return res.ec == std::errc{} && res.ptr == field.data() + field.size();
}

}  // namespace

void validate_csv(std::string_view text, const CsvSchema& schema) {
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split(line);
        const std::string where = schema.name + " line " + std::to_string(line_no) + ": ";
        if (!header_seen) {
            if (fields.size() != schema.columns.size())
                throw std::runtime_error(where + "header has " + std::to_string(fields.size()) + " columns, expected " +
                                         std::to_string(schema.columns.size()));
            for (std::size_t i = 0; i < fields.size(); ++i)
                if (fields[i] != schema.columns[i])
                    throw std::runtime_error(where + "column " + std::to_string(i + 1) + " is '" +
                                             std::string(fields[i]) + "', expected '" + schema.columns[i] + "'");
            header_seen = true;
            continue;
        }
        if (fields.size() != schema.columns.size())
            throw std::runtime_error(where + std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(schema.columns.size()));
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (schema.is_text(schema.columns[i])) {
                if (fields[i].empty()) throw std::runtime_error(where + "column '" + schema.columns[i] + "' is empty");
            } else if (!is_number(fields[i])) {
                throw std::runtime_error(where + "column '" + schema.columns[i] + "' is not numeric: '" +
                                         std::string(fields[i]) + "'");
            }
        }
    }
    if (!header_seen) throw std::runtime_error(schema.name + ": missing header");
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        os.flush();
        if (!os) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

CsvTable sync_state_table(const SyncState& st, const std::vector<double>& x, const std::vector<double>& omega) {
    if (x.size() != st.u.size() || omega.size() != st.u.size())
        throw std::invalid_argument("sync_state_table: size mismatch");
    nlohmann::ordered_json meta;
    meta["K"] = st.K;
    meta["omega_star"] = st.omega_star;
    meta["residual"] = st.residual_norm;
    meta["r"] = st.r;
    meta["stable"] = st.stable();
    meta["stability"] = std::string(to_string(st.stability));
    meta["leading_eigs"] = st.leading_eigs;
    CsvTable t(schema::sync_state());
    t.set_preamble(meta.dump());
    for (std::size_t j = 0; j < st.u.size(); ++j) t.add_row({std::to_string(j), fmt(x[j]), fmt(omega[j]), fmt(st.u[j])});
    return t;
}

CsvTable branch_table(const Branch& br) {
    CsvTable t(schema::branch());
    std::vector<char> flag(br.points.size(), 0);
    for (const auto& f : br.folds)
        if (f.index < flag.size()) flag[f.index] = 1;
    for (std::size_t i = 0; i < br.points.size(); ++i) {
        const BranchPoint& p = br.points[i];
        t.add_row({std::to_string(i), fmt(p.K), fmt(p.r), fmt(p.smallest_eig),
                   p.stability == Stability::Stable ? "1" : "0", flag[i] ? "1" : "0"});
    }
    return t;
}

CsvTable fold_table(const Branch& br) {
    CsvTable t(schema::folds());
    for (const auto& f : br.folds)
        t.add_row({std::to_string(f.index), fmt(f.K), fmt(f.quadratic_K), fmt(f.eig), f.eig_crossing ? "1" : "0",
                   f.suspect ? "1" : "0"});
    return t;
}

CsvTable sweep_rows_table(const SweepResult& res) {
    CsvTable t(schema::sweep_rows());
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        if (!res.ok[i]) continue;
        const auto& r = res.rows[i];
        t.add_row({std::to_string(r.n), std::to_string(r.seed), fmt(r.K_crit_n), std::string(to_string(r.method)),
                   fmt(r.relative_error)});
    }
    return t;
}

CsvTable sweep_aggregate_table(const SweepResult& res) {
    CsvTable t(schema::sweep_aggregate());
    for (const auto& a : res.aggregate) t.add_row({std::to_string(a.n), fmt(a.mean), fmt(a.std), std::to_string(a.count)});
    return t;
}

}  // namespace gk::io
