#include "gk/graphon_io.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gk {

namespace {

static_assert(std::endian::native == std::endian::little, "binary graphon I/O assumes a little-endian host");

template <class T>
void put(std::ostream& os, T value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T value{};
    if (!is.read(reinterpret_cast<char*>(&value), sizeof(T))) throw std::runtime_error("truncated step graphon file");
    return value;
}

std::string format_weight(double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

}  // namespace

void write_step_graphon_csv(std::ostream& os, const StepGraphon& s) {
    const std::size_t n = s.size();
    os << "n," << n << '\n';
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            if (k) os << ',';
            os << format_weight(s(j, k));
        }
        os << '\n';
    }
}

StepGraphon read_step_graphon_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("n,", 0) != 0) throw std::runtime_error("step graphon CSV must start with 'n,<n>'");
    const std::size_t n = std::stoul(line.substr(2));
    std::vector<double> weights;
    weights.reserve(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::getline(is, line)) throw std::runtime_error("step graphon CSV has fewer than n rows");
        std::stringstream row(line);
        std::string cell;
        std::size_t count = 0;
        while (std::getline(row, cell, ',')) {
            weights.push_back(std::stod(cell));
            ++count;
        }
        if (count != n) throw std::runtime_error("step graphon CSV row " + std::to_string(j + 2) + " has " +
                                                 std::to_string(count) + " entries, expected " + std::to_string(n));
    }
    return StepGraphon(n, std::move(weights));
}

void write_step_graphon_binary(std::ostream& os, const StepGraphon& s) {
    os.write("GKSG", 4);
    put<std::uint16_t>(os, kStepGraphonBinaryVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    const auto w = s.weights();
    os.write(reinterpret_cast<const char*>(w.data()), static_cast<std::streamsize>(w.size() * sizeof(double)));
}

StepGraphon read_step_graphon_binary(std::istream& is) {
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), 4) || std::memcmp(magic.data(), "GKSG", 4) != 0)
        throw std::runtime_error("not a step graphon file (bad magic)");
    const auto version = get<std::uint16_t>(is);
    if (version != kStepGraphonBinaryVersion)
        throw std::runtime_error("unsupported step graphon version " + std::to_string(version));
    const std::size_t n = get<std::uint32_t>(is);
    std::vector<double> weights(n * n);
    if (!is.read(reinterpret_cast<char*>(weights.data()), static_cast<std::streamsize>(weights.size() * sizeof(double))))
        throw std::runtime_error("truncated step graphon file");
    return StepGraphon(n, std::move(weights));
}

void save_step_graphon(const std::filesystem::path& path, const StepGraphon& s) {
    const bool csv = path.extension() == ".csv";
    std::ofstream os(path, csv ? std::ios::out : std::ios::out | std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    if (csv)
        write_step_graphon_csv(os, s);
    else
        write_step_graphon_binary(os, s);
    if (!os) throw std::runtime_error("failed writing " + path.string());
}

StepGraphon load_step_graphon(const std::filesystem::path& path) {
    const bool csv = path.extension() == ".csv";
    std::ifstream is(path, csv ? std::ios::in : std::ios::in | std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    return csv ? read_step_graphon_csv(is) : read_step_graphon_binary(is);
}

}  // namespace gk
