#pragma once

// StepGraphon files.
//
// CSV: first line "n,<n>", then n rows of n comma-separated weights.
// Binary (little-endian): "GKSG", u16 version (=1), u32 n, n*n f64 row-major.

#include <filesystem>
#include <iosfwd>

#include "gk/graphon.hpp"

namespace gk {

inline constexpr std::uint16_t kStepGraphonBinaryVersion = 1;

void write_step_graphon_csv(std::ostream& os, const StepGraphon& s);
StepGraphon read_step_graphon_csv(std::istream& is);

void write_step_graphon_binary(std::ostream& os, const StepGraphon& s);
StepGraphon read_step_graphon_binary(std::istream& is);

/// Picks the format from the extension (.csv or .gksg/.bin).
void save_step_graphon(const std::filesystem::path& path, const StepGraphon& s);
StepGraphon load_step_graphon(const std::filesystem::path& path);

}  // namespace gk
