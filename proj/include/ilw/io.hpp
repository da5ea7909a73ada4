#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ilw/harness.hpp"
#include "ilw/solitary.hpp"

namespace ilw {

inline constexpr std::string_view kVersion = "0.3.1";

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Writes text to path.tmp and renames it over path.
void write_atomic(const std::filesystem::path& path, std::string_view text);

/// Header line, then one line per row; every row must match the header width.
std::string csv_text(std::span<const std::string> header,
                     const std::vector<std::vector<std::string>>& rows);

/// Columns t, x, zeta, u for one snapshot.
std::string snapshot_csv(const Transform& transform, double t, const StatePair& state);
/// Columns x, zeta, u.
std::string wave_csv(const Transform& transform, const StatePair& wave);
/// Columns iter, residual, m_factor, phase.
std::string trace_csv(const IterationTrace& trace);

struct NodalWave {
  std::vector<double> x;
  std::vector<double> zeta;
  std::vector<double> u;
};

/// Reads a CSV with columns x, zeta, u (extra columns, such as t, ignored).
NodalWave read_wave_csv(const std::filesystem::path& path);

}  // namespace ilw
