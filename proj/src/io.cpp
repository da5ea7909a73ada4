#include "ilw/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ilw {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return {buf.data(), end};
}

void write_atomic(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string csv_text(std::span<const std::string> header,
                     const std::vector<std::vector<std::string>>& rows) {
  std::string text;
  auto line = [&text](std::span<const std::string> cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) text += ',';
      text += cells[i];
    }
    text += '\n';
  };
  line(header);
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw InvalidArgument("csv row width does not match header");
    line(row);
  }
  return text;
}

namespace {

std::string nodal_table(const Transform& transform, const StatePair& state, const double* t) {
  const SpectralGrid& grid = transform.grid();
  const NodalValues zeta = transform.to_nodal(state.zeta);
  const NodalValues u = transform.to_nodal(state.u);
  std::string text = t ? "t,x,zeta,u\n" : "x,zeta,u\n";
  const std::string ts = t ? format_double(*t) + "," : "";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    text += ts;
    text += format_double(grid.node(j));
    text += ',';
    text += format_double(zeta[j]);
    text += ',';
    text += format_double(u[j]);
    text += '\n';
  }
  return text;
}

}  // namespace

std::string snapshot_csv(const Transform& transform, double t, const StatePair& state) {
  return nodal_table(transform, state, &t);
}

std::string wave_csv(const Transform& transform, const StatePair& wave) {
  return nodal_table(transform, wave, nullptr);
}

std::string trace_csv(const IterationTrace& trace) {
  std::string text = "iter,residual,m_factor,phase\n";
  for (const auto& e : trace.entries) {
    text += std::to_string(e.iteration);
    text += ',';
    text += format_double(e.residual);
    text += ',';
    text += format_double(e.m_factor);
    text += ',';
    text += to_string(e.phase);
    text += '\n';
  }
  return text;
}

NodalWave read_wave_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument(path.string() + " is empty");

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  auto column = [&](std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw InvalidArgument(path.string() + " has no column '" + std::string(name) + "'");
  };
  const std::size_t cx = column("x");
  const std::size_t cz = column("zeta");
  const std::size_t cu = column("u");

  NodalWave wave;
  std::vector<double> cells;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    cells.clear();
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p <= end) {
      const char* comma = std::find(p, end, ',');
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(p, comma, v);
      if (ec != std::errc{} || ptr != comma) {
        throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": bad number");
      }
      cells.push_back(v);
      p = comma + 1;
    }
    if (cells.size() != header.size()) {
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": wrong column count");
    }
    wave.x.push_back(cells[cx]);
    wave.zeta.push_back(cells[cz]);
    wave.u.push_back(cells[cu]);
  }
  return wave;
}

}  // namespace ilw
