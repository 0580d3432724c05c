#pragma once

// Worst-case rate maps over the (m1, m2) eigenvalue plane, with CSV output.
// Cells with an eigenvalue inside the exclusion band around 1 have no
// invertible system and carry NaN for the restarted rate.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "convergence.hpp"

namespace raa {

struct SweepConfig {
  double lo = -1.0;
  double hi = 1.0;
  std::size_t resolution = 401;
  double exclusion_band = 1e-8;  // around the singular eigenvalue 1
};

struct SweepCell {
  double m1 = 0.0;
  double m2 = 0.0;
  double rho_aa = 0.0;   // NaN on invalid cells
  double rho_pi = 0.0;
  double ratio = 0.0;    // rho_aa / rho_pi; NaN when invalid or rho_pi is 0
  bool masked = false;   // valid cell whose restarted rate exceeds 1
  bool valid = false;
};

struct SweepResult {
  std::vector<double> axis;      // shared by both directions
  std::vector<SweepCell> cells;  // row-major: cells[i * axis.size() + j]
};

// Uniform grid with exact endpoints. A symmetric range (lo == -hi) is built
// antisymmetrically: axis[i] == -axis[res-1-i] bitwise, with an exact zero
// in the middle for odd resolutions.
inline std::vector<double> linspace(double lo, double hi, std::size_t res) {
  if (res < 2 || !(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("linspace: need finite lo < hi and resolution >= 2");
  std::vector<double> axis(res);
  const double den = static_cast<double>(res - 1);
  if (lo == -hi) {
    for (std::size_t i = 0; i < res; ++i)
      axis[i] = hi * ((2.0 * static_cast<double>(i) - den) / den);
  } else {
    for (std::size_t i = 0; i < res; ++i)
      axis[i] = lo + (hi - lo) * (static_cast<double>(i) / den);
    axis[res - 1] = hi;
  }
  return axis;
}

inline SweepResult run_sweep(const SweepConfig& cfg) {
  if (!(cfg.exclusion_band > 1e-12))
    throw std::invalid_argument("run_sweep: exclusion band too small");
  SweepResult out;
  out.axis = linspace(cfg.lo, cfg.hi, cfg.resolution);
  out.cells.resize(cfg.resolution * cfg.resolution);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t i = 0; i < cfg.resolution; ++i) {
    for (std::size_t j = 0; j < cfg.resolution; ++j) {
      SweepCell& cell = out.cells[i * cfg.resolution + j];
      cell.m1 = out.axis[i];
      cell.m2 = out.axis[j];
      cell.valid = std::abs(cell.m1 - 1.0) > cfg.exclusion_band &&
                   std::abs(cell.m2 - 1.0) > cfg.exclusion_band;
      cell.rho_pi = std::max(std::abs(cell.m1), std::abs(cell.m2));
      if (!cell.valid) {
        cell.rho_aa = nan;
        cell.ratio = nan;
        continue;
      }
      cell.rho_aa = rho_aa_worst(cell.m1, cell.m2);
      cell.ratio = cell.rho_pi == 0.0 ? nan : cell.rho_aa / cell.rho_pi;
      cell.masked = cell.rho_aa > 1.0;
    }
  }
  return out;
}

namespace detail {

inline double parse_double(const std::string& field, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0')
    throw std::runtime_error("sweep csv: bad number '" + field + "' " + where);
  return v;
}

inline bool parse_bool(const std::string& field, const std::string& where) {
  if (field == "true") return true;
  if (field == "false") return false;
  throw std::runtime_error("sweep csv: bad flag '" + field + "' " + where);
}

}  // namespace detail

inline const char* sweep_csv_header() { return "m1,m2,rho_aa,rho_pi,ratio,masked,valid"; }

inline void emit_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("sweep csv: cannot open '" + path + "' for writing");
  out << sweep_csv_header() << '\n';
  for (const SweepCell& c : result.cells) {
    out << detail::format_double(c.m1) << ',' << detail::format_double(c.m2) << ','
        << detail::format_double(c.rho_aa) << ',' << detail::format_double(c.rho_pi)
        << ',' << detail::format_double(c.ratio) << ',' << (c.masked ? "true" : "false")
        << ',' << (c.valid ? "true" : "false") << '\n';
  }
  if (!out.flush()) throw std::runtime_error("sweep csv: write to '" + path + "' failed");
}

inline SweepResult read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("sweep csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != sweep_csv_header())
    throw std::runtime_error("sweep csv: bad header in '" + path + "'");

  SweepResult out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::string where = "at " + path + ":" + std::to_string(row);
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 7)
      throw std::runtime_error("sweep csv: expected 7 fields " + where);
    SweepCell cell;
    cell.m1 = detail::parse_double(fields[0], where);
    cell.m2 = detail::parse_double(fields[1], where);
    cell.rho_aa = detail::parse_double(fields[2], where);
    cell.rho_pi = detail::parse_double(fields[3], where);
    cell.ratio = detail::parse_double(fields[4], where);
    cell.masked = detail::parse_bool(fields[5], where);
    cell.valid = detail::parse_bool(fields[6], where);
    out.cells.push_back(cell);
  }

  // Rebuild the axis from the row-major layout: the first block shares m1
  // and enumerates m2 over the full axis.
  std::size_t res = 0;
  while (res < out.cells.size() && out.cells[res].m1 == out.cells[0].m1) ++res;
  if (res == 0 || out.cells.size() != res * res)
    throw std::runtime_error("sweep csv: grid in '" + path + "' is not square");
  out.axis.resize(res);
  for (std::size_t j = 0; j < res; ++j) out.axis[j] = out.cells[j].m2;
  for (std::size_t i = 0; i < res; ++i)
    for (std::size_t j = 0; j < res; ++j) {
      const SweepCell& c = out.cells[i * res + j];
      if (c.m1 != out.axis[i] || c.m2 != out.axis[j])
        throw std::runtime_error("sweep csv: inconsistent grid in '" + path + "'");
    }
  return out;
}

}  // namespace raa
