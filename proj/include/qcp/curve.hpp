#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace qcp {

struct CurveRow {
  double c = 0.0;
  double p_global = 0.0;
  double p_online = 0.0;
  double p_fl = 0.0;
  double p_sl = 0.0;
};

struct CurveTable {
  std::size_t n = 0;
  bool asymptotic = false;
  std::vector<CurveRow> rows;

  /// p_online <= p_global + 1e-12 on every row and c strictly increasing.
  bool invariants_hold() const;
};

struct CurveGrid {
  double c_min = 0.0;
  double c_max = 0.99;
  double step = 0.01;
  bool include_endpoint = false;
};

/// Grid values c_min + i*step rounded to 12 significant digits. c = 1 is
/// dropped unless include_endpoint is set. Throws DomainError on a bad grid.
std::vector<double> grid_points(const CurveGrid& grid);

/// One row: finite-n success probabilities, or their n -> infinity limits.
CurveRow curve_row(std::size_t n, double c, bool asymptotic);

CurveTable compute_curve(std::size_t n, const CurveGrid& grid, bool asymptotic);

/// "%.12g" rendering used in every CSV cell.
std::string format_number(double v);

inline constexpr std::string_view kCurveCsvHeader = "c,p_global,p_online,p_fl,p_sl";

std::string to_csv(const CurveTable& t);
/// Parses rows written by to_csv; throws DomainError on a malformed line.
std::vector<CurveRow> parse_csv(std::string_view text);

nlohmann::json to_json(const CurveTable& t);

}  // namespace qcp
