#include "qcp/curve.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "qcp/errors.hpp"
#include "qcp/global_bound.hpp"
#include "qcp/online_opt.hpp"

namespace qcp {

bool CurveTable::invariants_hold() const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].p_online > rows[i].p_global + 1e-12) return false;
    if (i > 0 && !(rows[i].c > rows[i - 1].c)) return false;
  }
  return true;
}

std::string format_number(double v) { return fmt::format("{:.12g}", v); }

std::vector<double> grid_points(const CurveGrid& grid) {
  if (!(grid.step > 0.0)) throw DomainError("grid step must be positive");
  if (!(grid.c_min < grid.c_max)) throw DomainError("grid needs c_min < c_max");
  if (grid.c_min < 0.0 || grid.c_max > 1.0) throw DomainError("grid must stay inside [0, 1]");

  const auto count =
      static_cast<std::size_t>(std::floor((grid.c_max - grid.c_min) / grid.step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double c = std::stod(format_number(grid.c_min + static_cast<double>(i) * grid.step));
    if (c > 1.0 || (c == 1.0 && !grid.include_endpoint)) continue;
    out.push_back(c);
  }
  return out;
}

CurveRow curve_row(std::size_t n, double c_value, bool asymptotic) {
  CurveRow row{c_value, 0.0, 0.0, 0.0, 0.0};
  // Orthogonal states: any schedule, saturated or not, identifies the point.
  if (c_value == 0.0) return {c_value, 1.0, 1.0, 1.0, 1.0};
  // Identical states carry no information.
  if (c_value == 1.0) return row;

  const Overlap c(c_value);
  if (asymptotic) {
    row.p_global = asymptotic_optimal_success(c);
    row.p_fl = fl_success_asymptotic(c, fl_default_strength(c));
    row.p_sl = sl_success_asymptotic(c);
    row.p_online = std::max(row.p_fl, row.p_sl);
  } else {
    row.p_global = optimal_global_success(n, c);
    row.p_online = best_online(n, c).success();
    row.p_fl = fl_solution(n, c).success();
    row.p_sl = sl_solution(n, c).success();
  }
  return row;
}

CurveTable compute_curve(std::size_t n, const CurveGrid& grid, bool asymptotic) {
  if (n < 2) throw DomainError(fmt::format("curve requires n >= 2, got {}", n));
  CurveTable t;
  t.n = n;
  t.asymptotic = asymptotic;
  for (double c : grid_points(grid)) t.rows.push_back(curve_row(n, c, asymptotic));
  return t;
}

std::string to_csv(const CurveTable& t) {
  std::string out(kCurveCsvHeader);
  out += '\n';
  for (const auto& r : t.rows) {
    out += fmt::format("{},{},{},{},{}\n", format_number(r.c), format_number(r.p_global),
                       format_number(r.p_online), format_number(r.p_fl), format_number(r.p_sl));
  }
  return out;
}

std::vector<CurveRow> parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCurveCsvHeader) {
    throw DomainError("curve CSV must start with the header line");
  }
  std::vector<CurveRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(fields, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cell.size() || cell.empty()) {
        throw DomainError(fmt::format("malformed CSV cell '{}'", cell));
      }
      values.push_back(v);
    }
    if (values.size() != 5) throw DomainError(fmt::format("expected 5 columns in '{}'", line));
    rows.push_back({values[0], values[1], values[2], values[3], values[4]});
  }
  return rows;
}

nlohmann::json to_json(const CurveTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"c", r.c},
                    {"p_global", r.p_global},
                    {"p_online", r.p_online},
                    {"p_fl", r.p_fl},
                    {"p_sl", r.p_sl}});
  }
  return {{"n", t.n}, {"asymptotic", t.asymptotic}, {"rows", std::move(rows)}};
}

}  // namespace qcp
