#pragma once

#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmv/common.hpp"

namespace cmv {

/// Shortest 17-significant-digit decimal; bit-faithful on round trip.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Structured discrepancy record for one verified identity: a per-point
/// table plus sup/L1 summaries over converged points.  The *_interior
/// variants exclude each grid run's outermost points (band-edge ring).
struct CheckReport {
  std::string identity;
  std::string grid;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  double sup_discrepancy = 0.0;
  double l1_discrepancy = 0.0;
  double sup_discrepancy_interior = 0.0;
  double l1_discrepancy_interior = 0.0;
  double mean_signed_discrepancy = 0.0;
  double fraction_converged = 0.0;
  bool vacuous = false;

  std::map<std::string, double> params;
  std::map<std::string, std::string> notes;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["identity"] = identity;
    j["grid"] = grid;
    j["columns"] = columns;
    j["rows"] = rows;
    j["sup_discrepancy"] = sup_discrepancy;
    j["l1_discrepancy"] = l1_discrepancy;
    j["sup_discrepancy_interior"] = sup_discrepancy_interior;
    j["l1_discrepancy_interior"] = l1_discrepancy_interior;
    j["mean_signed_discrepancy"] = mean_signed_discrepancy;
    j["fraction_converged"] = fraction_converged;
    j["vacuous"] = vacuous;
    j["params"] = params;
    j["notes"] = notes;
    return j;
  }

  void write_csv(std::ostream& os) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
      os << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    for (const std::vector<double>& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c)
        os << format_double(row[c]) << (c + 1 < row.size() ? "," : "\n");
    }
  }
};

/// Fill the summary fields from per-point (discrepancy, converged, interior)
/// triples; discrepancies are aggregated over converged points only.
struct DiscrepancyAccumulator {
  double sup = 0.0, l1 = 0.0, sup_int = 0.0, l1_int = 0.0, signed_sum = 0.0;
  int converged = 0, converged_int = 0, total = 0;

  void add(double lhs, double rhs, bool is_converged, bool is_interior) {
    ++total;
    if (!is_converged) return;
    const double d = lhs - rhs;
    ++converged;
    signed_sum += d;
    sup = std::max(sup, std::abs(d));
    l1 += std::abs(d);
    if (is_interior) {
      ++converged_int;
      sup_int = std::max(sup_int, std::abs(d));
      l1_int += std::abs(d);
    }
  }

  void commit(CheckReport& r) const {
    r.sup_discrepancy = sup;
    r.l1_discrepancy = converged > 0 ? l1 / converged : 0.0;
    r.sup_discrepancy_interior = sup_int;
    r.l1_discrepancy_interior = converged_int > 0 ? l1_int / converged_int : 0.0;
    r.mean_signed_discrepancy = converged > 0 ? signed_sum / converged : 0.0;
    r.fraction_converged = total > 0 ? static_cast<double>(converged) / total : 0.0;
  }
};

}  // namespace cmv
