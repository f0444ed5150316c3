#pragma once

// Byte-stable CSV and JSON emitters for fields and residual reports.
// Key order and float formatting are fixed: identical inputs produce
// identical bytes.

#include <ostream>
#include <sstream>
#include <string>

#include "shol/detail/fmt.hpp"
#include "shol/field.hpp"

namespace shol {

// Header `x,y,re,im,abs`, one row per valid cell, row-major.
inline void write_field_csv(std::ostream& os, const SampledField& f) {
  os << "x,y,re,im,abs\n";
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (!f.is_valid(k)) continue;
    const complex c = f.grid.center(k);
    const complex v = f.values[k];
    os << detail::format_g17(c.real()) << ',' << detail::format_g17(c.imag())
       << ',' << detail::format_g17(v.real()) << ',' << detail::format_g17(v.imag())
       << ',' << detail::format_g17(std::abs(v)) << '\n';
  }
}

inline std::string field_to_csv(const SampledField& f) {
  std::ostringstream os;
  write_field_csv(os, f);
  return os.str();
}

inline void write_grid_json(std::ostream& os, const GridDomain& g) {
  os << "{\"shape\": \"" << (g.shape() == GridShape::disk ? "disk" : "rectangle")
     << "\", \"nx\": " << g.nx() << ", \"ny\": " << g.ny();
  if (g.shape() == GridShape::disk) {
    os << ", \"cx\": " << detail::format_g17(g.disk_center().x)
       << ", \"cy\": " << detail::format_g17(g.disk_center().y)
       << ", \"radius\": " << detail::format_g17(g.disk_radius());
  } else {
    os << ", \"x_min\": " << detail::format_g17(g.x_min())
       << ", \"x_max\": " << detail::format_g17(g.x_max())
       << ", \"y_min\": " << detail::format_g17(g.y_min())
       << ", \"y_max\": " << detail::format_g17(g.y_max());
  }
  os << "}";
}

// Schema: {operator, grid, norms, max, params}; params keep insertion order.
inline void write_report_json(std::ostream& os, const ResidualReport& r) {
  os << "{\n";
  os << "  \"operator\": \"" << detail::json_escape(r.operator_name) << "\",\n";
  os << "  \"grid\": ";
  write_grid_json(os, r.residual.grid);
  os << ",\n";
  os << "  \"norms\": {\"l2\": " << detail::format_g17(r.l2)
     << ", \"linf\": " << detail::format_g17(r.linf);
  if (r.lp) {
    os << ", \"lp\": {\"p\": " << detail::format_g17(r.lp->p)
       << ", \"value\": " << detail::format_g17(r.lp->value) << "}";
  }
  os << "},\n";
  os << "  \"max\": {\"x\": " << detail::format_g17(r.max_location.x)
     << ", \"y\": " << detail::format_g17(r.max_location.y)
     << ", \"abs\": " << detail::format_g17(r.linf) << "},\n";
  os << "  \"params\": {";
  bool first = true;
  for (const auto& p : r.params) {
    if (!first) os << ", ";
    first = false;
    os << "\"" << detail::json_escape(p.key) << "\": ";
    if (p.numeric)
      os << p.value;
    else
      os << "\"" << detail::json_escape(p.value) << "\"";
  }
  os << "}\n}\n";
}

inline std::string report_to_json(const ResidualReport& r) {
  std::ostringstream os;
  write_report_json(os, r);
  return os.str();
}

}  // namespace shol
