#pragma once

// Grid domains, sampled complex fields, discrete Lp norms and residual
// report assembly. Everything downstream (residual sweeps, the dbar
// quadrature, the CLI emitters) works on these types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shol/detail/fmt.hpp"
#include "shol/errors.hpp"

namespace shol {

using FieldFn = std::function<complex(complex)>;
using RealFieldFn = std::function<double(complex)>;

enum class Wrt { z, zbar };

inline bool finite(complex v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

struct ComplexPoint {
  double x = 0.0;
  double y = 0.0;

  complex to_complex() const { return {x, y}; }
  static ComplexPoint from(complex z) { return {z.real(), z.imag()}; }
};

enum class GridShape { rectangle, disk };

// Uniform cell grid over a rectangle, or over the bounding square of a disk
// with a strict-containment mask on cell centers. Centers sit at cell
// midpoints so downstream quadratures never evaluate on cell edges.
class GridDomain {
public:
  static GridDomain rectangle(double x_min, double x_max, double y_min,
                              double y_max, int nx, int ny) {
    if (!(x_min < x_max) || !(y_min < y_max))
      throw invalid_domain_error("rectangle must have positive extent on both axes");
    GridDomain g;
    g.shape_ = GridShape::rectangle;
    g.init_box(x_min, x_max, y_min, y_max, nx, ny);
    g.mask_.assign(g.cell_count(), 1);
    return g;
  }

  static GridDomain disk(ComplexPoint center, double radius, int nx, int ny) {
    if (!(radius > 0.0)) throw invalid_domain_error("disk radius must be positive");
    GridDomain g;
    g.shape_ = GridShape::disk;
    g.center_ = center;
    g.radius_ = radius;
    g.init_box(center.x - radius, center.x + radius, center.y - radius,
               center.y + radius, nx, ny);
    g.mask_.resize(g.cell_count());
    for (std::size_t k = 0; k < g.cell_count(); ++k)
      g.mask_[k] = std::abs(g.center(k) - center.to_complex()) < radius ? 1 : 0;
    return g;
  }

  GridShape shape() const { return shape_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double cell_area() const { return dx_ * dy_; }
  ComplexPoint disk_center() const { return center_; }
  double disk_radius() const { return radius_; }

  std::size_t cell_count() const {
    return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
  }

  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx_) + ix;
  }

  complex center(int ix, int iy) const {
    return {x_min_ + (ix + 0.5) * dx_, y_min_ + (iy + 0.5) * dy_};
  }

  complex center(std::size_t k) const {
    return center(static_cast<int>(k % static_cast<std::size_t>(nx_)),
                  static_cast<int>(k / static_cast<std::size_t>(nx_)));
  }

  bool in_mask(std::size_t k) const { return mask_[k] != 0; }
  bool in_mask(int ix, int iy) const { return mask_[index(ix, iy)] != 0; }

  std::size_t valid_count() const {
    std::size_t n = 0;
    for (auto m : mask_) n += m;
    return n;
  }

  double masked_area() const { return static_cast<double>(valid_count()) * cell_area(); }

  // Geometric containment of the underlying shape (strict for disks,
  // matching the mask convention).
  bool contains(complex z) const {
    if (shape_ == GridShape::disk) return std::abs(z - center_.to_complex()) < radius_;
    return z.real() >= x_min_ && z.real() <= x_max_ && z.imag() >= y_min_ &&
           z.imag() <= y_max_;
  }

  // Index of the cell whose center is nearest to z (clamped to the grid).
  std::size_t nearest_cell(complex z) const {
    auto clamp = [](int v, int hi) { return std::min(std::max(v, 0), hi); };
    int ix = clamp(static_cast<int>(std::floor((z.real() - x_min_) / dx_)), nx_ - 1);
    int iy = clamp(static_cast<int>(std::floor((z.imag() - y_min_) / dy_)), ny_ - 1);
    return index(ix, iy);
  }

private:
  void init_box(double x_min, double x_max, double y_min, double y_max, int nx,
                int ny) {
    if (nx < 2 || ny < 2)
      throw invalid_domain_error("grid needs at least 2 cells per axis");
    x_min_ = x_min;
    x_max_ = x_max;
    y_min_ = y_min;
    y_max_ = y_max;
    nx_ = nx;
    ny_ = ny;
    dx_ = (x_max - x_min) / nx;
    dy_ = (y_max - y_min) / ny;
  }

  GridShape shape_ = GridShape::rectangle;
  double x_min_ = 0, x_max_ = 1, y_min_ = 0, y_max_ = 1;
  double dx_ = 0, dy_ = 0;
  int nx_ = 0, ny_ = 0;
  ComplexPoint center_{};
  double radius_ = 0;
  std::vector<std::uint8_t> mask_;
};

inline GridDomain make_rect_grid(double x_min, double x_max, double y_min,
                                 double y_max, int nx, int ny) {
  return GridDomain::rectangle(x_min, x_max, y_min, y_max, nx, ny);
}

inline GridDomain make_disk_grid(ComplexPoint center, double radius, int nx, int ny) {
  return GridDomain::disk(center, radius, nx, ny);
}

// Row-major cell-center samples. Cells outside the mask (or explicitly
// invalidated by an operation) carry a NaN sentinel and never enter norms.
struct SampledField {
  GridDomain grid;
  std::vector<complex> values;
  std::vector<std::uint8_t> valid;

  explicit SampledField(GridDomain g)
      : grid(std::move(g)),
        values(grid.cell_count(), sentinel()),
        valid(grid.cell_count(), 0) {
    for (std::size_t k = 0; k < grid.cell_count(); ++k)
      valid[k] = grid.in_mask(k) ? 1 : 0;
  }

  static complex sentinel() {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }

  void set(std::size_t k, complex v) { values[k] = v; }

  void invalidate(std::size_t k) {
    values[k] = sentinel();
    valid[k] = 0;
  }

  bool is_valid(std::size_t k) const { return valid[k] != 0; }

  std::size_t valid_count() const {
    std::size_t n = 0;
    for (auto v : valid) n += v;
    return n;
  }
};

inline SampledField sample_field(const FieldFn& f, const GridDomain& grid) {
  SampledField out(grid);
  for (std::size_t k = 0; k < grid.cell_count(); ++k) {
    if (!out.is_valid(k)) continue;
    const complex c = grid.center(k);
    const complex v = f(c);
    if (!finite(v))
      throw numerical_error("field evaluation produced a non-finite value", c);
    out.set(k, v);
  }
  return out;
}

struct FieldNorm {
  double p = 2.0;
  double value = 0.0;
};

// Midpoint-rule L^p norm over the valid cells; p = infinity gives the max
// modulus.
inline double norm_lp(const SampledField& f, double p) {
  if (!(p >= 1.0)) throw invalid_parameter_error("norm order p must be >= 1");
  std::size_t n = 0;
  const bool is_inf = std::isinf(p);
  double acc = 0.0;
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (!f.is_valid(k)) continue;
    const complex v = f.values[k];
    if (!finite(v))
      throw numerical_error("norm over a non-finite sample", f.grid.center(k));
    const double a = std::abs(v);
    if (is_inf)
      acc = std::max(acc, a);
    else
      acc += std::pow(a, p);
    ++n;
  }
  if (n == 0) throw invalid_parameter_error("norm of a field with no valid cells");
  if (is_inf) return acc;
  return std::pow(acc * f.grid.cell_area(), 1.0 / p);
}

struct Param {
  std::string key;
  std::string value;
  bool numeric = false;
};

struct ResidualReport {
  ResidualReport(std::string name, SampledField field)
      : operator_name(std::move(name)), residual(std::move(field)) {}

  std::string operator_name;
  SampledField residual;
  double l2 = 0.0;
  double linf = 0.0;
  std::optional<FieldNorm> lp;
  ComplexPoint max_location{};
  std::size_t cells_evaluated = 0;
  std::size_t cells_skipped = 0;
  std::vector<Param> params;

  void add_param(std::string key, std::string text) {
    params.push_back({std::move(key), std::move(text), false});
  }
  void add_param(std::string key, const char* text) {
    add_param(std::move(key), std::string(text));
  }
  void add_param(std::string key, double v) {
    params.push_back({std::move(key), detail::format_g17(v), true});
  }
  void add_param(std::string key, std::size_t v) {
    params.push_back({std::move(key), std::to_string(v), true});
  }
  void add_param(std::string key, int v) {
    params.push_back({std::move(key), std::to_string(v), true});
  }
};

inline ResidualReport make_report(std::string operator_name, SampledField residual,
                                  std::optional<double> extra_p = std::nullopt) {
  ResidualReport r{std::move(operator_name), std::move(residual)};
  r.l2 = norm_lp(r.residual, 2.0);
  r.linf = norm_lp(r.residual, std::numeric_limits<double>::infinity());
  if (extra_p) r.lp = FieldNorm{*extra_p, norm_lp(r.residual, *extra_p)};
  double best = -1.0;
  for (std::size_t k = 0; k < r.residual.values.size(); ++k) {
    if (!r.residual.is_valid(k)) continue;
    const double a = std::abs(r.residual.values[k]);
    if (a > best) {
      best = a;
      r.max_location = ComplexPoint::from(r.residual.grid.center(k));
    }
  }
  r.cells_evaluated = r.residual.valid_count();
  return r;
}

}  // namespace shol
