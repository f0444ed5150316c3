#pragma once

// Central-difference Wirtinger derivatives: the numeric fallback and the
// cross-check for the symbolic engine.

#include <algorithm>
#include <cmath>
#include <utility>

#include "shol/errors.hpp"
#include "shol/field.hpp"

namespace shol {

struct WirtingerPair {
  complex d_z;
  complex d_zbar;
};

// First-derivative steps trade O(h^2) truncation against eps/h rounding;
// the second-derivative stencil needs a larger h. Steps scale with |z| so
// accuracy stays uniform out to domain radii ~10.
struct StepPolicy {
  double h1_base = 1e-5;
  double h2_base = 1e-3;

  double h1(complex z) const { return h1_base * std::max(1.0, std::abs(z)); }
  double h2(complex z) const { return h2_base * std::max(1.0, std::abs(z)); }
};

namespace detail {

inline complex probe(const FieldFn& f, complex at) {
  const complex v = f(at);
  if (!finite(v)) throw numerical_error("non-finite probe value", at);
  return v;
}

}  // namespace detail

// d_z = (f_x - i f_y)/2, d_zbar = (f_x + i f_y)/2 with central differences.
inline WirtingerPair d_wirtinger(const FieldFn& f, complex z0,
                                 const StepPolicy& policy = {}) {
  const double h = policy.h1(z0);
  if (!(h > 0.0)) throw invalid_parameter_error("finite-difference step must be positive");
  const complex ih(0.0, h);
  const complex fx = (detail::probe(f, z0 + h) - detail::probe(f, z0 - h)) / (2.0 * h);
  const complex fy = (detail::probe(f, z0 + ih) - detail::probe(f, z0 - ih)) / (2.0 * h);
  const complex i1(0.0, 1.0);
  return {0.5 * (fx - i1 * fy), 0.5 * (fx + i1 * fy)};
}

// d2f/dz dzbar = (f_xx + f_yy)/4 by the five-point stencil.
inline complex d2_mixed(const FieldFn& f, complex z0, const StepPolicy& policy = {}) {
  const double h = policy.h2(z0);
  if (!(h > 0.0)) throw invalid_parameter_error("finite-difference step must be positive");
  const complex ih(0.0, h);
  const complex lap = detail::probe(f, z0 + h) + detail::probe(f, z0 - h) +
                      detail::probe(f, z0 + ih) + detail::probe(f, z0 - ih) -
                      4.0 * detail::probe(f, z0);
  return 0.25 * lap / (h * h);
}

inline std::pair<SampledField, SampledField> d_wirtinger_field(
    const FieldFn& f, const GridDomain& grid, const StepPolicy& policy = {}) {
  SampledField dz(grid);
  SampledField dzbar(grid);
  for (std::size_t k = 0; k < grid.cell_count(); ++k) {
    if (!dz.is_valid(k)) continue;
    const WirtingerPair p = d_wirtinger(f, grid.center(k), policy);
    dz.set(k, p.d_z);
    dzbar.set(k, p.d_zbar);
  }
  return {std::move(dz), std::move(dzbar)};
}

}  // namespace shol
