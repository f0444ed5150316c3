#pragma once

// The nonlinear Laplace operator
//   Lap_K w = w_zzbar + K_zbar w_z + K_z w_zbar + psi w,
//   psi     = K_zzbar + K_z K_zbar,
// which factors as D_z applied to D_zbar w; nonlinear Cauchy-Riemann (NCR)
// checks u_y = -v_x + f(u,v), u_x = v_y + g(u,v) with their two derivative
// conventions; and point-evaluated several-variable forms (n <= 2).

#include <cmath>
#include <initializer_list>
#include <utility>
#include <vector>

#include "shol/errors.hpp"
#include "shol/field.hpp"
#include "shol/structure.hpp"
#include "shol/wirtinger.hpp"

namespace shol {

// Zero-order coefficient of the nonlinear Laplace operator. Vanishes for
// constant K.
inline complex psi(const StructuralFunction& S, complex z0,
                   const StepPolicy& policy = {}) {
  const WirtingerPair dk = S.dK(z0, policy);
  return S.K_zzbar(z0, policy) + dk.d_z * dk.d_zbar;
}

// Lap_K at a point. When every structure term is exactly zero this returns
// the quarter five-point Laplacian unchanged.
inline complex nonlinear_laplace(const FieldFn& w, const StructuralFunction& S,
                                 complex z0, const StepPolicy& policy = {}) {
  const complex wzz = d2_mixed(w, z0, policy);
  const WirtingerPair dk = S.dK(z0, policy);
  const complex kzz = S.K_zzbar(z0, policy);
  if (dk.d_z == 0.0 && dk.d_zbar == 0.0 && kzz == 0.0) return wzz;
  const WirtingerPair dw = d_wirtinger(w, z0, policy);
  const complex ps = kzz + dk.d_z * dk.d_zbar;
  return wzz + dk.d_zbar * dw.d_z + dk.d_z * dw.d_zbar + ps * detail::probe(w, z0);
}

namespace detail {

// All stencil probes (step h2, which dominates h1) must stay inside the
// geometric shape; boundary cells that fail this are skipped.
inline bool stencil_inside(const GridDomain& grid, complex c, double h) {
  const complex ih(0.0, h);
  return grid.contains(c + h) && grid.contains(c - h) && grid.contains(c + ih) &&
         grid.contains(c - ih);
}

}  // namespace detail

inline ResidualReport nl_laplace_residual(const FieldFn& w,
                                          const StructuralFunction& S,
                                          const GridDomain& grid,
                                          const StepPolicy& policy = {}) {
  SampledField res(grid);
  std::size_t skipped = 0;
  for (std::size_t k = 0; k < grid.cell_count(); ++k) {
    if (!res.is_valid(k)) continue;
    const complex c = grid.center(k);
    if (!detail::stencil_inside(grid, c, policy.h2(c))) {
      res.invalidate(k);
      ++skipped;
      continue;
    }
    res.set(k, nonlinear_laplace(w, S, c, policy));
  }
  ResidualReport r = make_report("nonlinear-laplace", std::move(res));
  r.cells_skipped = skipped;
  r.add_param("h1", policy.h1_base);
  r.add_param("h2", policy.h2_base);
  r.add_param("derivative_source", S.derivative_source());
  r.add_param("cells_skipped", skipped);
  return r;
}

using RealFn2 = std::function<double(double, double)>;

namespace detail {

inline double uv_step(double u, double v) {
  return 1e-5 * std::max({1.0, std::abs(u), std::abs(v)});
}

inline double probe_uv(const RealFn2& f, double u, double v) {
  const double r = f(u, v);
  if (!std::isfinite(r)) throw numerical_error("non-finite (u,v) probe", {u, v});
  return r;
}

inline double d_u(const RealFn2& f, double u, double v) {
  const double h = uv_step(u, v);
  return (probe_uv(f, u + h, v) - probe_uv(f, u - h, v)) / (2.0 * h);
}

inline double d_v(const RealFn2& f, double u, double v) {
  const double h = uv_step(u, v);
  return (probe_uv(f, u, v + h) - probe_uv(f, u, v - h)) / (2.0 * h);
}

}  // namespace detail

// A pair of real functions of (u, v), with partials probed by central
// differences at step 1e-5 * max(1, |u|, |v|).
struct NcrPair {
  RealFn2 f;
  RealFn2 g;

  double f_u(double u, double v) const { return detail::d_u(f, u, v); }
  double f_v(double u, double v) const { return detail::d_v(f, u, v); }
  double g_u(double u, double v) const { return detail::d_u(g, u, v); }
  double g_v(double u, double v) const { return detail::d_v(g, u, v); }
};

// The kappa-form right-hand sides, coefficients evaluated at z0:
//   f = v (beta_y - alpha_x) - u (beta_x + alpha_y)
//   g = v (beta_x + alpha_y) - u (alpha_x - beta_y)
inline std::pair<double, double> fg_from_structure(const StructuralFunction& S,
                                                   double u, double v, complex z0,
                                                   const StepPolicy& policy = {}) {
  const double p = S.coef_a(z0, policy);  // alpha_x - beta_y
  const double q = S.coef_c(z0, policy);  // alpha_y + beta_x
  return {-p * v - q * u, q * v - p * u};
}

inline NcrPair ncr_pair_from_structure(const StructuralFunction& S, complex z0,
                                       const StepPolicy& policy = {}) {
  const double p = S.coef_a(z0, policy);
  const double q = S.coef_c(z0, policy);
  return {[p, q](double u, double v) { return -p * v - q * u; },
          [p, q](double u, double v) { return q * v - p * u; }};
}

// Residuals of the NCR system with (u, v) composed pointwise:
//   r1 = u_y + v_x - f(u,v),  r2 = u_x - v_y - g(u,v).
inline std::pair<ResidualReport, ResidualReport> ncr_residual(
    const RealFieldFn& u, const RealFieldFn& v, const NcrPair& pair,
    const GridDomain& grid, const StepPolicy& policy = {}) {
  SampledField r1(grid), r2(grid);
  for (std::size_t k = 0; k < grid.cell_count(); ++k) {
    if (!r1.is_valid(k)) continue;
    const complex c = grid.center(k);
    const double h = policy.h1(c);
    const auto du = detail::real_partials(u, c, h);
    const auto dv = detail::real_partials(v, c, h);
    const double u0 = detail::real_probe(u, c);
    const double v0 = detail::real_probe(v, c);
    r1.set(k, complex(du.fy + dv.fx - detail::probe_uv(pair.f, u0, v0), 0.0));
    r2.set(k, complex(du.fx - dv.fy - detail::probe_uv(pair.g, u0, v0), 0.0));
  }
  ResidualReport rep1 = make_report("ncr-1", std::move(r1));
  ResidualReport rep2 = make_report("ncr-2", std::move(r2));
  for (ResidualReport* rep : {&rep1, &rep2}) rep->add_param("h1", policy.h1_base);
  return {std::move(rep1), std::move(rep2)};
}

// The two bookkeeping conventions for the (f, g) derivative identities.
enum class FgConvention { eq3, post_a1 };

// Residuals of the selected convention over a rectangle in (u, v)-space:
//   eq3:     r1 = f_u - g_v,  r2 = f_v + g_u
//   post_a1: r1 = f_v - g_u,  r2 = f_u + g_v
inline std::pair<ResidualReport, ResidualReport> fg_cr_check(
    const NcrPair& pair, const GridDomain& uv_box, FgConvention convention) {
  if (uv_box.shape() != GridShape::rectangle)
    throw invalid_parameter_error("(u,v) probe box must be a rectangle");
  SampledField r1(uv_box), r2(uv_box);
  for (std::size_t k = 0; k < uv_box.cell_count(); ++k) {
    const complex c = uv_box.center(k);
    const double u = c.real(), v = c.imag();
    const double fu = pair.f_u(u, v);
    const double fv = pair.f_v(u, v);
    const double gu = pair.g_u(u, v);
    const double gv = pair.g_v(u, v);
    if (convention == FgConvention::eq3) {
      r1.set(k, complex(fu - gv, 0.0));
      r2.set(k, complex(fv + gu, 0.0));
    } else {
      r1.set(k, complex(fv - gu, 0.0));
      r2.set(k, complex(fu + gv, 0.0));
    }
  }
  const char* tag = convention == FgConvention::eq3 ? "eq3" : "post-a1";
  ResidualReport rep1 = make_report(std::string("fg-cr-") + tag + "-1", std::move(r1));
  ResidualReport rep2 = make_report(std::string("fg-cr-") + tag + "-2", std::move(r2));
  for (ResidualReport* rep : {&rep1, &rep2}) rep->add_param("convention", tag);
  return {std::move(rep1), std::move(rep2)};
}

// Checks Lap u = (1/2) d/du (f^2 + g^2) and the v analogue, with the
// Laplacian from the five-point stencil and the (u,v)-derivatives by central
// differences on the composed field.
inline std::pair<ResidualReport, ResidualReport> laplace_rhs_check(
    const RealFieldFn& u, const RealFieldFn& v, const NcrPair& pair,
    const GridDomain& grid, const StepPolicy& policy = {}) {
  SampledField r1(grid), r2(grid);
  std::size_t skipped = 0;
  auto F = [&pair](double uu, double vv) {
    const double fv = detail::probe_uv(pair.f, uu, vv);
    const double gv = detail::probe_uv(pair.g, uu, vv);
    return fv * fv + gv * gv;
  };
  auto laplacian = [](const RealFieldFn& f, complex c, double h) {
    const complex ih(0.0, h);
    return (detail::real_probe(f, c + h) + detail::real_probe(f, c - h) +
            detail::real_probe(f, c + ih) + detail::real_probe(f, c - ih) -
            4.0 * detail::real_probe(f, c)) /
           (h * h);
  };
  for (std::size_t k = 0; k < grid.cell_count(); ++k) {
    if (!r1.is_valid(k)) continue;
    const complex c = grid.center(k);
    const double h = policy.h2(c);
    if (!detail::stencil_inside(grid, c, h)) {
      r1.invalidate(k);
      r2.invalidate(k);
      ++skipped;
      continue;
    }
    const double u0 = detail::real_probe(u, c);
    const double v0 = detail::real_probe(v, c);
    const double du = detail::uv_step(u0, v0);
    const double Fu = (F(u0 + du, v0) - F(u0 - du, v0)) / (2.0 * du);
    const double Fv = (F(u0, v0 + du) - F(u0, v0 - du)) / (2.0 * du);
    r1.set(k, complex(laplacian(u, c, h) - 0.5 * Fu, 0.0));
    r2.set(k, complex(laplacian(v, c, h) - 0.5 * Fv, 0.0));
  }
  ResidualReport rep1 = make_report("laplace-rhs-u", std::move(r1));
  ResidualReport rep2 = make_report("laplace-rhs-v", std::move(r2));
  for (ResidualReport* rep : {&rep1, &rep2}) {
    rep->cells_skipped = skipped;
    rep->add_param("h2", policy.h2_base);
    rep->add_param("cells_skipped", skipped);
  }
  return {std::move(rep1), std::move(rep2)};
}

// ---------------------------------------------------------------------------
// Several complex variables, point evaluation, n <= 2.

struct MultiPoint {
  std::vector<complex> coords;

  MultiPoint(std::initializer_list<complex> init) : coords(init) {}
  explicit MultiPoint(std::vector<complex> c) : coords(std::move(c)) {}

  std::size_t size() const { return coords.size(); }
};

using MultiFieldFn = std::function<complex(const MultiPoint&)>;

// K for the several-variable operators; derivatives are always numeric.
struct StructuralFunctionNd {
  MultiFieldFn K;
};

namespace detail {

inline void validate_nd(const MultiPoint& p, std::size_t i) {
  if (p.size() < 1 || p.size() > 2)
    throw invalid_parameter_error("multi-point must have 1 or 2 coordinates");
  for (complex c : p.coords)
    if (!finite(c)) throw invalid_parameter_error("multi-point coordinate not finite");
  if (i >= p.size()) throw invalid_parameter_error("coordinate index out of range");
}

inline FieldFn freeze_coord(const MultiFieldFn& f, const MultiPoint& p,
                            std::size_t i) {
  return [f, p, i](complex zi) {
    MultiPoint q = p;
    q.coords[i] = zi;
    return f(q);
  };
}

inline complex probe_nd(const MultiFieldFn& f, const MultiPoint& p) {
  const complex v = f(p);
  if (!finite(v)) throw numerical_error("non-finite probe value", p.coords[0]);
  return v;
}

// d^2 f / dz^i dzbar^j: the one-coordinate mixed stencil when i == j,
// otherwise a central D_z^i difference of the inner dzbar^j derivative.
inline complex mixed_second_nd(const MultiFieldFn& f, const MultiPoint& p,
                               std::size_t i, std::size_t j,
                               const StepPolicy& policy) {
  if (i == j) return d2_mixed(freeze_coord(f, p, i), p.coords[i], policy);
  auto inner = [&f, &p, i, j, &policy](complex zi) {
    MultiPoint q = p;
    q.coords[i] = zi;
    return d_wirtinger(freeze_coord(f, q, j), q.coords[j], policy).d_zbar;
  };
  const complex zi = p.coords[i];
  const double h = policy.h2(zi);
  const complex ih(0.0, h);
  const complex gx = (inner(zi + h) - inner(zi - h)) / (2.0 * h);
  const complex gy = (inner(zi + ih) - inner(zi - ih)) / (2.0 * h);
  return 0.5 * (gx - complex(0.0, 1.0) * gy);
}

}  // namespace detail

// One-coordinate structural Wirtinger derivative with the other coordinates
// frozen; n = 1 reduces to d_structural on the same probes.
inline complex d_structural_nd(const MultiFieldFn& w, const StructuralFunctionNd& S,
                               const MultiPoint& p, std::size_t i, Wrt wrt,
                               const StepPolicy& policy = {}) {
  detail::validate_nd(p, i);
  const WirtingerPair dw = d_wirtinger(detail::freeze_coord(w, p, i), p.coords[i], policy);
  const WirtingerPair dk = d_wirtinger(detail::freeze_coord(S.K, p, i), p.coords[i], policy);
  const complex dwc = (wrt == Wrt::z) ? dw.d_z : dw.d_zbar;
  const complex dkc = (wrt == Wrt::z) ? dk.d_z : dk.d_zbar;
  if (dkc == 0.0) return dwc;
  return dwc + detail::probe_nd(w, p) * dkc;
}

// The (i, j) component of the nonlinear Laplace operator:
//   w_{z^i zbar^j} + K_{z^i} w_{zbar^j} + K_{zbar^j} w_{z^i}
//   + (K_{i jbar} + K_{z^i} K_{zbar^j}) w.
inline complex nonlinear_laplace_nd(const MultiFieldFn& w,
                                    const StructuralFunctionNd& S,
                                    const MultiPoint& p, std::size_t i,
                                    std::size_t j, const StepPolicy& policy = {}) {
  detail::validate_nd(p, i);
  detail::validate_nd(p, j);
  const complex wij = detail::mixed_second_nd(w, p, i, j, policy);
  const complex kzi = d_wirtinger(detail::freeze_coord(S.K, p, i), p.coords[i], policy).d_z;
  const complex kzbarj =
      d_wirtinger(detail::freeze_coord(S.K, p, j), p.coords[j], policy).d_zbar;
  const complex kij = detail::mixed_second_nd(S.K, p, i, j, policy);
  if (kzi == 0.0 && kzbarj == 0.0 && kij == 0.0) return wij;
  const complex wzi = d_wirtinger(detail::freeze_coord(w, p, i), p.coords[i], policy).d_z;
  const complex wzbarj =
      d_wirtinger(detail::freeze_coord(w, p, j), p.coords[j], policy).d_zbar;
  const complex psi_ij = kij + kzi * kzbarj;
  return wij + kzbarj * wzi + kzi * wzbarj + psi_ij * detail::probe_nd(w, p);
}

}  // namespace shol
