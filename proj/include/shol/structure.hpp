#pragma once

// Structural functions K and the operators they induce: the K-transformation
// w -> wK, generalized Wirtinger derivatives D/dz = d/dz + K_z (acting as
// multiplication by K_z on the lower-order term), structural-holomorphy and
// CBV residual sweeps, coefficient extraction for the kappa-form, and the
// explicit solution family w = Phi * exp(-K).

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "shol/errors.hpp"
#include "shol/expr.hpp"
#include "shol/field.hpp"
#include "shol/wirtinger.hpp"

namespace shol {

enum class StructureMode { general_k, kappa_form };

// K = k1 + i k2, optionally carrying exact symbolic derivatives when built
// from an expression. In kappa-form K = 1 + kappa with kappa = alpha + i beta.
class StructuralFunction {
public:
  static StructuralFunction from_expression(std::string_view k_source) {
    return from_expression(expr::parse(k_source));
  }

  static StructuralFunction from_expression(expr::Ast k) {
    StructuralFunction s;
    s.mode_ = StructureMode::general_k;
    s.attach_asts(std::move(k));
    return s;
  }

  static StructuralFunction kappa_form(std::string_view kappa_source) {
    return kappa_form(expr::parse(kappa_source));
  }

  static StructuralFunction kappa_form(expr::Ast kappa) {
    StructuralFunction s;
    s.mode_ = StructureMode::kappa_form;
    s.kappa_ = expr::to_field(kappa);
    s.attach_asts(expr::add(expr::lit(1.0), std::move(kappa)));
    return s;
  }

  static StructuralFunction from_field(FieldFn k) {
    StructuralFunction s;
    s.mode_ = StructureMode::general_k;
    s.k_ = std::move(k);
    return s;
  }

  static StructuralFunction kappa_form_field(FieldFn kappa) {
    StructuralFunction s;
    s.mode_ = StructureMode::kappa_form;
    s.kappa_ = kappa;
    s.k_ = [kappa = std::move(kappa)](complex z) { return 1.0 + kappa(z); };
    return s;
  }

  StructureMode mode() const { return mode_; }
  bool exact_derivatives() const { return kz_.has_value(); }
  const char* derivative_source() const {
    return exact_derivatives() ? "symbolic" : "finite-difference";
  }

  complex K(complex z) const { return k_(z); }
  double k1(complex z) const { return k_(z).real(); }
  double k2(complex z) const { return k_(z).imag(); }

  complex kappa(complex z) const {
    require_kappa();
    return kappa_(z);
  }
  double alpha(complex z) const { return kappa(z).real(); }
  double beta(complex z) const { return kappa(z).imag(); }

  WirtingerPair dK(complex z, const StepPolicy& policy = {}) const {
    if (kz_) return {(*kz_)(z), (*kzbar_)(z)};
    return d_wirtinger(k_, z, policy);
  }

  complex K_zzbar(complex z, const StepPolicy& policy = {}) const {
    if (kzzbar_) return (*kzzbar_)(z);
    return d2_mixed(k_, z, policy);
  }

  // kappa-form real first-order coefficients: a = alpha_x - beta_y and
  // c = alpha_y + beta_x, i.e. 2 Re / 2 Im of dkappa/dzbar.
  double coef_a(complex z, const StepPolicy& policy = {}) const {
    require_kappa();
    return 2.0 * dK(z, policy).d_zbar.real();
  }

  double coef_c(complex z, const StepPolicy& policy = {}) const {
    require_kappa();
    return 2.0 * dK(z, policy).d_zbar.imag();
  }

  const std::optional<expr::Ast>& k_ast() const { return k_ast_; }
  const std::optional<expr::Ast>& kz_ast() const { return kz_ast_; }
  const std::optional<expr::Ast>& kzbar_ast() const { return kzbar_ast_; }

private:
  void require_kappa() const {
    if (mode_ != StructureMode::kappa_form)
      throw mode_error("operation requires a kappa-form structural function");
  }

  void attach_asts(expr::Ast k) {
    k_ast_ = k;
    kz_ast_ = expr::wirtinger_symbolic(k, Wrt::z);
    kzbar_ast_ = expr::wirtinger_symbolic(k, Wrt::zbar);
    kzzbar_ast_ = expr::wirtinger_symbolic(*kz_ast_, Wrt::zbar);
    k_ = expr::to_field(k);
    kz_ = expr::to_field(*kz_ast_);
    kzbar_ = expr::to_field(*kzbar_ast_);
    kzzbar_ = expr::to_field(*kzzbar_ast_);
  }

  StructureMode mode_ = StructureMode::general_k;
  FieldFn k_;
  FieldFn kappa_;
  std::optional<expr::Ast> k_ast_, kz_ast_, kzbar_ast_, kzzbar_ast_;
  std::optional<FieldFn> kz_, kzbar_, kzzbar_;
};

struct KTransform {
  complex w_tilde;
  double u_tilde;
  double v_tilde;
};

// w -> wK with the real split u~ = k1 u - v k2, v~ = v k1 + u k2.
inline KTransform k_transform(complex w, complex K) {
  const double u = w.real(), v = w.imag();
  const double k1 = K.real(), k2 = K.imag();
  return {w * K, k1 * u - v * k2, v * k1 + u * k2};
}

// Dw/dz = w_z + w K_z and Dw/dzbar = w_zbar + w K_zbar. A structural term
// that is exactly zero is skipped, so constant K reduces bitwise to the
// plain Wirtinger pair on the same probes.
inline WirtingerPair d_structural(const FieldFn& w, const StructuralFunction& S,
                                  complex z0, const StepPolicy& policy = {}) {
  const WirtingerPair dw = d_wirtinger(w, z0, policy);
  const WirtingerPair dk = S.dK(z0, policy);
  if (dk.d_z == 0.0 && dk.d_zbar == 0.0) return dw;
  const complex w0 = detail::probe(w, z0);
  return {dk.d_z == 0.0 ? dw.d_z : dw.d_z + w0 * dk.d_z,
          dk.d_zbar == 0.0 ? dw.d_zbar : dw.d_zbar + w0 * dk.d_zbar};
}

struct ComplexOneForm {
  complex c_z;     // coefficient of dz
  complex c_zbar;  // coefficient of dzbar
};

// The (1,0) and (0,1) components of the generalized exterior differential
// Dw = dw + w dK.
inline ComplexOneForm exterior_differential(const FieldFn& w,
                                            const StructuralFunction& S,
                                            complex z0,
                                            const StepPolicy& policy = {}) {
  const WirtingerPair p = d_structural(w, S, z0, policy);
  return {p.d_z, p.d_zbar};
}

enum class HoloMode { eq36, eq23 };

namespace detail {

inline std::size_t count_degenerate(const StructuralFunction& S,
                                    const GridDomain& grid) {
  std::size_t n = 0;
  for (std::size_t k = 0; k < grid.cell_count(); ++k)
    if (grid.in_mask(k) && std::abs(S.K(grid.center(k))) <= 1e-12) ++n;
  return n;
}

}  // namespace detail

// Residual of the structural holomorphy condition. Default mode evaluates
// w_zbar + w K_zbar; the full mode keeps the K w_zbar factor and evaluates
// K w_zbar + w K_zbar instead.
inline ResidualReport holo_residual(const FieldFn& w, const StructuralFunction& S,
                                    const GridDomain& grid,
                                    const StepPolicy& policy = {},
                                    HoloMode mode = HoloMode::eq36) {
  SampledField res(grid);
  for (std::size_t k = 0; k < grid.cell_count(); ++k) {
    if (!res.is_valid(k)) continue;
    const complex c = grid.center(k);
    if (mode == HoloMode::eq36) {
      res.set(k, d_structural(w, S, c, policy).d_zbar);
    } else {
      const complex wz = d_wirtinger(w, c, policy).d_zbar;
      res.set(k, S.K(c) * wz + detail::probe(w, c) * S.dK(c, policy).d_zbar);
    }
  }
  ResidualReport r = make_report(mode == HoloMode::eq36
                                     ? "structural-holomorphic"
                                     : "structural-holomorphic-full",
                                 std::move(res));
  r.add_param("mode", mode == HoloMode::eq36 ? "eq36" : "eq23");
  r.add_param("h1", policy.h1_base);
  r.add_param("derivative_source", S.derivative_source());
  r.add_param("degenerate_cells", detail::count_degenerate(S, grid));
  return r;
}

namespace detail {

inline double real_probe(const RealFieldFn& f, complex at) {
  const double v = f(at);
  if (!std::isfinite(v)) throw numerical_error("non-finite probe value", at);
  return v;
}

struct RealPartials {
  double fx;
  double fy;
};

inline RealPartials real_partials(const RealFieldFn& f, complex z0, double h) {
  const complex ih(0.0, h);
  return {(real_probe(f, z0 + h) - real_probe(f, z0 - h)) / (2.0 * h),
          (real_probe(f, z0 + ih) - real_probe(f, z0 - ih)) / (2.0 * h)};
}

}  // namespace detail

// Real form of the structural Cauchy-Riemann system for w = u + iv and
// kappa = alpha + i beta:
//   r1 = v_x + u_y + v (alpha_x - beta_y) + u (beta_x + alpha_y)
//   r2 = u_x - v_y + u (alpha_x - beta_y) - v (beta_x + alpha_y)
inline std::pair<ResidualReport, ResidualReport> real_cr_residual(
    const RealFieldFn& u, const RealFieldFn& v, const RealFieldFn& alpha,
    const RealFieldFn& beta, const GridDomain& grid,
    const StepPolicy& policy = {}) {
  SampledField r1(grid), r2(grid);
  for (std::size_t k = 0; k < grid.cell_count(); ++k) {
    if (!r1.is_valid(k)) continue;
    const complex c = grid.center(k);
    const double h = policy.h1(c);
    const auto du = detail::real_partials(u, c, h);
    const auto dv = detail::real_partials(v, c, h);
    const auto da = detail::real_partials(alpha, c, h);
    const auto db = detail::real_partials(beta, c, h);
    const double p = da.fx - db.fy;
    const double q = db.fx + da.fy;
    const double u0 = detail::real_probe(u, c);
    const double v0 = detail::real_probe(v, c);
    r1.set(k, complex(dv.fx + du.fy + v0 * p + u0 * q, 0.0));
    r2.set(k, complex(du.fx - dv.fy + u0 * p - v0 * q, 0.0));
  }
  ResidualReport rep1 = make_report("real-structural-cr-1", std::move(r1));
  ResidualReport rep2 = make_report("real-structural-cr-2", std::move(r2));
  for (ResidualReport* rep : {&rep1, &rep2}) rep->add_param("h1", policy.h1_base);
  return {std::move(rep1), std::move(rep2)};
}

// a = alpha_x - beta_y, b = -(alpha_y + beta_x), c = alpha_y + beta_x,
// d = alpha_x - beta_y. d shares a's evaluator and b negates c's, so the
// identities a = d and b = -c hold exactly.
struct RealCoefficients {
  RealFieldFn a, b, c, d;
};

inline RealCoefficients coefficients_from_structure(const StructuralFunction& S,
                                                    const StepPolicy& policy = {}) {
  if (S.mode() != StructureMode::kappa_form)
    throw mode_error("coefficient extraction requires a kappa-form structural function");
  RealFieldFn a = [S, policy](complex z) { return S.coef_a(z, policy); };
  RealFieldFn c = [S, policy](complex z) { return S.coef_c(z, policy); };
  RealFieldFn b = [c](complex z) { return -c(z); };
  return {a, std::move(b), c, a};
}

struct CbvCoefficients {
  FieldFn A, B, C;
};

// A = (a + d + i c - i b)/4, B = (a - d + i c + i b)/4, C = 1.
inline CbvCoefficients cbv_from_real(const RealCoefficients& rc) {
  FieldFn A = [rc](complex z) {
    return 0.25 * complex(rc.a(z) + rc.d(z), rc.c(z) - rc.b(z));
  };
  FieldFn B = [rc](complex z) {
    return 0.25 * complex(rc.a(z) - rc.d(z), rc.c(z) + rc.b(z));
  };
  FieldFn C = [](complex) { return complex(1.0, 0.0); };
  return {std::move(A), std::move(B), std::move(C)};
}

// Residual of C w_zbar + A w + B conj(w).
inline ResidualReport cbv_residual(const FieldFn& w, const CbvCoefficients& coeffs,
                                   const GridDomain& grid,
                                   const StepPolicy& policy = {}) {
  SampledField res(grid);
  for (std::size_t k = 0; k < grid.cell_count(); ++k) {
    if (!res.is_valid(k)) continue;
    const complex c = grid.center(k);
    const complex wz = d_wirtinger(w, c, policy).d_zbar;
    const complex w0 = detail::probe(w, c);
    res.set(k, coeffs.C(c) * wz + coeffs.A(c) * w0 + coeffs.B(c) * std::conj(w0));
  }
  ResidualReport r = make_report("cbv-residual", std::move(res));
  r.add_param("h1", policy.h1_base);
  return r;
}

// The explicit solution family w = Phi * exp(-K); Phi entire on the working
// domain is the caller's responsibility.
inline FieldFn construct_solution(FieldFn phi, StructuralFunction S) {
  return [phi = std::move(phi), S = std::move(S)](complex z) {
    const complex v = phi(z) * std::exp(-S.K(z));
    if (!finite(v))
      throw numerical_error("solution construction overflowed", z);
    return v;
  };
}

// D_x w = w_x + w (alpha_x - beta_y), D_y w = w_y + w (alpha_y + beta_x);
// recombining as (D_x -/+ i D_y)/2 recovers the structural Wirtinger pair.
inline std::pair<complex, complex> dx_dy_operators(const FieldFn& w,
                                                   const StructuralFunction& S,
                                                   complex z0,
                                                   const StepPolicy& policy = {}) {
  if (S.mode() != StructureMode::kappa_form)
    throw mode_error("D_x/D_y operators require a kappa-form structural function");
  const double h = policy.h1(z0);
  const complex ih(0.0, h);
  const complex wx = (detail::probe(w, z0 + h) - detail::probe(w, z0 - h)) / (2.0 * h);
  const complex wy = (detail::probe(w, z0 + ih) - detail::probe(w, z0 - ih)) / (2.0 * h);
  const complex w0 = detail::probe(w, z0);
  const double p = S.coef_a(z0, policy);
  const double q = S.coef_c(z0, policy);
  return {wx + w0 * p, wy + w0 * q};
}

}  // namespace shol
