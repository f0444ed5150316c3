// shol — command-line front end for the structural complex-analysis library.
// Subcommands map onto the library operations; reports use the shared JSON
// schema and field dumps the shared CSV schema. Exit codes: 0 ok, 1 usage,
// 2 expression parse error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "shol/dbar.hpp"
#include "shol/io.hpp"
#include "shol/nlaplace.hpp"

using namespace shol;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitNumeric = 3;

struct ExitRequest {
  int code;
};

expr::Ast parse_expr_flag(const std::string& flag, const std::string& source) {
  try {
    return expr::parse(source);
  } catch (const parse_error& e) {
    std::cerr << "error: " << flag << ": " << e.what() << "\n"
              << "  " << source << "\n"
              << "  " << std::string(e.position(), ' ') << "^\n"
              << "  expected: " << e.expected() << "\n";
    throw ExitRequest{kExitParse};
  }
}

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (...) {
    throw invalid_parameter_error("expected a number, got \"" + text + "\"");
  }
  if (used != text.size())
    throw invalid_parameter_error("expected a number, got \"" + text + "\"");
  return v;
}

std::vector<double> split_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  return out;
}

complex parse_point(const std::string& text) {
  const auto nums = split_numbers(text);
  if (nums.size() != 2)
    throw invalid_parameter_error("point must be \"x,y\", got \"" + text + "\"");
  return {nums[0], nums[1]};
}

int env_default_grid() {
  if (const char* v = std::getenv("SHOL_GRID")) {
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || n < 2 || n > 100000)
      throw invalid_parameter_error("SHOL_GRID must be an integer >= 2");
    return static_cast<int>(n);
  }
  return 64;
}

struct CommonOpts {
  std::string domain = "disk:0,0,1";
  int grid = 0;
  int grid_ny = 0;
  double h1 = 1e-5;
  double h2 = 1e-3;
  std::string out;
  std::string format = "json";
  double extra_p = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--domain", o.domain,
                  "domain spec: rect:x0,x1,y0,y1 or disk:cx,cy,r");
  cmd->add_option("--grid", o.grid, "cells per axis (default $SHOL_GRID or 64)");
  cmd->add_option("--grid-ny", o.grid_ny, "cells along y (default: --grid)");
  cmd->add_option("--h1", o.h1, "first-derivative step scale");
  cmd->add_option("--h2", o.h2, "second-derivative step scale");
  cmd->add_option("--out", o.out, "output path (default: stdout)");
  cmd->add_option("--format", o.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--p", o.extra_p, "additional Lp norm to report");
}

GridDomain grid_from(const CommonOpts& o) {
  const int nx = o.grid > 0 ? o.grid : env_default_grid();
  const int ny = o.grid_ny > 0 ? o.grid_ny : nx;
  const auto colon = o.domain.find(':');
  if (colon != std::string::npos) {
    const std::string kind = o.domain.substr(0, colon);
    const auto nums = split_numbers(o.domain.substr(colon + 1));
    if (kind == "rect" && nums.size() == 4)
      return make_rect_grid(nums[0], nums[1], nums[2], nums[3], nx, ny);
    if (kind == "disk" && nums.size() == 3)
      return make_disk_grid({nums[0], nums[1]}, nums[2], nx, ny);
  }
  throw invalid_parameter_error(
      "domain spec must be rect:x0,x1,y0,y1 or disk:cx,cy,r (got \"" + o.domain +
      "\")");
}

StepPolicy policy_from(const CommonOpts& o) {
  StepPolicy p;
  p.h1_base = o.h1;
  p.h2_base = o.h2;
  if (!(p.h1_base > 0) || !(p.h2_base > 0))
    throw invalid_parameter_error("step scales must be positive");
  return p;
}

StructuralFunction structure_from(const std::string& k_src,
                                  const std::string& kappa_src) {
  if (!k_src.empty() && !kappa_src.empty())
    throw invalid_parameter_error("give either --K or --kappa, not both");
  if (!k_src.empty())
    return StructuralFunction::from_expression(parse_expr_flag("--K", k_src));
  if (!kappa_src.empty())
    return StructuralFunction::kappa_form(parse_expr_flag("--kappa", kappa_src));
  throw invalid_parameter_error("one of --K or --kappa is required");
}

void tag_structure(ResidualReport& r, const std::string& k_src,
                   const std::string& kappa_src) {
  if (!k_src.empty()) r.add_param("K", k_src);
  if (!kappa_src.empty()) r.add_param("kappa", kappa_src);
}

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot open output file " << out_path << "\n";
    throw ExitRequest{kExitNumeric};
  }
  f << text;
  f.flush();
  if (!f.good()) {
    std::cerr << "error: write to " << out_path << " failed\n";
    throw ExitRequest{kExitNumeric};
  }
}

void emit_reports(const std::vector<ResidualReport>& reports, const CommonOpts& o) {
  std::ostringstream os;
  if (o.format == "csv") {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      if (reports.size() > 1) os << "# " << reports[i].operator_name << "\n";
      write_field_csv(os, reports[i].residual);
    }
  } else if (reports.size() == 1) {
    write_report_json(os, reports[0]);
  } else {
    os << "[\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
      write_report_json(os, reports[i]);
      if (i + 1 < reports.size()) os << ",\n";
    }
    os << "]\n";
  }
  emit_text(os.str(), o.out);
}

std::optional<double> extra_p(const CommonOpts& o) {
  if (o.extra_p > 0) return o.extra_p;
  return std::nullopt;
}

void attach_extra_norm(ResidualReport& r, const CommonOpts& o) {
  if (auto p = extra_p(o)) r.lp = FieldNorm{*p, norm_lp(r.residual, *p)};
}

// ---------------------------------------------------------------------------

struct CheckHoloOpts {
  CommonOpts c;
  std::string w, K, kappa;
  std::string mode = "eq36";
  bool real_form = false;
};

void run_check_holo(const CheckHoloOpts& o) {
  const auto S = structure_from(o.K, o.kappa);
  const FieldFn w = expr::to_field(parse_expr_flag("--w", o.w));
  const GridDomain grid = grid_from(o.c);
  const StepPolicy policy = policy_from(o.c);
  const HoloMode mode = o.mode == "eq23" ? HoloMode::eq23 : HoloMode::eq36;

  std::vector<ResidualReport> reports;
  reports.push_back(holo_residual(w, S, grid, policy, mode));
  reports.back().add_param("w", o.w);
  tag_structure(reports.back(), o.K, o.kappa);

  if (o.real_form) {
    if (S.mode() != StructureMode::kappa_form)
      throw invalid_parameter_error("--real-form requires --kappa");
    const RealFieldFn u = [w](complex z) { return w(z).real(); };
    const RealFieldFn v = [w](complex z) { return w(z).imag(); };
    const RealFieldFn alpha = [S](complex z) { return S.alpha(z); };
    const RealFieldFn beta = [S](complex z) { return S.beta(z); };
    auto [r1, r2] = real_cr_residual(u, v, alpha, beta, grid, policy);
    reports.push_back(std::move(r1));
    reports.push_back(std::move(r2));
  }
  for (auto& r : reports) attach_extra_norm(r, o.c);
  emit_reports(reports, o.c);
}

struct CbvOpts {
  CommonOpts c;
  std::string w, A, B, C, kappa;
};

void run_cbv(const CbvOpts& o) {
  const FieldFn w = expr::to_field(parse_expr_flag("--w", o.w));
  const GridDomain grid = grid_from(o.c);
  const StepPolicy policy = policy_from(o.c);

  CbvCoefficients coeffs{nullptr, nullptr, nullptr};
  if (!o.kappa.empty()) {
    if (!o.A.empty())
      throw invalid_parameter_error("give either --kappa or --A, not both");
    const auto S =
        StructuralFunction::kappa_form(parse_expr_flag("--kappa", o.kappa));
    coeffs = cbv_from_real(coefficients_from_structure(S, policy));
  } else {
    if (o.A.empty())
      throw invalid_parameter_error("one of --A or --kappa is required");
    coeffs.A = expr::to_field(parse_expr_flag("--A", o.A));
    coeffs.B = expr::to_field(parse_expr_flag("--B", o.B.empty() ? "0" : o.B));
    coeffs.C = expr::to_field(parse_expr_flag("--C", o.C.empty() ? "1" : o.C));
  }
  ResidualReport r = cbv_residual(w, coeffs, grid, policy);
  r.add_param("w", o.w);
  if (!o.kappa.empty()) {
    r.add_param("kappa", o.kappa);
    r.add_param("coefficients", "kappa-pipeline");
  } else {
    r.add_param("A", o.A);
    r.add_param("B", o.B.empty() ? "0" : o.B);
    r.add_param("C", o.C.empty() ? "1" : o.C);
  }
  attach_extra_norm(r, o.c);
  emit_reports({std::move(r)}, o.c);
}

struct DbarOpts {
  CommonOpts c;
  std::string phi, w;
  std::vector<std::string> at;
  bool verify = false;
  bool reconstruct = false;
  int boundary_n = 1024;
};

void run_dbar(const DbarOpts& o) {
  const GridDomain grid = grid_from(o.c);
  const StepPolicy policy = policy_from(o.c);

  if (o.reconstruct) {
    if (o.w.empty())
      throw invalid_parameter_error("--reconstruct requires --w");
    if (o.at.empty())
      throw invalid_parameter_error("--reconstruct requires at least one --at");
    const FieldFn w = expr::to_field(parse_expr_flag("--w", o.w));
    std::ostringstream os;
    os << "x,y,re,im,direct_re,direct_im,abs_err\n";
    for (const auto& spec : o.at) {
      const complex zeta = grid.center(grid.nearest_cell(parse_point(spec)));
      const complex rec =
          cauchy_pompeiu_reconstruct(w, grid, zeta, policy, o.boundary_n);
      const complex direct = w(zeta);
      os << detail::format_g17(zeta.real()) << ',' << detail::format_g17(zeta.imag())
         << ',' << detail::format_g17(rec.real()) << ',' << detail::format_g17(rec.imag())
         << ',' << detail::format_g17(direct.real()) << ','
         << detail::format_g17(direct.imag()) << ','
         << detail::format_g17(std::abs(rec - direct)) << '\n';
    }
    emit_text(os.str(), o.c.out);
    return;
  }

  if (o.phi.empty()) throw invalid_parameter_error("--phi is required");
  if (o.at.empty() && !o.verify)
    throw invalid_parameter_error("nothing to do: give --at points and/or --verify");
  const FieldFn phi = expr::to_field(parse_expr_flag("--phi", o.phi));

  if (!o.at.empty()) {
    std::ostringstream os;
    os << "x,y,re,im,abs\n";
    for (const auto& spec : o.at) {
      const complex zeta = grid.center(grid.nearest_cell(parse_point(spec)));
      const complex h = pompeiu_solve(phi, grid, zeta);
      os << detail::format_g17(zeta.real()) << ',' << detail::format_g17(zeta.imag())
         << ',' << detail::format_g17(h.real()) << ',' << detail::format_g17(h.imag())
         << ',' << detail::format_g17(std::abs(h)) << '\n';
    }
    std::cout << os.str();
  }
  if (o.verify) {
    const PompeiuSolution sol(phi, grid);
    ResidualReport r = verify_dbar(sol, phi);
    r.add_param("phi", o.phi);
    attach_extra_norm(r, o.c);
    emit_reports({std::move(r)}, o.c);
  }
}

struct ConstructOpts {
  CommonOpts c;
  std::string Phi, K, kappa;
  bool check = false;
  std::vector<std::string> transform_at;
};

void run_construct(const ConstructOpts& o) {
  const auto S = structure_from(o.K, o.kappa);
  const FieldFn phi = expr::to_field(parse_expr_flag("--Phi", o.Phi));
  const FieldFn w = construct_solution(phi, S);
  const GridDomain grid = grid_from(o.c);
  const StepPolicy policy = policy_from(o.c);

  if (!o.transform_at.empty()) {
    std::ostringstream os;
    os << "x,y,w_re,w_im,wt_re,wt_im,u_tilde,v_tilde\n";
    for (const auto& spec : o.transform_at) {
      const complex z = parse_point(spec);
      const complex wv = w(z);
      const KTransform kt = k_transform(wv, S.K(z));
      os << detail::format_g17(z.real()) << ',' << detail::format_g17(z.imag()) << ','
         << detail::format_g17(wv.real()) << ',' << detail::format_g17(wv.imag()) << ','
         << detail::format_g17(kt.w_tilde.real()) << ','
         << detail::format_g17(kt.w_tilde.imag()) << ','
         << detail::format_g17(kt.u_tilde) << ',' << detail::format_g17(kt.v_tilde)
         << '\n';
    }
    std::cout << os.str();
  }

  if (o.check) {
    ResidualReport r = holo_residual(w, S, grid, policy);
    r.add_param("Phi", o.Phi);
    tag_structure(r, o.K, o.kappa);
    attach_extra_norm(r, o.c);
    emit_reports({std::move(r)}, o.c);
  } else {
    emit_text(field_to_csv(sample_field(w, grid)), o.c.out);
  }
}

struct LaplaceOpts {
  CommonOpts c;
  std::string w, K, kappa;
  std::vector<std::string> at;
  bool nd = false;
  std::string w1, w2, K1, K2, at1, at2;
  int i = 0, j = 0;
};

void run_laplace(const LaplaceOpts& o) {
  const StepPolicy policy = policy_from(o.c);

  if (o.nd) {
    if (o.w1.empty() || o.w2.empty() || o.K1.empty() || o.K2.empty() ||
        o.at1.empty() || o.at2.empty())
      throw invalid_parameter_error(
          "--nd needs --w1 --w2 --K1 --K2 --at1 --at2 (per-coordinate factors)");
    const FieldFn w1 = expr::to_field(parse_expr_flag("--w1", o.w1));
    const FieldFn w2 = expr::to_field(parse_expr_flag("--w2", o.w2));
    const FieldFn k1 = expr::to_field(parse_expr_flag("--K1", o.K1));
    const FieldFn k2 = expr::to_field(parse_expr_flag("--K2", o.K2));
    const MultiFieldFn wnd = [w1, w2](const MultiPoint& p) {
      return w1(p.coords[0]) * w2(p.coords[1]);
    };
    const StructuralFunctionNd Snd{[k1, k2](const MultiPoint& p) {
      return k1(p.coords[0]) * k2(p.coords[1]);
    }};
    const MultiPoint point{parse_point(o.at1), parse_point(o.at2)};
    const complex v = nonlinear_laplace_nd(wnd, Snd, point,
                                           static_cast<std::size_t>(o.i),
                                           static_cast<std::size_t>(o.j), policy);
    std::ostringstream os;
    os << "i,j,re,im\n"
       << o.i << ',' << o.j << ',' << detail::format_g17(v.real()) << ','
       << detail::format_g17(v.imag()) << '\n';
    emit_text(os.str(), o.c.out);
    return;
  }

  const auto S = structure_from(o.K, o.kappa);
  const FieldFn w = expr::to_field(parse_expr_flag("--w", o.w));
  const GridDomain grid = grid_from(o.c);

  if (!o.at.empty()) {
    std::ostringstream os;
    os << "x,y,lap_re,lap_im,psi_re,psi_im\n";
    for (const auto& spec : o.at) {
      const complex z = parse_point(spec);
      const complex lap = nonlinear_laplace(w, S, z, policy);
      const complex ps = psi(S, z, policy);
      os << detail::format_g17(z.real()) << ',' << detail::format_g17(z.imag()) << ','
         << detail::format_g17(lap.real()) << ',' << detail::format_g17(lap.imag())
         << ',' << detail::format_g17(ps.real()) << ',' << detail::format_g17(ps.imag())
         << '\n';
    }
    std::cout << os.str();
  }

  ResidualReport r = nl_laplace_residual(w, S, grid, policy);
  r.add_param("w", o.w);
  tag_structure(r, o.K, o.kappa);
  attach_extra_norm(r, o.c);
  emit_reports({std::move(r)}, o.c);
}

struct NcrOpts {
  CommonOpts c;
  std::string w, kappa, f_src, g_src;
  std::string convention = "both";
  std::string uv_box = "-2,2,-2,2";
  int uv_grid = 16;
  std::string c_point;
  bool rhs_check = false;
};

// user-supplied (f, g) are expressions in z read as z = u + i v; the real
// part of the evaluation is taken
RealFn2 uv_fn_from(const std::string& flag, const std::string& src) {
  const expr::Ast ast = parse_expr_flag(flag, src);
  return [ast](double u, double v) { return expr::eval(ast, complex(u, v)).real(); };
}

void run_ncr(const NcrOpts& o) {
  if (o.f_src.empty() != o.g_src.empty())
    throw invalid_parameter_error("--f and --g must be given together");
  const bool user_pair = !o.f_src.empty();
  if (o.kappa.empty() && !user_pair)
    throw invalid_parameter_error("give --kappa, or --f and --g");
  if (!o.kappa.empty() && user_pair)
    throw invalid_parameter_error("give either --kappa or --f/--g, not both");

  const FieldFn w = expr::to_field(parse_expr_flag("--w", o.w));
  const GridDomain grid = grid_from(o.c);
  const StepPolicy policy = policy_from(o.c);

  complex z0;
  if (!o.c_point.empty()) {
    z0 = parse_point(o.c_point);
  } else if (grid.shape() == GridShape::disk) {
    z0 = grid.disk_center().to_complex();
  } else {
    z0 = {0.5 * (grid.x_min() + grid.x_max()), 0.5 * (grid.y_min() + grid.y_max())};
  }

  NcrPair pair{nullptr, nullptr};
  double f01 = 0, g01 = 0, f10 = 0, g10 = 0;
  if (user_pair) {
    pair = NcrPair{uv_fn_from("--f", o.f_src), uv_fn_from("--g", o.g_src)};
    f01 = pair.f(0, 1);
    g01 = pair.g(0, 1);
    f10 = pair.f(1, 0);
    g10 = pair.g(1, 0);
  } else {
    const auto S =
        StructuralFunction::kappa_form(parse_expr_flag("--kappa", o.kappa));
    pair = ncr_pair_from_structure(S, z0, policy);
    // sample values pin down the coefficients in the report:
    // f(0,1) = -(alpha_x - beta_y), g(1,0) = -(alpha_x - beta_y), etc.
    std::tie(f01, g01) = fg_from_structure(S, 0.0, 1.0, z0, policy);
    std::tie(f10, g10) = fg_from_structure(S, 1.0, 0.0, z0, policy);
  }

  const RealFieldFn u = [w](complex z) { return w(z).real(); };
  const RealFieldFn v = [w](complex z) { return w(z).imag(); };

  std::vector<ResidualReport> reports;
  auto [r1, r2] = ncr_residual(u, v, pair, grid, policy);
  reports.push_back(std::move(r1));
  reports.push_back(std::move(r2));

  const auto box = split_numbers(o.uv_box);
  if (box.size() != 4)
    throw invalid_parameter_error("--uv-box must be u0,u1,v0,v1");
  const GridDomain uv =
      make_rect_grid(box[0], box[1], box[2], box[3], o.uv_grid, o.uv_grid);
  if (o.convention == "eq3" || o.convention == "both") {
    auto [e1, e2] = fg_cr_check(pair, uv, FgConvention::eq3);
    reports.push_back(std::move(e1));
    reports.push_back(std::move(e2));
  }
  if (o.convention == "post-a1" || o.convention == "both") {
    auto [p1, p2] = fg_cr_check(pair, uv, FgConvention::post_a1);
    reports.push_back(std::move(p1));
    reports.push_back(std::move(p2));
  }
  if (o.rhs_check) {
    auto [l1, l2] = laplace_rhs_check(u, v, pair, grid, policy);
    reports.push_back(std::move(l1));
    reports.push_back(std::move(l2));
  }
  for (auto& r : reports) {
    if (user_pair) {
      r.add_param("f", o.f_src);
      r.add_param("g", o.g_src);
    } else {
      r.add_param("kappa", o.kappa);
      r.add_param("coef_point_x", z0.real());
      r.add_param("coef_point_y", z0.imag());
    }
    r.add_param("w", o.w);
    r.add_param("f(0,1)", f01);
    r.add_param("g(1,0)", g10);
    r.add_param("f(1,0)", f10);
    r.add_param("g(0,1)", g01);
    attach_extra_norm(r, o.c);
  }
  emit_reports(reports, o.c);
}

struct DiffOpts {
  CommonOpts c;
  std::string expr_src;
  std::string wrt = "zbar";
  std::vector<std::string> at;
  std::string K, kappa;
  bool nd = false;
  std::string w1, w2, K1, K2, at1, at2;
  int i = 0;
};

void run_diff(const DiffOpts& o) {
  const StepPolicy policy = policy_from(o.c);
  const Wrt wrt = o.wrt == "z" ? Wrt::z : Wrt::zbar;

  if (o.nd) {
    if (o.w1.empty() || o.w2.empty() || o.K1.empty() || o.K2.empty() ||
        o.at1.empty() || o.at2.empty())
      throw invalid_parameter_error(
          "--nd needs --w1 --w2 --K1 --K2 --at1 --at2 (per-coordinate factors)");
    const FieldFn w1 = expr::to_field(parse_expr_flag("--w1", o.w1));
    const FieldFn w2 = expr::to_field(parse_expr_flag("--w2", o.w2));
    const FieldFn k1 = expr::to_field(parse_expr_flag("--K1", o.K1));
    const FieldFn k2 = expr::to_field(parse_expr_flag("--K2", o.K2));
    const MultiFieldFn wnd = [w1, w2](const MultiPoint& p) {
      return w1(p.coords[0]) * w2(p.coords[1]);
    };
    const StructuralFunctionNd Snd{[k1, k2](const MultiPoint& p) {
      return k1(p.coords[0]) * k2(p.coords[1]);
    }};
    const MultiPoint point{parse_point(o.at1), parse_point(o.at2)};
    const complex v = d_structural_nd(wnd, Snd, point,
                                      static_cast<std::size_t>(o.i), wrt, policy);
    std::ostringstream os;
    os << "i,wrt,re,im\n"
       << o.i << ',' << o.wrt << ',' << detail::format_g17(v.real()) << ','
       << detail::format_g17(v.imag()) << '\n';
    emit_text(os.str(), o.c.out);
    return;
  }

  if (o.expr_src.empty()) throw invalid_parameter_error("--expr is required");
  const expr::Ast ast = parse_expr_flag("--expr", o.expr_src);
  const expr::Ast dast = expr::wirtinger_symbolic(ast, wrt);
  std::ostringstream os;
  os << "d/d" << (wrt == Wrt::z ? "z" : "zbar") << ": " << expr::print(dast) << "\n";

  std::optional<StructuralFunction> S;
  if (!o.K.empty() || !o.kappa.empty()) S = structure_from(o.K, o.kappa);

  const FieldFn f = expr::to_field(ast);
  for (const auto& spec : o.at) {
    const complex z = parse_point(spec);
    const complex sym = expr::eval(dast, z);
    const WirtingerPair num = d_wirtinger(f, z, policy);
    const complex numc = wrt == Wrt::z ? num.d_z : num.d_zbar;
    os << "at (" << detail::format_g17(z.real()) << ", "
       << detail::format_g17(z.imag()) << "): symbolic = ("
       << detail::format_g17(sym.real()) << ", " << detail::format_g17(sym.imag())
       << ") numeric = (" << detail::format_g17(numc.real()) << ", "
       << detail::format_g17(numc.imag())
       << ") |diff| = " << detail::format_g17(std::abs(sym - numc)) << "\n";
    if (S) {
      const WirtingerPair ds = d_structural(f, *S, z, policy);
      const ComplexOneForm form = exterior_differential(f, *S, z, policy);
      os << "  D/dz = (" << detail::format_g17(ds.d_z.real()) << ", "
         << detail::format_g17(ds.d_z.imag()) << ") D/dzbar = ("
         << detail::format_g17(ds.d_zbar.real()) << ", "
         << detail::format_g17(ds.d_zbar.imag()) << ")\n";
      os << "  Dw = (" << detail::format_g17(form.c_z.real()) << ", "
         << detail::format_g17(form.c_z.imag()) << ") dz + ("
         << detail::format_g17(form.c_zbar.real()) << ", "
         << detail::format_g17(form.c_zbar.imag()) << ") dzbar\n";
      if (S->mode() == StructureMode::kappa_form) {
        auto [dx, dy] = dx_dy_operators(f, *S, z, policy);
        os << "  D_x = (" << detail::format_g17(dx.real()) << ", "
           << detail::format_g17(dx.imag()) << ") D_y = ("
           << detail::format_g17(dy.real()) << ", " << detail::format_g17(dy.imag())
           << ")\n";
      }
    }
  }
  emit_text(os.str(), o.c.out);
}

struct ExamplesOpts {
  int n = 0;
  std::string out;
};

void run_examples(const ExamplesOpts& o) {
  std::string k_src, phi_src;
  GridDomain grid = make_disk_grid({0, 0}, 1.0, 64, 64);
  switch (o.n) {
    case 1:
      k_src = "exp(z*conj(z))";
      phi_src = "1";
      grid = make_disk_grid({0, 0}, 0.75, 64, 64);
      break;
    case 2:
      k_src = "conj(z)";
      phi_src = "1";
      break;
    case 3:
      k_src = "exp(z*conj(z)) + conj(z)";
      phi_src = "z";
      break;
    default:
      throw invalid_parameter_error("example number must be 1, 2 or 3");
  }
  const auto S = StructuralFunction::from_expression(k_src);
  const FieldFn w = construct_solution(expr::to_field(expr::parse(phi_src)), S);
  ResidualReport r = holo_residual(w, S, grid, StepPolicy{});
  r.add_param("example", o.n);
  r.add_param("K", k_src);
  r.add_param("Phi", phi_src);

  if (o.n == 1) {
    // spot-check the symbolic dK/dzbar against z*exp(|z|^2) at fixed draws
    std::mt19937_64 eng(424242);
    auto uniform = [&eng](double lo, double hi) {
      return lo + (hi - lo) * static_cast<double>(eng() >> 11) * 0x1.0p-53;
    };
    double worst = 0.0;
    int done = 0;
    while (done < 20) {
      const complex z(uniform(-0.75, 0.75), uniform(-0.75, 0.75));
      if (std::abs(z) > 0.75) continue;
      ++done;
      const complex want = z * std::exp(std::norm(z));
      worst = std::max(worst, std::abs(S.dK(z).d_zbar - want));
    }
    r.add_param("kdzbar_max_dev", worst);
  }

  CommonOpts c;
  c.out = o.out;
  emit_reports({std::move(r)}, c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "shol — structural complex analysis: generalized Wirtinger operators,\n"
      "structural-holomorphy and CBV residuals, a Cauchy-Pompeiu dbar solver\n"
      "and the nonlinear Laplace operator, over expression-defined fields.\n"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "shol 0.1.0");

  auto check = std::make_shared<CheckHoloOpts>();
  CLI::App* c1 = app.add_subcommand(
      "check-holo",
      "Structural-holomorphy residual sweep (ops: holo_residual, real_cr_residual)");
  add_common(c1, check->c);
  c1->add_option("--w", check->w, "field expression w(z)")->required();
  c1->add_option("--K", check->K, "structural function K(z)");
  c1->add_option("--kappa", check->kappa, "kappa with K = 1 + kappa");
  c1->add_option("--mode", check->mode, "eq36 (default residual) or eq23 (full form)")
      ->check(CLI::IsMember({"eq36", "eq23"}));
  c1->add_flag("--real-form", check->real_form,
               "also emit the two real-form residual reports (kappa only)");
  c1->callback([check] { run_check_holo(*check); });

  auto cbv = std::make_shared<CbvOpts>();
  CLI::App* c2 = app.add_subcommand(
      "residual-cbv",
      "CBV equation residual C w_zbar + A w + B conj(w) (ops: cbv_residual, "
      "coefficients_from_structure, cbv_from_real)");
  add_common(c2, cbv->c);
  c2->add_option("--w", cbv->w, "field expression w(z)")->required();
  c2->add_option("--A", cbv->A, "coefficient A(z)");
  c2->add_option("--B", cbv->B, "coefficient B(z), default 0");
  c2->add_option("--C", cbv->C, "coefficient C(z), default 1");
  c2->add_option("--kappa", cbv->kappa,
                 "derive A (= dkappa/dzbar) and B = 0 from kappa instead");
  c2->callback([cbv] { run_cbv(*cbv); });

  auto dbar = std::make_shared<DbarOpts>();
  CLI::App* c3 = app.add_subcommand(
      "solve-dbar",
      "Solve dh/dzbar = phi by the Cauchy transform and verify it (ops: "
      "pompeiu_solve, verify_dbar, cauchy_pompeiu_reconstruct)");
  add_common(c3, dbar->c);
  c3->add_option("--phi", dbar->phi, "source expression phi(z)");
  c3->add_option("--at", dbar->at, "evaluation point x,y (snapped to a center)");
  c3->add_flag("--verify", dbar->verify, "emit the residual report for h");
  c3->add_flag("--reconstruct", dbar->reconstruct,
               "Cauchy-Pompeiu point reconstruction of --w instead");
  c3->add_option("--w", dbar->w, "field to reconstruct (with --reconstruct)");
  c3->add_option("--boundary-n", dbar->boundary_n, "boundary quadrature points");
  c3->callback([dbar] { run_dbar(*dbar); });

  auto cons = std::make_shared<ConstructOpts>();
  CLI::App* c4 = app.add_subcommand(
      "construct",
      "Build w = Phi*exp(-K) and dump or check it (ops: construct_solution, "
      "k_transform)");
  add_common(c4, cons->c);
  c4->add_option("--Phi", cons->Phi, "entire factor Phi(z)")->required();
  c4->add_option("--K", cons->K, "structural function K(z)");
  c4->add_option("--kappa", cons->kappa, "kappa with K = 1 + kappa");
  c4->add_flag("--check", cons->check,
               "emit the holomorphy residual report instead of the field dump");
  c4->add_option("--transform-at", cons->transform_at,
                 "print the K-transform of w at x,y");
  c4->callback([cons] { run_construct(*cons); });

  auto lap = std::make_shared<LaplaceOpts>();
  CLI::App* c5 = app.add_subcommand(
      "laplace",
      "Nonlinear Laplace residual sweep and point values (ops: "
      "nl_laplace_residual, nonlinear_laplace, psi, nonlinear_laplace_nd)");
  add_common(c5, lap->c);
  c5->add_option("--w", lap->w, "field expression w(z)");
  c5->add_option("--K", lap->K, "structural function K(z)");
  c5->add_option("--kappa", lap->kappa, "kappa with K = 1 + kappa");
  c5->add_option("--at", lap->at, "also print operator and metric values at x,y");
  c5->add_flag("--nd", lap->nd, "two-variable point evaluation mode");
  c5->add_option("--w1", lap->w1, "factor w1(z^1) (nd mode)");
  c5->add_option("--w2", lap->w2, "factor w2(z^2) (nd mode)");
  c5->add_option("--K1", lap->K1, "factor K1(z^1) (nd mode)");
  c5->add_option("--K2", lap->K2, "factor K2(z^2) (nd mode)");
  c5->add_option("--at1", lap->at1, "coordinate z^1 as x,y (nd mode)");
  c5->add_option("--at2", lap->at2, "coordinate z^2 as x,y (nd mode)");
  c5->add_option("--i", lap->i, "first operator index (0-based, nd mode)");
  c5->add_option("--j", lap->j, "second operator index (0-based, nd mode)");
  c5->callback([lap] { run_laplace(*lap); });

  auto ncr = std::make_shared<NcrOpts>();
  CLI::App* c6 = app.add_subcommand(
      "ncr",
      "Nonlinear Cauchy-Riemann residuals and convention checks (ops: "
      "ncr_residual, fg_from_structure, fg_cr_check, laplace_rhs_check)");
  add_common(c6, ncr->c);
  c6->add_option("--w", ncr->w, "field expression w(z)")->required();
  c6->add_option("--kappa", ncr->kappa, "kappa with K = 1 + kappa; derives (f, g)");
  c6->add_option("--f", ncr->f_src, "explicit f(u,v) as an expression in z = u + i*v");
  c6->add_option("--g", ncr->g_src, "explicit g(u,v) as an expression in z = u + i*v");
  c6->add_option("--convention", ncr->convention, "fg identity convention")
      ->check(CLI::IsMember({"eq3", "post-a1", "both"}));
  c6->add_option("--uv-box", ncr->uv_box, "probe box u0,u1,v0,v1 in (u,v)-space");
  c6->add_option("--uv-grid", ncr->uv_grid, "probe box cells per axis");
  c6->add_option("--c-point", ncr->c_point,
                 "where the kappa coefficients are evaluated (default: domain center)");
  c6->add_flag("--rhs-check", ncr->rhs_check,
               "also check the nonlinear Laplace right-hand sides");
  c6->callback([ncr] { run_ncr(*ncr); });

  auto diff = std::make_shared<DiffOpts>();
  CLI::App* c7 = app.add_subcommand(
      "diff",
      "Symbolic/numeric Wirtinger derivatives and structural point operators "
      "(ops: d_structural, exterior_differential, dx_dy_operators, "
      "d_structural_nd)");
  add_common(c7, diff->c);
  c7->add_option("--expr", diff->expr_src, "expression to differentiate");
  c7->add_option("--wrt", diff->wrt, "derivative variable")
      ->check(CLI::IsMember({"z", "zbar"}));
  c7->add_option("--at", diff->at, "evaluation point x,y");
  c7->add_option("--K", diff->K, "structural function for point operators");
  c7->add_option("--kappa", diff->kappa, "kappa with K = 1 + kappa");
  c7->add_flag("--nd", diff->nd, "two-variable structural derivative mode");
  c7->add_option("--w1", diff->w1, "factor w1(z^1) (nd mode)");
  c7->add_option("--w2", diff->w2, "factor w2(z^2) (nd mode)");
  c7->add_option("--K1", diff->K1, "factor K1(z^1) (nd mode)");
  c7->add_option("--K2", diff->K2, "factor K2(z^2) (nd mode)");
  c7->add_option("--at1", diff->at1, "coordinate z^1 as x,y (nd mode)");
  c7->add_option("--at2", diff->at2, "coordinate z^2 as x,y (nd mode)");
  c7->add_option("--i", diff->i, "coordinate index (0-based, nd mode)");
  c7->callback([diff] { run_diff(*diff); });

  auto ex = std::make_shared<ExamplesOpts>();
  CLI::App* c8 = app.add_subcommand(
      "examples", "Bundled structural functions with constructed witnesses");
  CLI::App* c8run = c8->add_subcommand("run", "run example N and emit its report");
  c8run->add_option("n", ex->n, "example number (1, 2 or 3)")->required();
  c8run->add_option("--out", ex->out, "output path (default: stdout)");
  c8->require_subcommand(1);
  c8run->callback([ex] { run_examples(*ex); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const ExitRequest& e) {
    return e.code;
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const numerical_error& e) {
    std::cerr << "error: numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const shol::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
