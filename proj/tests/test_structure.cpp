#include <doctest.h>

#include <cmath>

#include "shol/structure.hpp"
#include "support/corpus.hpp"

using namespace shol;

TEST_SUITE("structure") {

TEST_CASE("k_transform arithmetic and real split") {
  const KTransform t = k_transform(complex(1, 2), complex(3, 4));
  CHECK(t.w_tilde == complex(-5, 10));
  CHECK(t.u_tilde == -5.0);
  CHECK(t.v_tilde == 10.0);

  CHECK(k_transform(complex(0.7, -0.3), complex(1, 0)).w_tilde == complex(0.7, -0.3));
  CHECK(k_transform(complex(0, 0), complex(2, 5)).w_tilde == complex(0, 0));

  // the split always reassembles the product
  testsup::PointSampler rng(81);
  for (int i = 0; i < 50; ++i) {
    const complex w(rng.uniform(-3, 3), rng.uniform(-3, 3));
    const complex K(rng.uniform(-3, 3), rng.uniform(-3, 3));
    const KTransform kt = k_transform(w, K);
    CHECK(std::abs(complex(kt.u_tilde, kt.v_tilde) - kt.w_tilde) < 1e-13);
  }
}

TEST_CASE("structural function modes and invariants") {
  const auto S = StructuralFunction::kappa_form("0.5*conj(z)");
  CHECK(S.mode() == StructureMode::kappa_form);
  CHECK(S.exact_derivatives());
  for (complex z : testsup::disk_points(20, 2.0, 82)) {
    CHECK(std::abs(S.K(z) - (1.0 + S.kappa(z))) < 1e-12);
    CHECK(S.alpha(z) == doctest::Approx(0.5 * z.real()));
    CHECK(S.beta(z) == doctest::Approx(-0.5 * z.imag()));
  }
  const auto G = StructuralFunction::from_expression("conj(z)");
  CHECK(G.mode() == StructureMode::general_k);
  CHECK_THROWS_AS(G.kappa(0.0), mode_error);
  CHECK_THROWS_AS(G.coef_a(0.0), mode_error);
  const auto F = StructuralFunction::from_field([](complex z) { return std::conj(z); });
  CHECK_FALSE(F.exact_derivatives());
  CHECK(F.derivative_source() == std::string("finite-difference"));
  CHECK(std::abs(F.dK(complex(0.4, 0.2)).d_zbar - 1.0) < 1e-10);
}

TEST_CASE("d_structural with constant K reduces bitwise to d_wirtinger") {
  const FieldFn w = expr::to_field(expr::parse("exp(z)*conj(z) + sin(z)"));
  const auto S = StructuralFunction::from_expression("2 + 3*i");
  for (complex z : testsup::disk_points(10, 1.5, 83)) {
    const WirtingerPair a = d_structural(w, S, z);
    const WirtingerPair b = d_wirtinger(w, z);
    CHECK(a.d_z.real() == b.d_z.real());
    CHECK(a.d_z.imag() == b.d_z.imag());
    CHECK(a.d_zbar.real() == b.d_zbar.real());
    CHECK(a.d_zbar.imag() == b.d_zbar.imag());
  }
}

TEST_CASE("witness: w = exp(-conj z) is annihilated by D/dzbar for K = conj z") {
  const auto S = StructuralFunction::from_expression("conj(z)");
  const FieldFn w = [](complex z) { return std::exp(-std::conj(z)); };
  for (complex z : testsup::disk_points(20, 1.0, 84))
    CHECK(std::abs(d_structural(w, S, z).d_zbar) < 1e-8);
}

TEST_CASE("structural term is the exact K_zbar: w == 1, K = exp(|z|^2)") {
  const auto S = StructuralFunction::from_expression("exp(z*conj(z))");
  const FieldFn one = [](complex) { return complex(1, 0); };
  const complex got = d_structural(one, S, complex(1, 0)).d_zbar;
  CHECK(std::abs(got - std::exp(1.0)) < 1e-12);
}

TEST_CASE("holo_residual on the constructed witness and a violator") {
  const GridDomain disk = make_disk_grid({0, 0}, 1.0, 24, 24);
  const auto S = StructuralFunction::from_expression("conj(z)");
  const FieldFn w = [](complex z) { return std::exp(-std::conj(z)); };
  const ResidualReport ok = holo_residual(w, S, disk);
  CHECK(ok.linf <= 1e-8);

  // w = conj z against plain CR: residual field is identically one
  const auto K1 = StructuralFunction::from_expression("1");
  const ResidualReport bad =
      holo_residual([](complex z) { return std::conj(z); }, K1, disk);
  CHECK(std::abs(bad.linf - 1.0) < 1e-10);
  CHECK(std::abs(bad.l2 - std::sqrt(disk.masked_area())) < 1e-9);
}

TEST_CASE("holo_residual full mode keeps the K w_zbar factor") {
  const GridDomain disk = make_disk_grid({0, 0}, 1.0, 12, 12);
  const auto S = StructuralFunction::from_expression("conj(z)");
  const FieldFn w = [](complex z) { return std::exp(-std::conj(z)); };
  const ResidualReport full = holo_residual(w, S, disk, {}, HoloMode::eq23);
  // K w_zbar + w K_zbar = w (1 - conj z) for this witness
  for (std::size_t k = 0; k < disk.cell_count(); ++k) {
    if (!full.residual.is_valid(k)) continue;
    const complex c = disk.center(k);
    const complex want = std::exp(-std::conj(c)) * (1.0 - std::conj(c));
    CHECK(std::abs(full.residual.values[k] - want) < 1e-8);
  }
}

TEST_CASE("Lemma-style construction: w = Phi exp(-K)") {
  const auto S = StructuralFunction::from_expression("conj(z)");
  const FieldFn w = construct_solution(expr::to_field(expr::parse("1")), S);
  for (complex z : testsup::disk_points(10, 1.0, 85))
    CHECK(std::abs(w(z) - std::exp(-std::conj(z))) < 1e-15);

  // K = 0 leaves Phi untouched
  const auto S0 = StructuralFunction::from_expression("0");
  const FieldFn w0 = construct_solution(expr::to_field(expr::parse("z^2")), S0);
  CHECK(w0(complex(2, 1)) == complex(2, 1) * complex(2, 1));

  // Phi = z^2, K = z conj z stays structural-holomorphic on the unit disk
  const auto Szz = StructuralFunction::from_expression("z*conj(z)");
  const FieldFn wzz = construct_solution(expr::to_field(expr::parse("z^2")), Szz);
  const ResidualReport rep = holo_residual(wzz, Szz, make_disk_grid({0, 0}, 1.0, 24, 24));
  CHECK(rep.linf <= 1e-6);

  // overflow in exp(-K) is a numerical failure at the point
  const auto Sbig = StructuralFunction::from_expression("-400*z*conj(z)");
  const FieldFn wbig = construct_solution(expr::to_field(expr::parse("1")), Sbig);
  CHECK_THROWS_AS(wbig(complex(2, 0)), numerical_error);
}

TEST_CASE("real_cr_residual reduction, violation and witness") {
  const GridDomain g = make_rect_grid(-1, 1, -1, 1, 16, 16);
  const RealFieldFn zero = [](complex) { return 0.0; };

  // classic CR on w = z^2
  const RealFieldFn u2 = [](complex z) { return (z * z).real(); };
  const RealFieldFn v2 = [](complex z) { return (z * z).imag(); };
  auto [r1, r2] = real_cr_residual(u2, v2, zero, zero, g);
  CHECK(r1.linf < 1e-9);
  CHECK(r2.linf < 1e-9);

  // deliberate violation u = x, v = 0
  auto [b1, b2] = real_cr_residual([](complex z) { return z.real(); }, zero, zero, zero, g);
  CHECK(b1.linf < 1e-11);
  CHECK(std::abs(b2.linf - 1.0) < 1e-11);

  // witness w = exp(-c conj z) with kappa = c conj z, c = 0.5
  const double c = 0.5;
  const FieldFn w = [c](complex z) { return std::exp(-c * std::conj(z)); };
  const RealFieldFn u = [w](complex z) { return w(z).real(); };
  const RealFieldFn v = [w](complex z) { return w(z).imag(); };
  const RealFieldFn alpha = [c](complex z) { return c * z.real(); };
  const RealFieldFn beta = [c](complex z) { return -c * z.imag(); };
  auto [w1, w2] = real_cr_residual(u, v, alpha, beta, g);
  CHECK(w1.linf <= 1e-6);
  CHECK(w2.linf <= 1e-6);
}

TEST_CASE("coefficient extraction from kappa") {
  const StepPolicy pol;
  SUBCASE("kappa = 0") {
    const auto rc = coefficients_from_structure(StructuralFunction::kappa_form("0"));
    for (complex z : testsup::disk_points(5, 2.0, 86)) {
      CHECK(rc.a(z) == 0.0);
      CHECK(rc.b(z) == 0.0);
      CHECK(rc.c(z) == 0.0);
      CHECK(rc.d(z) == 0.0);
    }
  }
  SUBCASE("kappa = c conj z") {
    const auto rc =
        coefficients_from_structure(StructuralFunction::kappa_form("0.7*conj(z)"));
    for (complex z : testsup::disk_points(5, 2.0, 87)) {
      CHECK(rc.a(z) == doctest::Approx(1.4).epsilon(1e-14));
      CHECK(rc.b(z) == doctest::Approx(0.0));
      CHECK(rc.c(z) == doctest::Approx(0.0));
      CHECK(rc.a(z) == rc.d(z));
    }
  }
  SUBCASE("kappa = i conj z has alpha = y, beta = x") {
    const auto rc =
        coefficients_from_structure(StructuralFunction::kappa_form("i*conj(z)"));
    for (complex z : testsup::disk_points(5, 2.0, 88)) {
      CHECK(rc.a(z) == doctest::Approx(0.0));
      CHECK(rc.c(z) == doctest::Approx(2.0).epsilon(1e-14));
      CHECK(rc.b(z) == doctest::Approx(-2.0).epsilon(1e-14));
      CHECK(rc.b(z) == -rc.c(z));
    }
  }
  SUBCASE("general-K mode is rejected") {
    CHECK_THROWS_AS(
        coefficients_from_structure(StructuralFunction::from_expression("conj(z)")),
        mode_error);
  }
}

TEST_CASE("cbv_from_real arithmetic and the B = 0 collapse") {
  RealCoefficients rc{[](complex) { return 1.0; }, [](complex) { return 2.0; },
                      [](complex) { return 3.0; }, [](complex) { return 4.0; }};
  const CbvCoefficients cc = cbv_from_real(rc);
  CHECK(std::abs(cc.A(0.0) - 0.25 * complex(5, 1)) < 1e-15);
  CHECK(std::abs(cc.B(0.0) - 0.25 * complex(-3, 5)) < 1e-15);
  CHECK(cc.C(0.0) == complex(1, 0));

  // pipeline from kappa = c conj z: A = c, B = 0 identically, A = dkappa/dzbar
  const auto S = StructuralFunction::kappa_form("0.7*conj(z)");
  const CbvCoefficients pipe = cbv_from_real(coefficients_from_structure(S));
  for (complex z : testsup::disk_points(10, 2.0, 89)) {
    CHECK(pipe.B(z) == complex(0, 0));
    CHECK(std::abs(pipe.A(z) - 0.7) < 1e-14);
    CHECK(std::abs(pipe.A(z) - S.dK(z).d_zbar) < 1e-14);
  }
}

TEST_CASE("cbv_residual: holomorphic reduction and exponential witnesses") {
  const GridDomain disk = make_disk_grid({0, 0}, 1.0, 16, 16);
  const FieldFn zero = [](complex) { return complex(0, 0); };
  const CbvCoefficients cr{zero, zero, [](complex) { return complex(1, 0); }};
  CHECK(cbv_residual([](complex z) { return z * z * z; }, cr, disk).linf < 1e-9);

  for (double a : {1.0, 0.5}) {
    const CbvCoefficients cc{[a](complex) { return complex(a, 0); }, zero,
                             [](complex) { return complex(1, 0); }};
    const FieldFn w = [a](complex z) { return std::exp(-a * std::conj(z)); };
    CHECK(cbv_residual(w, cc, disk).linf <= 1e-8);
  }
}

TEST_CASE("exterior differential components") {
  const auto Sc = StructuralFunction::from_expression("5");
  const ComplexOneForm f1 = exterior_differential([](complex z) { return z; }, Sc, complex(0.3, 0.4));
  CHECK(std::abs(f1.c_z - 1.0) < 1e-11);
  CHECK(std::abs(f1.c_zbar) < 1e-11);

  const auto S = StructuralFunction::from_expression("conj(z)");
  const ComplexOneForm f2 =
      exterior_differential([](complex z) { return std::exp(-std::conj(z)); }, S,
                            complex(0.2, -0.6));
  CHECK(std::abs(f2.c_zbar) < 1e-8);

  // w == 1: Dw = dK, here (0, 1)
  const ComplexOneForm f3 =
      exterior_differential([](complex) { return complex(1, 0); }, S, complex(0.5, 0.1));
  CHECK(std::abs(f3.c_z) < 1e-12);
  CHECK(std::abs(f3.c_zbar - 1.0) < 1e-12);
}

TEST_CASE("D_x and D_y operators") {
  SUBCASE("kappa = 0 reduces to plain partials") {
    const auto S = StructuralFunction::kappa_form("0");
    const FieldFn w = expr::to_field(expr::parse("sin(z) + conj(z)^2"));
    for (complex z : testsup::disk_points(5, 1.5, 90)) {
      auto [dx, dy] = dx_dy_operators(w, S, z);
      const WirtingerPair d = d_wirtinger(w, z);
      CHECK(std::abs(dx - (d.d_z + d.d_zbar)) < 1e-12);
      CHECK(std::abs(dy - complex(0, 1) * (d.d_z - d.d_zbar)) < 1e-12);
    }
  }
  SUBCASE("kappa = c conj z shifts D_x by 2c") {
    const double c = 0.35;
    const auto S = StructuralFunction::kappa_form("0.35*conj(z)");
    const FieldFn w = expr::to_field(expr::parse("sin(z)"));
    for (complex z : testsup::disk_points(5, 1.5, 91)) {
      auto [dx, dy] = dx_dy_operators(w, S, z);
      const WirtingerPair d = d_wirtinger(w, z);
      CHECK(std::abs(dx - (d.d_z + d.d_zbar + 2.0 * c * std::sin(z))) < 1e-10);
      CHECK(std::abs(dy - (complex(0, 1) * (d.d_z - d.d_zbar))) < 1e-10);
    }
  }
  SUBCASE("operator split recovers D/dzbar for any kappa") {
    testsup::PointSampler rng(92);
    const std::vector<std::string> kappas = {"0.5*conj(z)", "i*conj(z)",
                                             "z*conj(z)", "0.25*z^2"};
    const auto& ws = testsup::corpus20();
    for (int trial = 0; trial < 50; ++trial) {
      const auto S = StructuralFunction::kappa_form(
          kappas[static_cast<std::size_t>(rng.uniform(0, kappas.size()))]);
      const FieldFn w = expr::to_field(
          expr::parse(ws[static_cast<std::size_t>(rng.uniform(0, ws.size()))]));
      const complex z = rng.in_disk(1.5);
      auto [dx, dy] = dx_dy_operators(w, S, z);
      const WirtingerPair d = d_structural(w, S, z);
      CHECK(std::abs(0.5 * (dx + complex(0, 1) * dy) - d.d_zbar) < 1e-8);
    }
  }
  SUBCASE("the conjugate split half matches D/dz only for real kappa") {
    // (D_x - i D_y)/2 carries conj(dkappa/dzbar), which equals dkappa/dz
    // exactly when Im(kappa) is constant
    testsup::PointSampler rng(94);
    for (const char* kappa : {"z*conj(z)", "0.5*(z + conj(z))", "abs2(z)"}) {
      const auto S = StructuralFunction::kappa_form(kappa);
      const FieldFn w = expr::to_field(expr::parse("exp(0.5*z)*conj(z)"));
      for (int trial = 0; trial < 5; ++trial) {
        const complex z = rng.in_disk(1.5);
        auto [dx, dy] = dx_dy_operators(w, S, z);
        const WirtingerPair d = d_structural(w, S, z);
        CHECK(std::abs(0.5 * (dx - complex(0, 1) * dy) - d.d_z) < 1e-8);
      }
    }
    // and visibly differs for kappa with nonconstant imaginary part
    const auto S = StructuralFunction::kappa_form("0.5*conj(z)");
    const FieldFn w = expr::to_field(expr::parse("exp(0.5*z)"));
    const complex z(0.4, -0.3);
    auto [dx, dy] = dx_dy_operators(w, S, z);
    const WirtingerPair d = d_structural(w, S, z);
    CHECK(std::abs(0.5 * (dx - complex(0, 1) * dy) - d.d_z) > 1e-3);
  }
  SUBCASE("general-K mode is rejected") {
    const auto S = StructuralFunction::from_expression("conj(z)");
    CHECK_THROWS_AS(dx_dy_operators([](complex z) { return z; }, S, 0.0), mode_error);
  }
}

TEST_CASE("d_structural is linear in w") {
  const auto S = StructuralFunction::from_expression("z*conj(z)");
  const FieldFn w1 = expr::to_field(expr::parse("exp(z)"));
  const FieldFn w2 = expr::to_field(expr::parse("sin(z)*conj(z)"));
  const complex lam(0.7, -1.2);
  const FieldFn combo = [&](complex z) { return w1(z) + lam * w2(z); };
  for (complex z : testsup::disk_points(10, 1.0, 93)) {
    const WirtingerPair a = d_structural(combo, S, z);
    const WirtingerPair b1 = d_structural(w1, S, z);
    const WirtingerPair b2 = d_structural(w2, S, z);
    CHECK(std::abs(a.d_zbar - (b1.d_zbar + lam * b2.d_zbar)) < 1e-9);
    CHECK(std::abs(a.d_z - (b1.d_z + lam * b2.d_z)) < 1e-9);
  }
}

TEST_CASE("K == 1 makes holo_residual bitwise equal to the plain CR residual") {
  const GridDomain disk = make_disk_grid({0, 0}, 1.0, 16, 16);
  const FieldFn w = expr::to_field(expr::parse("exp(z)*conj(z) + z^2"));
  const auto S = StructuralFunction::from_expression("1");
  const ResidualReport rep = holo_residual(w, S, disk);
  const auto [dz, dzbar] = d_wirtinger_field(w, disk);
  for (std::size_t k = 0; k < disk.cell_count(); ++k) {
    if (!rep.residual.is_valid(k)) continue;
    CHECK(rep.residual.values[k].real() == dzbar.values[k].real());
    CHECK(rep.residual.values[k].imag() == dzbar.values[k].imag());
  }
}

TEST_CASE("feeding K back in as the field reports (1 + K) K_zbar") {
  // for K = conj z the residual field is 1 + conj z; it vanishes only where
  // 1 + K does, so the sweep reports it without asserting anything
  const GridDomain g = make_rect_grid(-2, 0, -1, 1, 8, 8);
  const auto S = StructuralFunction::from_expression("conj(z)");
  const FieldFn w_as_k = [](complex z) { return std::conj(z); };
  const ResidualReport r = holo_residual(w_as_k, S, g);
  for (std::size_t k = 0; k < g.cell_count(); ++k) {
    const complex c = g.center(k);
    CHECK(std::abs(r.residual.values[k] - (1.0 + std::conj(c))) < 1e-9);
  }
}

TEST_CASE("degenerate kappa-form cells are flagged in the report") {
  const GridDomain g = make_rect_grid(0, 1, 0, 1, 4, 4);
  const FieldFn w = expr::to_field(expr::parse("z"));
  // 1 + kappa == 0 everywhere
  const ResidualReport all = holo_residual(w, StructuralFunction::kappa_form("-1"), g);
  const ResidualReport none = holo_residual(w, StructuralFunction::kappa_form("0"), g);
  auto param = [](const ResidualReport& r, const char* key) -> std::string {
    for (const auto& p : r.params)
      if (p.key == key) return p.value;
    return "<missing>";
  };
  CHECK(param(all, "degenerate_cells") == "16");
  CHECK(param(none, "degenerate_cells") == "0");
}

}  // TEST_SUITE
