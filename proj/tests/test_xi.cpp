#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "common.hpp"
#include "xigeo/grid.hpp"
#include "xigeo/xi.hpp"

using namespace xigeo;
using xigeo::test::kPi;
using xigeo::test::torus_spec;

namespace {

ImmersionGrid ellipse_product(int n) {
  return make_product_curves(make_ellipse(1.0, 1.2, n), make_circle(1.0, n));
}

}  // namespace

TEST_CASE("position split on centered, translated and bent surfaces") {
  const ImmersionGrid m = make_product_torus(1.0, 2.0, torus_spec(24, 24));
  const GeometryBundle b = build_geometry(m);
  const SplitPosition sp = split_position(m, b);
  double top = 0.0, recon = 0.0;
  for (int p = 0; p < 24; ++p)
    for (int q = 0; q < 24; ++q) {
      top = std::max(top, sp.x_top.vec4(p, q).norm());
      recon = std::max(recon, (sp.x_top.vec4(p, q) + sp.x_perp.vec4(p, q) -
                               m.x.vec4(p, q))
                                  .norm());
    }
  CHECK(top <= 1e-10);
  CHECK(recon <= 1e-12);

  // translation moves exactly the tangential projection of the offset
  const Vec4 c(0.3, -0.2, 0.1, 0.4);
  const ImmersionGrid moved =
      test::transform_surface(m, Eigen::Matrix4d::Identity(), c);
  const GeometryBundle bm = build_geometry(moved);
  double worst = 0.0;
  for (int p = 0; p < 24; ++p)
    for (int q = 0; q < 24; ++q) {
      const GeomPt pt = bm.point(p, q);
      const Vec2 cc = pt.tangential_coords(c);
      const Vec4 expected = cc[0] * pt.xd[0] + cc[1] * pt.xd[1];
      worst = std::max(worst, (pt.xtop - expected).norm());
      worst = std::max(worst, (pt.xperp - (pt.x - expected)).norm());
    }
  CHECK(worst <= 1e-10);

  const GeometryBundle be = build_geometry(ellipse_product(48));
  double bent = 0.0;
  for (const double v : split_position(ellipse_product(48), be).xtop2.values)
    bent = std::max(bent, v);
  CHECK(std::sqrt(bent) > 0.01);
}

TEST_CASE("xi estimate on product tori") {
  const double a = 1.0, b = 2.0;
  const ImmersionGrid m = make_product_torus(a, b, torus_spec(32, 32));
  const GeometryBundle g = build_geometry(m);
  const XiEstimate e = xi_estimate(m, g);
  CHECK(e.is_xi);
  CHECK(e.parallel_residual <= 1e-9);
  CHECK(e.tangency_residual <= 1e-10);
  REQUIRE(e.has_coefficients);
  CHECK(e.coeff1 == doctest::Approx(1 / a - a).epsilon(1e-9));
  CHECK(e.coeff2 == doctest::Approx(1 / b - b).epsilon(1e-9));
  CHECK(e.coeff_spread <= 1e-9);
  const double xi2 = std::pow(1 / a - a, 2) + std::pow(1 / b - b, 2);
  for (int p = 0; p < 32; ++p)
    for (int q = 0; q < 32; ++q)
      CHECK(e.xi_hat.vec4(p, q).squaredNorm() == doctest::Approx(xi2).epsilon(1e-9));
}

TEST_CASE("clifford torus is a self-shrinker") {
  const ImmersionGrid m = make_product_torus(1, 1, torus_spec(32, 32));
  const GeometryBundle g = build_geometry(m);
  const XiEstimate e = xi_estimate(m, g);
  double sup = 0.0;
  for (int p = 0; p < 32; ++p)
    for (int q = 0; q < 32; ++q) sup = std::max(sup, e.xi_hat.vec4(p, q).norm());
  CHECK(sup <= 1e-9);
  CHECK(e.is_xi);
}

TEST_CASE("ellipse products are detected as non-xi") {
  const ImmersionGrid m = ellipse_product(48);
  const GeometryBundle g = build_geometry(m);
  const XiEstimate e = xi_estimate(m, g);
  CHECK(!e.is_xi);
  CHECK(e.parallel_residual > 1e-2);
}

TEST_CASE("xi estimate refuses non-Lagrangian surfaces") {
  const GridSpec s = torus_spec(16, 16);
  ImmersionGrid m;
  m.spec = s;
  m.provenance = "graph-test";
  m.x = make_vec4_field(s, [&](int p, int q) {
    return Vec4(std::cos(s.u(p)), std::cos(s.v(q)), std::sin(s.u(p)), std::sin(s.v(q)));
  });
  const GeometryBundle g = build_geometry(m);
  CHECK_THROWS_AS(xi_estimate(m, g), PreconditionError);
}

TEST_CASE("pinching report on the product family") {
  {
    const ImmersionGrid m = make_product_torus(1.0, 2.0, torus_spec(32, 32));
    const GeometryBundle g = build_geometry(m);
    const XiEstimate e = xi_estimate(m, g);
    const PinchingReport pr = pinching_report(m, g, e);
    CHECK(!pr.advisory);
    CHECK(std::abs(pr.P_min) <= 1e-9);
    CHECK(std::abs(pr.P_max) <= 1e-9);
    CHECK(pr.margin[0] == doctest::Approx(1.25 - 2).epsilon(1e-9));
    CHECK(pr.margin[1] == doctest::Approx(1.25 - 2).epsilon(1e-9));
    CHECK(pr.margin[2] == doctest::Approx(1.25 - 2).epsilon(1e-9));
    CHECK(pr.margin[3] == doctest::Approx(-0.75).epsilon(1e-9));
    for (bool c : pr.condition) CHECK(!c);
    CHECK(pr.Hxi_const_residual <= 1e-8);
  }
  {
    const double r = 1.0 / std::sqrt(2.0);
    const ImmersionGrid m = make_product_torus(r, r, torus_spec(32, 32));
    const GeometryBundle g = build_geometry(m);
    const XiEstimate e = xi_estimate(m, g);
    const PinchingReport pr = pinching_report(m, g, e);
    CHECK(pr.margin[0] == doctest::Approx(2.0).epsilon(1e-9));   // |h|^2 = 4
    CHECK(pr.margin[3] == doctest::Approx(2.0).epsilon(1e-9));   // <H, xi> = 2
    for (bool c : pr.condition) CHECK(c);
  }
  {
    const ImmersionGrid m = make_product_torus(1.0, 1.0, torus_spec(32, 32));
    const GeometryBundle g = build_geometry(m);
    const XiEstimate e = xi_estimate(m, g);
    const PinchingReport pr = pinching_report(m, g, e);
    CHECK(std::abs(pr.margin[3]) <= 1e-10);  // zero margin at the self-shrinker
    CHECK(pr.condition[3]);
  }
}

TEST_CASE("equality case holds across random radii") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> radius(0.3, 3.0);
  for (int k = 0; k < 5; ++k) {
    const double a = radius(rng), b = radius(rng);
    const ImmersionGrid m = make_product_torus(a, b, torus_spec(64, 64));
    const GeometryBundle g = build_geometry(m);
    const XiEstimate e = xi_estimate(m, g);
    const PinchingReport pr = pinching_report(m, g, e);
    CHECK(std::max(std::abs(pr.P_min), std::abs(pr.P_max)) <= 1e-8);
  }
}

TEST_CASE("condition four tracks the radius region a^2+b^2 >= 2a^2b^2") {
  for (int ia = 0; ia < 8; ++ia)
    for (int ib = 0; ib < 8; ++ib) {
      const double a = 0.3 + 2.7 * ia / 7.0, b = 0.3 + 2.7 * ib / 7.0;
      const ImmersionGrid m = make_product_torus(a, b, torus_spec(16, 16));
      const GeometryBundle g = build_geometry(m);
      const XiEstimate e = xi_estimate(m, g);
      const PinchingReport pr = pinching_report(m, g, e);
      if (std::abs(pr.margin[3]) > 1e-6) {
        const bool region = a * a + b * b >= 2 * a * a * b * b;
        CHECK(pr.condition[3] == region);
        CHECK(pr.condition[0] == region);  // |h|^2 >= 2 is the same locus
      }
    }
}

TEST_CASE("identity battery vanishes on product tori") {
  const ImmersionGrid m = make_product_torus(1.0, 2.0, torus_spec(32, 32));
  const GeometryBundle g = build_geometry(m);
  const XiEstimate e = xi_estimate(m, g);
  const MaslovData md = maslov(m, g);
  for (IdentityId id : all_identities())
    CHECK(verify_identity(id, m, g, &e, &md) <= 1e-9);
}

TEST_CASE("xi-only identities refuse non-xi surfaces by name") {
  const ImmersionGrid m = ellipse_product(48);
  const GeometryBundle g = build_geometry(m);
  const XiEstimate e = xi_estimate(m, g);
  CHECK(!e.is_xi);
  CHECK_THROWS_WITH_AS(verify_identity(IdentityId::Lem32, m, g, &e),
                       doctest::Contains("parallelism"), PreconditionError);
  // general Lagrangian identities still run
  CHECK(verify_identity(IdentityId::Thm21, m, g) <= 1e-6);
  CHECK(verify_identity(IdentityId::Gauss, m, g) <= 1e-6);
}

TEST_CASE("global checks on the product family") {
  const double a = 0.9, b = 1.7;
  const ImmersionGrid m = make_product_torus(a, b, torus_spec(32, 32));
  const GeometryBundle g = build_geometry(m);
  const MaslovData md = maslov(m, g);
  const GlobalChecks gc = global_checks(m, g, &md);
  CHECK(std::abs(gc.gauss_bonnet_integral) <= 1e-8 * gc.area);
  CHECK(gc.genus == 1);
  CHECK(gc.genus_distance <= 1e-9);
  CHECK(gc.balance_residual <= 1e-8);
  CHECK(gc.maslov_nontrivial);

  // both balance integrals equal 4 pi^2 a b (a^2 + b^2)
  Field<1> hmx2(m.spec);
  for (int p = 0; p < 32; ++p)
    for (int q = 0; q < 32; ++q) hmx2.at(p, q) = g.x_perp.vec4(p, q).squaredNorm();
  const double i1 = integrate(hmx2, g.metric.area);
  CHECK(i1 == doctest::Approx(4 * kPi * kPi * a * b * (a * a + b * b)).epsilon(1e-10));
}

TEST_CASE("product fit recovers the radii") {
  const ImmersionGrid m = make_product_torus(1.0, 2.0, torus_spec(32, 32));
  const GeometryBundle g = build_geometry(m);
  const XiEstimate e = xi_estimate(m, g);
  const TorusFit fit = fit_product_torus(g, e);
  REQUIRE(fit.ok);
  CHECK(fit.a == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.b == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fit.match_residual <= 1e-9);
}

TEST_CASE("certification accepts honest products and rejects corrupted ones") {
  const CertifiedProduct cp = product_xi(make_circle(1.0, 32), circle_lambda(1.0),
                                         make_circle(2.0, 32), circle_lambda(2.0));
  const CertificationCheck ok = check_certification(cp);
  CHECK(ok.ok);
  CHECK(ok.xi_sup_diff <= 1e-9);

  CertifiedProduct bad = cp;
  for (int p = 0; p < 32; ++p)
    for (int q = 0; q < 32; ++q) {
      Vec4 v = bad.xi.vec4(p, q);
      v[0] += 1e-3;  // corrupt the certificate coefficients
      bad.xi.set_vec4(p, q, v);
    }
  const CertificationCheck rejected = check_certification(bad);
  CHECK(!rejected.ok);
  CHECK(rejected.xi_sup_diff >= 1e-4);
}

TEST_CASE("identity battery passes on a non-circular certified product") {
  const LambdaShoot shot = shoot_closed(0.0, Rotation{2, 3}, 0.2, 0.9, 1e-3, 128);
  if (!shot.found) return;  // best-effort example; circles cover the battery
  const CertifiedProduct cp =
      product_xi(shot.curve, 0.0, make_circle(1.0, 128), circle_lambda(1.0));
  const GeometryBundle g = build_geometry(cp.surface);
  const XiEstimate e = xi_estimate(cp.surface, g);
  REQUIRE(e.is_xi);
  const MaslovData md = maslov(cp.surface, g);
  for (IdentityId id : all_identities())
    CHECK(verify_identity(id, cp.surface, g, &e, &md) <= 1e-6);

  // the bent factor makes |h|^2 genuinely non-constant
  double lo = g.h2.values[0], hi = lo;
  for (double v : g.h2.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi - lo > 1e-3);
}
