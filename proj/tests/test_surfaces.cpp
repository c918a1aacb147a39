#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "xigeo/geometry.hpp"
#include "xigeo/grid.hpp"

using namespace xigeo;
using xigeo::test::kPi;
using xigeo::test::torus_spec;

TEST_CASE("product torus position norms") {
  const ImmersionGrid clifford = make_product_torus(1, 1, torus_spec(16, 16));
  for (int p = 0; p < 16; ++p)
    for (int q = 0; q < 16; ++q)
      CHECK(clifford.x.vec4(p, q).squaredNorm() == doctest::Approx(2.0).epsilon(1e-14));

  const ImmersionGrid m = make_product_torus(1, 2, torus_spec(16, 16));
  for (int p = 0; p < 16; ++p)
    for (int q = 0; q < 16; ++q)
      CHECK(m.x.vec4(p, q).squaredNorm() == doctest::Approx(5.0).epsilon(1e-14));

  CHECK_THROWS_AS(make_product_torus(-1, 1, torus_spec(16, 16)), UsageError);
}

TEST_CASE("lagrangian residual on exact families") {
  CHECK(lagrangian_residual(make_product_torus(0.7, 1.9, torus_spec(24, 24))) <= 1e-12);

  const ImmersionGrid prod =
      make_product_curves(make_ellipse(1.0, 1.2, 32), make_circle(1.0, 32));
  CHECK(lagrangian_residual(prod) <= 1e-10);

  const PlaneCurve c = make_ellipse(1.0, 1.3, 48);
  const ImmersionGrid eq = make_equivariant(c, GridSpec(c.n, 16, c.length, 2 * kPi));
  CHECK(lagrangian_residual(eq) <= 1e-12);
}

TEST_CASE("a deliberately non-Lagrangian immersion scores residual one") {
  // x(u,v) = (cos u + i cos v, sin u + i sin v); omega(x_u, x_v) = cos(u - v)
  const GridSpec s = torus_spec(32, 32);
  ImmersionGrid m;
  m.spec = s;
  m.provenance = "graph-test";
  m.x = make_vec4_field(s, [&](int p, int q) {
    return Vec4(std::cos(s.u(p)), std::cos(s.v(q)), std::sin(s.u(p)), std::sin(s.v(q)));
  });
  CHECK(lagrangian_residual(m) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two circle pipelines produce the same invariant fields") {
  const double a = 0.9, b = 1.6;
  const ImmersionGrid direct = make_product_torus(a, b, torus_spec(32, 32));
  const ImmersionGrid via_curves =
      make_product_curves(make_circle(a, 32), make_circle(b, 32));
  const GeometryBundle bd = build_geometry(direct);
  const GeometryBundle bc = build_geometry(via_curves);
  double worst = 0.0;
  for (int p = 0; p < 32; ++p)
    for (int q = 0; q < 32; ++q) {
      worst = std::max(worst, std::abs(bd.h2.at(p, q) - bc.h2.at(p, q)));
      worst = std::max(worst, std::abs(bd.H2.at(p, q) - bc.H2.at(p, q)));
      worst = std::max(worst, std::abs(bd.K_intr.at(p, q) - bc.K_intr.at(p, q)));
    }
  CHECK(worst <= 1e-10);
}

TEST_CASE("circle products have |h|^2 = 1/a^2 + 1/b^2") {
  const double a = 0.8, b = 1.7;
  const ImmersionGrid m = make_product_curves(make_circle(a, 32), make_circle(b, 32));
  const GeometryBundle g = build_geometry(m);
  for (int p = 0; p < 32; ++p)
    for (int q = 0; q < 32; ++q)
      CHECK(g.h2.at(p, q) ==
            doctest::Approx(1 / (a * a) + 1 / (b * b)).epsilon(1e-10));
}

TEST_CASE("equivariant circle metric is diag(1, rho^2) and flat") {
  const double rho = 1.4;
  const PlaneCurve c = make_circle(rho, 32);
  const ImmersionGrid m = make_equivariant(c, GridSpec(32, 16, c.length, 2 * kPi));
  const MetricField g = metric_and_connection(m);
  double worst = 0.0;
  for (int p = 0; p < 32; ++p)
    for (int q = 0; q < 16; ++q) {
      worst = std::max(worst, std::abs(g.g11.at(p, q) - 1.0));
      worst = std::max(worst, std::abs(g.g12.at(p, q)));
      worst = std::max(worst, std::abs(g.g22.at(p, q) - rho * rho));
    }
  CHECK(worst <= 1e-12);
  const GeometryBundle b = second_fundamental(m, g);
  CHECK(b.K_intr.max_abs() <= 1e-10);
}

TEST_CASE("equivariant family has g_12 identically zero") {
  const PlaneCurve c = make_ellipse(1.0, 1.4, 48);
  const ImmersionGrid m = make_equivariant(c, GridSpec(c.n, 16, c.length, 2 * kPi));
  const MetricField g = metric_and_connection(m);
  CHECK(g.g12.max_abs() <= 1e-12);
}

TEST_CASE("degenerate constructions are refused") {
  // open curve: a spiral arc does not close
  const PlaneCurve open_arc = integrate_lambda_curve(0.4, Vec2(1.5, 0), Vec2(0, 1), 3.0, 1e-3);
  CHECK_THROWS_AS(make_product_curves(open_arc, make_circle(1.0, 32)), UsageError);

  // curve through the origin
  PlaneCurve through = make_circle(1.0, 32);
  for (auto& g : through.gamma) g -= Vec2(1.0, 0.0);
  CHECK_THROWS_AS(make_equivariant(through, GridSpec(32, 16, through.length, 2 * kPi)),
                  UsageError);
}

TEST_CASE("lagrangian residual is unitary invariant") {
  const ImmersionGrid m =
      make_product_curves(make_ellipse(1.0, 1.2, 32), make_circle(1.0, 32));
  const double base = lagrangian_residual(m);
  for (unsigned seed : {7u, 19u}) {
    const ImmersionGrid moved = test::transform_surface(m, test::random_unitary(seed));
    CHECK(std::abs(lagrangian_residual(moved) - base) <= 1e-12);
  }
}

TEST_CASE("grid-origin shifts at matched points leave surface scalars unchanged") {
  auto shifted_curve = [](const PlaneCurve& c, int k) {
    PlaneCurve out = c;
    std::rotate(out.gamma.begin(), out.gamma.begin() + k, out.gamma.end());
    std::rotate(out.tangent.begin(), out.tangent.begin() + k, out.tangent.end());
    std::rotate(out.curvature.begin(), out.curvature.begin() + k, out.curvature.end());
    return out;
  };
  const PlaneCurve e = make_ellipse(1.0, 1.2, 32), k = make_circle(1.0, 32);
  const ImmersionGrid base = make_product_curves(e, k);
  const ImmersionGrid moved = make_product_curves(shifted_curve(e, 5), shifted_curve(k, 11));

  const GeometryBundle b0 = build_geometry(base);
  const GeometryBundle b1 = build_geometry(moved);
  Field<1> ones(base.spec);
  for (double& v : ones.values) v = 1.0;
  CHECK(std::abs(integrate(ones, b0.metric.area) - integrate(ones, b1.metric.area)) <= 1e-10);
  CHECK(std::abs(lagrangian_residual(base) - lagrangian_residual(moved)) <= 1e-10);
  auto extrema = [](const Field<1>& f) {
    auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
    return std::pair<double, double>(*lo, *hi);
  };
  CHECK(std::abs(extrema(b0.h2).first - extrema(b1.h2).first) <= 1e-10);
  CHECK(std::abs(extrema(b0.h2).second - extrema(b1.h2).second) <= 1e-10);
}

TEST_CASE("certified circle product matches the direct torus with its xi field") {
  const double a = 1.0, b = 2.0;
  const CertifiedProduct cp = product_xi(make_circle(a, 32), circle_lambda(a),
                                         make_circle(b, 32), circle_lambda(b));
  const ImmersionGrid direct = make_product_torus(a, b, torus_spec(32, 32));
  double gap = 0.0;
  for (int p = 0; p < 32; ++p)
    for (int q = 0; q < 32; ++q)
      gap = std::max(gap, (cp.surface.x.vec4(p, q) - direct.x.vec4(p, q)).norm());
  CHECK(gap <= 1e-12);

  // xi = (1/a - a) J e1 + (1/b - b) J e2 for centered circles
  double xig = 0.0;
  for (int p = 0; p < 32; ++p)
    for (int q = 0; q < 32; ++q) {
      const double u = cp.surface.spec.u(p) / a, v = cp.surface.spec.v(q) / b;
      const Vec4 expected((a - 1 / a) * std::cos(u), (a - 1 / a) * std::sin(u),
                          (b - 1 / b) * std::cos(v), (b - 1 / b) * std::sin(v));
      xig = std::max(xig, (cp.xi.vec4(p, q) - expected).norm());
    }
  CHECK(xig <= 1e-12);

  // a non-lambda factor is refused
  CHECK_THROWS_AS(product_xi(make_ellipse(1.0, 1.2, 32), 0.0, make_circle(1.0, 32), 0.0),
                  UsageError);
}
