#include "xigeo/surfaces.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "xigeo/grid.hpp"

namespace xigeo {

namespace {
constexpr double kPi = std::numbers::pi;

void require_closed(const PlaneCurve& c, const char* who) {
  if (!c.closed || c.closure_gap > 1e-6) {
    std::ostringstream os;
    os << who << ": factor curve is not closed (gap " << c.closure_gap << ")";
    throw UsageError(os.str());
  }
}
}  // namespace

ImmersionGrid make_product_torus(double a, double b, const GridSpec& spec) {
  if (!(a > 0.0) || !(b > 0.0))
    throw UsageError("make_product_torus: radii must be positive");
  if (std::abs(spec.period_u - 2.0 * kPi) > 1e-12 || std::abs(spec.period_v - 2.0 * kPi) > 1e-12)
    throw UsageError("make_product_torus: periods must be (2*pi, 2*pi)");
  ImmersionGrid m;
  m.spec = spec;
  std::ostringstream tag;
  tag << "product-torus(a=" << a << ",b=" << b << ")";
  m.provenance = tag.str();
  m.x = make_vec4_field(spec, [&](int p, int q) {
    const double u = spec.u(p), v = spec.v(q);
    return Vec4(a * std::cos(u), a * std::sin(u), b * std::cos(v), b * std::sin(v));
  });
  return m;
}

ImmersionGrid make_product_curves(const PlaneCurve& c1, const PlaneCurve& c2) {
  require_closed(c1, "make_product_curves");
  require_closed(c2, "make_product_curves");
  ImmersionGrid m;
  m.spec = GridSpec(c1.n, c2.n, c1.length, c2.length);
  m.provenance = "product-curves";
  m.x = make_vec4_field(m.spec, [&](int p, int q) {
    return Vec4(c1.gamma[p][0], c1.gamma[p][1], c2.gamma[q][0], c2.gamma[q][1]);
  });
  return m;
}

ImmersionGrid make_equivariant(const PlaneCurve& c, const GridSpec& spec) {
  require_closed(c, "make_equivariant");
  for (int i = 0; i < c.n; ++i)
    if (c.gamma[i].norm() < 1e-6)
      throw UsageError("make_equivariant: curve passes through the origin");
  if (spec.nu != c.n)
    throw UsageError("make_equivariant: spec.nu must match the curve sample count");
  if (std::abs(spec.period_u - c.length) > 1e-9 * (1.0 + c.length))
    throw UsageError("make_equivariant: spec.period_u must equal the curve length");
  if (std::abs(spec.period_v - 2.0 * kPi) > 1e-12)
    throw UsageError("make_equivariant: spec.period_v must be 2*pi");
  ImmersionGrid m;
  m.spec = spec;
  m.provenance = "equivariant";
  m.x = make_vec4_field(spec, [&](int p, int q) {
    const double v = spec.v(q);
    const double cx = c.gamma[p][0], cy = c.gamma[p][1];
    return Vec4(cx * std::cos(v), cy * std::cos(v), cx * std::sin(v), cy * std::sin(v));
  });
  return m;
}

double lagrangian_residual(const ImmersionGrid& m) {
  const Field<4> xu = differentiate(m.x, Axis::U, 1);
  const Field<4> xv = differentiate(m.x, Axis::V, 1);
  double worst = 0.0;
  for (int p = 0; p < m.spec.nu; ++p)
    for (int q = 0; q < m.spec.nv; ++q) {
      const Vec4 a = xu.vec4(p, q), b = xv.vec4(p, q);
      const double na = a.norm(), nb = b.norm();
      if (na < 1e-14 || nb < 1e-14) {
        std::ostringstream os;
        os << "lagrangian_residual: vanishing coordinate tangent at grid index (" << p << ","
           << q << ")";
        throw NumericError(os.str());
      }
      worst = std::max(worst, std::abs(symplectic(a, b)) / (na * nb));
    }
  return worst;
}

CertifiedProduct product_xi(const PlaneCurve& c1, double lambda1, const PlaneCurve& c2,
                            double lambda2) {
  require_closed(c1, "product_xi");
  require_closed(c2, "product_xi");
  const double r1 = lambda_curve_residual(c1, lambda1);
  const double r2 = lambda_curve_residual(c2, lambda2);
  if (std::max(r1, r2) > 1e-6) {
    std::ostringstream os;
    os << "product_xi: factor is not a lambda-curve (equation residuals " << r1 << ", " << r2
       << ")";
    throw UsageError(os.str());
  }
  CertifiedProduct out{make_product_curves(c1, c2), Field<4>(), std::max(r1, r2)};
  out.surface.provenance = "product-xi";
  out.xi = make_vec4_field(out.surface.spec, [&](int p, int q) {
    const Vec2 n1 = lambda1 * plane_J(c1.tangent[p]);
    const Vec2 n2 = lambda2 * plane_J(c2.tangent[q]);
    return Vec4(n1[0], n1[1], n2[0], n2[1]);
  });
  return out;
}

}  // namespace xigeo
