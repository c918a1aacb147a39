#include "xigeo/drift.hpp"

#include <cmath>

#include "xigeo/grid.hpp"

namespace xigeo {

ScalarCalc drift_laplacian(const ImmersionGrid& m, const GeometryBundle& b,
                           const Field<1>& f) {
  if (!(f.spec == m.spec)) throw UsageError("drift_laplacian: field grid mismatch");
  const GridSpec& s = m.spec;
  const Field<1> fu = differentiate(f, Axis::U, 1);
  const Field<1> fv = differentiate(f, Axis::V, 1);
  const Field<1> fuu = differentiate(f, Axis::U, 2);
  const Field<1> fvv = differentiate(f, Axis::V, 2);
  const Field<1> fuv = differentiate(fu, Axis::V, 1);

  ScalarCalc out;
  out.f = f;
  out.grad_u = Field<1>(s);
  out.grad_v = Field<1>(s);
  out.laplacian = Field<1>(s);
  out.drift = Field<1>(s);
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      const double inv[2][2] = {{b.metric.inv11.at(p, q), b.metric.inv12.at(p, q)},
                                {b.metric.inv12.at(p, q), b.metric.inv22.at(p, q)}};
      const double df[2] = {fu.at(p, q), fv.at(p, q)};
      const double d2f[2][2] = {{fuu.at(p, q), fuv.at(p, q)},
                                {fuv.at(p, q), fvv.at(p, q)}};
      double lap = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double hess = d2f[i][j];
          for (int k = 0; k < 2; ++k)
            hess -= b.metric.gamma[k][sym2(i, j)].at(p, q) * df[k];
          lap += inv[i][j] * hess;
        }
      const double gu = inv[0][0] * df[0] + inv[0][1] * df[1];
      const double gv = inv[1][0] * df[0] + inv[1][1] * df[1];
      const double t[2] = {b.t1.at(p, q), b.t2.at(p, q)};
      const double xdotgrad = t[0] * gu + t[1] * gv;
      out.grad_u.at(p, q) = gu;
      out.grad_v.at(p, q) = gv;
      out.laplacian.at(p, q) = lap;
      out.drift.at(p, q) = lap - xdotgrad;
    }
  return out;
}

double weighted_integral(const Field<1>& f, const ImmersionGrid& m,
                         const GeometryBundle& b) {
  if (!(f.spec == m.spec)) throw UsageError("weighted_integral: field grid mismatch");
  Field<1> weighted(m.spec);
  for (int p = 0; p < m.spec.nu; ++p)
    for (int q = 0; q < m.spec.nv; ++q)
      weighted.at(p, q) = f.at(p, q) * std::exp(-0.5 * b.x2.at(p, q));
  return integrate(weighted, b.metric.area);
}

double ibp_residual(const Field<1>& u, const Field<1>& v, const ImmersionGrid& m,
                    const GeometryBundle& b) {
  const ScalarCalc cu = drift_laplacian(m, b, u);
  const ScalarCalc cv = drift_laplacian(m, b, v);
  const GridSpec& s = m.spec;
  Field<1> u_Lv(s), grads(s);
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      u_Lv.at(p, q) = u.at(p, q) * cv.drift.at(p, q);
      // <grad u, grad v> = u_{,i} g^{ij} v_{,j}; contract raised u with lowered v
      const double g[2][2] = {{b.metric.g11.at(p, q), b.metric.g12.at(p, q)},
                              {b.metric.g12.at(p, q), b.metric.g22.at(p, q)}};
      grads.at(p, q) = g[0][0] * cu.grad_u.at(p, q) * cv.grad_u.at(p, q) +
                       g[0][1] * (cu.grad_u.at(p, q) * cv.grad_v.at(p, q) +
                                  cu.grad_v.at(p, q) * cv.grad_u.at(p, q)) +
                       g[1][1] * cu.grad_v.at(p, q) * cv.grad_v.at(p, q);
    }
  const double lhs = weighted_integral(u_Lv, m, b);
  const double rhs = weighted_integral(grads, m, b);
  return std::abs(lhs + rhs) / (std::max(std::abs(lhs), std::abs(rhs)) + 1.0);
}

}  // namespace xigeo
