#include "xigeo/geometry.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "xigeo/grid.hpp"

namespace xigeo {

namespace {

constexpr double kPi = std::numbers::pi;

using Cplx = std::complex<double>;

Cplx z1(const Vec4& w) { return {w[0], w[1]}; }
Cplx z2(const Vec4& w) { return {w[2], w[3]}; }

// Holomorphic volume form dz1 ^ dz2 on a pair of ambient vectors.
Cplx holomorphic_volume(const Vec4& a, const Vec4& b) {
  return z1(a) * z2(b) - z2(a) * z1(b);
}

}  // namespace

GeomPt GeometryBundle::point(int p, int q) const {
  GeomPt pt;
  const MetricField& mf = metric;
  pt.g[0][0] = mf.g11.at(p, q);
  pt.g[0][1] = pt.g[1][0] = mf.g12.at(p, q);
  pt.g[1][1] = mf.g22.at(p, q);
  pt.inv[0][0] = mf.inv11.at(p, q);
  pt.inv[0][1] = pt.inv[1][0] = mf.inv12.at(p, q);
  pt.inv[1][1] = mf.inv22.at(p, q);
  pt.detg = mf.detg.at(p, q);
  pt.area = mf.area.at(p, q);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) pt.Gm[k][i][j] = mf.gamma[k][sym2(i, j)].at(p, q);
  pt.x = x.vec4(p, q);
  pt.xd[0] = xu.vec4(p, q);
  pt.xd[1] = xv.vec4(p, q);
  pt.xdd[0][0] = xuu.vec4(p, q);
  pt.xdd[0][1] = pt.xdd[1][0] = xuv.vec4(p, q);
  pt.xdd[1][1] = xvv.vec4(p, q);
  pt.h[0][0] = h[0].vec4(p, q);
  pt.h[0][1] = pt.h[1][0] = h[1].vec4(p, q);
  pt.h[1][1] = h[2].vec4(p, q);
  pt.H = H.vec4(p, q);
  pt.xtop = x_top.vec4(p, q);
  pt.xperp = x_perp.vec4(p, q);
  pt.e[0] = e1.vec4(p, q);
  pt.e[1] = e2.vec4(p, q);
  pt.t[0] = t1.at(p, q);
  pt.t[1] = t2.at(p, q);
  for (int c = 0; c < 4; ++c) pt.C4[c] = cubic[c].at(p, q);
  pt.h2 = h2.at(p, q);
  pt.H2 = H2.at(p, q);
  pt.Kg = K_gauss.at(p, q);
  pt.Ki = K_intr.at(p, q);
  pt.has_derivatives = has_derivatives;
  if (has_derivatives) {
    for (int d = 0; d < 2; ++d)
      for (int c = 0; c < 4; ++c) pt.dC[d][c] = gradC[d][c].at(p, q);
    for (int e = 0; e < 2; ++e)
      for (int d = 0; d < 2; ++d)
        for (int c = 0; c < 4; ++c) pt.ddC[e][d][c] = hessC[e][d][c].at(p, q);
    for (int d = 0; d < 2; ++d) pt.dHperp[d] = gradHperp[d].vec4(p, q);
    pt.nh2 = norm2_grad_h.at(p, q);
    pt.nHp2 = norm2_grad_Hperp.at(p, q);
    for (int a = 0; a < 2; ++a) {
      pt.Hh[a] = Hhat[a].at(p, q);
      for (int i = 0; i < 2; ++i) {
        pt.Hh_d[a][i] = Hhat_d[a][i].at(p, q);
        for (int j = 0; j < 2; ++j) pt.Hh_dd[a][i][j] = Hhat_dd[a][i][j].at(p, q);
      }
    }
  }
  return pt;
}

MetricField metric_and_connection(const ImmersionGrid& m) {
  const GridSpec& s = m.spec;
  MetricField mf;
  const Field<4> xu = differentiate(m.x, Axis::U, 1);
  const Field<4> xv = differentiate(m.x, Axis::V, 1);
  mf.g11 = Field<1>(s);
  mf.g12 = Field<1>(s);
  mf.g22 = Field<1>(s);
  mf.detg = Field<1>(s);
  mf.inv11 = Field<1>(s);
  mf.inv12 = Field<1>(s);
  mf.inv22 = Field<1>(s);
  mf.area = Field<1>(s);
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      const Vec4 a = xu.vec4(p, q), b = xv.vec4(p, q);
      const double e = a.dot(a), f = a.dot(b), g = b.dot(b);
      const double det = e * g - f * f;
      if (!(det >= 1e-12)) {
        std::ostringstream os;
        os << "metric_and_connection: degenerate metric, det g = " << det
           << " at grid index (" << p << "," << q << ")";
        throw NumericError(os.str());
      }
      mf.g11.at(p, q) = e;
      mf.g12.at(p, q) = f;
      mf.g22.at(p, q) = g;
      mf.detg.at(p, q) = det;
      mf.inv11.at(p, q) = g / det;
      mf.inv12.at(p, q) = -f / det;
      mf.inv22.at(p, q) = e / det;
      mf.area.at(p, q) = std::sqrt(det);
    }

  const Field<1>* comps[3] = {&mf.g11, &mf.g12, &mf.g22};
  for (int c = 0; c < 3; ++c) {
    mf.dg[c][0] = differentiate(*comps[c], Axis::U, 1);
    mf.dg[c][1] = differentiate(*comps[c], Axis::V, 1);
  }

  for (int k = 0; k < 2; ++k)
    for (int ij = 0; ij < 3; ++ij) mf.gamma[k][ij] = Field<1>(s);

  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      // Christoffels of the first kind from metric derivatives
      auto d = [&](int comp, int axis) { return mf.dg[comp][axis].at(p, q); };
      double lower[2][3];
      lower[0][sym2(0, 0)] = 0.5 * d(0, 0);
      lower[0][sym2(0, 1)] = 0.5 * d(0, 1);
      lower[0][sym2(1, 1)] = d(1, 1) - 0.5 * d(2, 0);
      lower[1][sym2(0, 0)] = d(1, 0) - 0.5 * d(0, 1);
      lower[1][sym2(0, 1)] = 0.5 * d(2, 0);
      lower[1][sym2(1, 1)] = 0.5 * d(2, 1);
      const double inv[2][2] = {{mf.inv11.at(p, q), mf.inv12.at(p, q)},
                                {mf.inv12.at(p, q), mf.inv22.at(p, q)}};
      for (int k = 0; k < 2; ++k)
        for (int ij = 0; ij < 3; ++ij)
          mf.gamma[k][ij].at(p, q) = inv[k][0] * lower[0][ij] + inv[k][1] * lower[1][ij];
    }
  return mf;
}

GeometryBundle second_fundamental(const ImmersionGrid& m, const MetricField& g) {
  const GridSpec& s = m.spec;
  GeometryBundle b;
  b.spec = s;
  b.metric = g;
  b.x = m.x;
  b.xu = differentiate(m.x, Axis::U, 1);
  b.xv = differentiate(m.x, Axis::V, 1);
  b.xuu = differentiate(m.x, Axis::U, 2);
  b.xvv = differentiate(m.x, Axis::V, 2);
  b.xuv = differentiate(b.xu, Axis::V, 1);
  b.lagrangian = lagrangian_residual(m);

  for (auto& f : b.h) f = Field<4>(s);
  b.H = Field<4>(s);
  for (auto& f : b.cubic) f = Field<1>(s);
  b.h2 = Field<1>(s);
  b.H2 = Field<1>(s);
  b.K_gauss = Field<1>(s);
  b.K_intr = Field<1>(s);
  b.R = Field<1>(s);
  b.t1 = Field<1>(s);
  b.t2 = Field<1>(s);
  b.x2 = Field<1>(s);
  b.x_top = Field<4>(s);
  b.x_perp = Field<4>(s);
  b.e1 = Field<4>(s);
  b.e2 = Field<4>(s);

  double asym = 0.0, cmax = 0.0;
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      const Vec4 xu = b.xu.vec4(p, q), xv = b.xv.vec4(p, q);
      const Vec4 xd[2] = {xu, xv};
      const double inv[2][2] = {{g.inv11.at(p, q), g.inv12.at(p, q)},
                                {g.inv12.at(p, q), g.inv22.at(p, q)}};
      auto project_normal = [&](Vec4 w) {
        const double a = w.dot(xu), c = w.dot(xv);
        const double cu = inv[0][0] * a + inv[0][1] * c;
        const double cv = inv[1][0] * a + inv[1][1] * c;
        return Vec4(w - cu * xu - cv * xv);
      };

      const Vec4 xdd[3] = {b.xuu.vec4(p, q), b.xuv.vec4(p, q), b.xvv.vec4(p, q)};
      Vec4 hij[3];
      const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
      for (int c = 0; c < 3; ++c) {
        const int i = pairs[c][0], j = pairs[c][1];
        Vec4 w = xdd[c];
        for (int k = 0; k < 2; ++k) w -= g.gamma[k][sym2(i, j)].at(p, q) * xd[k];
        hij[c] = project_normal(w);
        b.h[c].set_vec4(p, q, hij[c]);
      }

      // raw cubic projections and their symmetrization
      const Vec4 jxu = ambient_J(xu), jxv = ambient_J(xv);
      const double craw[3][2] = {{hij[0].dot(jxu), hij[0].dot(jxv)},
                                 {hij[1].dot(jxu), hij[1].dot(jxv)},
                                 {hij[2].dot(jxu), hij[2].dot(jxv)}};
      for (int c = 0; c < 3; ++c)
        for (int l = 0; l < 2; ++l) cmax = std::max(cmax, std::abs(craw[c][l]));
      asym = std::max(asym, std::abs(craw[0][1] - craw[1][0]));
      asym = std::max(asym, std::abs(craw[2][0] - craw[1][1]));
      double c4[4];
      c4[0] = craw[0][0];
      c4[1] = (craw[0][1] + 2.0 * craw[1][0]) / 3.0;
      c4[2] = (craw[2][0] + 2.0 * craw[1][1]) / 3.0;
      c4[3] = craw[2][1];
      for (int c = 0; c < 4; ++c) b.cubic[c].at(p, q) = c4[c];

      const Vec4 H = inv[0][0] * hij[0] + 2.0 * inv[0][1] * hij[1] + inv[1][1] * hij[2];
      b.H.set_vec4(p, q, H);

      auto C3 = [&](int i, int j, int l) { return c4[i + j + l]; };
      double h2 = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int mm = 0; mm < 2; ++mm)
            for (int k = 0; k < 2; ++k)
              for (int l = 0; l < 2; ++l)
                for (int n = 0; n < 2; ++n)
                  h2 += inv[i][k] * inv[j][l] * inv[mm][n] * C3(i, j, mm) * C3(k, l, n);
      const double H2 = H.dot(H);
      b.h2.at(p, q) = h2;
      b.H2.at(p, q) = H2;
      b.R.at(p, q) = H2 - h2;
      b.K_gauss.at(p, q) = 0.5 * (H2 - h2);

      const Vec4 x = m.x.vec4(p, q);
      const double tu = x.dot(xu), tv = x.dot(xv);
      b.t1.at(p, q) = tu;
      b.t2.at(p, q) = tv;
      b.x2.at(p, q) = x.dot(x);
      const double cu = inv[0][0] * tu + inv[0][1] * tv;
      const double cv = inv[1][0] * tu + inv[1][1] * tv;
      const Vec4 xtop = cu * xu + cv * xv;
      b.x_top.set_vec4(p, q, xtop);
      b.x_perp.set_vec4(p, q, Vec4(x - xtop));

      const Vec4 E1 = xu / std::sqrt(g.g11.at(p, q));
      const double nu2 = g.detg.at(p, q) / g.g11.at(p, q);
      const Vec4 E2 = (xv - (g.g12.at(p, q) / g.g11.at(p, q)) * xu) / std::sqrt(nu2);
      b.e1.set_vec4(p, q, E1);
      b.e2.set_vec4(p, q, E2);
    }
  b.cubic_asymmetry = asym / (1.0 + cmax);

  // intrinsic curvature by the Brioschi formula (metric route only)
  const Field<1> e_vv = differentiate(g.g11, Axis::V, 2);
  const Field<1> g_uu = differentiate(g.g22, Axis::U, 2);
  const Field<1> f_uv = differentiate(g.dg[1][0], Axis::V, 1);
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      const double E = g.g11.at(p, q), F = g.g12.at(p, q), G = g.g22.at(p, q);
      const double Eu = g.dg[0][0].at(p, q), Ev = g.dg[0][1].at(p, q);
      const double Fu = g.dg[1][0].at(p, q), Fv = g.dg[1][1].at(p, q);
      const double Gu = g.dg[2][0].at(p, q), Gv = g.dg[2][1].at(p, q);
      Eigen::Matrix3d m1, m2;
      m1 << -0.5 * e_vv.at(p, q) + f_uv.at(p, q) - 0.5 * g_uu.at(p, q), 0.5 * Eu,
          Fu - 0.5 * Ev, Fv - 0.5 * Gu, E, F, 0.5 * Gv, F, G;
      m2 << 0.0, 0.5 * Ev, 0.5 * Gu, 0.5 * Ev, E, F, 0.5 * Gu, F, G;
      const double det = g.detg.at(p, q);
      b.K_intr.at(p, q) = (m1.determinant() - m2.determinant()) / (det * det);
    }
  return b;
}

void covariant_derivatives(GeometryBundle& b) {
  const GridSpec& s = b.spec;
  const MetricField& g = b.metric;

  std::array<std::array<Field<1>, 4>, 2> dC;
  for (int c = 0; c < 4; ++c) {
    dC[0][c] = differentiate(b.cubic[c], Axis::U, 1);
    dC[1][c] = differentiate(b.cubic[c], Axis::V, 1);
  }
  for (int d = 0; d < 2; ++d)
    for (int c = 0; c < 4; ++c) b.gradC[d][c] = Field<1>(s);

  const int triples[4][3] = {{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 1, 1}};
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      double Gm[2][2][2];
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) Gm[k][i][j] = g.gamma[k][sym2(i, j)].at(p, q);
      auto C3 = [&](int i, int j, int l) { return b.cubic[i + j + l].at(p, q); };
      for (int d = 0; d < 2; ++d)
        for (int c = 0; c < 4; ++c) {
          const int i = triples[c][0], j = triples[c][1], l = triples[c][2];
          double v = dC[d][c].at(p, q);
          for (int mm = 0; mm < 2; ++mm) {
            v -= Gm[mm][d][i] * C3(mm, j, l);
            v -= Gm[mm][d][j] * C3(i, mm, l);
            v -= Gm[mm][d][l] * C3(i, j, mm);
          }
          b.gradC[d][c].at(p, q) = v;
        }
    }

  std::array<std::array<std::array<Field<1>, 4>, 2>, 2> dGradC;
  for (int d = 0; d < 2; ++d)
    for (int c = 0; c < 4; ++c) {
      dGradC[0][d][c] = differentiate(b.gradC[d][c], Axis::U, 1);
      dGradC[1][d][c] = differentiate(b.gradC[d][c], Axis::V, 1);
    }
  for (int e = 0; e < 2; ++e)
    for (int d = 0; d < 2; ++d)
      for (int c = 0; c < 4; ++c) b.hessC[e][d][c] = Field<1>(s);

  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      double Gm[2][2][2];
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) Gm[k][i][j] = g.gamma[k][sym2(i, j)].at(p, q);
      auto gc = [&](int d, int i, int j, int l) { return b.gradC[d][i + j + l].at(p, q); };
      for (int e = 0; e < 2; ++e)  // outer derivative nabla_e
        for (int d = 0; d < 2; ++d)
          for (int c = 0; c < 4; ++c) {
            const int i = triples[c][0], j = triples[c][1], l = triples[c][2];
            double v = dGradC[e][d][c].at(p, q);
            for (int mm = 0; mm < 2; ++mm) {
              v -= Gm[mm][e][d] * gc(mm, i, j, l);
              v -= Gm[mm][e][i] * gc(d, mm, j, l);
              v -= Gm[mm][e][j] * gc(d, i, mm, l);
              v -= Gm[mm][e][l] * gc(d, i, j, mm);
            }
            b.hessC[e][d][c].at(p, q) = v;
          }
    }

  const Field<4> dHu = differentiate(b.H, Axis::U, 1);
  const Field<4> dHv = differentiate(b.H, Axis::V, 1);
  b.gradHperp[0] = Field<4>(s);
  b.gradHperp[1] = Field<4>(s);
  b.norm2_grad_h = Field<1>(s);
  b.norm2_grad_Hperp = Field<1>(s);
  for (int a = 0; a < 2; ++a) {
    b.Hhat[a] = Field<1>(s);
    for (int i = 0; i < 2; ++i) {
      b.Hhat_d[a][i] = Field<1>(s);
      for (int j = 0; j < 2; ++j) b.Hhat_dd[a][i][j] = Field<1>(s);
    }
  }

  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      const Vec4 xu = b.xu.vec4(p, q), xv = b.xv.vec4(p, q);
      const double inv[2][2] = {{g.inv11.at(p, q), g.inv12.at(p, q)},
                                {g.inv12.at(p, q), g.inv22.at(p, q)}};
      auto project_normal = [&](Vec4 w) {
        const double a = w.dot(xu), c = w.dot(xv);
        const double cu = inv[0][0] * a + inv[0][1] * c;
        const double cv = inv[1][0] * a + inv[1][1] * c;
        return Vec4(w - cu * xu - cv * xv);
      };
      const Vec4 dH[2] = {dHu.vec4(p, q), dHv.vec4(p, q)};
      Vec4 Pn[2];
      for (int d = 0; d < 2; ++d) {
        Pn[d] = project_normal(dH[d]);
        b.gradHperp[d].set_vec4(p, q, Pn[d]);
      }
      double nHp2 = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) nHp2 += inv[i][j] * Pn[i].dot(Pn[j]);
      b.norm2_grad_Hperp.at(p, q) = nHp2;

      auto gc = [&](int d, int i, int j, int l) { return b.gradC[d][i + j + l].at(p, q); };
      double nh2 = 0.0;
      for (int d = 0; d < 2; ++d)
        for (int e = 0; e < 2; ++e)
          for (int i = 0; i < 2; ++i)
            for (int a = 0; a < 2; ++a)
              for (int j = 0; j < 2; ++j)
                for (int c = 0; c < 2; ++c)
                  for (int l = 0; l < 2; ++l)
                    for (int f = 0; f < 2; ++f)
                      nh2 += inv[d][e] * inv[i][a] * inv[j][c] * inv[l][f] *
                             gc(d, i, j, l) * gc(e, a, c, f);
      b.norm2_grad_h.at(p, q) = nh2;

      const Vec4 H = b.H.vec4(p, q);
      b.Hhat[0].at(p, q) = H.dot(ambient_J(xu));
      b.Hhat[1].at(p, q) = H.dot(ambient_J(xv));
    }

  std::array<std::array<Field<1>, 2>, 2> dHhat;
  for (int a = 0; a < 2; ++a) {
    dHhat[a][0] = differentiate(b.Hhat[a], Axis::U, 1);
    dHhat[a][1] = differentiate(b.Hhat[a], Axis::V, 1);
  }
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      double Gm[2][2][2];
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) Gm[k][i][j] = g.gamma[k][sym2(i, j)].at(p, q);
      for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i) {
          double v = dHhat[a][i].at(p, q);
          for (int mm = 0; mm < 2; ++mm) v -= Gm[mm][i][a] * b.Hhat[mm].at(p, q);
          b.Hhat_d[a][i].at(p, q) = v;
        }
    }
  std::array<std::array<std::array<Field<1>, 2>, 2>, 2> dHhat_d;
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 2; ++i) {
      dHhat_d[a][i][0] = differentiate(b.Hhat_d[a][i], Axis::U, 1);
      dHhat_d[a][i][1] = differentiate(b.Hhat_d[a][i], Axis::V, 1);
    }
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      double Gm[2][2][2];
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) Gm[k][i][j] = g.gamma[k][sym2(i, j)].at(p, q);
      for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            double v = dHhat_d[a][i][j].at(p, q);
            for (int mm = 0; mm < 2; ++mm) {
              v -= Gm[mm][j][a] * b.Hhat_d[mm][i].at(p, q);
              v -= Gm[mm][j][i] * b.Hhat_d[a][mm].at(p, q);
            }
            b.Hhat_dd[a][i][j].at(p, q) = v;
          }
    }
  b.has_derivatives = true;
}

GeometryBundle build_geometry(const ImmersionGrid& m) {
  GeometryBundle b = second_fundamental(m, metric_and_connection(m));
  covariant_derivatives(b);
  return b;
}

MaslovData maslov(const ImmersionGrid& m, const GeometryBundle& b, double lagrangian_tol) {
  if (b.lagrangian > lagrangian_tol) {
    std::ostringstream os;
    os << "maslov: non-Lagrangian input (residual " << b.lagrangian << " > tolerance "
       << lagrangian_tol << "); the Lagrangian angle is undefined";
    throw PreconditionError(os.str());
  }
  const GridSpec& s = m.spec;
  MaslovData md;
  md.beta = Field<1>(s);
  md.alpha_u = Field<1>(s);
  md.alpha_v = Field<1>(s);
  Field<1> wr(s), wi(s);
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      Cplx om = holomorphic_volume(b.e1.vec4(p, q), b.e2.vec4(p, q));
      om /= std::abs(om);  // unit modulus on Lagrangian planes
      wr.at(p, q) = om.real();
      wi.at(p, q) = om.imag();
      md.beta.at(p, q) = std::arg(om);
      const Vec4 jh = ambient_J(b.H.vec4(p, q));
      md.alpha_u.at(p, q) = -jh.dot(b.xu.vec4(p, q));
      md.alpha_v.at(p, q) = -jh.dot(b.xv.vec4(p, q));
    }
  // beta_{,i} = Im(conj(w) d_i w) for the unit phase w = e^{i beta}
  const Field<1> dwr_u = differentiate(wr, Axis::U, 1), dwr_v = differentiate(wr, Axis::V, 1);
  const Field<1> dwi_u = differentiate(wi, Axis::U, 1), dwi_v = differentiate(wi, Axis::V, 1);
  md.beta_u = Field<1>(s);
  md.beta_v = Field<1>(s);
  double alpha_max = 0.0, consistency = 0.0, grad_res = 0.0;
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      md.beta_u.at(p, q) = wr.at(p, q) * dwi_u.at(p, q) - wi.at(p, q) * dwr_u.at(p, q);
      md.beta_v.at(p, q) = wr.at(p, q) * dwi_v.at(p, q) - wi.at(p, q) * dwr_v.at(p, q);
      alpha_max = std::max({alpha_max, std::abs(md.alpha_u.at(p, q)),
                            std::abs(md.alpha_v.at(p, q))});
      consistency = std::max(consistency,
                             std::abs(md.beta_u.at(p, q) - md.alpha_u.at(p, q)));
      consistency = std::max(consistency,
                             std::abs(md.beta_v.at(p, q) - md.alpha_v.at(p, q)));
      const double gu = b.metric.inv11.at(p, q) * md.beta_u.at(p, q) +
                        b.metric.inv12.at(p, q) * md.beta_v.at(p, q);
      const double gv = b.metric.inv12.at(p, q) * md.beta_u.at(p, q) +
                        b.metric.inv22.at(p, q) * md.beta_v.at(p, q);
      const Vec4 push = gu * b.xu.vec4(p, q) + gv * b.xv.vec4(p, q) +
                        ambient_J(b.H.vec4(p, q));
      grad_res = std::max(grad_res, push.norm());
    }
  md.dbeta_alpha_residual = consistency / (1.0 + alpha_max);
  md.gradient_residual = grad_res;

  // periods: line integrals of alpha over the generators, averaged over lines
  double acc_u = 0.0;
  for (int q = 0; q < s.nv; ++q) {
    double line = 0.0;
    for (int p = 0; p < s.nu; ++p) line += md.alpha_u.at(p, q);
    acc_u += line * (s.period_u / s.nu);
  }
  md.period_u = acc_u / s.nv / (2.0 * kPi);
  double acc_v = 0.0;
  for (int p = 0; p < s.nu; ++p) {
    double line = 0.0;
    for (int q = 0; q < s.nv; ++q) line += md.alpha_v.at(p, q);
    acc_v += line * (s.period_v / s.nv);
  }
  md.period_v = acc_v / s.nu / (2.0 * kPi);
  return md;
}

CurvatureResiduals curvature_residuals(const GeometryBundle& b) {
  const GridSpec& s = b.spec;
  CurvatureResiduals out{};

  // Gauss: intrinsic R_1212 (metric route) vs <h11,h22> - |h12|^2
  {
    double diff = 0.0, l = 0.0, r = 0.0;
    for (int p = 0; p < s.nu; ++p)
      for (int q = 0; q < s.nv; ++q) {
        const double lhs = b.K_intr.at(p, q) * b.metric.detg.at(p, q);
        const double rhs = b.h[0].vec4(p, q).dot(b.h[2].vec4(p, q)) -
                           b.h[1].vec4(p, q).squaredNorm();
        diff = std::max(diff, std::abs(lhs - rhs));
        l = std::max(l, std::abs(lhs));
        r = std::max(r, std::abs(rhs));
      }
    out.gauss = diff / (1.0 + l + r);
  }

  // Codazzi: total symmetry of grad C across the derivative slot
  {
    double diff = 0.0, mag = 0.0;
    for (int p = 0; p < s.nu; ++p)
      for (int q = 0; q < s.nv; ++q) {
        const double pairs[3][2] = {
            {b.gradC[0][1].at(p, q), b.gradC[1][0].at(p, q)},   // {0001}
            {b.gradC[0][2].at(p, q), b.gradC[1][1].at(p, q)},   // {0011}
            {b.gradC[0][3].at(p, q), b.gradC[1][2].at(p, q)}};  // {0111}
        for (auto& pr : pairs) {
          diff = std::max(diff, std::abs(pr[0] - pr[1]));
          mag = std::max({mag, std::abs(pr[0]), std::abs(pr[1])});
        }
      }
    out.codazzi = diff / (1.0 + mag);
  }

  // Normal-connection curvature from direct projection coefficients
  // omega_{i,a}^b = g^{bc} <x_{,ia}, x_c>, F_12 = d omega + omega ^ omega.
  {
    std::array<std::array<std::array<Field<1>, 2>, 2>, 2> om;  // [i][a][b]
    for (int i = 0; i < 2; ++i)
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) om[i][a][bb] = Field<1>(s);
    for (int p = 0; p < s.nu; ++p)
      for (int q = 0; q < s.nv; ++q) {
        const Vec4 xd[2] = {b.xu.vec4(p, q), b.xv.vec4(p, q)};
        const Vec4 xdd[2][2] = {{b.xuu.vec4(p, q), b.xuv.vec4(p, q)},
                                {b.xuv.vec4(p, q), b.xvv.vec4(p, q)}};
        const double inv[2][2] = {{b.metric.inv11.at(p, q), b.metric.inv12.at(p, q)},
                                  {b.metric.inv12.at(p, q), b.metric.inv22.at(p, q)}};
        for (int i = 0; i < 2; ++i)
          for (int a = 0; a < 2; ++a) {
            const double s0 = xdd[i][a].dot(xd[0]), s1 = xdd[i][a].dot(xd[1]);
            for (int bb = 0; bb < 2; ++bb)
              om[i][a][bb].at(p, q) = inv[bb][0] * s0 + inv[bb][1] * s1;
          }
      }
    std::array<std::array<Field<1>, 2>, 2> dom_u, dom_v;  // derivatives of omega_v.. / omega_u..
    for (int a = 0; a < 2; ++a)
      for (int bb = 0; bb < 2; ++bb) {
        dom_u[a][bb] = differentiate(om[1][a][bb], Axis::U, 1);
        dom_v[a][bb] = differentiate(om[0][a][bb], Axis::V, 1);
      }

    double diff_ricci = 0.0, mag_ricci = 0.0;
    double diff_nt = 0.0, mag_nt = 0.0;
    for (int p = 0; p < s.nu; ++p)
      for (int q = 0; q < s.nv; ++q) {
        const double gmat[2][2] = {{b.metric.g11.at(p, q), b.metric.g12.at(p, q)},
                                   {b.metric.g12.at(p, q), b.metric.g22.at(p, q)}};
        const double inv[2][2] = {{b.metric.inv11.at(p, q), b.metric.inv12.at(p, q)},
                                  {b.metric.inv12.at(p, q), b.metric.inv22.at(p, q)}};
        double curv[2][2];  // (F_12)_a^b
        for (int a = 0; a < 2; ++a)
          for (int bb = 0; bb < 2; ++bb) {
            double v = dom_u[a][bb].at(p, q) - dom_v[a][bb].at(p, q);
            for (int c = 0; c < 2; ++c)
              v += om[0][c][bb].at(p, q) * om[1][a][c].at(p, q) -
                   om[1][c][bb].at(p, q) * om[0][a][c].at(p, q);
            curv[a][bb] = v;
          }
        const double lhs = curv[0][0] * gmat[0][1] + curv[0][1] * gmat[1][1];

        // shape-operator commutator, matrices (A_a)_i^k = g^{km} C_{i m a}
        auto C3 = [&](int i, int j, int l) { return b.cubic[i + j + l].at(p, q); };
        double A[2][2][2];  // [a][i][k]
        for (int a = 0; a < 2; ++a)
          for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) {
              double v = 0.0;
              for (int mm = 0; mm < 2; ++mm) v += inv[k][mm] * C3(i, mm, a);
              A[a][i][k] = v;
            }
        // ([A_1, A_2] d_1)^k = (A1(A2 d1) - A2(A1 d1))^k
        double rhs = 0.0;
        for (int k = 0; k < 2; ++k) {
          double comm = 0.0;
          for (int mm = 0; mm < 2; ++mm)
            comm += A[1][0][mm] * A[0][mm][k] - A[0][0][mm] * A[1][mm][k];
          rhs += comm * gmat[k][1];
        }
        diff_ricci = std::max(diff_ricci, std::abs(lhs - rhs));
        mag_ricci = std::max({mag_ricci, std::abs(lhs), std::abs(rhs)});

        const double rhs_nt = -b.K_intr.at(p, q) * b.metric.detg.at(p, q);
        diff_nt = std::max(diff_nt, std::abs(lhs - rhs_nt));
        mag_nt = std::max({mag_nt, std::abs(lhs), std::abs(rhs_nt)});
      }
    out.ricci = diff_ricci / (1.0 + mag_ricci);
    out.normal_tangent = diff_nt / (1.0 + mag_nt);
  }

  // Motion: ambient second derivatives minus their tangential + h parts
  {
    double diff = 0.0, mag = 0.0;
    for (int p = 0; p < s.nu; ++p)
      for (int q = 0; q < s.nv; ++q) {
        const Vec4 xd[2] = {b.xu.vec4(p, q), b.xv.vec4(p, q)};
        const Vec4 xdd[3] = {b.xuu.vec4(p, q), b.xuv.vec4(p, q), b.xvv.vec4(p, q)};
        const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
        for (int c = 0; c < 3; ++c) {
          const int i = pairs[c][0], j = pairs[c][1];
          Vec4 w = xdd[c] - b.h[c].vec4(p, q);
          for (int k = 0; k < 2; ++k)
            w -= b.metric.gamma[k][sym2(i, j)].at(p, q) * xd[k];
          diff = std::max(diff, w.norm());
          mag = std::max(mag, xdd[c].norm());
        }
      }
    out.motion = diff / (1.0 + mag);
  }
  return out;
}

CubicFrame cubic_in_frame(const GeomPt& pt) {
  // frame coefficients over the coordinate basis
  const double a = 1.0 / std::sqrt(pt.g[0][0]);
  const double nu = std::sqrt(pt.detg / pt.g[0][0]);
  const double e1c[2] = {a, 0.0};
  const double e2c[2] = {-pt.g[0][1] / (pt.g[0][0] * nu), 1.0 / nu};
  auto contract = [&](const double* ea, const double* eb, const double* ec) {
    double v = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) v += ea[i] * eb[j] * ec[l] * pt.C3(i, j, l);
    return v;
  };
  return CubicFrame{contract(e1c, e1c, e1c), contract(e1c, e1c, e2c),
                    contract(e1c, e2c, e2c), contract(e2c, e2c, e2c)};
}

DiagAngle diagonalize_cubic(const CubicFrame& c) {
  const Cplx zeta(0.25 * (c.c0 - 3.0 * c.c2), 0.25 * (3.0 * c.c1 - c.c3));
  const Cplx w(c.c0 + c.c2, c.c1 + c.c3);
  const double scale = std::abs(zeta) + std::abs(w);
  double theta = 0.0;
  if (std::abs(zeta) > 1e-14 * (1.0 + scale)) {
    theta = std::arg(w * zeta) / 4.0;
    while (theta < 0.0) theta += 0.5 * kPi;
    while (theta >= 0.5 * kPi) theta -= 0.5 * kPi;
  }
  const Cplx zr = zeta * std::polar(1.0, -3.0 * theta);
  const Cplx wrot = w * std::polar(1.0, -theta);
  const double off12 = zr.imag() + 0.25 * wrot.imag();   // C(e1,e1,e2) rotated
  const double off22 = -zr.real() + 0.25 * wrot.real();  // C(e1,e2,e2) rotated
  return DiagAngle{theta, std::max(std::abs(off12), std::abs(off22))};
}

DiagonalFrame diagonalize_frame(const GeometryBundle& b, double flat_tol) {
  const GridSpec& s = b.spec;
  double kmax = 0.0;
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) kmax = std::max(kmax, std::abs(b.K_intr.at(p, q)));
  if (kmax > flat_tol) {
    std::ostringstream os;
    os << "diagonalize_frame: surface is not flat (max|K| = " << kmax << " > " << flat_tol
       << ")";
    throw PreconditionError(os.str());
  }
  DiagonalFrame out;
  out.theta = Field<1>(s);
  out.offdiag_residual = 0.0;
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      const DiagAngle da = diagonalize_cubic(cubic_in_frame(b.point(p, q)));
      out.theta.at(p, q) = da.theta;
      out.offdiag_residual = std::max(out.offdiag_residual, da.residual);
    }
  return out;
}

}  // namespace xigeo
