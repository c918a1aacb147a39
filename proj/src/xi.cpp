#include "xigeo/xi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "xigeo/grid.hpp"

namespace xigeo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kConditionSlack = 1e-9;  // zero-margin conditions count as met

// Running normalized sup residual.
struct ResidualAcc {
  double diff = 0, lhs = 0, rhs = 0;
  void add(double l, double r) {
    diff = std::max(diff, std::abs(l - r));
    lhs = std::max(lhs, std::abs(l));
    rhs = std::max(rhs, std::abs(r));
  }
  double value() const { return diff / (1.0 + lhs + rhs); }
};

// Frame sum  sum_{i,j} <h(e_i,e_j), A> <h(e_i,e_j), B>  evaluated tensorially:
// g^{ip} g^{jq} <h_ij, A> <h_pq, B>.
double hh_pair(const GeomPt& pt, const Vec4& A, const Vec4& B) {
  double ha[2][2], hb[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      ha[i][j] = pt.h[i][j].dot(A);
      hb[i][j] = pt.h[i][j].dot(B);
    }
  double acc = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
          acc += pt.inv[i][p] * pt.inv[j][q] * ha[i][j] * hb[p][q];
  return acc;
}

void require_xi(IdentityId id, const XiEstimate* e) {
  if (!e || !e->is_xi) {
    std::ostringstream os;
    os << "verify_identity(" << identity_name(id)
       << "): identity holds only on xi-submanifolds; the parallelism test "
       << (e ? "failed (residual " + std::to_string(e->parallel_residual) + ")"
             : "was not run");
    throw PreconditionError(os.str());
  }
}

}  // namespace

SplitPosition split_position(const ImmersionGrid& m, const GeometryBundle& b) {
  SplitPosition out;
  out.x_top = b.x_top;
  out.x_perp = b.x_perp;
  out.xtop2 = Field<1>(m.spec);
  for (int p = 0; p < m.spec.nu; ++p)
    for (int q = 0; q < m.spec.nv; ++q)
      out.xtop2.at(p, q) = b.x_top.vec4(p, q).squaredNorm();
  return out;
}

XiEstimate xi_estimate(const ImmersionGrid& m, const GeometryBundle& b, double xi_tol,
                       double lagrangian_tol) {
  if (b.lagrangian > lagrangian_tol) {
    std::ostringstream os;
    os << "xi_estimate: non-Lagrangian input (residual " << b.lagrangian << " > tolerance "
       << lagrangian_tol << "); the J-correspondence for parallelism needs the "
       << "Lagrangian condition";
    throw PreconditionError(os.str());
  }
  const GridSpec& s = m.spec;
  XiEstimate out;
  out.xi_hat = Field<4>(s);
  out.w_u = Field<1>(s);
  out.w_v = Field<1>(s);

  double tangency = 0.0, w_sup = 0.0;
  double c1_min = 0, c1_max = 0, c2_min = 0, c2_max = 0, c1_acc = 0, c2_acc = 0;
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      const GeomPt pt = b.point(p, q);
      const Vec4 xi = pt.H + pt.xperp;
      out.xi_hat.set_vec4(p, q, xi);
      for (int i = 0; i < 2; ++i)
        tangency = std::max(tangency, std::abs(xi.dot(pt.xd[i])) /
                                          (pt.xd[i].norm() * (1.0 + xi.norm())));
      const Vec2 w = pt.tangential_coords(-ambient_J(xi));
      out.w_u.at(p, q) = w[0];
      out.w_v.at(p, q) = w[1];
      double wn2 = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) wn2 += pt.g[i][j] * w[i] * w[j];
      w_sup = std::max(w_sup, std::sqrt(wn2));

      const double c1 = xi.dot(ambient_J(pt.e[0]));
      const double c2 = xi.dot(ambient_J(pt.e[1]));
      if (p == 0 && q == 0) {
        c1_min = c1_max = c1;
        c2_min = c2_max = c2;
      }
      c1_min = std::min(c1_min, c1);
      c1_max = std::max(c1_max, c1);
      c2_min = std::min(c2_min, c2);
      c2_max = std::max(c2_max, c2);
      c1_acc += c1;
      c2_acc += c2;
    }
  out.tangency_residual = tangency;

  // Levi-Civita derivative of the tangent field w
  const Field<1> dwu_u = differentiate(out.w_u, Axis::U, 1);
  const Field<1> dwu_v = differentiate(out.w_u, Axis::V, 1);
  const Field<1> dwv_u = differentiate(out.w_v, Axis::U, 1);
  const Field<1> dwv_v = differentiate(out.w_v, Axis::V, 1);
  double grad_sup = 0.0;
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      const GeomPt pt = b.point(p, q);
      const double w[2] = {out.w_u.at(p, q), out.w_v.at(p, q)};
      const double dw[2][2] = {{dwu_u.at(p, q), dwu_v.at(p, q)},
                               {dwv_u.at(p, q), dwv_v.at(p, q)}};
      double nabla[2][2];  // (grad w)^i_j
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double v = dw[i][j];
          for (int mm = 0; mm < 2; ++mm) v += pt.Gm[i][j][mm] * w[mm];
          nabla[i][j] = v;
        }
      double norm2 = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
          for (int j = 0; j < 2; ++j)
            for (int l = 0; l < 2; ++l)
              norm2 += pt.g[i][k] * pt.inv[j][l] * nabla[i][j] * nabla[k][l];
      grad_sup = std::max(grad_sup, std::sqrt(std::max(0.0, norm2)));
    }
  out.parallel_residual = grad_sup / (1.0 + w_sup);
  out.is_xi = out.parallel_residual <= xi_tol;
  out.has_coefficients = out.is_xi;
  const double npts = static_cast<double>(s.points());
  out.coeff1 = c1_acc / npts;
  out.coeff2 = c2_acc / npts;
  out.coeff_spread = std::max(c1_max - c1_min, c2_max - c2_min);
  return out;
}

PinchingReport pinching_report(const ImmersionGrid& m, const GeometryBundle& b,
                               const XiEstimate& e) {
  const GridSpec& s = m.spec;
  PinchingReport out;
  out.advisory = !e.is_xi;
  out.P = Field<1>(s);
  double p_min = 0, p_max = 0;
  double h2_min = 0, H2_min = 0, c3_min = 0, hxi_min = 0, hxi_max = 0;
  bool first = true;
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      const GeomPt pt = b.point(p, q);
      const Vec4 xi = e.xi_hat.vec4(p, q);
      const Vec4 hmx = pt.H - xi;
      const double P = pt.h2 + hmx.squaredNorm() - xi.squaredNorm() - 4.0;
      out.P.at(p, q) = P;
      const double hxi = pt.H.dot(xi);
      const double c3 = pt.h2 - pt.H.dot(hmx);
      if (first) {
        p_min = p_max = P;
        h2_min = pt.h2;
        H2_min = pt.H2;
        c3_min = c3;
        hxi_min = hxi_max = hxi;
        first = false;
      }
      p_min = std::min(p_min, P);
      p_max = std::max(p_max, P);
      h2_min = std::min(h2_min, pt.h2);
      H2_min = std::min(H2_min, pt.H2);
      c3_min = std::min(c3_min, c3);
      hxi_min = std::min(hxi_min, hxi);
      hxi_max = std::max(hxi_max, hxi);
    }
  out.P_min = p_min;
  out.P_max = p_max;
  out.margin[0] = h2_min - 2.0;
  out.margin[1] = H2_min - 2.0;
  out.margin[2] = c3_min;
  out.margin[3] = hxi_min;
  for (int c = 0; c < 4; ++c) out.condition[c] = out.margin[c] >= -kConditionSlack;
  out.Hxi_min = hxi_min;
  out.Hxi_max = hxi_max;
  out.Hxi_const_residual = hxi_max - hxi_min;
  return out;
}

const char* identity_name(IdentityId id) {
  switch (id) {
    case IdentityId::Eq217: return "eq2.17";
    case IdentityId::Eq218: return "eq2.18";
    case IdentityId::Eq32: return "eq3.2";
    case IdentityId::Eq33: return "eq3.3";
    case IdentityId::Lem32: return "lem3.2";
    case IdentityId::Lem33: return "lem3.3";
    case IdentityId::Lem34: return "lem3.4";
    case IdentityId::Lem35a: return "lem3.5a";
    case IdentityId::Lem35b: return "lem3.5b";
    case IdentityId::Thm21: return "thm2.1";
    case IdentityId::Gauss: return "gauss";
    case IdentityId::Ricci: return "ricci";
    case IdentityId::Codazzi: return "codazzi";
    case IdentityId::Eq213: return "eq2.13";
    case IdentityId::Motion: return "motion";
  }
  return "?";
}

const std::vector<IdentityId>& all_identities() {
  static const std::vector<IdentityId> ids = {
      IdentityId::Eq217, IdentityId::Eq218, IdentityId::Eq32,   IdentityId::Eq33,
      IdentityId::Lem32, IdentityId::Lem33, IdentityId::Lem34,  IdentityId::Lem35a,
      IdentityId::Lem35b, IdentityId::Thm21, IdentityId::Gauss, IdentityId::Ricci,
      IdentityId::Codazzi, IdentityId::Eq213, IdentityId::Motion};
  return ids;
}

std::optional<IdentityId> identity_from_name(const std::string& name) {
  for (IdentityId id : all_identities())
    if (name == identity_name(id)) return id;
  return std::nullopt;
}

bool identity_requires_xi(IdentityId id) {
  switch (id) {
    case IdentityId::Eq217:
    case IdentityId::Eq218:
    case IdentityId::Eq32:
    case IdentityId::Eq33:
    case IdentityId::Lem32:
    case IdentityId::Lem33:
    case IdentityId::Lem34:
    case IdentityId::Lem35a:
    case IdentityId::Lem35b:
      return true;
    default:
      return false;
  }
}

bool identity_requires_lagrangian(IdentityId id) {
  switch (id) {
    case IdentityId::Gauss:
    case IdentityId::Motion:
      return false;
    default:
      return true;
  }
}

double verify_identity(IdentityId id, const ImmersionGrid& m, const GeometryBundle& b,
                       const XiEstimate* e, const MaslovData* md) {
  const GridSpec& s = m.spec;
  if (identity_requires_xi(id)) require_xi(id, e);

  switch (id) {
    case IdentityId::Gauss:
      return curvature_residuals(b).gauss;
    case IdentityId::Ricci:
      return curvature_residuals(b).ricci;
    case IdentityId::Codazzi:
      return curvature_residuals(b).codazzi;
    case IdentityId::Eq213:
      return curvature_residuals(b).normal_tangent;
    case IdentityId::Motion:
      return curvature_residuals(b).motion;
    default:
      break;
  }

  MaslovData local_md;
  auto maslov_data = [&]() -> const MaslovData& {
    if (md) return *md;
    local_md = maslov(m, b);
    return local_md;
  };

  switch (id) {
    case IdentityId::Thm21:
      return maslov_data().gradient_residual;

    case IdentityId::Eq217: {
      // div JH = <JH, x_top>; divergence as (1/sqrt g) d_i (sqrt g W^i)
      Field<1> flux_u(s), flux_v(s);
      for (int p = 0; p < s.nu; ++p)
        for (int q = 0; q < s.nv; ++q) {
          const GeomPt pt = b.point(p, q);
          const Vec2 w = pt.tangential_coords(ambient_J(pt.H));
          flux_u.at(p, q) = pt.area * w[0];
          flux_v.at(p, q) = pt.area * w[1];
        }
      const Field<1> dfu = differentiate(flux_u, Axis::U, 1);
      const Field<1> dfv = differentiate(flux_v, Axis::V, 1);
      ResidualAcc acc;
      for (int p = 0; p < s.nu; ++p)
        for (int q = 0; q < s.nv; ++q) {
          const GeomPt pt = b.point(p, q);
          const double lhs = (dfu.at(p, q) + dfv.at(p, q)) / pt.area;
          const double rhs = ambient_J(pt.H).dot(pt.xtop);
          acc.add(lhs, rhs);
        }
      return acc.value();
    }

    case IdentityId::Eq218: {
      // Laplace beta = <grad beta, x_top>, with beta_{,i} from the unit phase
      const MaslovData& mdata = maslov_data();
      Field<1> flux_u(s), flux_v(s);
      for (int p = 0; p < s.nu; ++p)
        for (int q = 0; q < s.nv; ++q) {
          const GeomPt pt = b.point(p, q);
          const double bu = mdata.beta_u.at(p, q), bv = mdata.beta_v.at(p, q);
          flux_u.at(p, q) = pt.area * (pt.inv[0][0] * bu + pt.inv[0][1] * bv);
          flux_v.at(p, q) = pt.area * (pt.inv[1][0] * bu + pt.inv[1][1] * bv);
        }
      const Field<1> dfu = differentiate(flux_u, Axis::U, 1);
      const Field<1> dfv = differentiate(flux_v, Axis::V, 1);
      ResidualAcc acc;
      for (int p = 0; p < s.nu; ++p)
        for (int q = 0; q < s.nv; ++q) {
          const GeomPt pt = b.point(p, q);
          const double lhs = (dfu.at(p, q) + dfv.at(p, q)) / pt.area;
          const double bu = mdata.beta_u.at(p, q), bv = mdata.beta_v.at(p, q);
          const double rhs = (pt.inv[0][0] * bu + pt.inv[0][1] * bv) * pt.t[0] +
                             (pt.inv[1][0] * bu + pt.inv[1][1] * bv) * pt.t[1];
          acc.add(lhs, rhs);
        }
      return acc.value();
    }

    case IdentityId::Eq32: {
      ResidualAcc acc;
      for (int p = 0; p < s.nu; ++p)
        for (int q = 0; q < s.nv; ++q) {
          const GeomPt pt = b.point(p, q);
          const double tup[2] = {pt.inv[0][0] * pt.t[0] + pt.inv[0][1] * pt.t[1],
                                 pt.inv[1][0] * pt.t[0] + pt.inv[1][1] * pt.t[1]};
          for (int a = 0; a < 2; ++a)
            for (int i = 0; i < 2; ++i) {
              double rhs = 0.0;
              for (int j = 0; j < 2; ++j) rhs += pt.C3(i, j, a) * tup[j];
              acc.add(pt.Hh_d[a][i], rhs);
            }
        }
      return acc.value();
    }

    case IdentityId::Eq33: {
      ResidualAcc acc;
      for (int p = 0; p < s.nu; ++p)
        for (int q = 0; q < s.nv; ++q) {
          const GeomPt pt = b.point(p, q);
          const Vec4 xi = e->xi_hat.vec4(p, q);
          const Vec4 hmx = pt.H - xi;
          const double nu_c[2] = {pt.normal_comp(hmx, 0), pt.normal_comp(hmx, 1)};
          const double tup[2] = {pt.inv[0][0] * pt.t[0] + pt.inv[0][1] * pt.t[1],
                                 pt.inv[1][0] * pt.t[0] + pt.inv[1][1] * pt.t[1]};
          for (int a = 0; a < 2; ++a)
            for (int i = 0; i < 2; ++i)
              for (int j = 0; j < 2; ++j) {
                double rhs = pt.C3(i, j, a);
                for (int mm = 0; mm < 2; ++mm) rhs += pt.dC4(j, i, mm, a) * tup[mm];
                for (int mm = 0; mm < 2; ++mm)
                  for (int nn = 0; nn < 2; ++nn)
                    for (int pp = 0; pp < 2; ++pp)
                      for (int qq = 0; qq < 2; ++qq)
                        rhs -= pt.inv[mm][nn] * pt.inv[pp][qq] * pt.C3(i, mm, a) *
                               pt.C3(nn, j, pp) * nu_c[qq];
                acc.add(pt.Hh_dd[a][i][j], rhs);
              }
        }
      return acc.value();
    }

    case IdentityId::Lem32: {
      Field<1> f(s);
      for (int p = 0; p < s.nu; ++p)
        for (int q = 0; q < s.nv; ++q)
          f.at(p, q) = b.h2.at(p, q) + b.x_perp.vec4(p, q).squaredNorm();
      const ScalarCalc sc = drift_laplacian(m, b, f);
      ResidualAcc acc;
      for (int p = 0; p < s.nu; ++p)
        for (int q = 0; q < s.nv; ++q) {
          const GeomPt pt = b.point(p, q);
          const Vec4 xi = e->xi_hat.vec4(p, q);
          const Vec4 hmx = pt.H - xi;
          const double h_hmx = pt.H.dot(hmx);
          const double rhs = pt.nh2 + pt.nHp2 + pt.h2 -
                             0.5 * (pt.h2 - pt.H2) * (3.0 * pt.h2 - 2.0 * pt.H2 + h_hmx) +
                             h_hmx - hh_pair(pt, hmx, hmx) - hh_pair(pt, pt.H, hmx);
          acc.add(0.5 * sc.drift.at(p, q), rhs);
        }
      return acc.value();
    }

    case IdentityId::Lem33: {
      Field<1> f(s);
      for (int p = 0; p < s.nu; ++p)
        for (int q = 0; q < s.nv; ++q) f.at(p, q) = b.x_top.vec4(p, q).squaredNorm();
      const ScalarCalc sc = drift_laplacian(m, b, f);
      ResidualAcc acc;
      for (int p = 0; p < s.nu; ++p)
        for (int q = 0; q < s.nv; ++q) {
          const GeomPt pt = b.point(p, q);
          const Vec4 xi = e->xi_hat.vec4(p, q);
          const Vec4 hmx = pt.H - xi;
          const double tup[2] = {pt.inv[0][0] * pt.t[0] + pt.inv[0][1] * pt.t[1],
                                 pt.inv[1][0] * pt.t[0] + pt.inv[1][1] * pt.t[1]};
          double t1 = 0.0;  // t^i t^j <h_ij, xi - H>
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) t1 += tup[i] * tup[j] * pt.h[i][j].dot(-hmx);
          double t2 = 0.0;  // t^i t^j g^{lm} <h_il, h_mj>
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
              for (int l = 0; l < 2; ++l)
                for (int mm = 0; mm < 2; ++mm)
                  t2 += tup[i] * tup[j] * pt.inv[l][mm] * pt.h[i][l].dot(pt.h[mm][j]);
          const double rhs = t1 - t2 + 2.0 - 2.0 * pt.H.dot(hmx) + hh_pair(pt, hmx, hmx);
          acc.add(0.5 * sc.laplacian.at(p, q), rhs);
        }
      return acc.value();
    }

    case IdentityId::Lem34: {
      Field<1> f(s);
      for (int p = 0; p < s.nu; ++p)
        for (int q = 0; q < s.nv; ++q)
          f.at(p, q) = b.H.vec4(p, q).dot(e->xi_hat.vec4(p, q));
      const ScalarCalc sc = drift_laplacian(m, b, f);
      ResidualAcc acc;
      for (int p = 0; p < s.nu; ++p)
        for (int q = 0; q < s.nv; ++q) {
          const GeomPt pt = b.point(p, q);
          const Vec4 xi = e->xi_hat.vec4(p, q);
          const double rhs = f.at(p, q) - hh_pair(pt, xi, Vec4(pt.H - xi));
          acc.add(sc.drift.at(p, q), rhs);
        }
      return acc.value();
    }

    case IdentityId::Lem35a: {
      const ScalarCalc sc = drift_laplacian(m, b, b.x2);
      ResidualAcc acc;
      for (int p = 0; p < s.nu; ++p)
        for (int q = 0; q < s.nv; ++q) {
          const GeomPt pt = b.point(p, q);
          const Vec4 xi = e->xi_hat.vec4(p, q);
          acc.add(0.5 * sc.laplacian.at(p, q), 2.0 - pt.H.dot(Vec4(pt.H - xi)));
        }
      return acc.value();
    }

    case IdentityId::Lem35b: {
      const ScalarCalc sc = drift_laplacian(m, b, b.x2);
      ResidualAcc acc;
      for (int p = 0; p < s.nu; ++p)
        for (int q = 0; q < s.nv; ++q) {
          const GeomPt pt = b.point(p, q);
          const Vec4 xi = e->xi_hat.vec4(p, q);
          const double rhs =
              xi.squaredNorm() + 2.0 - (pt.x.squaredNorm() + pt.H.dot(xi));
          acc.add(0.5 * sc.drift.at(p, q), rhs);
        }
      return acc.value();
    }

    default:
      throw UsageError("verify_identity: unknown identity");
  }
}

GlobalChecks global_checks(const ImmersionGrid& m, const GeometryBundle& b,
                           const MaslovData* md) {
  const GridSpec& s = m.spec;
  GlobalChecks out;
  Field<1> ones(s);
  for (double& v : ones.values) v = 1.0;
  out.area = integrate(ones, b.metric.area);
  out.gauss_bonnet_integral = integrate(b.K_intr, b.metric.area);
  const double genus_raw = 1.0 - out.gauss_bonnet_integral / (4.0 * kPi);
  out.genus = static_cast<int>(std::lround(genus_raw));
  out.genus_distance = std::abs(genus_raw - out.genus);

  Field<1> hmx2(s), other(s);
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      const GeomPt pt = b.point(p, q);
      const Vec4 xi = pt.H + pt.xperp;
      hmx2.at(p, q) = (pt.H - xi).squaredNorm();
      other.at(p, q) = xi.squaredNorm() + 4.0 - pt.H2;
    }
  const double i1 = integrate(hmx2, b.metric.area);
  const double i2 = integrate(other, b.metric.area);
  out.balance_residual = std::abs(i1 - i2) / (1.0 + std::abs(i1) + std::abs(i2));

  if (md) {
    const long pu = std::lround(md->period_u), pv = std::lround(md->period_v);
    out.maslov_nontrivial = (pu != 0) || (pv != 0);
  }
  return out;
}

TorusFit fit_product_torus(const GeometryBundle& b, const XiEstimate& e) {
  TorusFit out;
  if (!e.is_xi) return out;
  const GridSpec& s = b.spec;
  double sum_hmx2 = 0.0, sum_h2 = 0.0;
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      sum_hmx2 += b.x_perp.vec4(p, q).squaredNorm();  // |H - xi_hat|^2 = |x_perp|^2
      sum_h2 += b.h2.at(p, q);
    }
  const double n = static_cast<double>(s.points());
  const double S = sum_hmx2 / n, T = sum_h2 / n;
  if (!(S > 0.0) || !(T > 0.0)) return out;
  const double disc = S * S - 4.0 * S / T;
  if (disc < -1e-9 * (1.0 + S * S)) return out;
  const double root = std::sqrt(std::max(0.0, disc));
  const double a2 = 0.5 * (S - root), b2 = 0.5 * (S + root);
  if (!(a2 > 0.0)) return out;
  out.a = std::sqrt(a2);
  out.b = std::sqrt(b2);
  out.ok = true;

  const double fit_h2 = 1.0 / a2 + 1.0 / b2;
  const double fit_hmx2 = a2 + b2;
  const double fit_xi2 = std::pow(1.0 / out.a - out.a, 2) + std::pow(1.0 / out.b - out.b, 2);
  const double fit_hxi = fit_h2 - 2.0;
  double worst = 0.0;
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) {
      const GeomPt pt = b.point(p, q);
      const Vec4 xi = pt.H + pt.xperp;
      worst = std::max(worst, std::abs(pt.h2 - fit_h2));
      worst = std::max(worst, std::abs(pt.xperp.squaredNorm() - fit_hmx2));
      worst = std::max(worst, std::abs(xi.squaredNorm() - fit_xi2));
      worst = std::max(worst, std::abs(pt.H.dot(xi) - fit_hxi));
    }
  out.match_residual = worst / (1.0 + fit_hmx2 + fit_h2);
  return out;
}

CertificationCheck check_certification(const CertifiedProduct& cp, double tol) {
  CertificationCheck out;
  const GeometryBundle b = build_geometry(cp.surface);
  const XiEstimate e = xi_estimate(cp.surface, b, tol);
  double sup = 0.0;
  for (int p = 0; p < cp.surface.spec.nu; ++p)
    for (int q = 0; q < cp.surface.spec.nv; ++q)
      sup = std::max(sup, (e.xi_hat.vec4(p, q) - cp.xi.vec4(p, q)).norm());
  out.xi_sup_diff = sup;
  out.parallel_residual = e.parallel_residual;
  out.ok = sup <= tol && e.parallel_residual <= tol;
  return out;
}

}  // namespace xigeo
