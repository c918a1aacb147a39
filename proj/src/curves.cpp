#include "xigeo/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "xigeo/grid.hpp"

namespace xigeo {

namespace {

constexpr double kPi = std::numbers::pi;

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr double kGx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                           -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                           0.7966664774136267,  0.9602898564975363};
constexpr double kGw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                           0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                           0.2223810344533745, 0.1012285362903763};

double gauss8(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) acc += kGw[i] * f(mid + half * kGx[i]);
  return acc * half;
}

// State of the lambda-curve system plus the swept polar angle.
struct CurveState {
  Vec2 g;
  Vec2 t;
  double phi;
};

struct CurveDeriv {
  Vec2 dg;
  Vec2 dt;
  double dphi;
};

CurveDeriv lambda_rhs(double lambda, const CurveState& y) {
  const Vec2 n = plane_J(y.t);
  const double k = lambda - y.g.dot(n);
  const double r2 = y.g.squaredNorm();
  CurveDeriv d;
  d.dg = y.t;
  d.dt = k * n;
  d.dphi = (y.g[0] * y.t[1] - y.g[1] * y.t[0]) / r2;
  return d;
}

CurveState rk4_step(double lambda, const CurveState& y, double h) {
  auto add = [](const CurveState& a, const CurveDeriv& d, double s) {
    return CurveState{a.g + s * d.dg, a.t + s * d.dt, a.phi + s * d.dphi};
  };
  const CurveDeriv k1 = lambda_rhs(lambda, y);
  const CurveDeriv k2 = lambda_rhs(lambda, add(y, k1, 0.5 * h));
  const CurveDeriv k3 = lambda_rhs(lambda, add(y, k2, 0.5 * h));
  const CurveDeriv k4 = lambda_rhs(lambda, add(y, k3, h));
  CurveState out;
  out.g = y.g + (h / 6.0) * (k1.dg + 2.0 * k2.dg + 2.0 * k3.dg + k4.dg);
  out.t = y.t + (h / 6.0) * (k1.dt + 2.0 * k2.dt + 2.0 * k3.dt + k4.dt);
  out.phi = y.phi + (h / 6.0) * (k1.dphi + 2.0 * k2.dphi + 2.0 * k3.dphi + k4.dphi);
  return out;
}

// Dense trajectory sampled at uniform arc length (step ds). Integration stops
// once phi reaches phi_stop (plus `tail` extra steps for interpolation
// stencils) or s exceeds s_cap.
struct Trajectory {
  std::vector<CurveState> states;  // states[k] at s = k*ds
  double ds = 0.0;
  bool ok = false;                 // phi_stop reached before the caps
  int cross_index = -1;            // first k with states[k].phi >= phi_stop
};

Trajectory integrate_until_angle(double lambda, double r0, double phi_stop, double ds,
                                 double s_cap, int tail) {
  Trajectory tr;
  tr.ds = ds;
  CurveState y{Vec2(r0, 0.0), Vec2(0.0, 1.0), 0.0};
  tr.states.push_back(y);
  const int max_steps = static_cast<int>(s_cap / ds) + 1;
  int cross = -1;
  for (int k = 0; k < max_steps; ++k) {
    y = rk4_step(lambda, y, ds);
    if (y.g.squaredNorm() < 1e-12) return tr;  // curve ran into the origin
    tr.states.push_back(y);
    if (cross < 0 && y.phi >= phi_stop) cross = static_cast<int>(tr.states.size()) - 1;
    if (cross >= 0 && static_cast<int>(tr.states.size()) - 1 >= cross + tail) {
      tr.ok = true;
      tr.cross_index = cross;
      return tr;
    }
  }
  return tr;
}

// Lands exactly on phi = phi_target starting from the last state below it.
CurveState refine_to_angle(double lambda, const CurveState& below, double phi_target) {
  CurveState y = below;
  for (int it = 0; it < 6; ++it) {
    const double dphi = lambda_rhs(lambda, y).dphi;
    if (dphi == 0.0) break;
    const double step = (phi_target - y.phi) / dphi;
    if (std::abs(step) < 1e-16) break;
    y = rk4_step(lambda, y, step);
  }
  return y;
}

// Perpendicularity defect <gamma, T> sampled at swept angle phi_star.
// NaN marks an invalid evaluation (origin collision or angle never reached).
double shoot_defect(double lambda, double r0, double phi_star, double ds, double s_cap) {
  Trajectory tr = integrate_until_angle(lambda, r0, phi_star, ds, s_cap, 0);
  if (tr.cross_index < 0) return std::numeric_limits<double>::quiet_NaN();
  const CurveState y = refine_to_angle(lambda, tr.states[tr.cross_index - 1], phi_star);
  return y.g.dot(y.t);
}

double lagrange8_weighted(const std::vector<CurveState>& st, double ds, double s,
                          int dim /*0..3: gx,gy,tx,ty*/) {
  const int m = static_cast<int>(st.size()) - 1;
  int j0 = static_cast<int>(std::floor(s / ds)) - 3;
  j0 = std::clamp(j0, 0, m - 7);
  const double x = s / ds - j0;
  double acc = 0.0;
  for (int k = 0; k < 8; ++k) {
    double w = 1.0;
    for (int j = 0; j < 8; ++j)
      if (j != k) w *= (x - j) / (k - j);
    const CurveState& y = st[j0 + k];
    const double val = dim == 0 ? y.g[0] : dim == 1 ? y.g[1] : dim == 2 ? y.t[0] : y.t[1];
    acc += w * val;
  }
  return acc;
}

PlaneCurve resample_trajectory(const Trajectory& tr, double lambda, double total_length,
                               int n) {
  PlaneCurve c;
  c.n = n;
  c.length = total_length;
  c.gamma.resize(n);
  c.tangent.resize(n);
  c.curvature.resize(n);
  for (int i = 0; i < n; ++i) {
    const double s = total_length * i / n;
    Vec2 g(lagrange8_weighted(tr.states, tr.ds, s, 0), lagrange8_weighted(tr.states, tr.ds, s, 1));
    Vec2 t(lagrange8_weighted(tr.states, tr.ds, s, 2), lagrange8_weighted(tr.states, tr.ds, s, 3));
    t.normalize();
    c.gamma[i] = g;
    c.tangent[i] = t;
    c.curvature[i] = lambda - g.dot(plane_J(t));
  }
  return c;
}

}  // namespace

PlaneCurve make_circle(double r, int n) {
  if (!(r > 0.0)) throw UsageError("make_circle: radius must be positive");
  if (n < 8) throw UsageError("make_circle: need at least 8 samples");
  PlaneCurve c;
  c.n = n;
  c.length = 2.0 * kPi * r;
  c.closed = true;
  c.closure_gap = 0.0;
  c.gamma.resize(n);
  c.tangent.resize(n);
  c.curvature.assign(n, 1.0 / r);
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * kPi * i / n;
    c.gamma[i] = Vec2(r * std::cos(th), r * std::sin(th));
    c.tangent[i] = Vec2(-std::sin(th), std::cos(th));
  }
  return c;
}

PlaneCurve resample_arclength(const std::function<Vec2(double)>& pos,
                              const std::function<Vec2(double)>& dpos, int n) {
  if (n < 8) throw UsageError("resample_arclength: need at least 8 samples");
  auto speed = [&](double t) { return dpos(t).norm(); };

  const int m = 2048;  // cumulative arc length on a fine parameter grid
  const double h = 2.0 * kPi / m;
  std::vector<double> s_at(m + 1, 0.0);
  for (int k = 0; k < m; ++k) s_at[k + 1] = s_at[k] + gauss8(speed, k * h, (k + 1) * h);
  const double total = s_at[m];

  auto arclen = [&](double t) {
    t = std::clamp(t, 0.0, 2.0 * kPi);
    const int k = std::min(static_cast<int>(t / h), m - 1);
    return s_at[k] + gauss8(speed, k * h, t);
  };

  PlaneCurve c;
  c.n = n;
  c.length = total;
  c.closed = true;
  c.closure_gap = (pos(2.0 * kPi) - pos(0.0)).norm();
  c.gamma.resize(n);
  c.tangent.resize(n);
  c.curvature.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double target = total * i / n;
    const int k0 = static_cast<int>(
        std::lower_bound(s_at.begin(), s_at.end(), target) - s_at.begin());
    double t = std::clamp(k0 * h, 0.0, 2.0 * kPi);
    for (int it = 0; it < 12; ++it) {
      const double delta = (arclen(t) - target) / speed(t);
      t -= delta;
      if (std::abs(delta) < 1e-15) break;
    }
    c.gamma[i] = pos(t);
    c.tangent[i] = dpos(t) / speed(t);
  }

  // spectral curvature k = <dT/ds, J T>
  const Eigen::MatrixXd d = fourier_diff_matrix(n, total, 1);
  for (int i = 0; i < n; ++i) {
    Vec2 dt(0.0, 0.0);
    for (int j = 0; j < n; ++j) dt += d(i, j) * c.tangent[j];
    c.curvature[i] = dt.dot(plane_J(c.tangent[i]));
  }
  return c;
}

PlaneCurve make_ellipse(double a, double b, int n) {
  if (!(a > 0.0) || !(b > 0.0)) throw UsageError("make_ellipse: semi-axes must be positive");
  auto pos = [a, b](double t) { return Vec2(a * std::cos(t), b * std::sin(t)); };
  auto dpos = [a, b](double t) { return Vec2(-a * std::sin(t), b * std::cos(t)); };
  PlaneCurve c = resample_arclength(pos, dpos, n);
  // exact curvature of the ellipse at the resampled parameters
  for (int i = 0; i < n; ++i) {
    const Vec2& g = c.gamma[i];
    // recover t from the resampled point
    const double t = std::atan2(g[1] / b, g[0] / a);
    const double sp = dpos(t).norm();
    c.curvature[i] = a * b / (sp * sp * sp);
  }
  return c;
}

double circle_lambda(double r) {
  if (!(r > 0.0)) throw UsageError("circle_lambda: radius must be positive");
  return 1.0 / r - r;
}

double circle_radius(double lambda) {
  return 0.5 * (-lambda + std::sqrt(lambda * lambda + 4.0));
}

PlaneCurve integrate_lambda_curve(double lambda, const Vec2& gamma0, const Vec2& t0,
                                  double s_max, double ds) {
  if (std::abs(t0.norm() - 1.0) > 1e-10)
    throw UsageError("integrate_lambda_curve: T0 must be a unit vector");
  if (!(ds > 0.0) || ds > 1e-2)
    throw UsageError("integrate_lambda_curve: need 0 < ds <= 1e-2");
  const int steps = static_cast<int>(std::ceil(s_max / ds));
  PlaneCurve c;
  c.n = steps + 1;
  c.length = steps * ds;
  c.gamma.reserve(c.n);
  c.tangent.reserve(c.n);
  c.curvature.reserve(c.n);
  CurveState y{gamma0, t0, 0.0};
  for (int k = 0; k <= steps; ++k) {
    const double drift = std::abs(y.t.norm() - 1.0);
    if (drift > 1e-9) {
      std::ostringstream os;
      os << "integrate_lambda_curve: |T| drifted by " << drift << " at s = " << k * ds
         << "; decrease ds";
      throw NumericError(os.str());
    }
    c.gamma.push_back(y.g);
    c.tangent.push_back(y.t);
    c.curvature.push_back(lambda - y.g.dot(plane_J(y.t)));
    if (k < steps) y = rk4_step(lambda, y, ds);
  }
  c.closed = false;
  c.closure_gap = (c.gamma.back() - c.gamma.front()).norm() +
                  (c.tangent.back() - c.tangent.front()).norm();
  return c;
}

LambdaShoot shoot_closed(double lambda, Rotation rotation, double lo, double hi, double ds,
                         int samples) {
  if (!(lo > 0.0) || !(hi > lo)) throw UsageError("shoot_closed: invalid bracket");
  if (rotation.p < 1 || rotation.q < 1) throw UsageError("shoot_closed: invalid rotation");
  if (std::gcd(rotation.p, rotation.q) != 1)
    throw UsageError("shoot_closed: rotation p/q must be in lowest terms");

  LambdaShoot out;
  out.lambda = lambda;
  out.rotation = rotation;

  const double phi_star = kPi * rotation.p / rotation.q;
  const double phi_full = 2.0 * kPi * rotation.p;
  const double s_cap = 60.0 * (1.0 + hi);
  auto defect = [&](double r) { return shoot_defect(lambda, r, phi_star, ds, s_cap); };

  // scan the bracket for sign changes of the defect
  const int cells = 48;
  std::vector<double> rs(cells + 1), fs(cells + 1);
  for (int i = 0; i <= cells; ++i) {
    rs[i] = lo + (hi - lo) * i / cells;
    fs[i] = defect(rs[i]);
  }

  struct Candidate {
    double r0, closure;
    PlaneCurve curve;
  };
  std::vector<Candidate> valid;

  for (int i = 0; i < cells; ++i) {
    if (!std::isfinite(fs[i]) || !std::isfinite(fs[i + 1])) continue;
    if (fs[i] == 0.0) fs[i] = std::copysign(1e-300, fs[i + 1] == 0 ? 1.0 : -fs[i + 1]);
    if (fs[i] * fs[i + 1] > 0.0) continue;
    double a = rs[i], b = rs[i + 1], fa = fs[i];
    for (int it = 0; it < 100 && (b - a) > 1e-15 * (1.0 + b); ++it) {
      const double mid = 0.5 * (a + b);
      const double fm = defect(mid);
      if (!std::isfinite(fm)) break;
      if (fa * fm <= 0.0) b = mid;
      else { a = mid; fa = fm; }
    }
    const double r0 = 0.5 * (a + b);

    // validate: integrate the whole curve and measure closure
    Trajectory tr = integrate_until_angle(lambda, r0, phi_full, ds, 4.0 * s_cap, 8);
    if (!tr.ok) continue;
    const CurveState end = refine_to_angle(lambda, tr.states[tr.cross_index - 1], phi_full);
    const double total_length =
        (tr.cross_index - 1) * ds + (end.phi - tr.states[tr.cross_index - 1].phi) /
                                        lambda_rhs(lambda, tr.states[tr.cross_index - 1]).dphi;
    const double closure = (end.g - Vec2(r0, 0.0)).norm() + (end.t - Vec2(0.0, 1.0)).norm();

    // oscillation structure: 2q sign changes of <gamma, T> over the loop,
    // or a radially flat trajectory (the circle, member of every class)
    double rmin = r0, rmax = r0;
    int flips = 0;
    double prev = 0.0;
    for (int k = 0; k <= tr.cross_index; ++k) {
      const double r = tr.states[k].g.norm();
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
      const double val = tr.states[k].g.dot(tr.states[k].t);
      if (std::abs(val) < 1e-10 * (1.0 + r0)) continue;
      if (prev != 0.0 && val * prev < 0.0) ++flips;
      prev = val;
    }
    const bool flat = (rmax - rmin) <= 1e-7 * (1.0 + r0);
    if (!flat && flips != 2 * rotation.q) continue;
    if (closure > 1e-6) continue;

    // keep a slightly longer trajectory so interpolation stencils never wrap
    Candidate cand{r0, closure, resample_trajectory(tr, lambda, total_length, samples)};
    cand.curve.closed = true;
    cand.curve.closure_gap = closure;
    valid.push_back(std::move(cand));
  }

  if (valid.empty()) {
    out.found = false;
    out.message = "no sign change of the shooting defect in bracket";
    return out;
  }
  std::sort(valid.begin(), valid.end(), [](const Candidate& x, const Candidate& y) {
    if (x.closure != y.closure) return x.closure < y.closure;
    return x.r0 < y.r0;
  });
  out.found = true;
  out.r0 = valid.front().r0;
  out.curve = std::move(valid.front().curve);
  out.closure_residual = valid.front().closure;
  out.message = "closed curve found";
  return out;
}

double lambda_curve_residual(const PlaneCurve& c, double lambda) {
  if (!c.closed) throw UsageError("lambda_curve_residual: curve must be closed");
  const Eigen::MatrixXd d = fourier_diff_matrix(c.n, c.length, 1);
  double worst = 0.0;
  for (int i = 0; i < c.n; ++i) {
    Vec2 dt(0.0, 0.0);
    for (int j = 0; j < c.n; ++j) dt += d(i, j) * c.tangent[j];
    const Vec2 n = plane_J(c.tangent[i]);
    const double k = dt.dot(n);
    worst = std::max(worst, std::abs(k + c.gamma[i].dot(n) - lambda));
  }
  return worst;
}

}  // namespace xigeo
