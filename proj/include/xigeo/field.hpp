#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "xigeo/errors.hpp"

namespace xigeo {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;

// Ambient coordinates on R^4 ~ C^2 are ordered (Re z1, Im z1, Re z2, Im z2).
// The complex structure J rotates each complex line by +90 degrees.
inline Vec4 ambient_J(const Vec4& w) { return Vec4(-w[1], w[0], -w[3], w[2]); }

// Standard symplectic form omega(X, Y) = <JX, Y>.
inline double symplectic(const Vec4& x, const Vec4& y) { return ambient_J(x).dot(y); }

// 2D rotation by +90 degrees, used for plane-curve normals n = J T.
inline Vec2 plane_J(const Vec2& w) { return Vec2(-w[1], w[0]); }

enum class Axis { U, V };

// Uniform sampling grid on the parameter torus [0, period_u) x [0, period_v).
// Sample points are u_p = p*period_u/nu, v_q = q*period_v/nv with no endpoint
// duplication.
struct GridSpec {
  int nu = 0;
  int nv = 0;
  double period_u = 0.0;
  double period_v = 0.0;

  GridSpec() = default;
  GridSpec(int nu_, int nv_, double pu, double pv)
      : nu(nu_), nv(nv_), period_u(pu), period_v(pv) {
    if (nu < 8 || nv < 8)
      throw UsageError("GridSpec: nu and nv must be >= 8 (got " + std::to_string(nu) +
                       "x" + std::to_string(nv) + ")");
    if (!(period_u > 0.0) || !(period_v > 0.0))
      throw UsageError("GridSpec: periods must be positive");
  }

  double u(int p) const { return period_u * p / nu; }
  double v(int q) const { return period_v * q / nv; }
  int points() const { return nu * nv; }
  double cell_area() const { return (period_u / nu) * (period_v / nv); }

  bool operator==(const GridSpec& o) const {
    return nu == o.nu && nv == o.nv && period_u == o.period_u && period_v == o.period_v;
  }
};

// Sampled field on a GridSpec with D real components per point, stored
// row-major over (u, v): value (p, q, c) lives at ((p*nv + q)*D + c).
template <int D>
struct Field {
  GridSpec spec;
  std::vector<double> values;

  Field() = default;
  explicit Field(const GridSpec& s) : spec(s), values(static_cast<size_t>(s.points()) * D, 0.0) {}

  static constexpr int components = D;

  double& at(int p, int q, int c = 0) {
    return values[(static_cast<size_t>(p) * spec.nv + q) * D + c];
  }
  double at(int p, int q, int c = 0) const {
    return values[(static_cast<size_t>(p) * spec.nv + q) * D + c];
  }

  Vec4 vec4(int p, int q) const {
    static_assert(D == 4);
    const double* base = &values[(static_cast<size_t>(p) * spec.nv + q) * 4];
    return Vec4(base[0], base[1], base[2], base[3]);
  }
  void set_vec4(int p, int q, const Vec4& w) {
    static_assert(D == 4);
    double* base = &values[(static_cast<size_t>(p) * spec.nv + q) * 4];
    base[0] = w[0]; base[1] = w[1]; base[2] = w[2]; base[3] = w[3];
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : values) m = std::max(m, std::abs(x));
    return m;
  }
};

// Builds a scalar field by evaluating fn at every grid point (row-major).
template <typename Fn>
Field<1> make_scalar_field(const GridSpec& spec, Fn&& fn) {
  Field<1> f(spec);
  for (int p = 0; p < spec.nu; ++p)
    for (int q = 0; q < spec.nv; ++q) f.at(p, q) = fn(p, q);
  return f;
}

template <typename Fn>
Field<4> make_vec4_field(const GridSpec& spec, Fn&& fn) {
  Field<4> f(spec);
  for (int p = 0; p < spec.nu; ++p)
    for (int q = 0; q < spec.nv; ++q) f.set_vec4(p, q, fn(p, q));
  return f;
}

}  // namespace xigeo
