#include "xigeo/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace xigeo {

namespace {

constexpr double kPi = std::numbers::pi;

int parity_sign(int k) { return (k % 2 == 0) ? 1 : -1; }

// First-derivative matrix for the standard period 2*pi (Trefethen's closed
// forms; even n drops the Nyquist mode as usual for odd-order derivatives).
Eigen::MatrixXd d1_standard(int n) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const double h = 2.0 * kPi / n;
  const bool even = (n % 2 == 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int k = i - j;
      const double s = parity_sign(k);
      if (even)
        d(i, j) = 0.5 * s / std::tan(0.5 * k * h);
      else
        d(i, j) = 0.5 * s / std::sin(0.5 * k * h);
    }
  }
  return d;
}

Eigen::MatrixXd d2_standard(int n) {
  const bool even = (n % 2 == 0);
  if (!even) {
    // Odd n: the interpolant space is closed under differentiation.
    Eigen::MatrixXd d1 = d1_standard(n);
    return d1 * d1;
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const double h = 2.0 * kPi / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        d(i, j) = -kPi * kPi / (3.0 * h * h) - 1.0 / 6.0;
      } else {
        const int k = i - j;
        const double sn = std::sin(0.5 * k * h);
        d(i, j) = -parity_sign(k) / (2.0 * sn * sn);
      }
    }
  }
  return d;
}

template <int D>
void check_finite(const Field<D>& f, const char* op) {
  for (int p = 0; p < f.spec.nu; ++p)
    for (int q = 0; q < f.spec.nv; ++q)
      for (int c = 0; c < D; ++c)
        if (!std::isfinite(f.at(p, q, c))) {
          std::ostringstream os;
          os << op << ": non-finite value at grid index (" << p << "," << q
             << "), component " << c;
          throw NumericError(os.str());
        }
}

}  // namespace

Eigen::MatrixXd fourier_diff_matrix(int n, double period, int order) {
  if (n < 2) throw UsageError("fourier_diff_matrix: n must be >= 2");
  if (!(period > 0.0)) throw UsageError("fourier_diff_matrix: period must be positive");
  const double scale = 2.0 * kPi / period;
  if (order == 1) return scale * d1_standard(n);
  if (order == 2) return (scale * scale) * d2_standard(n);
  throw UsageError("fourier_diff_matrix: order must be 1 or 2");
}

template <int D>
Field<D> differentiate(const Field<D>& f, Axis axis, int order) {
  check_finite(f, "differentiate");
  const GridSpec& s = f.spec;
  Field<D> out(s);
  if (axis == Axis::U) {
    const Eigen::MatrixXd d = fourier_diff_matrix(s.nu, s.period_u, order);
    const size_t row = static_cast<size_t>(s.nv) * D;  // contiguous u-slice
    for (int p = 0; p < s.nu; ++p) {
      double* o = &out.values[p * row];
      for (int m = 0; m < s.nu; ++m) {
        const double c = d(p, m);
        const double* in = &f.values[m * row];
        for (size_t k = 0; k < row; ++k) o[k] += c * in[k];
      }
    }
  } else {
    const Eigen::MatrixXd d = fourier_diff_matrix(s.nv, s.period_v, order);
    for (int p = 0; p < s.nu; ++p) {
      for (int q = 0; q < s.nv; ++q) {
        double acc[D] = {};
        for (int m = 0; m < s.nv; ++m) {
          const double c = d(q, m);
          for (int k = 0; k < D; ++k) acc[k] += c * f.at(p, m, k);
        }
        for (int k = 0; k < D; ++k) out.at(p, q, k) = acc[k];
      }
    }
  }
  return out;
}

template Field<1> differentiate<1>(const Field<1>&, Axis, int);
template Field<2> differentiate<2>(const Field<2>&, Axis, int);
template Field<4> differentiate<4>(const Field<4>&, Axis, int);

double integrate(const Field<1>& f, const Field<1>& area_element) {
  if (!(f.spec == area_element.spec))
    throw UsageError("integrate: mismatched grids");
  check_finite(f, "integrate");
  const GridSpec& s = f.spec;
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q)
      if (!(area_element.at(p, q) > 0.0)) {
        std::ostringstream os;
        os << "integrate: degenerate metric, area element " << area_element.at(p, q)
           << " at grid index (" << p << "," << q << ")";
        throw NumericError(os.str());
      }
  double acc = 0.0;  // fixed row-major reduction order
  for (int p = 0; p < s.nu; ++p)
    for (int q = 0; q < s.nv; ++q) acc += f.at(p, q) * area_element.at(p, q);
  return acc * s.cell_area();
}

}  // namespace xigeo
