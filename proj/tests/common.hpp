#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "xigeo/surfaces.hpp"

namespace xigeo::test {

constexpr double kPi = std::numbers::pi;

inline GridSpec torus_spec(int nu, int nv) { return GridSpec(nu, nv, 2 * kPi, 2 * kPi); }

// Real 4x4 representation of a complex 2x2 matrix acting on C^2 (commutes with J).
inline Eigen::Matrix4d complex_to_real(const Eigen::Matrix2cd& u) {
  Eigen::Matrix4d r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const std::complex<double> z = u(i, j);
      r(2 * i, 2 * j) = z.real();
      r(2 * i, 2 * j + 1) = -z.imag();
      r(2 * i + 1, 2 * j) = z.imag();
      r(2 * i + 1, 2 * j + 1) = z.real();
    }
  return r;
}

// Deterministic pseudo-random unitary of C^2 (QR of a random complex matrix).
inline Eigen::Matrix4d random_unitary(unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Matrix2cd a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = std::complex<double>(gauss(rng), gauss(rng));
  const Eigen::HouseholderQR<Eigen::Matrix2cd> qr(a);
  Eigen::Matrix2cd q = qr.householderQ();
  Eigen::Matrix2cd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 2; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return complex_to_real(q);
}

inline ImmersionGrid transform_surface(const ImmersionGrid& m, const Eigen::Matrix4d& lin,
                                       const Vec4& offset = Vec4::Zero()) {
  ImmersionGrid out = m;
  out.provenance = m.provenance + "+transformed";
  for (int p = 0; p < m.spec.nu; ++p)
    for (int q = 0; q < m.spec.nv; ++q)
      out.x.set_vec4(p, q, Vec4(lin * m.x.vec4(p, q) + offset));
  return out;
}

}  // namespace xigeo::test
