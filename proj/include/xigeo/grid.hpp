#pragma once

#include <Eigen/Dense>

#include "xigeo/field.hpp"

namespace xigeo {

// Dense trigonometric differentiation matrix for a uniform periodic grid of n
// points on [0, period). Exact (to rounding) for trigonometric polynomials
// below the Nyquist degree. order is 1 or 2.
Eigen::MatrixXd fourier_diff_matrix(int n, double period, int order);

// Derivative of the trigonometric interpolant of f along the given axis.
// Rejects non-finite input with a diagnostic naming the offending grid index.
template <int D>
Field<D> differentiate(const Field<D>& f, Axis axis, int order);

// Trapezoidal (= rectangle) rule on the periodic grid:
//   sum f * area_element * (period_u/nu) * (period_v/nv)
// accumulated in row-major order. Spectrally accurate for smooth periodic
// integrands. area_element must be positive pointwise.
double integrate(const Field<1>& f, const Field<1>& area_element);

}  // namespace xigeo
