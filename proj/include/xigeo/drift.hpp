#pragma once

#include "xigeo/geometry.hpp"

namespace xigeo {

// Gradient, metric Laplacian and the drift operator Lf = Laplace f - <x, grad f>
// of a scalar field. The drift term pairs the gradient with the tangential
// position components already stored in the bundle.
struct ScalarCalc {
  Field<1> f;
  Field<1> grad_u, grad_v;  // contravariant components g^{ij} f_{,j}
  Field<1> laplacian;
  Field<1> drift;           // L f
};

ScalarCalc drift_laplacian(const ImmersionGrid& m, const GeometryBundle& b,
                           const Field<1>& f);

// integral of f * exp(-|x|^2 / 2) dV
double weighted_integral(const Field<1>& f, const ImmersionGrid& m,
                         const GeometryBundle& b);

// | int u Lv w dV + int <grad u, grad v> w dV | / (max magnitude + 1) with the
// Gaussian weight w = exp(-|x|^2/2); zero on closed surfaces.
double ibp_residual(const Field<1>& u, const Field<1>& v, const ImmersionGrid& m,
                    const GeometryBundle& b);

}  // namespace xigeo
