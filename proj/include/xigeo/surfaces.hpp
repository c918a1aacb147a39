#pragma once

#include <string>

#include "xigeo/curves.hpp"
#include "xigeo/field.hpp"

namespace xigeo {

// Doubly periodic sampled immersion x: T^2 -> R^4 ~ C^2. The single source of
// truth for a surface; everything downstream is derived from it.
struct ImmersionGrid {
  GridSpec spec;
  Field<4> x;
  std::string provenance;  // family tag with parameters, or "external"
};

// x(u, v) = (a e^{iu}, b e^{iv}) on periods (2*pi, 2*pi).
ImmersionGrid make_product_torus(double a, double b, const GridSpec& spec);

// x(u, v) = (gamma1(u), gamma2(v)) on periods (L1, L2); both factors must be
// closed arc-length sampled curves.
ImmersionGrid make_product_curves(const PlaneCurve& c1, const PlaneCurve& c2);

// Equivariant torus x(u, v) = (ghat(u) cos v, ghat(u) sin v) with
// ghat = gamma_x + i gamma_y, on periods (L, 2*pi). The curve must stay away
// from the origin. Identically Lagrangian.
ImmersionGrid make_equivariant(const PlaneCurve& c, const GridSpec& spec);

// max over the grid of |omega(x_u, x_v)| / (|x_u| |x_v|); zero characterizes
// Lagrangian surfaces.
double lagrangian_residual(const ImmersionGrid& m);

// Product of two certified lambda-curves. The surface satisfies
// H + x_perp = xi with the parallel normal field xi = lambda1 J T1 (+) lambda2 J T2,
// attached here as certification data for the classifier to confirm.
struct CertifiedProduct {
  ImmersionGrid surface;
  Field<4> xi;              // analytic parallel normal field
  double factor_residual;   // worst lambda-curve equation residual of the factors
};

CertifiedProduct product_xi(const PlaneCurve& c1, double lambda1, const PlaneCurve& c2,
                            double lambda2);

}  // namespace xigeo
