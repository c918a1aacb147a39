#pragma once

#include <array>

#include "xigeo/field.hpp"
#include "xigeo/surfaces.hpp"

namespace xigeo {

// First fundamental form, its inverse, Christoffel symbols and area element.
// Christoffels are symmetric in the lower indices; the six independent
// components are stored per upper index k and symmetric pair (ij).
struct MetricField {
  Field<1> g11, g12, g22, detg;
  Field<1> inv11, inv12, inv22;
  Field<1> area;                                // sqrt(det g)
  std::array<std::array<Field<1>, 2>, 3> dg;    // d(g11,g12,g22)/d(u,v)
  std::array<std::array<Field<1>, 3>, 2> gamma; // Gamma^k_(uu,uv,vv)
};

inline int sym2(int i, int j) { return i + j; }      // (0,0)->0 (0,1)->1 (1,1)->2
inline int sym3(int i, int j, int l) { return i + j + l; }

// Pointwise view of the geometry at one grid node. All tensor indices are
// coordinate indices (0 = u, 1 = v); the cubic form and its derivatives are
// total-symmetric, addressed by index sums.
struct GeomPt {
  double g[2][2], inv[2][2], Gm[2][2][2];
  double detg, area;
  Vec4 x, xd[2], xdd[2][2];
  Vec4 h[2][2];            // second fundamental form, ambient normal vectors
  Vec4 H, xtop, xperp;
  Vec4 e[2];               // oriented orthonormal tangent frame
  double t[2];             // <x, x_i>
  double C4[4];            // C111, C112, C122, C222
  double h2, H2, Kg, Ki;

  bool has_derivatives = false;
  double dC[2][4];         // (grad C)_{p,(ijl)}
  double ddC[2][2][4];     // (grad^2 C)_{q,p,(ijl)} = nabla_q nabla_p C
  Vec4 dHperp[2];          // normal projection of dH
  double nh2, nHp2;        // |grad h|^2, |grad-perp H|^2
  double Hh[2];            // <H, J x_a>
  double Hh_d[2][2];       // Hhat_{a,i}
  double Hh_dd[2][2][2];   // Hhat_{a,ij} (derivative slots i then j)

  double C3(int i, int j, int l) const { return C4[sym3(i, j, l)]; }
  double dC4(int p, int i, int j, int l) const { return dC[p][sym3(i, j, l)]; }
  double ddC4(int q, int p, int i, int j, int l) const { return ddC[q][p][sym3(i, j, l)]; }

  // contravariant components of the tangential part of an ambient vector
  Vec2 tangential_coords(const Vec4& w) const {
    const double a = w.dot(xd[0]), b = w.dot(xd[1]);
    return Vec2(inv[0][0] * a + inv[0][1] * b, inv[1][0] * a + inv[1][1] * b);
  }
  Vec4 normal_project(const Vec4& w) const {
    const Vec2 c = tangential_coords(w);
    return w - c[0] * xd[0] - c[1] * xd[1];
  }
  // components of a normal vector against the normal basis J x_a (index down)
  double normal_comp(const Vec4& w, int a) const { return w.dot(ambient_J(xd[a])); }
};

// Geometry of an immersed torus: metric data, second fundamental form as an
// ambient field and as the symmetric cubic form C_{ijl} = <h(d_i,d_j), J x_l>,
// mean curvature, curvature scalars by two independent routes, and the
// position split. covariant_derivatives() fills in the derivative level.
struct GeometryBundle {
  GridSpec spec;
  double lagrangian = 0.0;       // normalized sup of omega(x_u, x_v)
  Field<4> x, xu, xv, xuu, xuv, xvv;
  MetricField metric;
  std::array<Field<4>, 3> h;     // h_uu, h_uv, h_vv
  Field<4> H;
  std::array<Field<1>, 4> cubic; // symmetrized C components
  double cubic_asymmetry = 0.0;  // pre-symmetrization asymmetry / (1 + max|C|)
  Field<1> h2, H2, K_gauss, K_intr, R;
  Field<1> t1, t2, x2;
  Field<4> x_top, x_perp;
  Field<4> e1, e2;

  bool has_derivatives = false;
  std::array<std::array<Field<1>, 4>, 2> gradC;                 // [p][(ijl)]
  std::array<std::array<std::array<Field<1>, 4>, 2>, 2> hessC;  // [q][p][(ijl)]
  std::array<Field<4>, 2> gradHperp;
  Field<1> norm2_grad_h, norm2_grad_Hperp;
  std::array<Field<1>, 2> Hhat;
  std::array<std::array<Field<1>, 2>, 2> Hhat_d;                // [a][i]
  std::array<std::array<std::array<Field<1>, 2>, 2>, 2> Hhat_dd;// [a][i][j]

  GeomPt point(int p, int q) const;
};

// g_ij = <x_i, x_j> with Christoffels from spectral derivatives of g.
// Throws NumericError when det g < 1e-12 anywhere.
MetricField metric_and_connection(const ImmersionGrid& m);

// Fills the bundle through the scalar level: h, C (symmetrized, with the raw
// asymmetry recorded), H, |h|^2, |H|^2, position split, intrinsic curvature
// (Brioschi) and the Gauss-route curvature (|H|^2 - |h|^2)/2.
GeometryBundle second_fundamental(const ImmersionGrid& m, const MetricField& g);

// Adds covariant derivatives: grad C, grad^2 C, grad-perp H, the H-component
// tensors and the |grad h|^2 / |grad-perp H|^2 invariants.
void covariant_derivatives(GeometryBundle& b);

// Full pipeline: metric -> second fundamental -> covariant derivatives.
GeometryBundle build_geometry(const ImmersionGrid& m);

// Lagrangian angle and Maslov data. The angle beta is multi-valued; the
// single-valued unit phase e^{i beta} = Omega(e1, e2) is differentiated
// instead of unwrapping branches. alpha is computed from the mean curvature
// (alpha_i = -<JH, x_i>), which is the single-valued primary route; periods
// are line integrals over the two generators divided by 2*pi.
struct MaslovData {
  Field<1> beta;                   // representative in (-pi, pi]
  Field<1> alpha_u, alpha_v;
  Field<1> beta_u, beta_v;         // phase-derived derivative of beta
  double period_u = 0.0, period_v = 0.0;
  double dbeta_alpha_residual = 0.0;
  double gradient_residual = 0.0;  // sup |x_*(grad beta) + J H|
};

MaslovData maslov(const ImmersionGrid& m, const GeometryBundle& b,
                  double lagrangian_tol = 1e-8);

// Sup-norm residuals of the structure equations, each comparing two
// independently computed routes:
//  - gauss:   intrinsic curvature (metric route) vs the h-quadratic
//  - codazzi: total symmetry of grad C across all four slots
//  - ricci:   normal-connection curvature vs the shape-operator commutator
//  - normal_tangent: normal-connection curvature vs intrinsic curvature
//  - motion:  x_{,ij} minus its tangential + h parts
struct CurvatureResiduals {
  double gauss, codazzi, ricci, normal_tangent, motion;
};

CurvatureResiduals curvature_residuals(const GeometryBundle& b);

// Orthonormal-frame components of the cubic form at a point.
struct CubicFrame {
  double c0, c1, c2, c3;  // C(e1,e1,e1), C(e1,e1,e2), C(e1,e2,e2), C(e2,e2,e2)
};

CubicFrame cubic_in_frame(const GeomPt& pt);

// Closed-form rotation angle that kills both off-diagonal components of a
// flat-point cubic form. The spin-3 and spin-1 parts of C rotate by 3*theta
// and theta; both off-diagonals vanish iff e^{4 i theta} aligns their phases,
// which is solvable exactly when |spin-1| = 4 |spin-3| (equivalent to K = 0).
// Returns the smallest angle in [0, pi/2) and the achieved off-diagonal size.
struct DiagAngle {
  double theta;
  double residual;
};

DiagAngle diagonalize_cubic(const CubicFrame& c);

// Per-point diagonalizing frame of a flat surface. Requires max|K| <= flat_tol.
struct DiagonalFrame {
  Field<1> theta;
  double offdiag_residual;
};

DiagonalFrame diagonalize_frame(const GeometryBundle& b, double flat_tol = 1e-6);

}  // namespace xigeo
