#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xigeo/drift.hpp"
#include "xigeo/geometry.hpp"

namespace xigeo {

// Pointwise xi estimate and parallelism test. xi_hat = H + x_perp is always
// defined pointwise; the surface is a xi-submanifold exactly when xi_hat is a
// parallel normal field. For Lagrangian surfaces parallel normal fields
// correspond via J to Levi-Civita-parallel tangent fields, so the test
// differentiates the tangent field w = -J xi_hat (which always exists) instead
// of fitting a global parallel field (which may not).
struct XiEstimate {
  Field<4> xi_hat;
  Field<1> w_u, w_v;             // contravariant components of w = -J xi_hat
  double tangency_residual = 0;  // normal leak of xi_hat against the tangents
  double parallel_residual = 0;  // sup |grad w| / (1 + sup |w|)
  bool is_xi = false;
  bool has_coefficients = false;
  double coeff1 = 0, coeff2 = 0;  // <xi_hat, J e_a>, grid mean
  double coeff_spread = 0;        // max - min of the frame coefficients
};

XiEstimate xi_estimate(const ImmersionGrid& m, const GeometryBundle& b,
                       double xi_tol = 1e-6, double lagrangian_tol = 1e-8);

// Orthogonal position split (also stored in the bundle; exposed as an op).
struct SplitPosition {
  Field<4> x_top, x_perp;
  Field<1> xtop2;
};

SplitPosition split_position(const ImmersionGrid& m, const GeometryBundle& b);

// Pinching functional P = |h|^2 + |H - xi|^2 - |xi|^2 - 4 and the four side
// conditions of the rigidity statement, with margins:
//   (1) min|h|^2 - 2   (2) min|H|^2 - 2
//   (3) min(|h|^2 - <H, H-xi>)   (4) min<H, xi>
struct PinchingReport {
  Field<1> P;
  double P_min = 0, P_max = 0;
  double margin[4] = {0, 0, 0, 0};
  bool condition[4] = {false, false, false, false};
  double Hxi_min = 0, Hxi_max = 0, Hxi_const_residual = 0;
  bool advisory = false;  // true when the surface failed the xi test
};

PinchingReport pinching_report(const ImmersionGrid& m, const GeometryBundle& b,
                               const XiEstimate& e);

enum class IdentityId {
  Eq217,   // div JH = <JH, x_top>                                  [xi only]
  Eq218,   // Laplace beta = <grad beta, x_top>                     [xi only]
  Eq32,    // Hhat_{a,i} = C_{ija} t^j                              [xi only]
  Eq33,    // second derivatives of Hhat                            [xi only]
  Lem32,   // (1/2) L(|h|^2 + |H-xi|^2) expansion                   [xi only]
  Lem33,   // (1/2) Laplace |x_top|^2 expansion                     [xi only]
  Lem34,   // L<H, xi> = <H, xi> - sum h h xi (H-xi)                [xi only]
  Lem35a,  // (1/2) Laplace |x|^2 = 2 - <H, H-xi>                   [xi only]
  Lem35b,  // (1/2) L |x|^2 = |xi|^2 + 2 - (|x|^2 + <H, xi>)        [xi only]
  Thm21,   // x_*(grad beta) = -J H                                 [Lagrangian]
  Gauss,   // structure equations, see curvature_residuals          [Lagrangian]
  Ricci,
  Codazzi,
  Eq213,
  Motion,
};

const char* identity_name(IdentityId id);
std::optional<IdentityId> identity_from_name(const std::string& name);
const std::vector<IdentityId>& all_identities();
bool identity_requires_xi(IdentityId id);
// Gauss and motion use only the ambient second fundamental form and remain
// meaningful on non-Lagrangian immersions; everything else needs the cubic
// form or the Lagrangian angle.
bool identity_requires_lagrangian(IdentityId id);

// Normalized sup residual of one identity: sup|LHS - RHS| / (1 + sup|LHS| +
// sup|RHS|), except Thm21 which reports the raw sup |x_*(grad beta) + JH|.
// Frame sums over adapted frames are evaluated tensorially; see the
// conventions section of the README for the dictionary. xi-only identities
// refuse surfaces that fail the parallelism test.
double verify_identity(IdentityId id, const ImmersionGrid& m, const GeometryBundle& b,
                       const XiEstimate* e = nullptr, const MaslovData* md = nullptr);

// Global consistency: Gauss-Bonnet integral and inferred genus, the integral
// balance between |H-xi|^2 and |xi|^2 + 4 - |H|^2, and Maslov nontriviality.
struct GlobalChecks {
  double area = 0;
  double gauss_bonnet_integral = 0;
  int genus = 0;
  double genus_distance = 0;  // distance of the raw value to the rounded genus
  double balance_residual = 0;
  bool maslov_nontrivial = false;
};

GlobalChecks global_checks(const ImmersionGrid& m, const GeometryBundle& b,
                           const MaslovData* md);

// Consistency fit against the product-torus family from
// |H-xi|^2 = a^2 + b^2 and |h|^2 = 1/a^2 + 1/b^2; the match residual compares
// the remaining invariants against the fitted pair.
struct TorusFit {
  bool ok = false;
  double a = 0, b = 0;
  double match_residual = 0;
};

TorusFit fit_product_torus(const GeometryBundle& b, const XiEstimate& e);

// Confirms the analytic certificate attached to a curve product: the pointwise
// estimate must reproduce the certified field and pass the parallelism test.
struct CertificationCheck {
  bool ok = false;
  double xi_sup_diff = 0;
  double parallel_residual = 0;
};

CertificationCheck check_certification(const CertifiedProduct& cp, double tol = 1e-6);

}  // namespace xigeo
