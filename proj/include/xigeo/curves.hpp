#pragma once

#include <functional>
#include <string>
#include <vector>

#include "xigeo/field.hpp"

namespace xigeo {

// Closed (or open) plane curve sampled uniformly in arc length.
// Invariants: |tangent| = 1 pointwise; tangent is the arc-length derivative
// of gamma (spectrally checkable when closed).
struct PlaneCurve {
  int n = 0;
  double length = 0.0;
  std::vector<Vec2> gamma;
  std::vector<Vec2> tangent;
  std::vector<double> curvature;
  bool closed = false;
  double closure_gap = 0.0;  // position + tangent gap when traversing once
};

// Circle of radius r centered at the origin, CCW, n uniform arc-length samples.
PlaneCurve make_circle(double r, int n);

// Ellipse with semi-axes (a, b) centered at the origin, resampled to uniform
// arc length (parameter locations solved to ~1e-12).
PlaneCurve make_ellipse(double a, double b, int n);

// Arc-length resampling of an analytic curve given position/derivative
// callables on the periodic parameter [0, 2*pi).
PlaneCurve resample_arclength(const std::function<Vec2(double)>& pos,
                              const std::function<Vec2(double)>& dpos, int n);

// A centered circle of radius r is a lambda-curve (k + <gamma, n> = lambda,
// n = J T) exactly when lambda = 1/r - r.
double circle_lambda(double r);

// Positive root of r^2 + lambda*r - 1 = 0: the circle radius for a given lambda.
double circle_radius(double lambda);

// Fixed-step RK4 integration of the lambda-curve system
//   gamma' = T,  T' = (lambda - <gamma, J T>) J T,
// recording curvature k = lambda - <gamma, J T> along the way. Aborts with a
// refinement request if |T| drifts from 1 by more than 1e-9.
PlaneCurve integrate_lambda_curve(double lambda, const Vec2& gamma0, const Vec2& t0,
                                  double s_max, double ds);

struct Rotation {
  int p = 1;  // winding number of the closed curve
  int q = 1;  // number of radial oscillations
};

struct LambdaShoot {
  double lambda = 0.0;
  Rotation rotation;
  bool found = false;
  double r0 = 0.0;               // starting radius of the solution
  PlaneCurve curve;              // closed curve (valid when found)
  double closure_residual = 0.0; // position + tangent gap after p windings
  std::string message;           // outcome description
};

// Closed lambda-curve search. Solutions started perpendicular to a ray are
// reflection-symmetric across every ray they cross perpendicularly, so a curve
// closing after winding p times with q radial oscillations is perpendicular to
// the radial direction at swept angle pi*p/q. The shooter integrates from
// gamma0 = (r0, 0), T0 = (0, 1) until the swept angle reaches pi*p/q, bisects
// the perpendicularity defect <gamma, T> over r0 in [lo, hi], and validates
// each root by integrating the full curve (closure gap + oscillation count).
// The centered circle is the degenerate member of every rotation class and is
// recovered exactly. Absence of a sign change is a not-found outcome, not an
// error.
LambdaShoot shoot_closed(double lambda, Rotation rotation, double lo, double hi,
                         double ds = 1e-3, int samples = 256);

// Largest deviation of the lambda-curve equation over the samples, with the
// curvature recomputed spectrally from the tangents (independent of any
// curvature data carried by the curve).
double lambda_curve_residual(const PlaneCurve& c, double lambda);

}  // namespace xigeo
