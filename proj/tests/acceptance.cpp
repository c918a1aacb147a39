// Acceptance suite: runs every verification target at its pinned tolerance and
// prints one PASS/FAIL line per criterion. Exit code is the failure count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "xigeo/drift.hpp"
#include "xigeo/grid.hpp"
#include "xigeo/report.hpp"
#include "xigeo/xi.hpp"

using namespace xigeo;
using xigeo::test::kPi;
using xigeo::test::torus_spec;

namespace {

int g_failures = 0;

void line(int number, bool ok, const std::string& what, double value, double tol) {
  if (!ok) ++g_failures;
  std::printf("AC%02d %s %s (value %.3e, tolerance %.1e)\n", number, ok ? "PASS" : "FAIL",
              what.c_str(), value, tol);
}

void line_bool(int number, bool ok, const std::string& what) {
  if (!ok) ++g_failures;
  std::printf("AC%02d %s %s\n", number, ok ? "PASS" : "FAIL", what.c_str());
}

struct Surface {
  ImmersionGrid m;
  GeometryBundle b;
};

Surface built(ImmersionGrid m) {
  Surface s{std::move(m), {}};
  s.b = build_geometry(s.m);
  return s;
}

double field_max_abs_dev(const Field<1>& f, double target) {
  double worst = 0.0;
  for (double v : f.values) worst = std::max(worst, std::abs(v - target));
  return worst;
}

// 1. Equality case of the pinching functional on 20 pseudo-random radii.
void criterion_equality_family() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937 rng(421);
  std::uniform_real_distribution<double> radius(0.3, 3.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double a = radius(rng), b = radius(rng);
    const Surface s = built(make_product_torus(a, b, torus_spec(64, 64)));
    const XiEstimate e = xi_estimate(s.m, s.b);
    const PinchingReport pr = pinching_report(s.m, s.b, e);
    worst = std::max({worst, std::abs(pr.P_min), std::abs(pr.P_max)});
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  line(1, worst <= 1e-8 && elapsed < 30.0,
       "equality family: sup |h|^2+|H-xi|^2-|xi|^2-4 over 20 random tori, " +
           std::to_string(elapsed).substr(0, 4) + " s",
       worst, 1e-8);
}

// 2. Clifford torus datum.
void criterion_clifford() {
  const Surface s = built(make_product_torus(1, 1, torus_spec(64, 64)));
  const XiEstimate e = xi_estimate(s.m, s.b);
  double xi_sup = 0.0;
  for (int p = 0; p < 64; ++p)
    for (int q = 0; q < 64; ++q) xi_sup = std::max(xi_sup, e.xi_hat.vec4(p, q).norm());
  line(2, xi_sup <= 1e-9, "clifford torus: sup |xi_hat| (self-shrinker)", xi_sup, 1e-9);
  const double h2_dev = field_max_abs_dev(s.b.h2, 2.0);
  const double H2_dev = field_max_abs_dev(s.b.H2, 2.0);
  line(2, h2_dev <= 1e-8, "clifford torus: |h|^2 = 2", h2_dev, 1e-8);
  line(2, H2_dev <= 1e-8, "clifford torus: |H|^2 = 2", H2_dev, 1e-8);
  Field<1> sum(s.m.spec);
  for (size_t i = 0; i < sum.values.size(); ++i)
    sum.values[i] = s.b.h2.values[i] + s.b.H2.values[i];
  const double sum_dev = field_max_abs_dev(sum, 4.0);
  line(2, sum_dev <= 2e-8, "clifford torus: |h|^2 + |H|^2 = 4", sum_dev, 2e-8);
}

// 3. Condition geometry across a 50x50 radius scan.
void criterion_condition_scan() {
  int misclassified = 0, compared = 0;
  for (int ia = 0; ia < 50; ++ia)
    for (int ib = 0; ib < 50; ++ib) {
      const double a = 0.3 + 2.7 * ia / 49.0, b = 0.3 + 2.7 * ib / 49.0;
      const Surface s = built(make_product_torus(a, b, torus_spec(16, 16)));
      const XiEstimate e = xi_estimate(s.m, s.b);
      const PinchingReport pr = pinching_report(s.m, s.b, e);
      if (std::abs(pr.margin[3]) <= 1e-6) continue;
      ++compared;
      const bool region = a * a + b * b - 2 * a * a * b * b >= 0.0;
      if ((pr.margin[3] > 0.0) != region) ++misclassified;
    }
  line(3, misclassified == 0,
       "sign(<H,xi>) matches sign(a^2+b^2-2a^2b^2) on 50x50 scan (" +
           std::to_string(compared) + " compared)",
       misclassified, 0.0);
}

// 4. Maslov periods and nontriviality.
void criterion_maslov() {
  double integrality = 0.0;
  bool periods_ok = true;
  for (auto [a, b] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {0.7, 0.7}, {1.4, 0.6}}) {
    const Surface s = built(make_product_torus(a, b, torus_spec(64, 64)));
    const MaslovData md = maslov(s.m, s.b);
    integrality = std::max({integrality, std::abs(md.period_u - std::lround(md.period_u)),
                            std::abs(md.period_v - std::lround(md.period_v))});
    periods_ok = periods_ok && std::lround(md.period_u) == 1 && std::lround(md.period_v) == 1;
  }
  line(4, periods_ok && integrality <= 1e-3,
       "product tori report maslov periods (1,1), raw within 1e-3 of integers",
       integrality, 1e-3);

  bool nontrivial = true;
  // closed Lagrangian xi-surfaces: certified circle products and equivariant circles
  for (auto [a, b] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {0.7, 0.7}}) {
    const CertifiedProduct cp = product_xi(make_circle(a, 64), circle_lambda(a),
                                           make_circle(b, 64), circle_lambda(b));
    const Surface s = built(cp.surface);
    const MaslovData md = maslov(s.m, s.b);
    nontrivial = nontrivial && global_checks(s.m, s.b, &md).maslov_nontrivial;
  }
  for (double rho : {1.0, std::sqrt(2.0)}) {
    const PlaneCurve c = make_circle(rho, 64);
    const Surface s = built(make_equivariant(c, GridSpec(64, 16, c.length, 2 * kPi)));
    const MaslovData md = maslov(s.m, s.b);
    nontrivial = nontrivial && global_checks(s.m, s.b, &md).maslov_nontrivial;
  }
  line_bool(4, nontrivial, "maslov class nontrivial on every generated xi-surface");
}

// 5. Mean curvature / Lagrangian angle gradient identity at 128x128.
void criterion_thm21() {
  const Surface s =
      built(make_product_curves(make_ellipse(1.0, 1.2, 128), make_circle(1.0, 128)));
  const MaslovData md = maslov(s.m, s.b);
  line(5, md.gradient_residual <= 1e-6,
       "sup |x_*(grad beta) + JH| on ellipse(1,1.2) x circle(1) at 128x128",
       md.gradient_residual, 1e-6);
}

// 6. Weighted integration by parts on five trigonometric pairs.
void criterion_ibp() {
  const Surface clifford = built(make_product_torus(1, 1, torus_spec(64, 64)));
  const Surface ellipse =
      built(make_product_curves(make_ellipse(1.0, 1.2, 64), make_circle(1.0, 64)));
  double worst = 0.0;
  for (const Surface* s : {&clifford, &ellipse}) {
    const GridSpec& spec = s->m.spec;
    auto trig = [&](int ku, int kv, bool use_sin) {
      return make_scalar_field(spec, [&, ku, kv, use_sin](int p, int q) {
        const double phase = ku * 2 * kPi * p / spec.nu + kv * 2 * kPi * q / spec.nv;
        return use_sin ? std::sin(phase) : std::cos(phase);
      });
    };
    const std::pair<Field<1>, Field<1>> pairs[5] = {
        {trig(1, 0, true), trig(0, 1, false)},
        {trig(2, 0, true), trig(0, 3, false)},
        {trig(1, 1, false), trig(1, 0, true)},
        {trig(0, 2, true), trig(2, 1, false)},
        {trig(3, 0, false), trig(1, 2, true)},
    };
    for (const auto& [u, v] : pairs)
      worst = std::max(worst, ibp_residual(u, v, s->m, s->b));
  }
  line(6, worst <= 1e-7, "weighted integration-by-parts residual over 5 trig pairs",
       worst, 1e-7);
}

// 7. xi-identity battery on certified circle products.
void criterion_xi_battery() {
  const IdentityId battery[] = {IdentityId::Eq217, IdentityId::Eq218, IdentityId::Eq32,
                                IdentityId::Eq33,  IdentityId::Lem32, IdentityId::Lem33,
                                IdentityId::Lem34, IdentityId::Lem35a, IdentityId::Lem35b};
  double worst = 0.0;
  for (auto [a, b] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {0.7, 0.7}}) {
    const CertifiedProduct cp = product_xi(make_circle(a, 64), circle_lambda(a),
                                           make_circle(b, 64), circle_lambda(b));
    const Surface s = built(cp.surface);
    const XiEstimate e = xi_estimate(s.m, s.b);
    if (!e.is_xi) {
      line_bool(7, false, "certified product failed the parallelism test");
      return;
    }
    const MaslovData md = maslov(s.m, s.b);
    for (IdentityId id : battery)
      worst = std::max(worst, verify_identity(id, s.m, s.b, &e, &md));
  }
  line(7, worst <= 1e-6,
       "xi-identity battery on certified circle products (1,1),(1,2),(0.7,0.7)", worst,
       1e-6);
}

// 8. Structure equations on general Lagrangian surfaces.
void criterion_structure_equations() {
  const Surface s =
      built(make_product_curves(make_ellipse(1.0, 1.2, 64), make_circle(1.0, 64)));
  const CurvatureResiduals r = curvature_residuals(s.b);
  const double worst =
      std::max({r.gauss, r.codazzi, r.ricci, r.normal_tangent, r.motion});
  line(8, worst <= 1e-6,
       "gauss/codazzi/ricci/normal-tangent/motion residuals on ellipse products", worst,
       1e-6);
  line(8, s.b.cubic_asymmetry <= 1e-7, "pre-symmetrization cubic asymmetry",
       s.b.cubic_asymmetry, 1e-7);
}

// 9. Gauss-Bonnet and the integral balance on product tori.
void criterion_global() {
  double worst_gb = 0.0, worst_balance = 0.0;
  bool genus_ok = true;
  for (auto [a, b] : {std::pair{1.0, 1.0}, {0.8, 1.9}, {2.4, 0.5}}) {
    const Surface s = built(make_product_torus(a, b, torus_spec(64, 64)));
    const MaslovData md = maslov(s.m, s.b);
    const GlobalChecks gc = global_checks(s.m, s.b, &md);
    worst_gb = std::max(worst_gb, std::abs(gc.gauss_bonnet_integral) / gc.area);
    worst_balance = std::max(worst_balance, gc.balance_residual);
    genus_ok = genus_ok && gc.genus == 1;
  }
  line(9, worst_gb <= 1e-6, "Gauss-Bonnet integral / area on product tori", worst_gb,
       1e-6);
  line(9, worst_balance <= 1e-8, "integral balance residual on product tori",
       worst_balance, 1e-8);
  line_bool(9, genus_ok, "inferred genus = 1 on product tori");
}

// 10. Detector discrimination.
void criterion_detector() {
  const Surface s =
      built(make_product_curves(make_ellipse(1.0, 1.2, 64), make_circle(1.0, 64)));
  const XiEstimate e = xi_estimate(s.m, s.b);
  line(10, !e.is_xi && e.parallel_residual >= 1e-2,
       "ellipse(1,1.2) x circle(1) classified non-xi with parallel residual",
       e.parallel_residual, 1e-2);

  CertifiedProduct cp = product_xi(make_circle(1.0, 48), circle_lambda(1.0),
                                   make_circle(2.0, 48), circle_lambda(2.0));
  for (int p = 0; p < 48; ++p)
    for (int q = 0; q < 48; ++q) {
      Vec4 v = cp.xi.vec4(p, q);
      v[0] += 1e-3;
      cp.xi.set_vec4(p, q, v);
    }
  const CertificationCheck check = check_certification(cp);
  line_bool(10, !check.ok, "corrupted certification (xi perturbed by 1e-3) rejected");
}

// 11. Convergence: spectral residual drop and ODE step order.
void criterion_convergence() {
  auto equivariant = [&](int n) {
    const PlaneCurve c = make_ellipse(1.0, 1.5, n);
    return built(make_equivariant(c, GridSpec(n, 16, c.length, 2 * kPi)));
  };
  const Surface s32 = equivariant(32), s64 = equivariant(64);
  const double thm_ratio =
      maslov(s32.m, s32.b).gradient_residual / maslov(s64.m, s64.b).gradient_residual;
  const double gauss_ratio =
      curvature_residuals(s32.b).gauss / curvature_residuals(s64.b).gauss;
  line(11, thm_ratio >= 1e2, "grad-beta residual reduction from 32 to 64", thm_ratio,
       1e2);
  line(11, gauss_ratio >= 1e2, "gauss residual reduction from 32 to 64", gauss_ratio,
       1e2);

  auto circle_error = [](double ds) {
    const PlaneCurve c = integrate_lambda_curve(0.0, Vec2(1, 0), Vec2(0, 1), 2 * kPi, ds);
    double worst = 0.0;
    for (const Vec2& g : c.gamma) worst = std::max(worst, std::abs(g.norm() - 1.0));
    return worst;
  };
  const double order = std::log2(circle_error(0.01) / circle_error(0.005));
  line(11, order >= 3.99, "lambda-curve integrator measured order on circle reproduction",
       order, 3.99);
}

// 12. Determinism of the command-line reports.
void criterion_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "xigeo-acceptance";
  fs::create_directories(dir);
  const fs::path r1 = dir / "run1.json", r2 = dir / "run2.json";
  const std::string cmd = std::string(XIGEO_CLI_PATH) +
                          " analyze --family product-torus --a 1.2 --b 0.9 --nu 48 "
                          "--nv 48 --output ";
  const int rc1 = std::system((cmd + r1.string() + " > /dev/null 2>&1").c_str());
  const int rc2 = std::system((cmd + r2.string() + " > /dev/null 2>&1").c_str());
  auto slurp = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
  };
  const bool ok = WEXITSTATUS(rc1) == 0 && WEXITSTATUS(rc2) == 0 &&
                  !slurp(r1).empty() && slurp(r1) == slurp(r2);
  line_bool(12, ok, "repeated analyze runs produce byte-identical reports");
}

}  // namespace

int main() {
  criterion_equality_family();
  criterion_clifford();
  criterion_condition_scan();
  criterion_maslov();
  criterion_thm21();
  criterion_ibp();
  criterion_xi_battery();
  criterion_structure_equations();
  criterion_global();
  criterion_detector();
  criterion_convergence();
  criterion_determinism();
  std::printf("%s: %d criterion failure(s)\n", g_failures == 0 ? "OK" : "FAILED",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
