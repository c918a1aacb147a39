// xigeo: analyze immersed Lagrangian tori in C^2, classify xi-submanifolds,
// scan the product-torus family and shoot closed lambda-curves.
//
// Exit codes: 0 success (including negative classifications and not-found
// shooting outcomes), 2 usage error, 3 numeric/degeneracy error,
// 4 verification failure (verify only).

#include <clocale>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

#include <CLI11.hpp>

#include "xigeo/report.hpp"

namespace {

using namespace xigeo;

constexpr double kPi = std::numbers::pi;

struct AnalyzeArgs {
  std::string family;
  std::string input;
  double a = 1.0, b = 1.0;
  double a1 = 1.0, b1 = 1.0, a2 = 1.0, b2 = 1.0;
  double ea = 1.0, eb = 1.0;
  int nu = 64, nv = 64;
  AnalyzeOptions opt;
  std::string output;
  std::string dump_surface;
  std::string plot_path;
  std::string plot_field = "P";
};

ImmersionGrid build_family_surface(const AnalyzeArgs& args, Json& echo) {
  if (args.family.empty() == args.input.empty())
    throw UsageError("analyze: exactly one surface source among --family/--input");
  if (!args.input.empty()) {
    echo["input"] = args.input;
    return load_surface(args.input);
  }
  echo["family"] = args.family;
  if (args.family == "product-torus") {
    echo["a"] = args.a;
    echo["b"] = args.b;
    return make_product_torus(args.a, args.b,
                              GridSpec(args.nu, args.nv, 2.0 * kPi, 2.0 * kPi));
  }
  if (args.family == "product-ellipse") {
    echo["a1"] = args.a1;
    echo["b1"] = args.b1;
    echo["a2"] = args.a2;
    echo["b2"] = args.b2;
    return make_product_curves(make_ellipse(args.a1, args.b1, args.nu),
                               make_ellipse(args.a2, args.b2, args.nv));
  }
  if (args.family == "equivariant") {
    echo["ea"] = args.ea;
    echo["eb"] = args.eb;
    const PlaneCurve c = make_ellipse(args.ea, args.eb, args.nu);
    return make_equivariant(c, GridSpec(c.n, args.nv, c.length, 2.0 * kPi));
  }
  throw UsageError("analyze: unknown family '" + args.family +
                   "' (expected product-torus, product-ellipse or equivariant)");
}

void write_text(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot write output file: " + path);
  os << body;
}

int run_analyze(const AnalyzeArgs& args) {
  Json echo;
  echo["command"] = "analyze";
  echo["nu"] = args.nu;
  echo["nv"] = args.nv;
  ImmersionGrid m = build_family_surface(args, echo);
  if (!args.dump_surface.empty()) save_surface(m, args.dump_surface);
  const Json doc = analyze_surface(m, args.opt, echo);
  write_text(args.output, doc.dump(2) + "\n");
  if (!args.plot_path.empty()) {
    const GeometryBundle b = build_geometry(m);
    Field<1> field(m.spec);
    if (args.plot_field == "P") {
      const XiEstimate e = xi_estimate(m, b, args.opt.tol_xi, args.opt.tol_lagrangian);
      field = pinching_report(m, b, e).P;
    } else if (args.plot_field == "h2") {
      field = b.h2;
    } else if (args.plot_field == "H2") {
      field = b.H2;
    } else if (args.plot_field == "K") {
      field = b.K_intr;
    } else if (args.plot_field == "x2") {
      field = b.x2;
    } else {
      throw UsageError("unknown --plot-field '" + args.plot_field +
                       "' (expected P, h2, H2, K or x2)");
    }
    std::ofstream os(args.plot_path, std::ios::binary);
    if (!os) throw UsageError("cannot write plot data file: " + args.plot_path);
    emit_plot_data(m, field, args.plot_field, os);
  }
  return 0;
}

struct CurveArgs {
  double lambda = 0.0;
  std::string rotation = "1/1";
  std::string bracket;
  double ds = 1e-3;
  int samples = 256;
  std::string output;
  double product_with_circle = 0.0;
  std::string surface_out;
};

int run_curve(const CurveArgs& args) {
  int p = 0, q = 0;
  char extra;
  if (std::sscanf(args.rotation.c_str(), "%d/%d%c", &p, &q, &extra) != 2 || p < 1 || q < 1)
    throw UsageError("curve: --rotation must be p/q with positive integers");
  const ScanRange br = [&] {
    ScanRange r;
    char e2;
    if (std::sscanf(args.bracket.c_str(), "%lf:%lf%c", &r.start, &r.stop, &e2) != 2)
      throw UsageError("curve: --bracket must be lo:hi");
    return r;
  }();

  const LambdaShoot shot =
      shoot_closed(args.lambda, Rotation{p, q}, br.start, br.stop, args.ds, args.samples);

  Json doc;
  doc["command"] = "curve";
  doc["lambda"] = args.lambda;
  doc["rotation"] = args.rotation;
  doc["status"] = shot.found ? "found" : "not-found";
  doc["message"] = shot.message;
  if (shot.found) {
    doc["r0"] = shot.r0;
    doc["length"] = shot.curve.length;
    doc["closure_residual"] = shot.closure_residual;
    double kmin = shot.curve.curvature[0], kmax = kmin;
    for (double k : shot.curve.curvature) {
      kmin = std::min(kmin, k);
      kmax = std::max(kmax, k);
    }
    doc["curvature_min"] = kmin;
    doc["curvature_max"] = kmax;
    Json samples = Json::array();
    for (int i = 0; i < shot.curve.n; ++i)
      samples.push_back({shot.curve.gamma[i][0], shot.curve.gamma[i][1]});
    doc["samples"] = samples;
  }

  if (shot.found && args.product_with_circle > 0.0) {
    const PlaneCurve circle = make_circle(args.product_with_circle, args.samples);
    const CertifiedProduct cp =
        product_xi(shot.curve, args.lambda, circle, circle_lambda(args.product_with_circle));
    const CertificationCheck check = check_certification(cp);
    doc["product"] = Json{{"certified", check.ok},
                          {"xi_sup_diff", check.xi_sup_diff},
                          {"parallel_residual", check.parallel_residual}};
    if (!args.surface_out.empty()) save_surface(cp.surface, args.surface_out);
  }

  write_text(args.output, doc.dump(2) + "\n");
  return 0;
}

struct VerifyArgs {
  int nu = 64, nv = 64;
  double tol = 1e-6;
};

int run_verify(const VerifyArgs& args) {
  int failures = 0;
  auto report_line = [&](const std::string& surface, const char* name, double residual,
                         double tol) {
    const bool ok = residual <= tol;
    if (!ok) ++failures;
    std::printf("%s %-8s %-24s residual=%.3e tol=%.1e\n", ok ? "PASS" : "FAIL", name,
                surface.c_str(), residual, tol);
  };

  struct Case {
    std::string label;
    double a, b;
  };
  const Case circles[] = {{"circle-product(1,1)", 1.0, 1.0},
                          {"circle-product(1,2)", 1.0, 2.0},
                          {"circle-product(0.7,0.7)", 0.7, 0.7}};
  for (const Case& c : circles) {
    const CertifiedProduct cp =
        product_xi(make_circle(c.a, args.nu), circle_lambda(c.a), make_circle(c.b, args.nv),
                   circle_lambda(c.b));
    const GeometryBundle b = build_geometry(cp.surface);
    const XiEstimate e = xi_estimate(cp.surface, b);
    const MaslovData md = maslov(cp.surface, b);
    for (IdentityId id : all_identities())
      report_line(c.label, identity_name(id),
                  verify_identity(id, cp.surface, b, &e, &md), args.tol);
  }

  const ImmersionGrid ellipse = make_product_curves(make_ellipse(1.0, 1.2, args.nu),
                                                    make_circle(1.0, args.nv));
  const GeometryBundle eb = build_geometry(ellipse);
  const MaslovData emd = maslov(ellipse, eb);
  for (IdentityId id : all_identities()) {
    if (identity_requires_xi(id)) continue;  // not a xi-surface
    report_line("ellipse(1,1.2)xcircle(1)", identity_name(id),
                verify_identity(id, ellipse, eb, nullptr, &emd), args.tol);
  }

  std::printf("%s: %d failure(s)\n", failures == 0 ? "OK" : "FAILED", failures);
  return failures == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"xigeo: numerical geometry of Lagrangian tori in C^2"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  CLI::App* analyze = app.add_subcommand("analyze", "full surface analysis report");
  analyze->add_option("--family", an.family,
                      "surface family: product-torus | product-ellipse | equivariant");
  analyze->add_option("--input", an.input, "surface JSON file");
  analyze->add_option("--a", an.a, "product-torus radius a");
  analyze->add_option("--b", an.b, "product-torus radius b");
  analyze->add_option("--a1", an.a1, "first ellipse semi-axis a");
  analyze->add_option("--b1", an.b1, "first ellipse semi-axis b");
  analyze->add_option("--a2", an.a2, "second ellipse semi-axis a");
  analyze->add_option("--b2", an.b2, "second ellipse semi-axis b");
  analyze->add_option("--ea", an.ea, "equivariant profile semi-axis a");
  analyze->add_option("--eb", an.eb, "equivariant profile semi-axis b");
  analyze->add_option("--nu", an.nu, "grid samples along u");
  analyze->add_option("--nv", an.nv, "grid samples along v");
  analyze->add_option("--tol-lagrangian", an.opt.tol_lagrangian, "Lagrangian tolerance");
  analyze->add_option("--tol-xi", an.opt.tol_xi, "xi classification tolerance");
  analyze->add_option("--tol-identity", an.opt.tol_identity, "identity tolerance");
  analyze->add_flag("--require-lagrangian", an.opt.require_lagrangian,
                    "fail instead of skipping Lagrangian-only analyses");
  analyze->add_option("--output", an.output, "report path (default stdout)");
  analyze->add_option("--dump-surface", an.dump_surface, "also write the sampled surface");
  analyze->add_option("--emit-plot-data", an.plot_path, "write (u,v,field) CSV");
  analyze->add_option("--plot-field", an.plot_field, "field for --emit-plot-data");

  CurveArgs cu;
  CLI::App* curve = app.add_subcommand("curve", "closed lambda-curve shooting");
  curve->add_option("--lambda", cu.lambda, "lambda parameter")->required();
  curve->add_option("--rotation", cu.rotation, "target rotation p/q");
  curve->add_option("--bracket", cu.bracket, "starting-radius bracket lo:hi")->required();
  curve->add_option("--ds", cu.ds, "integration step");
  curve->add_option("--samples", cu.samples, "output curve samples");
  curve->add_option("--output", cu.output, "result path (default stdout)");
  curve->add_option("--product-with-circle", cu.product_with_circle,
                    "build the certified product with a circle of this radius");
  curve->add_option("--surface-out", cu.surface_out, "surface file for the product");

  struct ScanArgs {
    std::string a_range, b_range;
    int nu = 16, nv = 16;
    std::string output;
  } sc;
  CLI::App* scan = app.add_subcommand("scan", "product-torus family scan (CSV)");
  scan->add_option("--a-range", sc.a_range, "a range start:stop:count")->required();
  scan->add_option("--b-range", sc.b_range, "b range start:stop:count")->required();
  scan->add_option("--nu", sc.nu, "grid samples along u");
  scan->add_option("--nv", sc.nv, "grid samples along v");
  scan->add_option("--output", sc.output, "CSV path (default stdout)");

  VerifyArgs ve;
  CLI::App* verify = app.add_subcommand("verify", "identity battery (CI entry point)");
  verify->add_option("--nu", ve.nu, "grid samples along u");
  verify->add_option("--nv", ve.nv, "grid samples along v");
  verify->add_option("--tol", ve.tol, "residual tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    if (ex.get_exit_code() == 0) return app.exit(ex);  // --help
    app.exit(ex);
    return 2;
  }

  try {
    if (*analyze) return run_analyze(an);
    if (*curve) return run_curve(cu);
    if (*scan) {
      const ScanRange ra = parse_range(sc.a_range);
      const ScanRange rb = parse_range(sc.b_range);
      std::ostringstream os;
      scan_product_tori(ra, rb, sc.nu, sc.nv, os);
      write_text(sc.output, os.str());
      return 0;
    }
    if (*verify) return run_verify(ve);
  } catch (const UsageError& ex) {
    std::cerr << "usage error: " << ex.what() << "\n";
    return 2;
  } catch (const PreconditionError& ex) {
    std::cerr << "precondition error: " << ex.what() << "\n";
    return 3;
  } catch (const NumericError& ex) {
    std::cerr << "numeric error: " << ex.what() << "\n";
    return 3;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  }
  return 2;
}
