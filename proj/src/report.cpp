#include "xigeo/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "xigeo/grid.hpp"

namespace xigeo {

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Json extrema(const Field<1>& f) {
  double lo = f.values.empty() ? 0.0 : f.values[0], hi = lo;
  for (double v : f.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return Json{{"min", lo}, {"max", hi}};
}

Json skipped(const std::string& reason) { return Json{{"skipped", reason}}; }

}  // namespace

Json surface_to_json(const ImmersionGrid& m) {
  Json j;
  j["nu"] = m.spec.nu;
  j["nv"] = m.spec.nv;
  j["period_u"] = m.spec.period_u;
  j["period_v"] = m.spec.period_v;
  j["x"] = m.x.values;
  return j;
}

ImmersionGrid surface_from_json(const Json& j) {
  for (const char* key : {"nu", "nv", "period_u", "period_v", "x"})
    if (!j.contains(key))
      throw UsageError(std::string("surface file: missing field '") + key + "'");
  ImmersionGrid m;
  m.spec = GridSpec(j["nu"].get<int>(), j["nv"].get<int>(), j["period_u"].get<double>(),
                    j["period_v"].get<double>());
  m.provenance = "external";
  m.x = Field<4>(m.spec);
  const auto& arr = j["x"];
  if (!arr.is_array() || arr.size() != m.x.values.size()) {
    std::ostringstream os;
    os << "surface file: x must hold exactly " << m.x.values.size() << " reals (got "
       << arr.size() << ")";
    throw UsageError(os.str());
  }
  for (size_t i = 0; i < m.x.values.size(); ++i) {
    m.x.values[i] = arr[i].get<double>();
    if (!std::isfinite(m.x.values[i]))
      throw NumericError("surface file: non-finite coordinate at flat index " +
                         std::to_string(i));
  }
  return m;
}

void save_surface(const ImmersionGrid& m, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot write surface file: " + path);
  os << surface_to_json(m).dump(2) << "\n";
}

ImmersionGrid load_surface(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UsageError("cannot read surface file: " + path);
  Json j;
  try {
    is >> j;
  } catch (const std::exception& ex) {
    throw UsageError(std::string("malformed surface file: ") + ex.what());
  }
  return surface_from_json(j);
}

Json analyze_surface(const ImmersionGrid& m, const AnalyzeOptions& opt,
                     const Json& invocation_echo) {
  Json doc;
  doc["meta"] = Json{{"tool", "xigeo"},
                     {"format_version", 1},
                     {"surface_provenance", m.provenance},
                     {"invocation", invocation_echo}};

  Json rep;
  rep["grid"] = Json{{"nu", m.spec.nu},
                     {"nv", m.spec.nv},
                     {"period_u", m.spec.period_u},
                     {"period_v", m.spec.period_v}};
  rep["tolerances"] = Json{{"lagrangian", opt.tol_lagrangian},
                           {"xi", opt.tol_xi},
                           {"identity", opt.tol_identity}};

  GeometryBundle b = build_geometry(m);
  const bool lagrangian = b.lagrangian <= opt.tol_lagrangian;
  if (!lagrangian && opt.require_lagrangian) {
    std::ostringstream os;
    os << "surface is not Lagrangian (residual " << b.lagrangian << " > "
       << opt.tol_lagrangian << ") and a Lagrangian-only analysis was forced";
    throw NumericError(os.str());
  }
  rep["lagrangian_residual"] = b.lagrangian;
  rep["is_lagrangian"] = lagrangian;
  rep["cubic_presymmetrization_asymmetry"] = b.cubic_asymmetry;

  Field<1> hxi_field(m.spec);
  for (int p = 0; p < m.spec.nu; ++p)
    for (int q = 0; q < m.spec.nv; ++q) {
      const Vec4 H = b.H.vec4(p, q);
      hxi_field.at(p, q) = H.dot(Vec4(H + b.x_perp.vec4(p, q)));
    }
  rep["invariants"] = Json{{"h2", extrema(b.h2)},
                           {"H2", extrema(b.H2)},
                           {"K", extrema(b.K_intr)},
                           {"x2", extrema(b.x2)},
                           {"Hxi", extrema(hxi_field)}};

  const MaslovData* mdp = nullptr;
  MaslovData md;
  if (lagrangian) {
    md = maslov(m, b, opt.tol_lagrangian);
    mdp = &md;
    rep["maslov"] = Json{
        {"periods", {md.period_u, md.period_v}},
        {"periods_rounded", {std::lround(md.period_u), std::lround(md.period_v)}},
        {"integrality_error",
         std::max(std::abs(md.period_u - std::lround(md.period_u)),
                  std::abs(md.period_v - std::lround(md.period_v)))},
        {"dbeta_alpha_residual", md.dbeta_alpha_residual},
        {"gradient_residual", md.gradient_residual}};
  } else {
    rep["maslov"] = skipped("non-Lagrangian surface: the Lagrangian angle is undefined");
  }

  const XiEstimate* ep = nullptr;
  XiEstimate e;
  if (lagrangian) {
    e = xi_estimate(m, b, opt.tol_xi, opt.tol_lagrangian);
    ep = &e;
    Json xi_block{{"is_xi", e.is_xi},
                  {"parallel_residual", e.parallel_residual},
                  {"tangency_residual", e.tangency_residual},
                  {"xi_sup", 0.0}};
    double xi_sup = 0.0;
    for (int p = 0; p < m.spec.nu; ++p)
      for (int q = 0; q < m.spec.nv; ++q)
        xi_sup = std::max(xi_sup, e.xi_hat.vec4(p, q).norm());
    xi_block["xi_sup"] = xi_sup;
    if (e.has_coefficients) {
      xi_block["coefficients"] = {e.coeff1, e.coeff2};
      xi_block["coefficient_spread"] = e.coeff_spread;
    } else {
      xi_block["coefficients"] = nullptr;
      xi_block["coefficient_spread"] = nullptr;
    }
    const TorusFit fit = fit_product_torus(b, e);
    if (fit.ok)
      xi_block["fitted_torus"] =
          Json{{"a", fit.a}, {"b", fit.b}, {"match_residual", fit.match_residual}};
    else
      xi_block["fitted_torus"] = nullptr;
    rep["xi"] = xi_block;

    const PinchingReport pr = pinching_report(m, b, e);
    Json conds;
    const char* names[4] = {"c1_h2_ge_2", "c2_H2_ge_2", "c3_h2_ge_HHmxi", "c4_Hxi_ge_0"};
    for (int c = 0; c < 4; ++c)
      conds[names[c]] = Json{{"holds", pr.condition[c]}, {"margin", pr.margin[c]}};
    rep["pinching"] = Json{{"P_min", pr.P_min},
                           {"P_max", pr.P_max},
                           {"advisory", pr.advisory},
                           {"conditions", conds},
                           {"Hxi_const_residual", pr.Hxi_const_residual}};
  } else {
    rep["xi"] = skipped("non-Lagrangian surface: parallelism test undefined");
    rep["pinching"] = skipped("non-Lagrangian surface: xi estimate unavailable");
  }

  Json ids;
  for (IdentityId id : all_identities()) {
    const char* name = identity_name(id);
    if (identity_requires_xi(id)) {
      if (!lagrangian) {
        ids[name] = skipped("requires a Lagrangian surface");
        continue;
      }
      if (!e.is_xi) {
        std::ostringstream os;
        os << "requires a xi-submanifold (parallel_residual " << e.parallel_residual
           << " > " << opt.tol_xi << ")";
        ids[name] = skipped(os.str());
        continue;
      }
    } else if (identity_requires_lagrangian(id) && !lagrangian) {
      ids[name] = skipped("requires a Lagrangian surface");
      continue;
    }
    ids[name] = Json{{"residual", verify_identity(id, m, b, ep, mdp)}};
  }
  rep["identities"] = ids;

  if (lagrangian) {
    const GlobalChecks gc = global_checks(m, b, mdp);
    rep["global"] = Json{{"area", gc.area},
                         {"gauss_bonnet_integral", gc.gauss_bonnet_integral},
                         {"genus", gc.genus},
                         {"genus_distance", gc.genus_distance},
                         {"balance_residual", gc.balance_residual},
                         {"maslov_nontrivial", gc.maslov_nontrivial}};
  } else {
    rep["global"] = skipped("non-Lagrangian surface: global checks need the xi estimate");
  }

  doc["report"] = rep;
  return doc;
}

ScanRange parse_range(const std::string& text) {
  ScanRange r;
  char extra;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &r.start, &r.stop, &r.count, &extra) != 3)
    throw UsageError("range must be start:stop:count (got '" + text + "')");
  if (r.count < 1) throw UsageError("range count must be >= 1 (got '" + text + "')");
  return r;
}

void scan_product_tori(const ScanRange& ra, const ScanRange& rb, int nu, int nv,
                       std::ostream& os) {
  const GridSpec spec(nu, nv, 2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
  os << "a,b,h2,H2,Hxi,P_max,c1,c2,c3,c4,region\n";
  for (int ia = 0; ia < ra.count; ++ia) {
    const double a =
        ra.count == 1 ? ra.start : ra.start + (ra.stop - ra.start) * ia / (ra.count - 1);
    for (int ib = 0; ib < rb.count; ++ib) {
      const double b =
          rb.count == 1 ? rb.start : rb.start + (rb.stop - rb.start) * ib / (rb.count - 1);
      const ImmersionGrid m = make_product_torus(a, b, spec);
      const GeometryBundle g = build_geometry(m);
      const XiEstimate e = xi_estimate(m, g);
      const PinchingReport pr = pinching_report(m, g, e);
      double h2 = 0, H2 = 0, hxi = 0;
      for (int p = 0; p < spec.nu; ++p)
        for (int q = 0; q < spec.nv; ++q) {
          h2 = std::max(h2, g.h2.at(p, q));
          H2 = std::max(H2, g.H2.at(p, q));
          const Vec4 H = g.H.vec4(p, q);
          hxi += H.dot(Vec4(H + g.x_perp.vec4(p, q)));
        }
      hxi /= spec.points();
      const bool region = a * a + b * b >= 2.0 * a * a * b * b;
      os << fmt17(a) << ',' << fmt17(b) << ',' << fmt17(h2) << ',' << fmt17(H2) << ','
         << fmt17(hxi) << ',' << fmt17(pr.P_max) << ',' << (pr.condition[0] ? 1 : 0) << ','
         << (pr.condition[1] ? 1 : 0) << ',' << (pr.condition[2] ? 1 : 0) << ','
         << (pr.condition[3] ? 1 : 0) << ',' << (region ? 1 : 0) << '\n';
    }
  }
}

void emit_plot_data(const ImmersionGrid& m, const Field<1>& field,
                    const std::string& field_name, std::ostream& os) {
  os << "u,v," << field_name << "\n";
  for (int p = 0; p < m.spec.nu; ++p)
    for (int q = 0; q < m.spec.nv; ++q)
      os << fmt17(m.spec.u(p)) << ',' << fmt17(m.spec.v(q)) << ','
         << fmt17(field.at(p, q)) << '\n';
}

}  // namespace xigeo
