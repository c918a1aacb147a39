#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "xigeo/xi.hpp"

namespace xigeo {

using Json = nlohmann::ordered_json;

// On-disk surface sample: nu, nv, period_u, period_v and the flat x array of
// 4*nu*nv reals, row-major over (u, v), components (Re z1, Im z1, Re z2, Im z2).
Json surface_to_json(const ImmersionGrid& m);
ImmersionGrid surface_from_json(const Json& j);
void save_surface(const ImmersionGrid& m, const std::string& path);
ImmersionGrid load_surface(const std::string& path);

struct AnalyzeOptions {
  double tol_lagrangian = 1e-8;
  double tol_xi = 1e-6;
  double tol_identity = 1e-6;
  bool require_lagrangian = false;  // error out instead of skipping
};

// Full analysis pipeline: surface -> geometry -> drift/xi -> report document.
// The returned document has two top-level blocks: "meta" (invocation echo,
// not part of the comparable body) and "report" (deterministic; identical
// inputs and options produce byte-identical serializations). Every identity
// id appears under report.identities, either with a residual or with an
// explicit skip reason.
Json analyze_surface(const ImmersionGrid& m, const AnalyzeOptions& opt,
                     const Json& invocation_echo = Json::object());

// Product-torus family scan. Writes CSV rows a,b,h2,H2,Hxi,P_max,c1,c2,c3,c4,
// region in row-major order over the two ranges (region marks
// a^2+b^2 >= 2 a^2 b^2); 17 significant digits, LF line endings.
struct ScanRange {
  double start = 0, stop = 0;
  int count = 0;
};

ScanRange parse_range(const std::string& text);  // "start:stop:count"

void scan_product_tori(const ScanRange& ra, const ScanRange& rb, int nu, int nv,
                       std::ostream& os);

// (u, v, field) triples as CSV for external plotting.
void emit_plot_data(const ImmersionGrid& m, const Field<1>& field,
                    const std::string& field_name, std::ostream& os);

}  // namespace xigeo
