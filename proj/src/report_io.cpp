#include "nlbvp/report_io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace nlbvp::io {
namespace {

OJson complex_json(pencil::Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

std::string side_str(SideRef s) { return fmt::format("({},{})", s.angle, s.sigma); }

OJson entry_json(const consistency::ConsistencyEntry& e) {
  return {{"condition", e.condition},
          {"formula", e.formula},
          {"row", side_str(e.row)},
          {"diagnostic", to_json(e.diagnostic)}};
}

}  // namespace

std::string num(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  return fmt::format("{:.17g}", x);
}

OJson to_json(const pencil::SpectralReport& r) {
  OJson j;
  j["orbit"] = r.orbit_id;
  j["band"] = {{"im_min", r.band.im_min}, {"im_max", r.band.im_max}, {"closed_below", r.band.closed_below}};
  j["window"] = {{"re_min", r.window.re_min}, {"re_max", r.window.re_max}};
  j["argument_principle_count"] = r.argument_principle_count;
  j["enumerated_multiplicity"] = r.enumerated_multiplicity();
  j["eigenvalues"] = OJson::array();
  for (const auto& e : r.eigenvalues) {
    j["eigenvalues"].push_back({{"lambda", complex_json(e.lambda)},
                                {"algebraic_multiplicity", e.algebraic_multiplicity},
                                {"partial_multiplicities", e.partial_multiplicities},
                                {"proper", e.proper},
                                {"ambiguous", e.ambiguous},
                                {"polynomial_residual", e.polynomial_residual},
                                {"note", e.note}});
  }
  j["unresolved"] = OJson::array();
  for (const auto& u : r.unresolved) {
    j["unresolved"].push_back({{"lambda", complex_json(u.lambda)}, {"winding", u.box_winding}});
  }
  j["warnings"] = r.warnings;
  return j;
}

std::string eigenvalues_csv(const pencil::SpectralReport& r) {
  std::string out = "re,im,multiplicity,partial_multiplicities,proper,ambiguous,polynomial_residual\n";
  for (const auto& e : r.eigenvalues) {
    std::string pm;
    for (int m : e.partial_multiplicities) pm += (pm.empty() ? "" : ";") + std::to_string(m);
    out += fmt::format("{},{},{},{},{},{},{}\n", num(e.lambda.real()), num(e.lambda.imag()),
                       e.algebraic_multiplicity, pm, e.proper ? "proper" : "improper", e.ambiguous ? 1 : 0,
                       num(e.polynomial_residual));
  }
  return out;
}

OJson to_json(const consistency::DiagnosticResult& d) {
  return {{"label", d.label},
          {"verdict", consistency::to_string(d.verdict)},
          {"slope", d.slope},
          {"resolved_levels", d.resolved_levels},
          {"reason", d.reason},
          {"r", d.r},
          {"integrals", d.integrals}};
}

OJson to_json(const consistency::BetaTable& b) {
  OJson j;
  j["orbit"] = b.orbit_id;
  j["independent"] = OJson::array();
  for (const auto& s : b.independent) j["independent"].push_back(side_str(s));
  j["dependent"] = OJson::array();
  for (const auto& d : b.dependent) {
    j["dependent"].push_back({{"row", side_str(d.row)}, {"beta", d.beta}, {"residual", d.residual}});
  }
  return j;
}

OJson to_json(const consistency::ConsistencyReport& r) {
  OJson j;
  j["verdict"] = consistency::to_string(r.verdict);
  j["orbits"] = OJson::array();
  for (const auto& o : r.orbits) {
    OJson oj;
    oj["orbit"] = o.orbit_id;
    oj["verdict"] = consistency::to_string(o.verdict);
    oj["betas"] = o.betas ? to_json(*o.betas) : OJson(nullptr);
    oj["entries"] = OJson::array();
    for (const auto& e : o.entries) oj["entries"].push_back(entry_json(e));
    j["orbits"].push_back(oj);
  }
  return j;
}

OJson to_json(const consistency::CoefficientReport& r) {
  OJson j;
  j["vertex_values"] = OJson::array();
  for (const auto& v : r.vertex_values) {
    j["vertex_values"].push_back({{"label", v.label}, {"value", v.value}, {"vanishes", v.vanishes}});
  }
  for (const auto* key : {"bv_entries", "bc_entries", "admissible_entries"}) j[key] = OJson::array();
  for (const auto& e : r.bv_entries) j["bv_entries"].push_back(entry_json(e));
  for (const auto& e : r.bc_entries) j["bc_entries"].push_back(entry_json(e));
  for (const auto& e : r.admissible_entries) j["admissible_entries"].push_back(entry_json(e));
  j["coefficient_condition"] = r.coefficient_condition;
  j["admissible_condition"] = r.admissible_condition;
  j["inconclusive"] = r.inconclusive;
  j["check"] = "generator-based";
  return j;
}

OJson to_json(const classifier::SingularWitness& w) {
  return {{"orbit", w.orbit_id()},
          {"lambda0", complex_json(w.lambda0())},
          {"log_power", w.log_power()},
          {"cutoff_radius", w.cutoff_radius()}};
}

std::string witness_profiles_csv(const classifier::SingularWitness& w, int count) {
  const auto omegas = w.profile_omegas(count);
  const auto prof = w.sampled_profiles(count);
  std::string out = "angle,omega";
  for (int l = 0; l <= w.log_power(); ++l) out += fmt::format(",re_phi{0},im_phi{0}", l);
  out += "\n";
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    for (std::size_t i = 0; i < omegas[k].size(); ++i) {
      out += fmt::format("{},{}", k, num(omegas[k][i]));
      for (const auto& pl : prof) out += fmt::format(",{},{}", num(pl[k][i].real()), num(pl[k][i].imag()));
      out += "\n";
    }
  }
  return out;
}

std::string witness_forcing_csv(const classifier::SingularWitness& w) {
  std::string out = "angle,r,omega,f0\n";
  for (const auto& s : w.sampled_forcing()) {
    out += fmt::format("{},{},{},{}\n", s.angle, num(s.r), num(s.omega), num(s.f0));
  }
  return out;
}

OJson to_json(const classifier::Obligation& o) {
  return {{"id", o.id},
          {"label", o.label},
          {"orbit", o.orbit_id},
          {"formula", o.formula},
          {"status", classifier::to_string(o.status)},
          {"detail", o.detail}};
}

OJson to_json(const classifier::Verdict& v) {
  OJson j;
  j["kind"] = classifier::to_string(v.kind);
  j["orbits"] = OJson::array();
  for (std::size_t i = 0; i < v.per_orbit.size(); ++i) {
    OJson o = to_json(v.per_orbit[i]);
    o["kind"] = classifier::to_string(v.orbit_kinds[i]);
    j["orbits"].push_back(o);
  }
  j["obligations"] = OJson::array();
  for (const auto& o : v.obligations) j["obligations"].push_back(to_json(o));
  j["obligations_met"] = v.obligations_met ? OJson(*v.obligations_met) : OJson(nullptr);
  j["witness"] = v.witness ? to_json(*v.witness) : OJson(nullptr);
  j["notes"] = v.notes;
  return j;
}

std::string describe(const classifier::Verdict& v) {
  std::string out = fmt::format("verdict: {}\n", classifier::to_string(v.kind));
  for (std::size_t i = 0; i < v.per_orbit.size(); ++i) {
    const auto& r = v.per_orbit[i];
    out += fmt::format("  orbit {}: {} ({} band eigenvalue(s))\n", r.orbit_id, classifier::to_string(v.orbit_kinds[i]),
                       r.eigenvalues.size());
    for (const auto& e : r.eigenvalues) {
      out += fmt::format("    lambda = {:.6f}{:+.6f}i  {}\n", e.lambda.real(), e.lambda.imag(),
                         e.proper ? "proper" : "improper");
    }
  }
  for (const auto& o : v.obligations) {
    out += fmt::format("  [{}] orbit {} {}\n", classifier::to_string(o.status), o.orbit_id, o.label);
  }
  if (v.obligations_met) out += fmt::format("  obligations met: {}\n", *v.obligations_met ? "yes" : "no");
  if (v.witness) {
    out += fmt::format("  witness: lambda0 = {:.6f}{:+.6f}i, log power {}, cutoff {}\n", v.witness->lambda0().real(),
                       v.witness->lambda0().imag(), v.witness->log_power(), v.witness->cutoff_radius());
  }
  for (const auto& n : v.notes) out += "  note: " + n + "\n";
  return out;
}

std::string sweep_csv(const std::vector<kernels::SweepRow>& rows) {
  std::string out = "s,n_eigenvalues,im_lambda_min,case_label,count,proper,oracle_im\n";
  for (const auto& r : rows) {
    const std::string oracle = r.oracle ? num(r.oracle->imag()) : "";
    std::string im_min, proper;
    if (!r.eigenvalues.empty()) {
      std::size_t lo = 0;
      for (std::size_t i = 1; i < r.eigenvalues.size(); ++i) {
        if (r.eigenvalues[i].imag() < r.eigenvalues[lo].imag()) lo = i;
      }
      im_min = num(r.eigenvalues[lo].imag());
      proper = r.proper[lo] ? "proper" : "improper";
    }
    out += fmt::format("{},{},{},{},{},{},{}\n", num(r.s), r.eigenvalues.size(), im_min,
                       static_cast<int>(r.label), r.count, proper, oracle);
  }
  return out;
}

std::string levels_csv(const std::vector<consistency::ConsistencyEntry>& entries, int orbit_id) {
  std::string out;
  for (const auto& e : entries) {
    const auto& d = e.diagnostic;
    for (std::size_t m = 0; m < d.integrals.size(); ++m) {
      out += fmt::format("{},{},{},{},{},{},{}\n", e.condition, orbit_id, e.row.angle, e.row.sigma, m,
                         num(d.r[m]), num(d.integrals[m]));
    }
  }
  return out;
}

std::string levels_csv_header() { return "condition,orbit,row_angle,row_sigma,m,r_m,I_m\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const OJson& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace nlbvp::io
