#include "nlbvp/classifier.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "nlbvp/errors.hpp"

namespace nlbvp::classifier {
namespace {

using consistency::ConsistencyEntry;
using DVerdict = consistency::Verdict;

constexpr double kVertexTol = 1e-8;

Status status_of(DVerdict v) {
  switch (v) {
    case DVerdict::Finite:
      return Status::Satisfied;
    case DVerdict::Divergent:
      return Status::Failed;
    case DVerdict::Inconclusive:
      return Status::Inconclusive;
  }
  return Status::NotChecked;
}

// Failed dominates Inconclusive, which dominates Satisfied.
Status combine(Status a, Status b) {
  if (a == Status::Failed || b == Status::Failed) return Status::Failed;
  if (a == Status::Inconclusive || b == Status::Inconclusive) return Status::Inconclusive;
  if (a == Status::NotChecked) return b;
  if (b == Status::NotChecked) return a;
  return Status::Satisfied;
}

Status entries_status(const std::vector<ConsistencyEntry>& entries, std::string* detail) {
  Status s = Status::NotChecked;
  for (const auto& e : entries) {
    const Status es = status_of(e.diagnostic.verdict);
    if (es != Status::Satisfied && detail) {
      if (!detail->empty()) *detail += "; ";
      *detail += fmt::format("{}: {} ({})", e.diagnostic.label, consistency::to_string(e.diagnostic.verdict),
                             e.diagnostic.reason);
    }
    s = combine(s, es);
  }
  return s;
}

bool is_border_orbit(const pencil::SpectralReport& r) {
  return !r.eigenvalues.empty() && !r.has_improper() && r.has_proper_minus_i();
}

Kind orbit_kind(const pencil::SpectralReport& r) {
  if (r.eigenvalues.empty()) return Kind::Preserves;
  if (r.has_improper()) return Kind::Violates;
  return Kind::Border;
}

bool data_vanishes_at_vertex(const ProblemSpec& spec, const OrbitModel& m) {
  for (const auto& side : m.sides()) {
    const ScalarFunction& f = spec.rhs.side_data(m.orbit_id, side);
    if (std::abs(f.along(0.0, m.side_direction(side))) > kVertexTol) return false;
  }
  return true;
}

}  // namespace

const char* to_string(Kind k) {
  switch (k) {
    case Kind::Preserves:
      return "Preserves";
    case Kind::Border:
      return "Border";
    case Kind::Violates:
      return "Violates";
  }
  return "?";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Satisfied:
      return "SATISFIED";
    case Status::Failed:
      return "FAILED";
    case Status::Inconclusive:
      return "INCONCLUSIVE";
    case Status::NotChecked:
      return "NOT_CHECKED";
  }
  return "?";
}

std::vector<Obligation> border_requirements(const ProblemSpec& spec,
                                            const std::vector<OrbitModel>& frozen,
                                            const std::vector<pencil::SpectralReport>& spectra,
                                            Verdict* sink) {
  std::vector<Obligation> out;
  const auto data = consistency::check_boundary_data(spec, frozen);
  bool all_met = true, undecided = false;

  for (std::size_t o = 0; o < frozen.size(); ++o) {
    if (!is_border_orbit(spectra[o])) continue;
    const OrbitModel& model = frozen[o];
    const int id = model.orbit_id;
    const auto& oc = data.orbits[o];

    Obligation beta{"beta-table", "β coefficients", "", id, Status::Satisfied, ""};
    if (oc.betas) {
      std::string rows;
      for (const auto& d : oc.betas->dependent) {
        std::string b;
        for (double x : d.beta) b += fmt::format("{}{:.17g}", b.empty() ? "" : ", ", x);
        rows += fmt::format("{}row ({},{}) = Σ β·rows, β = [{}], residual {:.3g}", rows.empty() ? "" : "; ",
                            d.row.angle, d.row.sigma, b, d.residual);
      }
      beta.formula = "Z_row - Σ β Z_independent";
      beta.detail = rows;
    } else {
      beta.detail = "differentiated operators are independent; no consistency conditions";
    }
    out.push_back(beta);

    Obligation dat{"data-consistency", "boundary data consistency", "", id, Status::Satisfied, ""};
    if (!oc.entries.empty()) {
      dat.formula = oc.entries.front().formula;
      dat.status = entries_status(oc.entries, &dat.detail);
    }
    out.push_back(dat);

    // Null vector from the proper eigenvector must annihilate the hat operators.
    Obligation cross{"null-vector-cross-check", "pencil and hat operators agree", "H q = 0", id,
                     Status::Satisfied, ""};
    for (const auto& e : spectra[o].eigenvalues) {
      if (!e.proper) continue;
      for (std::size_t v = 0; v < e.coefficients.size(); ++v) {
        try {
          const auto nv = consistency::null_vector_from_proper_eigenvector(model, e, v);
          cross.detail += fmt::format("{}residual {:.3g}", cross.detail.empty() ? "" : "; ", nv.residual);
        } catch (const CrossCheckFailure& err) {
          cross.status = Status::Failed;
          cross.detail += err.what();
        }
      }
    }
    out.push_back(cross);

    if (!oc.betas) {
      all_met = all_met && cross.status != Status::Failed;
      continue;
    }
    const auto coef = consistency::check_coefficient_condition(spec, model, *oc.betas);

    Obligation a0{"a-vanishes-at-vertex", "a(0)=0", "a(0) = 0", id, Status::Satisfied, ""};
    Obligation da0{"a-derivative-vanishes-at-vertex", "∂a/∂y₂(0)=0", "∂a/∂τ(0) = 0", id, Status::Satisfied,
                   ""};
    for (const auto& vv : coef.vertex_values) {
      Obligation& target = vv.label == "a(0)=0" ? a0 : da0;
      if (vv.label != "a(0)=0") target.label = vv.label;
      if (!vv.vanishes) {
        target.status = Status::Failed;
        target.detail += fmt::format("{}vertex value {:.17g}", target.detail.empty() ? "" : "; ", vv.value);
      }
    }
    for (const auto& e : coef.bv_entries) {
      Obligation& target = e.formula.find("v_Ω = r") != std::string::npos ? a0 : da0;
      std::string d;
      target.status = combine(target.status, entries_status({e}, &d));
      if (!d.empty()) target.detail += (target.detail.empty() ? "" : "; ") + d;
    }
    if (coef.vertex_values.empty()) {
      a0.detail = da0.detail = "no exterior terms couple into a dependent row";
    }
    out.push_back(a0);
    out.push_back(da0);

    Obligation bint{"b-derivative-integral", "b-derivative integral", "", id, Status::Satisfied, ""};
    if (!coef.bc_entries.empty()) {
      bint.formula = coef.bc_entries.front().formula;
      bint.status = entries_status(coef.bc_entries, &bint.detail);
    }
    out.push_back(bint);

    const bool regular = dat.status == Status::Satisfied && data_vanishes_at_vertex(spec, model);
    Obligation adm{"admissible-pairs", "admissible generator pairs",
                   "B^v + BC consistency on admissible (v, C)", id, Status::NotChecked, ""};
    if (regular) {
      adm.status = coef.admissible_entries.empty() ? Status::Satisfied
                                                   : entries_status(coef.admissible_entries, &adm.detail);
    } else {
      adm.detail = "applies to regular data only";
    }
    out.push_back(adm);

    // Smoothness needs consistent data and either coefficient condition.
    const Status c_coef = combine(combine(a0.status, da0.status), bint.status);
    Status coeff = Status::Inconclusive;
    if (c_coef == Status::Satisfied || adm.status == Status::Satisfied) {
      coeff = Status::Satisfied;
    } else if (c_coef == Status::Failed && adm.status != Status::Inconclusive) {
      coeff = Status::Failed;
    }
    Status orbit = combine(dat.status, coeff);
    orbit = combine(orbit, cross.status);
    if (orbit == Status::Failed) all_met = false;
    if (orbit == Status::Inconclusive) undecided = true;

    if (sink) sink->coefficient_reports.push_back(coef);
  }
  if (sink) {
    sink->data_report = data;
    if (!all_met) {
      sink->obligations_met = false;
    } else if (!undecided) {
      sink->obligations_met = true;
    }
    sink->notes.push_back("coefficient conditions are checked on generators v_Ω = 1 and v_Ω = r (generator-based)");
  }
  return out;
}

Verdict classify(const ProblemSpec& spec, const ClassifyOptions& opt) {
  spec.validate();
  const auto frozen = freeze(spec);
  Verdict v;
  for (const auto& model : frozen) {
    auto rep = pencil::analyze(model, opt.spectrum);
    if (!rep.unresolved.empty()) {
      throw AmbiguousSpectrum(fmt::format("orbit {}: {} unresolved root box(es) in the band", model.orbit_id,
                                          rep.unresolved.size()));
    }
    if (rep.any_ambiguous()) {
      std::string note;
      for (const auto& e : rep.eigenvalues) {
        if (e.ambiguous) note += fmt::format(" λ = {:.17g}{:+.17g}i ({})", e.lambda.real(), e.lambda.imag(), e.note);
      }
      throw AmbiguousSpectrum(fmt::format("orbit {}: proper/improper flag undecided;{}", model.orbit_id, note));
    }
    if (rep.argument_principle_count != rep.enumerated_multiplicity()) {
      throw AmbiguousSpectrum(fmt::format("orbit {}: winding {} but enumerated multiplicity {}", model.orbit_id,
                                          rep.argument_principle_count, rep.enumerated_multiplicity()));
    }
    v.orbit_kinds.push_back(orbit_kind(rep));
    v.per_orbit.push_back(std::move(rep));
  }

  const auto has = [&](Kind k) { return std::find(v.orbit_kinds.begin(), v.orbit_kinds.end(), k) != v.orbit_kinds.end(); };
  v.kind = has(Kind::Violates) ? Kind::Violates : has(Kind::Border) ? Kind::Border : Kind::Preserves;

  if (v.kind == Kind::Violates && opt.build_witness) {
    const pencil::PencilEigenvalue* best = nullptr;
    std::size_t best_orbit = 0;
    for (std::size_t o = 0; o < v.per_orbit.size(); ++o) {
      for (const auto& e : v.per_orbit[o].eigenvalues) {
        if (e.proper) continue;
        if (!best || e.lambda.imag() > best->lambda.imag()) {
          best = &e;
          best_orbit = o;
        }
      }
    }
    const OrbitModel& model = frozen[best_orbit];
    try {
      v.witness = witness_singular_function(model, *best, witness_cutoff_radius(model, spec.truncation));
    } catch (const std::invalid_argument& e) {
      v.notes.push_back(fmt::format("witness not built: {}", e.what()));
    }
  }
  if (v.kind == Kind::Border && opt.check_obligations) {
    v.obligations = border_requirements(spec, frozen, v.per_orbit, &v);
  }
  return v;
}

}  // namespace nlbvp::classifier
