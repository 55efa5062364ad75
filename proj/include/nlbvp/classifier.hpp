#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlbvp/consistency.hpp"
#include "nlbvp/geometry.hpp"
#include "nlbvp/pencil.hpp"
#include "nlbvp/witness.hpp"

namespace nlbvp::classifier {

enum class Kind { Preserves, Border, Violates };
const char* to_string(Kind k);

enum class Status { Satisfied, Failed, Inconclusive, NotChecked };
const char* to_string(Status s);

/// One requirement a border-case solution must meet to stay in W^2.
struct Obligation {
  std::string id;       // slug, e.g. "data-consistency"
  std::string label;    // e.g. "∂a/∂y₂(0)=0"
  std::string formula;
  int orbit_id = 0;
  Status status = Status::NotChecked;
  std::string detail;
};

struct Verdict {
  Kind kind = Kind::Preserves;
  std::vector<pencil::SpectralReport> per_orbit;
  std::vector<Kind> orbit_kinds;  // aligned with per_orbit
  std::vector<Obligation> obligations;
  /// Border only: all obligations needed for smoothness hold (nullopt when undecided).
  std::optional<bool> obligations_met;
  std::optional<SingularWitness> witness;
  std::optional<consistency::ConsistencyReport> data_report;
  std::vector<consistency::CoefficientReport> coefficient_reports;
  std::vector<std::string> notes;
};

struct ClassifyOptions {
  pencil::SpectrumOptions spectrum;
  bool build_witness = true;
  bool check_obligations = true;
};

/// Throws AmbiguousSpectrum when a band eigenvalue cannot be labelled proper or improper.
Verdict classify(const ProblemSpec& spec, const ClassifyOptions& opt = {});

/// Obligations for the border orbits of a frozen spec; fills the reports it computes.
std::vector<Obligation> border_requirements(const ProblemSpec& spec,
                                            const std::vector<OrbitModel>& frozen,
                                            const std::vector<pencil::SpectralReport>& spectra,
                                            Verdict* sink = nullptr);

}  // namespace nlbvp::classifier
