#include <fmt/format.h>

#include <cmath>
#include <numbers>

#include "nlbvp/errors.hpp"
#include "nlbvp/pencil.hpp"

namespace nlbvp::pencil {

int SpectralReport::enumerated_multiplicity() const {
  int total = 0;
  for (const auto& e : eigenvalues) total += e.algebraic_multiplicity;
  return total;
}

bool SpectralReport::has_improper() const {
  return std::any_of(eigenvalues.begin(), eigenvalues.end(), [](const auto& e) { return !e.proper; });
}

bool SpectralReport::has_proper_minus_i() const {
  return std::any_of(eigenvalues.begin(), eigenvalues.end(), [](const auto& e) { return e.proper; });
}

bool SpectralReport::any_ambiguous() const {
  return !unresolved.empty() ||
         std::any_of(eigenvalues.begin(), eigenvalues.end(), [](const auto& e) { return e.ambiguous; });
}

SpectralReport analyze(const OrbitModel& model, const SpectrumOptions& opt) {
  model.validate();
  SpectralReport rep;
  rep.orbit_id = model.orbit_id;
  rep.band = opt.band;
  rep.window = opt.window;
  const RootSearch rs = find_eigenvalues(model, opt.band, opt.window, opt.contour);
  rep.argument_principle_count = rs.winding;
  rep.unresolved = rs.unresolved;
  for (const auto& r : rs.roots) rep.eigenvalues.push_back(describe_eigenvalue(model, r, opt.contour.shooting));
  for (const auto& u : rs.unresolved) {
    rep.warnings.push_back(fmt::format("unresolved box [{:.6g}, {:.6g}] x [{:.6g}, {:.6g}] with winding {}",
                                       u.box_lo.real(), u.box_hi.real(), u.box_lo.imag(),
                                       u.box_hi.imag(), u.box_winding));
  }
  if (rep.enumerated_multiplicity() != rep.argument_principle_count) {
    rep.warnings.push_back(fmt::format("enumerated multiplicity {} differs from winding {}",
                                       rep.enumerated_multiplicity(), rep.argument_principle_count));
  }
  if (opt.compare_wide_window) {
    const double c = 0.5 * (opt.window.re_min + opt.window.re_max);
    const double h = opt.window.re_max - opt.window.re_min;
    const Window wide{c - h, c + h};
    try {
      const int wide_count = count_zeros_in_band(model, opt.band, wide, opt.contour);
      if (wide_count != rep.argument_principle_count) {
        rep.warnings.push_back(fmt::format(
            "window [{:.6g}, {:.6g}] holds {} eigenvalues but [{:.6g}, {:.6g}] holds {}",
            opt.window.re_min, opt.window.re_max, rep.argument_principle_count, wide.re_min,
            wide.re_max, wide_count));
      }
    } catch (const NumericalError& e) {
      rep.warnings.push_back(fmt::format("wide-window check failed: {}", e.what()));
    }
  }
  return rep;
}

OracleResult laplace_halfpi_oracle(double s) {
  if (s <= -2.0 || s > 0.0) return {HalfPlaneCase::NoEigenvalues, std::nullopt};
  if (s == 0.0) return {HalfPlaneCase::ProperMinusI, Complex(0.0, -1.0)};
  return {HalfPlaneCase::Improper, Complex(0.0, -2.0 / std::numbers::pi * std::acos(-s / 2.0))};
}

}  // namespace nlbvp::pencil
