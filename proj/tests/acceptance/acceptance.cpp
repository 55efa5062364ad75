// One pass/fail line per acceptance criterion. Exit status is the number of failures.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nlbvp/classifier.hpp"
#include "nlbvp/consistency.hpp"
#include "nlbvp/examples.hpp"
#include "nlbvp/pencil.hpp"
#include "nlbvp/solver.hpp"
#include "nlbvp/witness.hpp"
#include "oracles/closed_forms.hpp"
#include "support.hpp"

using namespace nlbvp;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

OrbitModel symmetric(double s) { return halfplane_rotation_model(s / 2.0, s / 2.0); }

Outcome closed_form_eigenvalues() {
  Outcome o;
  double worst = 0.0, slowest = 0.0;
  for (double s : {-1.9, -1.5, -1.0, -0.5, -0.1}) {
    const auto t0 = Clock::now();
    const auto rs = pencil::find_eigenvalues(symmetric(s));
    const double dt = seconds_since(t0);
    slowest = std::max(slowest, dt);
    o.require(rs.roots.size() == 1 && rs.roots[0].multiplicity == 1,
              fmt::format("s = {}: {} band eigenvalues", s, rs.roots.size()));
    if (rs.roots.empty()) continue;
    const double err = std::abs(rs.roots[0].lambda - *oracle::halfplane_arctan(s));
    const double err2 = std::abs(rs.roots[0].lambda - oracle::halfplane_arccos(s));
    worst = std::max({worst, err, err2});
    o.require(err <= 1e-8 && err2 <= 1e-8, fmt::format("s = {}: error {:.3g}", s, std::max(err, err2)));
    o.require(dt < 1.0, fmt::format("s = {}: {:.3f} s", s, dt));
  }
  o.note(fmt::format("max |error| {:.2e}, slowest run {:.3f} s", worst, slowest));
  return o;
}

Outcome case_table() {
  Outcome o;
  int checked = 0;
  auto run = [&](double s, int expected_case) {
    const auto rep = pencil::analyze(symmetric(s));
    ++checked;
    o.require(rep.argument_principle_count == rep.enumerated_multiplicity(),
              fmt::format("s = {}: winding {} vs enumerated {}", s, rep.argument_principle_count,
                          rep.enumerated_multiplicity()));
    o.require(expected_case == oracle::halfplane_case(s), fmt::format("oracle label for s = {}", s));
    switch (expected_case) {
      case 1:
        o.require(rep.eigenvalues.empty(), fmt::format("s = {}: expected no band eigenvalues", s));
        break;
      case 2:
        o.require(rep.eigenvalues.size() == 1 && rep.eigenvalues[0].proper &&
                      std::abs(rep.eigenvalues[0].lambda - pencil::Complex(0.0, -1.0)) < 1e-10,
                  fmt::format("s = {}: expected exactly a proper -i", s));
        break;
      case 3:
        o.require(rep.eigenvalues.size() == 1 && !rep.eigenvalues[0].proper,
                  fmt::format("s = {}: expected one improper eigenvalue", s));
        break;
    }
  };
  for (double s : {-3.0, -2.0, 0.5, 1.0}) run(s, 1);
  run(0.0, 2);
  for (double s : {-1.5, -1.0, -0.5}) run(s, 3);
  o.note(fmt::format("{} parameter values", checked));
  return o;
}

Outcome beta_machinery() {
  Outcome o;
  const std::vector<std::pair<std::string, OrbitModel>> models = {
      {"s = 0", halfplane_rotation_model(0.5, -0.5)}, {"dirichlet", dirichlet_model(oracle::kPi / 2)}};
  for (const auto& [name, m] : models) {
    const auto t = consistency::dependency_betas(consistency::hat_operators(m));
    const bool ok = t.dependent.size() == 1 && t.dependent[0].beta.size() == 1 &&
                    std::abs(t.dependent[0].beta[0] + 1.0) < 1e-12 && t.dependent[0].residual < 1e-12;
    o.require(ok, name + ": beta table");
    if (ok) o.note(fmt::format("{}: beta = {:.17g}, residual {:.1e}", name, t.dependent[0].beta[0], t.dependent[0].residual));
  }
  const OrbitModel m = halfplane_rotation_model(0.5, -0.5);
  const auto betas = consistency::dependency_betas(consistency::hat_operators(m));
  std::mt19937_64 rng(0x5eed);
  double worst = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    const auto f1 = testing_support::random_smooth(rng, "f1");
    const auto f2 = testing_support::random_smooth(rng, "f2");
    auto spec = testing_support::spec_with(m);
    spec.rhs.boundary = {{0, {0, 1}, f1}, {0, {0, 2}, f2}};
    const auto tr = consistency::data_combination_trace(spec, m, betas, betas.dependent[0]);
    for (std::size_t lv = 0; lv < tr.midpoint_r.size(); ++lv) {
      for (std::size_t p = 0; p < tr.midpoint_r[lv].size(); ++p) {
        const double r = tr.midpoint_r[lv][p];
        const double y2_form = f2.gradient(Vec2(0.0, r)).y() - f1.gradient(Vec2(0.0, -r)).y();
        worst = std::max(worst, std::abs(tr.midpoint_derivative[lv][p] - y2_form));
      }
    }
  }
  o.require(worst <= 1e-12, fmt::format("y2-form mismatch {:.3g}", worst));
  o.note(fmt::format("y2-form max mismatch {:.1e} over 20 pairs", worst));
  return o;
}

Outcome diagnostic_calibration() {
  Outcome o;
  auto trace = [](double c, double p) {
    return consistency::BoundaryTrace::sample([=](double r) { return c * std::pow(r, p); },
                                              [=](double r) { return c * p * std::pow(r, p - 1.0); }, 0.25, 24);
  };
  using consistency::Verdict;
  const auto zero = consistency::weighted_seminorm_diagnostic(trace(0.0, 1.0));
  o.require(zero.verdict == Verdict::Finite, "zero combination not finite");
  const auto lin = consistency::weighted_seminorm_diagnostic(trace(1.0, 1.0));
  o.require(lin.verdict == Verdict::Divergent && std::abs(lin.slope) <= 0.02,
            fmt::format("r: verdict {}, slope {:.4f}", consistency::to_string(lin.verdict), lin.slope));
  const auto p32 = consistency::weighted_seminorm_diagnostic(trace(1.0, 1.5));
  o.require(p32.verdict == Verdict::Finite && std::abs(p32.slope + 1.0) <= 0.05,
            fmt::format("r^1.5: verdict {}, slope {:.4f}", consistency::to_string(p32.verdict), p32.slope));
  double worst = 0.0;
  for (std::size_t m = 0; m < p32.integrals.size(); ++m) {
    worst = std::max(worst, std::abs(p32.integrals[m] / oracle::r32_level(p32.r[m]) - 1.0));
  }
  o.require(worst <= 0.01, fmt::format("r^1.5 levels off by {:.3g}", worst));
  o.note(fmt::format("slopes {:.4f} (r), {:.4f} (r^1.5); max relative level error {:.1e}", lin.slope, p32.slope, worst));
  return o;
}

Outcome witness_validity() {
  Outcome o;
  const OrbitModel m = halfplane_rotation_model(-0.5, -0.5);
  const auto rep = pencil::analyze(m);
  if (rep.eigenvalues.size() != 1) {
    o.require(false, "expected one band eigenvalue");
    return o;
  }
  const auto w = classifier::witness_singular_function(m, rep.eigenvalues[0],
                                                       classifier::witness_cutoff_radius(m, Truncation{}));
  // Shape check against r^{2/3} cos(2 omega / 3).
  double shape = 0.0;
  const auto phi0 = w.profile(0, 0, 0.0);
  for (int i = 0; i <= 20; ++i) {
    const double om = -oracle::kPi / 2 + i * oracle::kPi / 20;
    shape = std::max(shape, std::abs(w.profile(0, 0, om) / phi0 - std::cos(2.0 * om / 3.0)));
  }
  o.require(std::abs(w.lambda0().imag() + 2.0 / 3.0) < 1e-9 && shape < 1e-8,
            fmt::format("profile mismatch {:.3g}", shape));
  const auto res = w.residuals(200);
  o.require(res.interior_points + res.boundary_points == 200, "sample count");
  o.require(res.interior < 1e-10 && res.boundary < 1e-10,
            fmt::format("residuals {:.3g} / {:.3g}", res.interior, res.boundary));
  std::vector<double> levels;
  for (int l = 0; l < 24; ++l) levels.push_back(w.w2_level(l));
  bool increasing = true;
  for (std::size_t l = levels.size() - 8; l < levels.size(); ++l) increasing = increasing && levels[l] > levels[l - 1];
  o.require(increasing, "W2 levels not strictly increasing");
  o.note(fmt::format("interior {:.1e}, boundary {:.1e}; level ratio {:.6f}", res.interior, res.boundary,
                     levels[23] / levels[22]));
  return o;
}

Outcome singular_exponent() {
  Outcome o;
  const auto run = examples::singular_exponent_run(-1.0, {256, 512, 12.0}, true);
  const double a = run.fit.alpha, a2 = run.fit_double_T.alpha;
  const double change = std::abs(a2 - a) / a;
  o.require(a >= 0.633 && a <= 0.700, fmt::format("alpha {:.6f}", a));
  o.require(run.seconds < 60.0, fmt::format("runtime {:.1f} s", run.seconds));
  o.require(change < 0.005, fmt::format("T-doubling change {:.3g}", change));
  o.note(fmt::format("alpha {:.6f} (target {:.6f}), doubled T {:.6f} ({:.3f}%), {:.1f} s", a,
                     -oracle::halfplane_arccos(-1.0).imag(), a2, 100.0 * change, run.seconds));
  return o;
}

Outcome blowup_dichotomy() {
  Outcome o;
  const solver::GridOptions base{64, 128, 12.0};
  const std::vector<std::pair<examples::BlowupScenario, solver::Trend>> cases = {
      {examples::BlowupScenario::PreservesSmooth, solver::Trend::Bounded},
      {examples::BlowupScenario::BorderConsistent, solver::Trend::Bounded},
      {examples::BlowupScenario::BorderInteriorCoupling, solver::Trend::Divergent},
  };
  for (const auto& [scenario, expect] : cases) {
    const auto run = examples::blowup_run(scenario, base);
    const auto& g = run.result.growth;
    o.require(run.result.trend == expect, fmt::format("{}: {}", examples::to_string(scenario),
                                                      solver::to_string(run.result.trend)));
    o.note(fmt::format("{} {} (growth {:+.1f}%, {:+.1f}%)", examples::to_string(scenario),
                       solver::to_string(run.result.trend), g.size() > 0 ? 100 * g[0] : 0.0,
                       g.size() > 1 ? 100 * g[1] : 0.0));
  }
  return o;
}

Outcome manufactured_convergence() {
  Outcome o;
  const solver::GridOptions base{32, 64, 6.0};
  const std::vector<std::pair<std::string, OrbitModel>> models = {
      {"dirichlet", dirichlet_model(oracle::kPi / 2)}, {"s = 1", symmetric(1.0)}};
  for (const auto& [name, m] : models) {
    const auto run = examples::manufactured_run(m, base);
    bool ok = run.orders.size() == 2;
    for (double q : run.orders) ok = ok && q >= 1.8;
    o.require(ok, name + " order below 1.8");
    o.note(fmt::format("{}: orders {:.3f}, {:.3f}", name, run.orders.size() > 0 ? run.orders[0] : 0.0,
                       run.orders.size() > 1 ? run.orders[1] : 0.0));
  }
  return o;
}

Outcome cross_module_coherence() {
  Outcome o;
  std::mt19937_64 rng(20241014);
  std::uniform_real_distribution<double> weight(-2.0, 2.0);
  double worst = 0.0;
  int proper = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const double b1 = weight(rng);
    OrbitModel m = halfplane_rotation_model(b1, -b1);
    const auto rep = pencil::analyze(m);
    for (const auto& e : rep.eigenvalues) {
      if (!e.proper || std::abs(e.lambda - pencil::Complex(0.0, -1.0)) > 1e-8) continue;
      ++proper;
      for (std::size_t v = 0; v < e.coefficients.size(); ++v) {
        try {
          worst = std::max(worst, consistency::null_vector_from_proper_eigenvector(m, e, v).residual);
        } catch (const std::exception& ex) {
          o.require(false, fmt::format("b1 = {}: {}", b1, ex.what()));
        }
      }
    }
  }
  o.require(proper == 50, fmt::format("{} of 50 models reported a proper -i", proper));
  o.require(worst < 1e-8, fmt::format("residual {:.3g}", worst));
  o.note(fmt::format("{} models, max residual {:.1e}", proper, worst));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form band eigenvalues", closed_form_eigenvalues},
      {"case table", case_table},
      {"beta machinery and y2-form", beta_machinery},
      {"consistency diagnostic calibration", diagnostic_calibration},
      {"singular witness validity", witness_validity},
      {"numerical singularity exponent", singular_exponent},
      {"W2 blow-up dichotomy", blowup_dichotomy},
      {"manufactured-solution convergence", manufactured_convergence},
      {"pencil / hat-operator coherence", cross_module_coherence},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failures;
    fmt::print("[{}] {} {}: {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail,
               seconds_since(t0));
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures;
}
