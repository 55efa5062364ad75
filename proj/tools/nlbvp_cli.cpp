// Command-line front end: spectra, verdicts, consistency checks, solver
// experiments and parameter sweeps.
#include <fmt/format.h>

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>

#include "nlbvp/classifier.hpp"
#include "nlbvp/consistency.hpp"
#include "nlbvp/errors.hpp"
#include "nlbvp/examples.hpp"
#include "nlbvp/kernels.hpp"
#include "nlbvp/pencil.hpp"
#include "nlbvp/report_io.hpp"
#include "nlbvp/solver.hpp"
#include "nlbvp/spec_io.hpp"

namespace {

using namespace nlbvp;
using io::OJson;

struct Globals {
  std::string spec_path;
  std::string example;
  std::optional<double> s;
  std::string a;
  std::string out = "out";
  int threads = 0;
  std::uint64_t seed = 0;
};

struct Manifest {
  std::string command;
  OJson parameters = OJson::object();
};

ProblemSpec resolve_spec(const Globals& g) {
  const int sources = !g.spec_path.empty() + !g.example.empty() + g.s.has_value();
  if (sources != 1) throw std::invalid_argument("give exactly one of --spec, --example, --s");
  ProblemSpec spec;
  if (!g.spec_path.empty()) {
    spec = load_spec(g.spec_path);
  } else if (!g.example.empty()) {
    spec = examples::spec(g.example);
  } else {
    spec = examples::halfplane_spec(*g.s);
  }
  if (!g.a.empty()) {
    if (spec.orbits.empty()) throw std::invalid_argument("--a needs an orbit");
    ExteriorTerm e;
    e.orbit_id = spec.orbits.front().orbit_id;
    e.side = {0, 1};
    e.coefficient = ScalarFunction::parse(g.a);
    spec.exterior_terms.push_back(e);
  }
  spec.validate();
  return spec;
}

void write_manifest(const Globals& g, const Manifest& m) {
  OJson j;
  j["command"] = m.command;
  j["spec"] = !g.spec_path.empty() ? OJson(g.spec_path)
              : !g.example.empty() ? OJson("example:" + g.example)
              : g.s                ? OJson(fmt::format("s={:.17g}", *g.s))
                                   : OJson(nullptr);
  j["parameters"] = m.parameters;
  if (!g.a.empty()) j["parameters"]["a"] = g.a;
  j["out"] = g.out;
  j["seed"] = g.seed;
  j["version"] = NLBVP_VERSION;
  io::write_json(std::filesystem::path(g.out) / "manifest.json", j);
}

pencil::SpectrumOptions spectrum_options(const std::vector<double>& band, const std::vector<double>& window) {
  pencil::SpectrumOptions opt;
  if (band.size() == 2) {
    opt.band.im_min = band[0];
    opt.band.im_max = band[1];
  }
  if (window.size() == 2) {
    opt.window.re_min = window[0];
    opt.window.re_max = window[1];
  }
  return opt;
}

int cmd_spectrum(const Globals& g, const pencil::SpectrumOptions& opt) {
  const auto spec = resolve_spec(g);
  const auto frozen = freeze(spec);
  const std::filesystem::path out(g.out);
  OJson all = OJson::array();
  for (const auto& m : frozen) {
    const auto rep = pencil::analyze(m, opt);
    fmt::print("orbit {}: argument-principle count {}\n", m.orbit_id, rep.argument_principle_count);
    if (rep.eigenvalues.empty()) fmt::print("  (no band eigenvalues)\n");
    for (const auto& e : rep.eigenvalues) {
      fmt::print("  {:.6f} {:+.6f}i  multiplicity {}  {}\n", e.lambda.real(), e.lambda.imag(),
                 e.algebraic_multiplicity, e.proper ? "proper" : "improper");
    }
    for (const auto& w : rep.warnings) fmt::print("  warning: {}\n", w);
    io::write_text(out / fmt::format("eigenvalues_orbit{}.csv", m.orbit_id), io::eigenvalues_csv(rep));
    all.push_back(io::to_json(rep));
  }
  io::write_json(out / "spectrum.json", all);
  write_manifest(g, {"spectrum",
                     {{"band", {opt.band.im_min, opt.band.im_max}}, {"window", {opt.window.re_min, opt.window.re_max}}}});
  return 0;
}

void write_witness(const classifier::SingularWitness& w, const std::filesystem::path& out, OJson& j) {
  io::write_text(out / "witness_profiles.csv", io::witness_profiles_csv(w));
  io::write_text(out / "witness_forcing.csv", io::witness_forcing_csv(w));
  j["profiles_csv_path"] = "witness_profiles.csv";
  j["forcing_csv_path"] = "witness_forcing.csv";
}

int cmd_classify(const Globals& g, const pencil::SpectrumOptions& opt) {
  const auto spec = resolve_spec(g);
  classifier::ClassifyOptions co;
  co.spectrum = opt;
  const auto v = classifier::classify(spec, co);
  std::cout << io::describe(v);
  const std::filesystem::path out(g.out);
  OJson j = io::to_json(v);
  if (v.witness) write_witness(*v.witness, out, j["witness"]);
  io::write_json(out / "verdict.json", j);
  write_manifest(g, {"classify", OJson::object()});
  return 0;
}

int cmd_consistency(const Globals& g) {
  const auto spec = resolve_spec(g);
  const auto frozen = freeze(spec);
  const auto data = consistency::check_boundary_data(spec, frozen);
  OJson j;
  j["data"] = io::to_json(data);
  j["coefficients"] = OJson::array();
  std::string levels = io::levels_csv_header();
  fmt::print("boundary data: {}\n", consistency::to_string(data.verdict));
  for (std::size_t i = 0; i < frozen.size(); ++i) {
    const auto& oc = data.orbits[i];
    if (!oc.betas) {
      fmt::print("orbit {}: no dependent rows\n", oc.orbit_id);
      continue;
    }
    for (const auto& d : oc.betas->dependent) {
      std::string b;
      for (double x : d.beta) b += fmt::format("{}{:.6g}", b.empty() ? "" : ", ", x);
      fmt::print("orbit {} row ({},{}): beta = [{}]\n", oc.orbit_id, d.row.angle, d.row.sigma, b);
    }
    for (const auto& e : oc.entries) {
      fmt::print("  {}  {} (slope {:.3g})\n", e.formula, consistency::to_string(e.diagnostic.verdict),
                 e.diagnostic.slope);
    }
    const auto coef = consistency::check_coefficient_condition(spec, frozen[i], *oc.betas);
    levels += io::levels_csv(oc.entries, oc.orbit_id);
    levels += io::levels_csv(coef.bv_entries, oc.orbit_id);
    levels += io::levels_csv(coef.bc_entries, oc.orbit_id);
    levels += io::levels_csv(coef.admissible_entries, oc.orbit_id);
    for (const auto& vv : coef.vertex_values) {
      fmt::print("  {}: value {:.6g} {}\n", vv.label, vv.value, vv.vanishes ? "ok" : "FAILED");
    }
    fmt::print("  coefficient condition (generator-based): {}\n", coef.coefficient_condition ? "holds" : "fails");
    fmt::print("  admissible-pair condition (generator-based): {}\n", coef.admissible_condition ? "holds" : "fails");
    OJson cj = io::to_json(coef);
    cj["orbit"] = oc.orbit_id;
    j["coefficients"].push_back(cj);
  }
  io::write_json(std::filesystem::path(g.out) / "consistency.json", j);
  io::write_text(std::filesystem::path(g.out) / "consistency_levels.csv", levels);
  write_manifest(g, {"consistency", OJson::object()});
  return 0;
}

int cmd_witness(const Globals& g, const pencil::SpectrumOptions& opt) {
  const auto spec = resolve_spec(g);
  classifier::ClassifyOptions co;
  co.spectrum = opt;
  const auto v = classifier::classify(spec, co);
  if (!v.witness) {
    fmt::print("no singular witness: verdict is {}\n", classifier::to_string(v.kind));
    for (const auto& n : v.notes) fmt::print("  note: {}\n", n);
    write_manifest(g, {"witness", OJson::object()});
    return 0;
  }
  const auto& w = *v.witness;
  const auto res = w.residuals(200);
  OJson j = io::to_json(w);
  j["interior_residual"] = res.interior;
  j["boundary_residual"] = res.boundary;
  j["w2_levels"] = OJson::array();
  for (int m = 0; m < 16; ++m) j["w2_levels"].push_back(w.w2_level(m));
  const std::filesystem::path out(g.out);
  write_witness(w, out, j);
  io::write_json(out / "witness.json", j);
  fmt::print("witness lambda0 = {:.6f}{:+.6f}i, log power {}, residuals interior {:.3g} boundary {:.3g}\n",
             w.lambda0().real(), w.lambda0().imag(), w.log_power(), res.interior, res.boundary);
  write_manifest(g, {"witness", OJson::object()});
  return 0;
}

int cmd_sweep(const Globals& g, double from, double to, double step, const pencil::SpectrumOptions& opt) {
  if (!(step > 0.0) || to < from) throw std::invalid_argument("sweep needs step > 0 and to >= from");
  std::vector<double> s;
  const int n = static_cast<int>(std::floor((to - from) / step + 1e-9)) + 1;
  for (int i = 0; i < n; ++i) s.push_back(from + i * step);
  const auto rows = kernels::s_sweep(s, opt, kernels::Mode::Parallel);
  const auto csv = io::sweep_csv(rows);
  io::write_text(std::filesystem::path(g.out) / "sweep.csv", csv);
  std::cout << csv;
  write_manifest(g, {"sweep", {{"from", from}, {"to", to}, {"step", step}}});
  return 0;
}

int cmd_solve(const Globals& g, std::string experiment, const std::string& manifest, bool quick,
              const std::vector<double>& grid) {
  if (!manifest.empty()) {
    std::ifstream in(manifest);
    if (!in) throw std::invalid_argument("cannot read manifest " + manifest);
    const auto m = OJson::parse(in);
    experiment = m.at("parameters").at("experiment").get<std::string>();
    quick = m.at("parameters").value("quick", false);
  }
  const std::filesystem::path out(g.out);
  if (!experiment.empty()) {
    examples::ExperimentOptions eo;
    eo.out = out;
    eo.quick = quick;
    const auto res = examples::run_experiment(experiment, eo);
    std::cout << res.summary.dump(2) << "\n";
    write_manifest(g, {"solve", {{"experiment", experiment}, {"quick", quick}}});
    return 0;
  }
  const auto spec = resolve_spec(g);
  solver::GridOptions go;
  if (grid.size() == 3) go = {static_cast<int>(grid[0]), static_cast<int>(grid[1]), grid[2]};
  const auto sol = solver::solve(solver::assemble(spec, spec.orbits.front().orbit_id, go));
  OJson j;
  j["solver"] = {{"method", sol.info.method},
                 {"iterations", sol.info.iterations},
                 {"relative_residual", sol.info.relative_residual},
                 {"note", sol.info.note}};
  try {
    const auto fit = solver::fit_singularity_exponent(sol, 0, 0.0);
    j["fit"] = {{"C", fit.C}, {"alpha", fit.alpha}, {"A", fit.A}, {"B", fit.B}, {"residual", fit.residual}};
  } catch (const StructuralError& e) {
    j["fit"] = {{"refused", e.what()}};
  }
  solver::write_csv(sol, out / "solution.csv");
  solver::write_binary(sol, out / "solution.bin", out / "solution.json");
  io::write_json(out / "solve.json", j);
  std::cout << j.dump(2) << "\n";
  write_manifest(g, {"solve", {{"grid", {go.n_omega, go.n_t, go.T}}}});
  return 0;
}

int cmd_examples(bool export_specs, const Globals& g) {
  fmt::print("example specs:\n");
  for (const auto& id : examples::spec_ids()) fmt::print("  {}\n", id);
  fmt::print("experiments:\n");
  for (const auto& e : examples::experiments()) fmt::print("  {:28} {}\n", e.id, e.description);
  if (export_specs) {
    for (const auto& id : examples::spec_ids()) {
      save_spec(examples::spec(id), std::filesystem::path(g.out) / (id + ".json"));
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smoothness analysis for elliptic problems with nonlocal boundary conditions"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--spec", g.spec_path, "problem spec (JSON)");
  app.add_option("--example", g.example, "shipped example spec id");
  app.add_option("--s", g.s, "half-plane model with b1 = b2 = s/2");
  app.add_option("--a", g.a, "coefficient of an exterior term on side (0,1), e.g. linear_y2:1");
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "OpenMP threads (0 = default)");
  app.add_option("--seed", g.seed, "seed recorded in the manifest");
  app.set_version_flag("--version", NLBVP_VERSION);

  std::vector<double> band, window;
  auto add_spectrum_flags = [&](CLI::App* c) {
    c->add_option("--band", band, "im_min im_max")->expected(2);
    c->add_option("--window", window, "re_min re_max")->expected(2);
  };
  auto* spectrum = app.add_subcommand("spectrum", "band eigenvalues of the operator pencil");
  add_spectrum_flags(spectrum);
  auto* classify = app.add_subcommand("classify", "smoothness verdict");
  add_spectrum_flags(classify);
  auto* consistency_cmd = app.add_subcommand("consistency", "beta table and consistency integrals");
  auto* witness = app.add_subcommand("witness", "explicit singular solution for a violating spec");
  add_spectrum_flags(witness);
  auto* sweep = app.add_subcommand("sweep", "spectrum of the half-plane model over s");
  double from = -3.0, to = 1.0, step = 0.1;
  sweep->add_option("--from", from)->capture_default_str();
  sweep->add_option("--to", to)->capture_default_str();
  sweep->add_option("--step", step)->capture_default_str();
  add_spectrum_flags(sweep);
  auto* solve = app.add_subcommand("solve", "discrete solver runs and shipped experiments");
  std::string experiment, manifest;
  bool quick = false;
  std::vector<double> grid;
  solve->add_option("--experiment", experiment, "shipped experiment id");
  solve->add_option("--manifest", manifest, "manifest.json of an earlier experiment run");
  solve->add_flag("--quick", quick, "coarser grids");
  solve->add_option("--grid", grid, "n_omega n_t T")->expected(3);
  auto* examples_cmd = app.add_subcommand("examples", "shipped specs and experiments");
  auto* list = examples_cmd->add_subcommand("list", "list ids");
  bool export_specs = false;
  list->add_flag("--export", export_specs, "also write every spec as JSON into --out");
  examples_cmd->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);
  try {
    kernels::set_threads(g.threads);
    const auto opt = spectrum_options(band, window);
    if (*spectrum) return cmd_spectrum(g, opt);
    if (*classify) return cmd_classify(g, opt);
    if (*consistency_cmd) return cmd_consistency(g);
    if (*witness) return cmd_witness(g, opt);
    if (*sweep) return cmd_sweep(g, from, to, step, opt);
    if (*solve) return cmd_solve(g, experiment, manifest, quick, grid);
    if (*examples_cmd) return cmd_examples(export_specs, g);
  } catch (const StructuralError& e) {
    fmt::print(stderr, "structural error: {}\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    fmt::print(stderr, "numerical error: {}\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
