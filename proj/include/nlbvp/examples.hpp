#pragma once

#include <filesystem>
#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

#include "nlbvp/geometry.hpp"
#include "nlbvp/solver.hpp"

// Shipped example specs and solver experiments.
namespace nlbvp::examples {

std::vector<std::string> spec_ids();
/// Throws std::invalid_argument for an unknown id.
ProblemSpec spec(const std::string& id);
/// Half-plane rotation model with b1 = b2 = s/2 and volume forcing 1.
ProblemSpec halfplane_spec(double s);

/// A smooth exact solution with its Laplacian, in angle-local coordinates.
struct ExactField {
  std::function<double(const Vec2&)> u;
  std::function<double(const Vec2&)> laplacian;
};

/// Data for which `field` solves the model problem on every angle.
solver::ProblemData consistent_data(const OrbitModel& frozen, const ExactField& field);

/// u = y1 + exp(-|y - (0.4, 0.1)|^2 / 0.04).
ExactField manufactured_field();

struct ExponentRun {
  double s = 0.0;
  double oracle = 0.0;  // -Im lambda from the closed form
  solver::ExponentFit fit;
  solver::ExponentFit fit_double_T;  // alpha with T doubled at the same dt (when requested)
  double seconds = 0.0;
};

/// s-model with forcing f0 = 1 + y1, homogeneous boundary and outer data, probe ray omega = 0.
ExponentRun singular_exponent_run(double s, const solver::GridOptions& grid, bool double_T);

enum class BlowupScenario {
  PreservesSmooth,     // s = 1, smooth data
  BorderConsistent,    // s = 0 with b = (1/2, -1/2), data from a smooth exact field
  BorderInteriorCoupling,  // s = 0 with b = 0, a = 1 coupling to an interior point, f0 = 1
};
const char* to_string(BlowupScenario s);

struct BlowupRun {
  solver::BlowupResult result;
  std::vector<solver::DiscreteSolution> solutions;
  double vertex_constant = 0.0;  // finest solution at the inner edge, probe omega = 0
};

/// Solves on base, 2x and 4x refinements.
BlowupRun blowup_run(BlowupScenario scenario, const solver::GridOptions& base);

struct ConvergenceRun {
  std::string config;
  std::vector<int> n_omega;
  std::vector<double> l2_error;
  std::vector<double> orders;
};

/// Manufactured-solution study on three nested grids starting at base.
ConvergenceRun manufactured_run(const OrbitModel& model, const solver::GridOptions& base);

/// L2 error against an exact field, area measure r dr domega.
double l2_error(const solver::DiscreteSolution& sol, const ExactField& field);

struct ExperimentInfo {
  std::string id;
  std::string description;
};
std::vector<ExperimentInfo> experiments();

struct ExperimentOptions {
  std::filesystem::path out;  // empty: no files written
  bool quick = false;         // coarser grids for smoke runs
};

struct ExperimentResult {
  std::string id;
  nlohmann::ordered_json summary;
  bool expectation_met = false;
  std::vector<std::filesystem::path> outputs;
};

/// Throws std::invalid_argument for an unknown id.
ExperimentResult run_experiment(const std::string& id, const ExperimentOptions& opt = {});

}  // namespace nlbvp::examples
