#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "nlbvp/geometry.hpp"
#include "nlbvp/kernels.hpp"

namespace nlbvp::solver {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct GridOptions {
  int n_omega = 256;  // intervals across the widest angle
  int n_t = 512;      // intervals in t = ln r on [-T, 0]
  double T = 12.0;
};

/// Nodes t_j = -T + j dt (j = 0..n_t) and omega_i = -omega_k + i domega (i = 0..n_omega[k]).
class LogPolarGrid {
 public:
  /// Throws StructuralError when rotations or ln(chi) are not multiples of the steps.
  static LogPolarGrid build(const OrbitModel& frozen, const GridOptions& opt);

  int n_angles() const { return static_cast<int>(half_openings.size()); }
  int size() const { return offset.back(); }
  int index(int k, int j, int i) const {
    return offset[static_cast<std::size_t>(k)] + j * (n_omega[static_cast<std::size_t>(k)] + 1) + i;
  }
  double t(int j) const { return -T + j * dt; }
  double omega(int k, int i) const { return -half_openings[static_cast<std::size_t>(k)] + i * domega; }
  /// True when both grids cover the same domain and this one halves both steps of coarse.
  bool refines(const LogPolarGrid& coarse) const;

  double T = 12.0;
  double dt = 0.0;
  double domega = 0.0;
  int n_t = 0;
  std::vector<int> n_omega;
  std::vector<double> half_openings;
  std::vector<int> offset;  // first node of each angle; back() is the total count
};

/// Data in angle-local Cartesian coordinates.
struct ProblemData {
  std::function<double(int angle, const Vec2& y)> volume;
  std::function<double(int angle, const Vec2& y)> outer;
  std::function<double(SideRef side, double r)> side;
};

ProblemData data_from_spec(const ProblemSpec& spec, int orbit_id);

struct DiscreteProblem {
  LogPolarGrid grid;
  OrbitModel model;
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  int side_rows = 0;
  int zero_extended_terms = 0;  // nonlocal images below t = -T that were dropped
};

/// Laplace principal part only. Interior rows are scaled by domega^2.
DiscreteProblem assemble(const OrbitModel& frozen, const std::vector<ExteriorTerm>& exterior,
                         const LogPolarGrid& grid, const ProblemData& data);
DiscreteProblem assemble(const ProblemSpec& spec, int orbit_id, const GridOptions& opt);

struct SolveOptions {
  double tolerance = 1e-10;
  int restart = 60;
  int max_iterations = 900;
  double ilut_droptol = 1e-5;
  int ilut_fill = 25;
  bool direct_only = false;
};

struct SolveInfo {
  std::string method;  // "gmres+ilut" or "sparse-lu"
  int iterations = 0;
  double relative_residual = 0.0;
  bool fallback = false;
  std::string note;
};

struct DiscreteSolution {
  LogPolarGrid grid;
  Eigen::VectorXd values;
  SolveInfo info;

  double at(int k, int j, int i) const { return values(grid.index(k, j, i)); }
  /// Bilinear interpolation in (t, omega).
  double sample(int k, double r, double omega) const;
};

/// Throws SingularSystem when both the iterative and the direct solver fail.
DiscreteSolution solve(const DiscreteProblem& problem, const SolveOptions& opt = {});

struct ExponentFit {
  double C = 0.0;
  double alpha = 0.0;
  double A = 0.0;
  double B = 0.0;         // coefficient of the regular r^2 term, 0 when not fitted
  double residual = 0.0;  // max |u - fit| / max |u - C| on the window
  int samples = 0;
  double r_lo = 0.0;
  double r_hi = 0.0;
};

/// Fits u = C + A r^alpha (+ B r^2 when regular_term) on r in [r_lo, r_hi];
/// alpha by variable projection. The r^2 term absorbs the particular
/// solution of smooth volume forcing.
ExponentFit fit_singularity_exponent(std::span<const double> r, std::span<const double> u,
                                     double r_lo = 1.0 / 512, double r_hi = 0.125, bool regular_term = true);
/// Probe ray omega* in angle k. Throws StructuralError when T < ln(1/r_lo) + 4.
ExponentFit fit_singularity_exponent(const DiscreteSolution& sol, int angle, double probe_omega,
                                     double r_lo = 1.0 / 512, double r_hi = 0.125, bool regular_term = true);

/// Discrete |u|_{W^2}^2 over r_min <= r <= r_max by central differences at interior nodes.
double discrete_w2_seminorm(const DiscreteSolution& sol, double r_min, double r_max = 1.0,
                            kernels::Mode mode = kernels::Mode::Parallel);

enum class Trend { Bounded, Divergent, Inconclusive };
const char* to_string(Trend t);

struct BlowupResult {
  std::vector<double> radii;      // r_min used at each refinement
  std::vector<double> seminorms;  // squared seminorms
  std::vector<double> growth;     // ratios seminorm[i+1] / seminorm[i] - 1
  Trend trend = Trend::Inconclusive;
  std::string reason;
};

/// Solutions on nested grids, coarse to fine. Refinement l measures over
/// rho0 * shrink^-l <= r <= r_max; r_max < 1 keeps the corners of the
/// truncation circle out. Throws std::invalid_argument for non-nested grids.
BlowupResult w2_blowup_diagnostic(const std::vector<DiscreteSolution>& sols, double rho0 = 1.0 / 256,
                                  double shrink = 4.0, double r_max = 0.5);

/// angle,t,omega,value rows with 17 significant digits.
void write_csv(const DiscreteSolution& sol, const std::filesystem::path& path);
/// Little-endian float64 dump, row-major per angle (t slow, omega fast), plus a JSON grid sidecar.
void write_binary(const DiscreteSolution& sol, const std::filesystem::path& bin,
                  const std::filesystem::path& sidecar);

}  // namespace nlbvp::solver
