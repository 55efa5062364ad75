#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlbvp/geometry.hpp"
#include "nlbvp/pencil.hpp"

namespace nlbvp::consistency {

/// Rows (j, sigma); columns 2k (d/dy1 of U_k) and 2k + 1 (d/dy2 of U_k).
struct HatOperatorMatrix {
  int orbit_id = 0;
  std::vector<SideRef> row_sides;
  Eigen::MatrixXd rows;
};

HatOperatorMatrix hat_operators(const OrbitModel& model);

struct NullVector {
  Eigen::VectorXcd q;  // (q_k1, q_k2) per angle
  double residual = 0.0;  // |H q| / (|H| |q|)
};

/// Gradient of Q_k = r phi_k(omega) from a proper eigenvector at lambda = -i.
/// Throws CrossCheckFailure if the result does not annihilate hat_operators(model).
NullVector null_vector_from_proper_eigenvector(const OrbitModel& model,
                                               const pencil::PencilEigenvalue& eig,
                                               std::size_t which = 0, double tol = 1e-8);

struct DependentRow {
  SideRef row;
  std::vector<double> beta;  // aligned with BetaTable::independent
  double residual = 0.0;     // max-norm of row - sum beta * row', relative to |H|
};

struct BetaTable {
  int orbit_id = 0;
  std::vector<SideRef> independent;
  std::vector<DependentRow> dependent;

  /// Coefficient of side s in the combination Z_row - sum beta Z_row'.
  double combination_weight(const DependentRow& d, SideRef s) const;
};

enum class PivotOrder { Lexicographic, Reversed };

/// Throws NoDependence for a full-rank matrix.
BetaTable dependency_betas(const HatOperatorMatrix& h, PivotOrder order = PivotOrder::Lexicographic);

/// Samples of a trace Z(r) on r_m = epsilon 2^-m and derivative samples at
/// panel midpoints of every dyadic interval [r_{m+1}, r_m].
struct BoundaryTrace {
  std::string label;
  double epsilon = 0.25;
  int levels = 24;
  int panels = 8;
  std::vector<double> r;
  std::vector<double> value;
  std::vector<std::vector<double>> midpoint_r;
  std::vector<std::vector<double>> midpoint_derivative;

  static BoundaryTrace sample(const std::function<double(double)>& value,
                              const std::function<double(double)>& derivative, double epsilon,
                              int levels, int panels = 8, std::string label = {});
  BoundaryTrace scaled(double c) const;
};

enum class Verdict { Finite, Divergent, Inconclusive };
const char* to_string(Verdict v);

struct DiagnosticResult {
  std::string label;
  std::vector<double> r;          // r_m, m = 0..levels-1 (outer end of each interval)
  std::vector<double> integrals;  // I_m over [r_{m+1}, r_m]
  double slope = 0.0;             // of log2 I_m vs m; NaN if not fitted
  int resolved_levels = 0;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
};

DiagnosticResult weighted_seminorm_diagnostic(const BoundaryTrace& combo);

Verdict aggregate(const std::vector<DiagnosticResult>& results);

/// Entry of a consistency report: one diagnostic for one dependent row.
struct ConsistencyEntry {
  std::string condition;  // e.g. "data", "B^v", "BC", "B^v+BC"
  std::string formula;
  SideRef row;
  DiagnosticResult diagnostic;
};

struct OrbitConsistency {
  int orbit_id = 0;
  HatOperatorMatrix hat;
  std::optional<BetaTable> betas;  // empty when the hat matrix has full rank
  std::vector<ConsistencyEntry> entries;
  Verdict verdict = Verdict::Finite;
};

struct ConsistencyReport {
  std::vector<OrbitConsistency> orbits;
  Verdict verdict = Verdict::Finite;
};

/// Samples of d/dr (f_row - sum beta f_row') along the sides, as used by check_boundary_data.
BoundaryTrace data_combination_trace(const ProblemSpec& spec, const OrbitModel& frozen,
                                     const BetaTable& betas, const DependentRow& row);

/// Membership of the side data in the regular class: every beta combination
/// of the traces f_{j sigma} passes the diagnostic.
ConsistencyReport check_boundary_data(const ProblemSpec& spec,
                                      const std::vector<OrbitModel>& frozen);

struct VertexValue {
  std::string label;
  double value = 0.0;
  bool vanishes = false;
};

struct CoefficientReport {
  std::vector<VertexValue> vertex_values;     // a(0), da/dtau(0) per relevant exterior term
  std::vector<ConsistencyEntry> bv_entries;   // B^v consistency on generators v_Omega = 1, r
  std::vector<ConsistencyEntry> bc_entries;   // BC consistency for C = e_k
  std::vector<ConsistencyEntry> admissible_entries;  // B^v + BC on admissible generator pairs
  bool coefficient_condition = false;  // generator-based
  bool admissible_condition = false;  // generator-based
  bool inconclusive = false;
};

CoefficientReport check_coefficient_condition(const ProblemSpec& spec, const OrbitModel& frozen,
                                              const BetaTable& betas);

struct AdmissibleSet {
  bool pair_admissible = false;  // for the given C
  bool function_admissible = false;
  double residual = 0.0;
  Eigen::VectorXd particular;   // one admissible C (least squares)
  Eigen::MatrixXd null_basis;   // columns span {C~ : (B C~)(0) = 0}
};

/// v_omega_at_vertex holds v(Omega(0)) for each exterior term of the orbit, in spec order.
AdmissibleSet check_admissible(const ProblemSpec& spec, const OrbitModel& frozen,
                               const std::vector<double>& v_omega_at_vertex,
                               const Eigen::VectorXd& c);

/// (B C)(0) as a matrix acting on constant vectors C: rows (j, sigma), columns k.
Eigen::MatrixXd constant_action(const OrbitModel& frozen);

}  // namespace nlbvp::consistency
