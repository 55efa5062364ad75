#pragma once

#include <Eigen/Core>
#include <compare>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlbvp/scalar_function.hpp"

namespace nlbvp {

struct ConjugationPoint {
  int id = 0;
  Vec2 position = Vec2::Zero();
  double half_opening = 0.0;    // omega_j; the local angle is |omega| < omega_j
  double frame_rotation = 0.0;  // Y_j(y) = R_{-theta}(y - g_j)

  Vec2 to_local(const Vec2& global) const;
  Vec2 to_global(const Vec2& local) const;
};

/// A side gamma_{j sigma}: sigma = 1 is the ray omega = -omega_j, sigma = 2 is omega = +omega_j.
struct SideRef {
  int angle = 0;
  int sigma = 1;
  auto operator<=>(const SideRef&) const = default;
};

struct NonlocalTerm {
  int source_angle = 0;
  int sigma = 1;
  int target_angle = 0;
  int index = 0;  // s; index 0 on the own angle is the identity term
  double weight_at_vertex = 0.0;
  std::optional<ScalarFunction> weight_profile;
  double rotation = 0.0;
  double homothety = 1.0;

  SideRef side() const { return {source_angle, sigma}; }
  bool is_identity() const { return target_angle == source_angle && index == 0; }
  /// b(y) at the point r * tau of the source side.
  double weight_at(double r, const Vec2& tau) const;

  friend bool operator==(const NonlocalTerm&, const NonlocalTerm&) = default;
};

/// p11 xi1^2 + 2 p12 xi1 xi2 + p22 xi2^2 for one angle.
struct PrincipalPart {
  double p11 = 1.0;
  double p12 = 0.0;
  double p22 = 1.0;

  bool properly_elliptic() const { return p11 > 0.0 && p11 * p22 - p12 * p12 > 0.0; }
  bool is_laplace() const { return p11 == 1.0 && p12 == 0.0 && p22 == 1.0; }
  friend bool operator==(const PrincipalPart&, const PrincipalPart&) = default;
};

struct OrbitModel {
  int orbit_id = 0;
  std::string label;
  std::vector<double> half_openings;
  std::vector<NonlocalTerm> terms;
  std::vector<PrincipalPart> principal;  // empty means Laplace on every angle

  int n_angles() const { return static_cast<int>(half_openings.size()); }
  std::vector<SideRef> sides() const;
  bool is_laplace() const;
  PrincipalPart principal_part(int angle) const;
  double side_angle(SideRef side) const;
  Vec2 side_direction(SideRef side) const;
  std::vector<const NonlocalTerm*> terms_on(SideRef side) const;
  double max_homothety() const;

  /// Throws StructuralError on any broken invariant.
  void validate() const;

  friend bool operator==(const OrbitModel&, const OrbitModel&) = default;
};

/// Curve-to-interior realization of a B^2 term, a(y) u(Omega(y)) on one side.
///
/// The image of the side point at arclength r is the point with polar
/// coordinates (radius * (1 + drift * r), omega) in the frame of
/// target_angle.
struct ExteriorTerm {
  enum class Support { Interior, ReachesBoundary };

  int orbit_id = 0;
  SideRef side;
  int target_angle = 0;
  ScalarFunction coefficient;
  double radius = 0.5;
  double omega = 0.0;
  double drift = 0.0;
  Support support = Support::Interior;

  friend bool operator==(const ExteriorTerm&, const ExteriorTerm&) = default;
};

struct BoundaryDatum {
  int orbit_id = 0;
  SideRef side;
  ScalarFunction value;
  friend bool operator==(const BoundaryDatum&, const BoundaryDatum&) = default;
};

struct RightHandSide {
  ScalarFunction volume;
  std::vector<BoundaryDatum> boundary;
  ScalarFunction outer;  // Dirichlet data on r = 1 for the model solver

  /// Trace f on a side; zero when not listed.
  const ScalarFunction& side_data(int orbit_id, SideRef side) const;
  bool homogeneous_boundary() const;
  friend bool operator==(const RightHandSide&, const RightHandSide&) = default;
};

struct Truncation {
  double epsilon = 0.25;
  double kappa1 = 0.125;
  double kappa2 = 0.0625;
  double epsilon1 = 1.0;
  int levels = 24;  // dyadic grid r_m = epsilon 2^-m, m = 0..levels

  friend bool operator==(const Truncation&, const Truncation&) = default;
};

struct ProblemSpec {
  std::string name;
  std::vector<OrbitModel> orbits;
  std::vector<ExteriorTerm> exterior_terms;
  RightHandSide rhs;
  Truncation truncation;

  const OrbitModel& orbit(int orbit_id) const;
  void validate() const;
  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

/// A boundary transformation Omega_is, known at the conjugation points in its domain.
struct BoundaryMap {
  std::string name;
  std::vector<int> point_ids;
  std::function<Vec2(const Vec2&)> apply;
};

/// Partition of point ids into orbits. Each orbit is sorted, orbits are
/// ordered by their smallest id.
std::vector<std::vector<int>> compute_orbits(std::span<const ConjugationPoint> points,
                                             std::span<const BoundaryMap> maps,
                                             double tol = 1e-9);

struct LocalizedMap {
  double rotation = 0.0;
  double homothety = 1.0;
  double max_deviation = 0.0;
};

/// Fits Y_k o map o Y_j^{-1} by chi R_omega on radii eps/8, eps/4, eps/2.
LocalizedMap localize_transformation(const BoundaryMap& map, const ConjugationPoint& vertex,
                                     const ConjugationPoint& image_vertex, double eps = 0.25,
                                     double tol = 1e-8);

/// Vertex values from profiles, identity terms inserted, terms sorted.
OrbitModel freeze(const OrbitModel& model);
std::vector<OrbitModel> freeze(const ProblemSpec& spec);

/// Half-plane model with side weights b1, b2 and rotations +pi/2, -pi/2.
OrbitModel halfplane_rotation_model(double b1, double b2, int orbit_id = 0);
/// Identity terms only.
OrbitModel dirichlet_model(double half_opening, int orbit_id = 0);

}  // namespace nlbvp
