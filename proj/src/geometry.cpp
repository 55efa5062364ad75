#include "nlbvp/geometry.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <numeric>
#include <set>

#include "nlbvp/errors.hpp"

namespace nlbvp {
namespace {

Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

auto term_key(const NonlocalTerm& t) {
  return std::tuple(t.source_angle, t.sigma, t.target_angle, t.index);
}

}  // namespace

Vec2 ConjugationPoint::to_local(const Vec2& global) const {
  return rotate(global - position, -frame_rotation);
}

Vec2 ConjugationPoint::to_global(const Vec2& local) const {
  return position + rotate(local, frame_rotation);
}

double NonlocalTerm::weight_at(double r, const Vec2& tau) const {
  return weight_profile ? (*weight_profile)(r * tau) : weight_at_vertex;
}

std::vector<SideRef> OrbitModel::sides() const {
  std::vector<SideRef> out;
  for (int j = 0; j < n_angles(); ++j) {
    out.push_back({j, 1});
    out.push_back({j, 2});
  }
  return out;
}

bool OrbitModel::is_laplace() const {
  return std::all_of(principal.begin(), principal.end(),
                     [](const PrincipalPart& p) { return p.is_laplace(); });
}

PrincipalPart OrbitModel::principal_part(int angle) const {
  return principal.empty() ? PrincipalPart{} : principal.at(static_cast<std::size_t>(angle));
}

double OrbitModel::side_angle(SideRef side) const {
  const double w = half_openings.at(static_cast<std::size_t>(side.angle));
  return side.sigma == 1 ? -w : w;
}

Vec2 OrbitModel::side_direction(SideRef side) const {
  const double a = side_angle(side);
  return {std::cos(a), std::sin(a)};
}

std::vector<const NonlocalTerm*> OrbitModel::terms_on(SideRef side) const {
  std::vector<const NonlocalTerm*> out;
  for (const auto& t : terms) {
    if (t.side() == side) out.push_back(&t);
  }
  return out;
}

double OrbitModel::max_homothety() const {
  double m = 1.0;
  for (const auto& t : terms) m = std::max(m, t.homothety);
  return m;
}

void OrbitModel::validate() const {
  const int n = n_angles();
  if (n < 1) throw StructuralError(fmt::format("orbit {}: no angles", orbit_id));
  for (double w : half_openings) {
    if (!(w > 0.0 && w < std::numbers::pi)) {
      throw StructuralError(fmt::format("orbit {}: half-opening {} outside (0, pi)", orbit_id, w));
    }
  }
  if (!principal.empty()) {
    if (static_cast<int>(principal.size()) != n) {
      throw StructuralError(fmt::format("orbit {}: one principal part per angle required", orbit_id));
    }
    for (const auto& p : principal) {
      if (!p.properly_elliptic()) {
        throw StructuralError(fmt::format(
            "orbit {}: principal part ({}, {}, {}) is not properly elliptic", orbit_id, p.p11,
            p.p12, p.p22));
      }
    }
  }
  std::set<std::tuple<int, int, int, int>> seen;
  std::map<std::pair<int, int>, int> identities;
  for (const auto& t : terms) {
    if (t.source_angle < 0 || t.source_angle >= n || t.target_angle < 0 || t.target_angle >= n) {
      throw StructuralError(fmt::format("orbit {}: term angle index out of range", orbit_id));
    }
    if (t.sigma != 1 && t.sigma != 2) {
      throw StructuralError(fmt::format("orbit {}: side index must be 1 or 2", orbit_id));
    }
    if (!(t.homothety > 0.0) || !std::isfinite(t.homothety)) {
      throw StructuralError(fmt::format("orbit {}: homothety must be positive", orbit_id));
    }
    if (t.index < 0) throw StructuralError(fmt::format("orbit {}: negative term index", orbit_id));
    if (!seen.insert(term_key(t)).second) {
      throw StructuralError(fmt::format("orbit {}: duplicate term ({}, {}, {}, {})", orbit_id,
                                        t.source_angle, t.sigma, t.target_angle, t.index));
    }
    if (t.is_identity()) {
      if (t.weight_at_vertex != 1.0 || t.rotation != 0.0 || t.homothety != 1.0) {
        throw StructuralError(fmt::format(
            "orbit {}: identity term on side ({}, {}) must have weight 1, rotation 0, homothety 1",
            orbit_id, t.source_angle, t.sigma));
      }
      ++identities[{t.source_angle, t.sigma}];
    } else {
      const double image = side_angle(t.side()) + t.rotation;
      const double wk = half_openings[static_cast<std::size_t>(t.target_angle)];
      if (!(std::abs(image) < wk)) {
        throw StructuralError(fmt::format(
            "orbit {}: image ray {} of term ({}, {}, {}, {}) is not inside angle {}", orbit_id,
            image, t.source_angle, t.sigma, t.target_angle, t.index, t.target_angle));
      }
    }
  }
}

const ScalarFunction& RightHandSide::side_data(int orbit_id, SideRef side) const {
  static const ScalarFunction kZero;
  for (const auto& d : boundary) {
    if (d.orbit_id == orbit_id && d.side == side) return d.value;
  }
  return kZero;
}

bool RightHandSide::homogeneous_boundary() const {
  return std::all_of(boundary.begin(), boundary.end(),
                     [](const BoundaryDatum& d) { return d.value.is_zero(); });
}

const OrbitModel& ProblemSpec::orbit(int orbit_id) const {
  for (const auto& o : orbits) {
    if (o.orbit_id == orbit_id) return o;
  }
  throw StructuralError(fmt::format("no orbit with id {}", orbit_id));
}

void ProblemSpec::validate() const {
  if (orbits.empty()) throw StructuralError("problem has no orbits");
  std::set<int> ids;
  double max_chi = 1.0;
  for (const auto& o : orbits) {
    if (!ids.insert(o.orbit_id).second) {
      throw StructuralError(fmt::format("duplicate orbit id {}", o.orbit_id));
    }
    o.validate();
    max_chi = std::max(max_chi, o.max_homothety());
  }
  const auto& tr = truncation;
  if (!(tr.epsilon > 0.0 && tr.kappa1 > 0.0 && tr.kappa2 > 0.0 && tr.epsilon1 > 0.0)) {
    throw StructuralError("truncation lengths must be positive");
  }
  if (tr.levels < 1) throw StructuralError("truncation levels must be >= 1");
  const double d_chi = 2.0 * max_chi;
  if (!(d_chi * tr.epsilon < tr.epsilon1)) {
    throw StructuralError(fmt::format(
        "separation violated: 2 max(chi) * epsilon = {} is not below epsilon1 = {}",
        d_chi * tr.epsilon, tr.epsilon1));
  }
  for (const auto& e : exterior_terms) {
    const auto& o = orbit(e.orbit_id);
    if (e.side.angle < 0 || e.side.angle >= o.n_angles() || (e.side.sigma != 1 && e.side.sigma != 2) ||
        e.target_angle < 0 || e.target_angle >= o.n_angles()) {
      throw StructuralError("exterior term refers to a missing side or angle");
    }
    const double wk = o.half_openings[static_cast<std::size_t>(e.target_angle)];
    if (!(e.radius > 0.0) || !(std::abs(e.omega) < wk)) {
      throw StructuralError("exterior term image must lie inside its target angle");
    }
    if (e.support == ExteriorTerm::Support::Interior && !(e.radius > tr.kappa1)) {
      throw StructuralError(fmt::format(
          "interior exterior-term image radius {} must exceed kappa1 = {}", e.radius, tr.kappa1));
    }
  }
  for (const auto& d : rhs.boundary) {
    const auto& o = orbit(d.orbit_id);
    if (d.side.angle < 0 || d.side.angle >= o.n_angles() || (d.side.sigma != 1 && d.side.sigma != 2)) {
      throw StructuralError("boundary datum refers to a missing side");
    }
  }
}

std::vector<std::vector<int>> compute_orbits(std::span<const ConjugationPoint> points,
                                             std::span<const BoundaryMap> maps, double tol) {
  const std::size_t n = points.size();
  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) {
    if (!index.emplace(points[i].id, i).second) {
      throw StructuralError(fmt::format("duplicate conjugation point id {}", points[i].id));
    }
  }
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const auto& m : maps) {
    for (int id : m.point_ids) {
      auto it = index.find(id);
      if (it == index.end()) {
        throw StructuralError(fmt::format("map '{}' refers to unknown point {}", m.name, id));
      }
      const Vec2 image = m.apply(points[it->second].position);
      std::optional<std::size_t> hit;
      for (std::size_t k = 0; k < n; ++k) {
        if ((image - points[k].position).norm() <= tol * (1.0 + points[k].position.norm())) {
          hit = k;
          break;
        }
      }
      if (!hit) {
        throw StructuralError(fmt::format(
            "map '{}' sends point {} to ({}, {}), which is not a conjugation point", m.name, id,
            image.x(), image.y()));
      }
      parent[find(it->second)] = find(*hit);
    }
  }
  std::map<std::size_t, std::vector<int>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(points[i].id);
  std::vector<std::vector<int>> out;
  for (auto& [root, ids] : groups) {
    std::sort(ids.begin(), ids.end());
    out.push_back(std::move(ids));
  }
  std::sort(out.begin(), out.end());
  return out;
}

LocalizedMap localize_transformation(const BoundaryMap& map, const ConjugationPoint& vertex,
                                     const ConjugationPoint& image_vertex, double eps,
                                     double tol) {
  using C = std::complex<double>;
  std::vector<C> ys, zs;
  const double w = vertex.half_opening;
  for (double rho : {eps / 8.0, eps / 4.0, eps / 2.0}) {
    for (double phi : {-w, -0.5 * w, 0.0, 0.5 * w, w}) {
      const Vec2 y(rho * std::cos(phi), rho * std::sin(phi));
      const Vec2 z = image_vertex.to_local(map.apply(vertex.to_global(y)));
      ys.emplace_back(y.x(), y.y());
      zs.emplace_back(z.x(), z.y());
    }
  }
  C num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    num += std::conj(ys[i]) * zs[i];
    den += std::norm(ys[i]);
  }
  const C c = num / den;
  LocalizedMap out;
  out.homothety = std::abs(c);
  out.rotation = std::arg(c);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double ref = std::abs(c * ys[i]);
    out.max_deviation = std::max(out.max_deviation, std::abs(zs[i] - c * ys[i]) / ref);
  }
  // Clean rounding noise so the identity map localizes to exactly (0, 1).
  if (std::abs(out.rotation) < 1e-15) out.rotation = 0.0;
  if (std::abs(out.homothety - 1.0) < 1e-15) out.homothety = 1.0;
  if (!(out.max_deviation <= tol)) {
    throw ConditionK1Violation(
        fmt::format("map '{}' near point {} is not a rotation+homothety (deviation {:.3g} > {:.3g})",
                    map.name, vertex.id, out.max_deviation, tol),
        out.max_deviation);
  }
  return out;
}

OrbitModel freeze(const OrbitModel& model) {
  OrbitModel out = model;
  for (auto& t : out.terms) {
    if (t.weight_profile) t.weight_at_vertex = (*t.weight_profile)(Vec2::Zero());
  }
  for (const SideRef side : out.sides()) {
    const bool has_identity = std::any_of(out.terms.begin(), out.terms.end(), [&](const auto& t) {
      return t.side() == side && t.is_identity();
    });
    if (!has_identity) {
      NonlocalTerm id;
      id.source_angle = side.angle;
      id.sigma = side.sigma;
      id.target_angle = side.angle;
      id.index = 0;
      id.weight_at_vertex = 1.0;
      out.terms.push_back(id);
    }
  }
  std::sort(out.terms.begin(), out.terms.end(),
            [](const auto& a, const auto& b) { return term_key(a) < term_key(b); });
  out.validate();
  return out;
}

std::vector<OrbitModel> freeze(const ProblemSpec& spec) {
  std::vector<OrbitModel> out;
  for (const auto& o : spec.orbits) out.push_back(freeze(o));
  return out;
}

OrbitModel halfplane_rotation_model(double b1, double b2, int orbit_id) {
  OrbitModel m;
  m.orbit_id = orbit_id;
  m.half_openings = {std::numbers::pi / 2.0};
  const double rot[2] = {std::numbers::pi / 2.0, -std::numbers::pi / 2.0};
  const double b[2] = {b1, b2};
  for (int sigma = 1; sigma <= 2; ++sigma) {
    NonlocalTerm t;
    t.source_angle = 0;
    t.sigma = sigma;
    t.target_angle = 0;
    t.index = 1;
    t.weight_at_vertex = b[sigma - 1];
    t.rotation = rot[sigma - 1];
    m.terms.push_back(t);
  }
  return freeze(m);
}

OrbitModel dirichlet_model(double half_opening, int orbit_id) {
  OrbitModel m;
  m.orbit_id = orbit_id;
  m.half_openings = {half_opening};
  return freeze(m);
}

}  // namespace nlbvp
