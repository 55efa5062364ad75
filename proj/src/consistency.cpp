#include "nlbvp/consistency.hpp"

#include <fmt/format.h>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <numbers>

#include "nlbvp/errors.hpp"

namespace nlbvp::consistency {
namespace {

constexpr double kDependenceTol = 1e-10;
constexpr double kVertexTol = 1e-8;
constexpr double kDropLevel = 1e-30;

int row_index(SideRef s) { return 2 * s.angle + (s.sigma - 1); }

Vec2 rotate(const Vec2& v, double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

std::string side_name(SideRef s) { return fmt::format("({},{})", s.angle, s.sigma); }

// The half-plane rotation geometry with one angle of half-opening pi/2.
bool halfplane_shape(const OrbitModel& m) {
  return m.n_angles() == 1 && std::abs(m.half_openings[0] - std::numbers::pi / 2) < 1e-12;
}

struct Combination {
  SideRef row;
  std::vector<std::pair<SideRef, double>> weights;
};

std::vector<Combination> combinations(const BetaTable& betas) {
  std::vector<Combination> out;
  for (const auto& d : betas.dependent) {
    Combination c{d.row, {{d.row, 1.0}}};
    for (std::size_t i = 0; i < betas.independent.size(); ++i) {
      if (d.beta[i] != 0.0) c.weights.emplace_back(betas.independent[i], -d.beta[i]);
    }
    out.push_back(std::move(c));
  }
  return out;
}

double weight_of(const Combination& c, SideRef s) {
  double w = 0.0;
  for (const auto& [side, x] : c.weights) {
    if (side == s) w += x;
  }
  return w;
}

std::string render(const Combination& c, const char* symbol) {
  std::string s = fmt::format("d/dr({}{}", symbol, side_name(c.row));
  for (const auto& [side, w] : c.weights) {
    if (side == c.row) continue;
    s += fmt::format(" {} {:.6g}*{}{}", w < 0 ? "-" : "+", std::abs(w), symbol, side_name(side));
  }
  return s + ")";
}

// Trace functions per side: value and derivative in r.
struct SideTrace {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

DiagnosticResult run_combination(const Combination& c, const std::function<SideTrace(SideRef)>& trace,
                                 const Truncation& tr, std::string label) {
  std::vector<std::pair<SideTrace, double>> parts;
  for (const auto& [side, w] : c.weights) parts.emplace_back(trace(side), w);
  auto value = [&](double r) {
    double acc = 0.0;
    for (const auto& [t, w] : parts) acc += w * t.value(r);
    return acc;
  };
  auto derivative = [&](double r) {
    double acc = 0.0;
    for (const auto& [t, w] : parts) acc += w * t.derivative(r);
    return acc;
  };
  auto result = weighted_seminorm_diagnostic(
      BoundaryTrace::sample(value, derivative, tr.epsilon, tr.levels, 8, label));
  return result;
}

std::function<SideTrace(SideRef)> data_trace(const ProblemSpec& spec, const OrbitModel& model) {
  return [&spec, &model](SideRef side) -> SideTrace {
    const ScalarFunction& f = spec.rhs.side_data(model.orbit_id, side);
    const Vec2 tau = model.side_direction(side);
    return {[&f, tau](double r) { return f.along(r, tau); },
            [&f, tau](double r) { return f.derivative_along(r, tau); }};
  };
}

double richardson_at_vertex(const std::function<double(double)>& f, const Truncation& tr) {
  const double r_fine = tr.epsilon * std::ldexp(1.0, -tr.levels);
  return 2.0 * f(r_fine) - f(2.0 * r_fine);
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double tol) {
  if (a.rows() == 0) return Eigen::MatrixXd::Identity(a.cols(), a.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol * std::max(1.0, top)) ++rank;
  return svd.matrixV().rightCols(a.cols() - rank);
}

// b_{j sigma k s}(r tau) summed over terms of the side pointing at angle k.
SideTrace constant_trace(const OrbitModel& m, SideRef side, int k, double ck) {
  std::vector<const NonlocalTerm*> terms;
  for (const auto* t : m.terms_on(side)) {
    if (t->target_angle == k) terms.push_back(t);
  }
  const Vec2 tau = m.side_direction(side);
  return {[terms, tau, ck](double r) {
            double acc = 0.0;
            for (const auto* t : terms) acc += t->weight_at(r, tau);
            return ck * acc;
          },
          [terms, tau, ck](double r) {
            double acc = 0.0;
            for (const auto* t : terms) {
              if (t->weight_profile) acc += t->weight_profile->derivative_along(r, tau);
            }
            return ck * acc;
          }};
}

SideTrace zero_trace() {
  return {[](double) { return 0.0; }, [](double) { return 0.0; }};
}

}  // namespace

HatOperatorMatrix hat_operators(const OrbitModel& model) {
  const int n = 2 * model.n_angles();
  HatOperatorMatrix h;
  h.orbit_id = model.orbit_id;
  h.row_sides = model.sides();
  h.rows = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : model.terms) {
    const Vec2 dir = rotate(model.side_direction(t.side()), t.rotation);
    const double f = t.weight_at_vertex * t.homothety;
    h.rows(row_index(t.side()), 2 * t.target_angle) += f * dir.x();
    h.rows(row_index(t.side()), 2 * t.target_angle + 1) += f * dir.y();
  }
  return h;
}

NullVector null_vector_from_proper_eigenvector(const OrbitModel& model,
                                               const pencil::PencilEigenvalue& eig,
                                               std::size_t which, double tol) {
  if (!eig.proper || std::abs(eig.lambda - pencil::Complex(0.0, -1.0)) > 1e-8) {
    throw std::invalid_argument("null vector requires a proper eigenvalue at -i");
  }
  const auto& samples = eig.eigenvectors.at(which);
  const int n = model.n_angles();
  NullVector out;
  out.q = Eigen::VectorXcd::Zero(2 * n);
  for (int k = 0; k < n; ++k) {
    const auto& w = eig.sample_omegas[static_cast<std::size_t>(k)];
    const auto& phi = samples[static_cast<std::size_t>(k)];
    Eigen::MatrixXcd basis(static_cast<Eigen::Index>(w.size()), 2);
    Eigen::VectorXcd rhs(static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) {
      basis(static_cast<Eigen::Index>(i), 0) = std::cos(w[i]);
      basis(static_cast<Eigen::Index>(i), 1) = std::sin(w[i]);
      rhs(static_cast<Eigen::Index>(i)) = phi[i];
    }
    const Eigen::VectorXcd q = basis.colPivHouseholderQr().solve(rhs);
    out.q.segment(2 * k, 2) = q;
  }
  const Eigen::MatrixXd h = hat_operators(model).rows;
  const double denom = h.norm() * out.q.norm();
  out.residual = denom > 0.0 ? (h.cast<pencil::Complex>() * out.q).norm() / denom : 0.0;
  if (!(out.residual < tol)) {
    throw CrossCheckFailure(fmt::format(
        "proper eigenvector gradient does not annihilate the hat operators (residual {:.3g})",
        out.residual));
  }
  return out;
}

double BetaTable::combination_weight(const DependentRow& d, SideRef s) const {
  double w = d.row == s ? 1.0 : 0.0;
  for (std::size_t i = 0; i < independent.size(); ++i) {
    if (independent[i] == s) w -= d.beta[i];
  }
  return w;
}

BetaTable dependency_betas(const HatOperatorMatrix& h, PivotOrder order) {
  const auto n = h.rows.rows();
  const double norm = h.rows.norm();
  std::vector<Eigen::Index> sequence(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    sequence[static_cast<std::size_t>(i)] = order == PivotOrder::Lexicographic ? i : n - 1 - i;
  }
  std::vector<Eigen::Index> pivots, dependents;
  std::vector<Eigen::VectorXd> basis;  // orthonormal span of pivot rows
  for (Eigen::Index i : sequence) {
    Eigen::VectorXd v = h.rows.row(i).transpose();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) v -= b.dot(v) * b;
    }
    if (v.norm() > kDependenceTol * std::max(norm, 1e-300)) {
      basis.push_back(v / v.norm());
      pivots.push_back(i);
    } else {
      dependents.push_back(i);
    }
  }
  if (dependents.empty()) {
    throw NoDependence(fmt::format("orbit {}: differentiated operators are linearly independent",
                                   h.orbit_id));
  }
  std::sort(pivots.begin(), pivots.end());
  std::sort(dependents.begin(), dependents.end());
  BetaTable out;
  out.orbit_id = h.orbit_id;
  Eigen::MatrixXd p(n, static_cast<Eigen::Index>(pivots.size()));
  for (std::size_t c = 0; c < pivots.size(); ++c) {
    out.independent.push_back(h.row_sides[static_cast<std::size_t>(pivots[c])]);
    p.col(static_cast<Eigen::Index>(c)) = h.rows.row(pivots[c]).transpose();
  }
  const auto qr = p.colPivHouseholderQr();
  for (Eigen::Index d : dependents) {
    const Eigen::VectorXd target = h.rows.row(d).transpose();
    Eigen::VectorXd beta = pivots.empty() ? Eigen::VectorXd() : Eigen::VectorXd(qr.solve(target));
    DependentRow row;
    row.row = h.row_sides[static_cast<std::size_t>(d)];
    row.beta.assign(beta.data(), beta.data() + beta.size());
    const Eigen::VectorXd recon = pivots.empty() ? Eigen::VectorXd::Zero(n) : Eigen::VectorXd(p * beta);
    row.residual = (target - recon).lpNorm<Eigen::Infinity>() / std::max(norm, 1e-300);
    out.dependent.push_back(std::move(row));
  }
  return out;
}

BoundaryTrace BoundaryTrace::sample(const std::function<double(double)>& value,
                                    const std::function<double(double)>& derivative,
                                    double epsilon, int levels, int panels, std::string label) {
  BoundaryTrace t;
  t.label = std::move(label);
  t.epsilon = epsilon;
  t.levels = levels;
  t.panels = panels;
  for (int m = 0; m <= levels; ++m) {
    const double r = epsilon * std::ldexp(1.0, -m);
    t.r.push_back(r);
    t.value.push_back(value(r));
  }
  for (int m = 0; m < levels; ++m) {
    const double hi = t.r[static_cast<std::size_t>(m)], lo = t.r[static_cast<std::size_t>(m + 1)];
    const double h = (hi - lo) / panels;
    std::vector<double> rs, ds;
    for (int p = 0; p < panels; ++p) {
      const double rm = lo + (p + 0.5) * h;
      rs.push_back(rm);
      ds.push_back(derivative(rm));
    }
    t.midpoint_r.push_back(std::move(rs));
    t.midpoint_derivative.push_back(std::move(ds));
  }
  return t;
}

BoundaryTrace BoundaryTrace::scaled(double c) const {
  BoundaryTrace t = *this;
  for (auto& v : t.value) v *= c;
  for (auto& row : t.midpoint_derivative) {
    for (auto& d : row) d *= c;
  }
  return t;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Finite:
      return "finite";
    case Verdict::Divergent:
      return "divergent";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

DiagnosticResult weighted_seminorm_diagnostic(const BoundaryTrace& combo) {
  DiagnosticResult out;
  out.label = combo.label;
  out.slope = std::numeric_limits<double>::quiet_NaN();
  const int levels = combo.levels;
  for (int m = 0; m < levels; ++m) {
    const auto um = static_cast<std::size_t>(m);
    const double h = (combo.r[um] - combo.r[um + 1]) / combo.panels;
    double acc = 0.0;
    for (int p = 0; p < combo.panels; ++p) {
      const auto up = static_cast<std::size_t>(p);
      const double d = combo.midpoint_derivative[um][up];
      acc += h * d * d / combo.midpoint_r[um][up];
    }
    out.r.push_back(combo.r[um]);
    out.integrals.push_back(acc);
  }
  if (levels < 12) {
    out.reason = fmt::format("{} dyadic levels; at least 12 are required", levels);
    return out;
  }
  std::vector<int> resolved;
  for (int m = 0; m < levels; ++m) {
    if (out.integrals[static_cast<std::size_t>(m)] >= kDropLevel) resolved.push_back(m);
  }
  out.resolved_levels = static_cast<int>(resolved.size());
  const bool tail_zero = std::none_of(resolved.begin(), resolved.end(),
                                      [&](int m) { return m >= levels - 4; });
  if (tail_zero) {
    out.slope = -std::numeric_limits<double>::infinity();
    out.verdict = Verdict::Finite;
    out.reason = resolved.empty() ? "combination vanishes on every level"
                                  : "combination vanishes on the finest levels";
    return out;
  }
  if (resolved.size() < 4) {
    out.reason = fmt::format("only {} resolvable levels", resolved.size());
    return out;
  }
  const std::size_t take = std::min<std::size_t>(8, resolved.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = resolved.size() - take; i < resolved.size(); ++i) {
    const double x = resolved[i];
    const double y = std::log2(out.integrals[static_cast<std::size_t>(resolved[i])]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double nn = static_cast<double>(take);
  out.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  if (out.slope <= -0.5) {
    out.verdict = Verdict::Finite;
    out.reason = "dyadic contributions decay geometrically";
  } else if (out.slope >= -0.1) {
    out.verdict = Verdict::Divergent;
    out.reason = "dyadic contributions do not decay";
  } else {
    out.reason = fmt::format("slope {:.3f} between the thresholds -0.5 and -0.1", out.slope);
  }
  return out;
}

Verdict aggregate(const std::vector<DiagnosticResult>& results) {
  bool inconclusive = false;
  for (const auto& r : results) {
    if (r.verdict == Verdict::Divergent) return Verdict::Divergent;
    if (r.verdict == Verdict::Inconclusive) inconclusive = true;
  }
  return inconclusive ? Verdict::Inconclusive : Verdict::Finite;
}

BoundaryTrace data_combination_trace(const ProblemSpec& spec, const OrbitModel& frozen,
                                     const BetaTable& betas, const DependentRow& row) {
  Combination c{row.row, {{row.row, 1.0}}};
  for (std::size_t i = 0; i < betas.independent.size(); ++i) {
    if (row.beta[i] != 0.0) c.weights.emplace_back(betas.independent[i], -row.beta[i]);
  }
  std::vector<std::pair<SideTrace, double>> parts;
  const auto trace = data_trace(spec, frozen);
  for (const auto& [side, w] : c.weights) parts.emplace_back(trace(side), w);
  auto value = [&](double r) {
    double acc = 0.0;
    for (const auto& [t, w] : parts) acc += w * t.value(r);
    return acc;
  };
  auto derivative = [&](double r) {
    double acc = 0.0;
    for (const auto& [t, w] : parts) acc += w * t.derivative(r);
    return acc;
  };
  const auto& tr = spec.truncation;
  return BoundaryTrace::sample(value, derivative, tr.epsilon, tr.levels, 8, "data " + side_name(c.row));
}

ConsistencyReport check_boundary_data(const ProblemSpec& spec, const std::vector<OrbitModel>& frozen) {
  ConsistencyReport rep;
  std::vector<DiagnosticResult> all;
  for (const auto& model : frozen) {
    OrbitConsistency oc;
    oc.orbit_id = model.orbit_id;
    oc.hat = hat_operators(model);
    try {
      oc.betas = dependency_betas(oc.hat);
    } catch (const NoDependence&) {
      rep.orbits.push_back(std::move(oc));
      continue;
    }
    const auto trace = data_trace(spec, model);
    std::vector<DiagnosticResult> local;
    for (const auto& c : combinations(*oc.betas)) {
      ConsistencyEntry e;
      e.condition = "data";
      e.row = c.row;
      const bool flat = halfplane_shape(model) && c.weights.size() == 2 &&
                        std::abs(weight_of(c, {0, 1}) - 1.0) < 1e-12 &&
                        std::abs(weight_of(c, {0, 2}) - 1.0) < 1e-12;
      e.formula = flat ? "int r^-1 |df1/dy2(0,-r) - df2/dy2(0,r)|^2 dr < inf"
                       : "int r^-1 |" + render(c, "f") + "|^2 dr < inf";
      e.diagnostic = run_combination(c, trace, spec.truncation, "data " + side_name(c.row));
      local.push_back(e.diagnostic);
      oc.entries.push_back(std::move(e));
    }
    oc.verdict = aggregate(local);
    all.insert(all.end(), local.begin(), local.end());
    rep.orbits.push_back(std::move(oc));
  }
  rep.verdict = aggregate(all);
  return rep;
}

Eigen::MatrixXd constant_action(const OrbitModel& frozen) {
  const int n = frozen.n_angles();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, n);
  for (const auto& t : frozen.terms) m(row_index(t.side()), t.target_angle) += t.weight_at_vertex;
  return m;
}

CoefficientReport check_coefficient_condition(const ProblemSpec& spec, const OrbitModel& frozen,
                                              const BetaTable& betas) {
  CoefficientReport rep;
  const auto& tr = spec.truncation;
  const auto combos = combinations(betas);
  const bool flat = halfplane_shape(frozen);

  std::vector<const ExteriorTerm*> ext;
  for (const auto& e : spec.exterior_terms) {
    if (e.orbit_id == frozen.orbit_id) ext.push_back(&e);
  }
  auto relevant = [&](const ExteriorTerm& e) {
    return std::any_of(combos.begin(), combos.end(),
                       [&](const auto& c) { return std::abs(weight_of(c, e.side)) > 1e-14; });
  };

  bool vertex_ok = true;
  for (const auto* e : ext) {
    if (!relevant(*e)) continue;
    const Vec2 tau = frozen.side_direction(e->side);
    const ScalarFunction& a = e->coefficient;
    const double a0 = richardson_at_vertex([&](double r) { return a.along(r, tau); }, tr);
    const double da0 = richardson_at_vertex([&](double r) { return a.derivative_along(r, tau); }, tr);
    const bool vertical = std::abs(tau.x()) < 1e-12;
    const std::string dlabel = vertical ? "∂a/∂y₂(0)=0" : "∂a/∂τ(0)=0";
    rep.vertex_values.push_back({"a(0)=0", a0, std::abs(a0) < kVertexTol});
    rep.vertex_values.push_back({dlabel, da0, std::abs(da0) < kVertexTol});
    vertex_ok = vertex_ok && std::abs(a0) < kVertexTol && std::abs(da0) < kVertexTol;

    for (int g = 0; g < 2; ++g) {
      const auto trace = [&, g](SideRef side) -> SideTrace {
        if (side != e->side) return zero_trace();
        return {[&a, tau, g](double r) { return a.along(r, tau) * (g == 0 ? 1.0 : r); },
                [&a, tau, g](double r) {
                  const double da = a.derivative_along(r, tau);
                  return g == 0 ? da : da * r + a.along(r, tau);
                }};
      };
      for (const auto& c : combos) {
        if (std::abs(weight_of(c, e->side)) <= 1e-14) continue;
        ConsistencyEntry entry;
        entry.condition = "B^v";
        entry.row = c.row;
        entry.formula = g == 0 ? fmt::format("generator v_Ω = 1 ({})", dlabel)
                               : std::string("generator v_Ω = r (a(0)=0)");
        entry.diagnostic = run_combination(c, trace, tr, fmt::format("B^v g={} {}", g, side_name(c.row)));
        rep.bv_entries.push_back(std::move(entry));
      }
    }
  }

  for (int k = 0; k < frozen.n_angles(); ++k) {
    const auto trace = [&, k](SideRef side) { return constant_trace(frozen, side, k, 1.0); };
    for (const auto& c : combos) {
      ConsistencyEntry entry;
      entry.condition = "BC";
      entry.row = c.row;
      const bool paper_form = flat && c.weights.size() == 2;
      entry.formula = paper_form ? "int r^-1 |db1/dy2(0,-r) - db2/dy2(0,r)|^2 dr < inf"
                                 : fmt::format("C = e_{}: int r^-1 |{}|^2 dr < inf", k, render(c, "b"));
      entry.diagnostic = run_combination(c, trace, tr, fmt::format("BC k={} {}", k, side_name(c.row)));
      rep.bc_entries.push_back(std::move(entry));
    }
  }

  // Admissible generator pairs: unknowns (x_{e,1}, x_{e,r}) per exterior term, then C.
  const int ne = static_cast<int>(ext.size());
  const int n = frozen.n_angles();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * ne + n);
  std::vector<double> a_vertex(static_cast<std::size_t>(ne));
  for (int i = 0; i < ne; ++i) {
    const auto* e = ext[static_cast<std::size_t>(i)];
    const Vec2 tau = frozen.side_direction(e->side);
    a_vertex[static_cast<std::size_t>(i)] =
        richardson_at_vertex([&](double r) { return e->coefficient.along(r, tau); }, tr);
    a(row_index(e->side), 2 * i) = a_vertex[static_cast<std::size_t>(i)];
  }
  a.rightCols(n) = constant_action(frozen);
  const Eigen::MatrixXd kernel = null_space(a, 1e-10);
  for (Eigen::Index col = 0; col < kernel.cols(); ++col) {
    const Eigen::VectorXd x = kernel.col(col);
    const auto trace = [&](SideRef side) -> SideTrace {
      std::vector<SideTrace> parts;
      for (int k = 0; k < n; ++k) parts.push_back(constant_trace(frozen, side, k, x(2 * ne + k)));
      for (int i = 0; i < ne; ++i) {
        const auto* e = ext[static_cast<std::size_t>(i)];
        if (e->side != side) continue;
        const Vec2 tau = frozen.side_direction(side);
        const double x1 = x(2 * i), xr = x(2 * i + 1);
        const ScalarFunction* f = &e->coefficient;
        parts.push_back({[f, tau, x1, xr](double r) { return f->along(r, tau) * (x1 + xr * r); },
                         [f, tau, x1, xr](double r) {
                           return f->derivative_along(r, tau) * (x1 + xr * r) + f->along(r, tau) * xr;
                         }});
      }
      return {[parts](double r) {
                double acc = 0.0;
                for (const auto& p : parts) acc += p.value(r);
                return acc;
              },
              [parts](double r) {
                double acc = 0.0;
                for (const auto& p : parts) acc += p.derivative(r);
                return acc;
              }};
    };
    for (const auto& c : combos) {
      ConsistencyEntry entry;
      entry.condition = "B^v+BC";
      entry.row = c.row;
      entry.formula = fmt::format("admissible generator pair #{}", col);
      entry.diagnostic = run_combination(c, trace, tr, fmt::format("adm {} {}", col, side_name(c.row)));
      rep.admissible_entries.push_back(std::move(entry));
    }
  }

  auto collect = [](std::vector<DiagnosticResult>& d, const std::vector<ConsistencyEntry>& v) {
    for (const auto& e : v) d.push_back(e.diagnostic);
  };
  auto verdict_of = [&](const std::vector<ConsistencyEntry>& v) {
    std::vector<DiagnosticResult> d;
    collect(d, v);
    return aggregate(d);
  };
  std::vector<DiagnosticResult> d_coef;
  collect(d_coef, rep.bv_entries);
  collect(d_coef, rep.bc_entries);
  const Verdict v_coef = aggregate(d_coef);
  const Verdict v_adm = verdict_of(rep.admissible_entries);
  rep.coefficient_condition = vertex_ok && v_coef == Verdict::Finite;
  rep.admissible_condition = v_adm == Verdict::Finite;
  rep.inconclusive = v_coef == Verdict::Inconclusive || v_adm == Verdict::Inconclusive;
  return rep;
}

AdmissibleSet check_admissible(const ProblemSpec& spec, const OrbitModel& frozen,
                               const std::vector<double>& v_omega_at_vertex, const Eigen::VectorXd& c) {
  const int n = frozen.n_angles();
  Eigen::VectorXd bv = Eigen::VectorXd::Zero(2 * n);
  std::size_t i = 0;
  for (const auto& e : spec.exterior_terms) {
    if (e.orbit_id != frozen.orbit_id) continue;
    const double v = i < v_omega_at_vertex.size() ? v_omega_at_vertex[i] : 0.0;
    const Vec2 tau = frozen.side_direction(e.side);
    const double a0 = richardson_at_vertex([&](double r) { return e.coefficient.along(r, tau); },
                                           spec.truncation);
    bv(row_index(e.side)) += a0 * v;
    ++i;
  }
  const Eigen::MatrixXd m = constant_action(frozen);
  const double scale = std::max({1.0, bv.lpNorm<Eigen::Infinity>(), m.lpNorm<Eigen::Infinity>()});
  AdmissibleSet out;
  out.residual = (bv + m * c).lpNorm<Eigen::Infinity>();
  out.pair_admissible = out.residual < 1e-10 * scale;
  out.particular = m.completeOrthogonalDecomposition().solve(-bv);
  out.function_admissible = (bv + m * out.particular).lpNorm<Eigen::Infinity>() < 1e-10 * scale;
  out.null_basis = null_space(m, 1e-10);
  return out;
}

}  // namespace nlbvp::consistency
