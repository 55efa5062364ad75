#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "nlbvp/errors.hpp"
#include "nlbvp/solver.hpp"

namespace nlbvp::solver {
namespace {

constexpr double kDivisibilityTol = 1e-9;

// k such that x = k * step within tolerance, or -1.
long exact_multiple(double x, double step) {
  const double q = x / step;
  const double k = std::round(q);
  return std::abs(q - k) < kDivisibilityTol ? static_cast<long>(k) : -1;
}

struct Stencil {
  std::vector<Eigen::Triplet<double>>* triplets;
  int row;
  void add(int col, double v) { triplets->emplace_back(row, col, v); }
};

// Bilinear weights of the point (t, omega) on angle k.
void add_bilinear(const LogPolarGrid& g, int k, double t, double omega, double w, Stencil& s) {
  const double ft = (t - g.t(0)) / g.dt;
  const double fw = (omega - g.omega(k, 0)) / g.domega;
  const int nw = g.n_omega[static_cast<std::size_t>(k)];
  const int j = std::clamp(static_cast<int>(std::floor(ft)), 0, g.n_t - 1);
  const int i = std::clamp(static_cast<int>(std::floor(fw)), 0, nw - 1);
  const double a = ft - j, b = fw - i;
  s.add(g.index(k, j, i), w * (1 - a) * (1 - b));
  s.add(g.index(k, j + 1, i), w * a * (1 - b));
  s.add(g.index(k, j, i + 1), w * (1 - a) * b);
  s.add(g.index(k, j + 1, i + 1), w * a * b);
}

}  // namespace

LogPolarGrid LogPolarGrid::build(const OrbitModel& frozen, const GridOptions& opt) {
  if (opt.n_omega < 4 || opt.n_t < 4 || !(opt.T > 0.0)) {
    throw StructuralError("grid needs n_omega >= 4, n_t >= 4 and T > 0");
  }
  LogPolarGrid g;
  g.T = opt.T;
  g.n_t = opt.n_t;
  g.dt = opt.T / opt.n_t;
  g.half_openings = frozen.half_openings;
  const double widest = *std::max_element(g.half_openings.begin(), g.half_openings.end());
  g.domega = 2.0 * widest / opt.n_omega;
  g.offset.push_back(0);
  for (double w : g.half_openings) {
    const long n = exact_multiple(2.0 * w, g.domega);
    if (n < 2) {
      throw StructuralError(fmt::format("opening {:.17g} is not a multiple of domega = {:.17g}; "
                                        "choose n_omega so every opening is a whole number of steps",
                                        2.0 * w, g.domega));
    }
    g.n_omega.push_back(static_cast<int>(n));
    g.offset.push_back(g.offset.back() + static_cast<int>((n + 1) * (opt.n_t + 1)));
  }
  for (const auto& t : frozen.terms) {
    const double target = frozen.side_angle(t.side()) + t.rotation +
                          g.half_openings[static_cast<std::size_t>(t.target_angle)];
    if (exact_multiple(target, g.domega) < 0) {
      throw StructuralError(fmt::format("image ray of term ({},{})->{} is not on the omega grid; "
                                        "choose n_omega so rotations are multiples of domega",
                                        t.source_angle, t.sigma, t.target_angle));
    }
    if (t.homothety != 1.0 && exact_multiple(std::log(t.homothety), g.dt) < 0) {
      throw StructuralError(fmt::format("ln chi = {:.17g} is not a multiple of dt = {:.17g}; "
                                        "choose T / n_t to divide ln chi",
                                        std::log(t.homothety), g.dt));
    }
  }
  return g;
}

bool LogPolarGrid::refines(const LogPolarGrid& coarse) const {
  if (std::abs(T - coarse.T) > 1e-12 || n_t != 2 * coarse.n_t) return false;
  if (half_openings != coarse.half_openings) return false;
  for (std::size_t k = 0; k < n_omega.size(); ++k) {
    if (n_omega[k] != 2 * coarse.n_omega[k]) return false;
  }
  return true;
}

ProblemData data_from_spec(const ProblemSpec& spec, int orbit_id) {
  const OrbitModel& model = spec.orbit(orbit_id);
  ProblemData d;
  d.volume = [&spec](int, const Vec2& y) { return spec.rhs.volume(y); };
  d.outer = [&spec](int, const Vec2& y) { return spec.rhs.outer(y); };
  d.side = [&spec, model, orbit_id](SideRef side, double r) {
    return spec.rhs.side_data(orbit_id, side).along(r, model.side_direction(side));
  };
  return d;
}

DiscreteProblem assemble(const OrbitModel& frozen, const std::vector<ExteriorTerm>& exterior,
                         const LogPolarGrid& grid, const ProblemData& data) {
  if (!frozen.is_laplace()) throw StructuralError("the discrete solver supports the Laplace principal part only");
  DiscreteProblem p;
  p.grid = grid;
  p.model = frozen;
  const int n = grid.size();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  p.rhs = Eigen::VectorXd::Zero(n);
  const double rho = (grid.domega * grid.domega) / (grid.dt * grid.dt);

  for (int k = 0; k < grid.n_angles(); ++k) {
    const int nw = grid.n_omega[static_cast<std::size_t>(k)];
    for (int j = 0; j <= grid.n_t; ++j) {
      const double t = grid.t(j), r = std::exp(t);
      for (int i = 0; i <= nw; ++i) {
        const int row = grid.index(k, j, i);
        Stencil s{&trip, row};
        const double omega = grid.omega(k, i);
        const Vec2 y(r * std::cos(omega), r * std::sin(omega));
        if (j == grid.n_t) {
          s.add(row, 1.0);
          p.rhs(row) = data.outer(k, y);
          continue;
        }
        if (i == 0 || i == nw) {
          const SideRef side{k, i == 0 ? 1 : 2};
          const Vec2 tau = frozen.side_direction(side);
          ++p.side_rows;
          for (const auto* term : frozen.terms_on(side)) {
            const double b = term->weight_at(r, tau);
            if (b == 0.0) continue;
            const int k2 = term->target_angle;
            const long shift = term->homothety == 1.0 ? 0 : exact_multiple(std::log(term->homothety), grid.dt);
            const int j2 = j + static_cast<int>(shift);
            if (j2 < 0 || j2 > grid.n_t) {
              ++p.zero_extended_terms;
              continue;
            }
            const double w2 = frozen.side_angle(side) + term->rotation;
            const int i2 = static_cast<int>(std::lround((w2 + grid.half_openings[static_cast<std::size_t>(k2)]) / grid.domega));
            s.add(grid.index(k2, j2, i2), b);
          }
          for (const auto& e : exterior) {
            if (e.orbit_id != frozen.orbit_id || e.side != side) continue;
            const double a = e.coefficient.along(r, tau);
            if (a == 0.0) continue;
            const double radius = e.radius * (1.0 + e.drift * r);
            if (radius > 1.0 || std::log(radius) < grid.t(0)) {
              throw StructuralError("exterior term image leaves the truncated angle");
            }
            add_bilinear(grid, e.target_angle, std::log(radius), e.omega, a, s);
          }
          p.rhs(row) = data.side(side, r);
          continue;
        }
        // Interior, with a mirrored ghost node at the inner edge.
        const int up = grid.index(k, j + 1, i);
        const int down = j == 0 ? up : grid.index(k, j - 1, i);
        s.add(up, rho);
        s.add(down, rho);
        s.add(grid.index(k, j, i + 1), 1.0);
        s.add(grid.index(k, j, i - 1), 1.0);
        s.add(row, -2.0 * rho - 2.0);
        p.rhs(row) = grid.domega * grid.domega * std::exp(2.0 * t) * data.volume(k, y);
      }
    }
  }
  if (p.zero_extended_terms > 0.02 * p.side_rows) {
    throw StructuralError(fmt::format("{} of {} nonlocal images fall outside the grid; increase T",
                                      p.zero_extended_terms, p.side_rows));
  }
  p.matrix.resize(n, n);
  p.matrix.setFromTriplets(trip.begin(), trip.end());
  p.matrix.makeCompressed();
  return p;
}

DiscreteProblem assemble(const ProblemSpec& spec, int orbit_id, const GridOptions& opt) {
  const OrbitModel frozen = freeze(spec.orbit(orbit_id));
  const LogPolarGrid grid = LogPolarGrid::build(frozen, opt);
  return assemble(frozen, spec.exterior_terms, grid, data_from_spec(spec, orbit_id));
}

double DiscreteSolution::sample(int k, double r, double omega) const {
  const double ft = std::clamp((std::log(r) - grid.t(0)) / grid.dt, 0.0, static_cast<double>(grid.n_t));
  const int nw = grid.n_omega[static_cast<std::size_t>(k)];
  const double fw = std::clamp((omega - grid.omega(k, 0)) / grid.domega, 0.0, static_cast<double>(nw));
  const int j = std::min(static_cast<int>(ft), grid.n_t - 1);
  const int i = std::min(static_cast<int>(fw), nw - 1);
  const double a = ft - j, b = fw - i;
  return (1 - a) * (1 - b) * at(k, j, i) + a * (1 - b) * at(k, j + 1, i) + (1 - a) * b * at(k, j, i + 1) +
         a * b * at(k, j + 1, i + 1);
}

}  // namespace nlbvp::solver
