#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlbvp/errors.hpp"
#include "nlbvp/solver.hpp"

namespace nlbvp::solver {
namespace {

struct LinearFit {
  double C = 0.0, A = 0.0, B = 0.0, sse = 0.0;
};

LinearFit fit_for_alpha(std::span<const double> r, std::span<const double> u, double alpha, bool r2) {
  const auto n = static_cast<Eigen::Index>(r.size());
  Eigen::MatrixXd m(n, r2 ? 3 : 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ri = r[static_cast<std::size_t>(i)];
    m(i, 0) = 1.0;
    m(i, 1) = std::pow(ri, alpha);
    if (r2) m(i, 2) = ri * ri;
    y(i) = u[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd c = m.colPivHouseholderQr().solve(y);
  return {c(0), c(1), r2 ? c(2) : 0.0, (m * c - y).squaredNorm()};
}

}  // namespace

ExponentFit fit_singularity_exponent(std::span<const double> r, std::span<const double> u, double r_lo,
                                     double r_hi, bool regular_term) {
  std::vector<double> rw, uw;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] >= r_lo * (1 - 1e-12) && r[i] <= r_hi * (1 + 1e-12)) {
      rw.push_back(r[i]);
      uw.push_back(u[i]);
    }
  }
  if (rw.size() < 6) throw std::invalid_argument("fewer than 6 samples in the fit window");

  // Coarse scan, then golden section on the bracketing cell.
  // Stay away from alpha = 2, where r^alpha and r^2 coincide.
  const bool r2 = regular_term;
  constexpr double kLo = 0.02, kStep = 0.02;
  const double kHi = r2 ? 1.9 : 4.0;
  double best = kLo, best_sse = fit_for_alpha(rw, uw, kLo, r2).sse;
  for (double a = kLo + kStep; a <= kHi + 1e-12; a += kStep) {
    const double sse = fit_for_alpha(rw, uw, a, r2).sse;
    if (sse < best_sse) {
      best_sse = sse;
      best = a;
    }
  }
  double lo = std::max(1e-3, best - kStep), hi = best + kStep;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = fit_for_alpha(rw, uw, x1, r2).sse, f2 = fit_for_alpha(rw, uw, x2, r2).sse;
  for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = fit_for_alpha(rw, uw, x1, r2).sse;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = fit_for_alpha(rw, uw, x2, r2).sse;
    }
  }
  ExponentFit out;
  out.alpha = 0.5 * (lo + hi);
  const LinearFit lf = fit_for_alpha(rw, uw, out.alpha, r2);
  out.C = lf.C;
  out.A = lf.A;
  out.B = lf.B;
  double dev = 0.0, signal = 0.0;
  for (std::size_t i = 0; i < rw.size(); ++i) {
    dev = std::max(dev, std::abs(uw[i] - lf.C - lf.A * std::pow(rw[i], out.alpha) - lf.B * rw[i] * rw[i]));
    signal = std::max(signal, std::abs(uw[i] - lf.C));
  }
  out.residual = signal > 0.0 ? dev / signal : 0.0;
  out.samples = static_cast<int>(rw.size());
  out.r_lo = r_lo;
  out.r_hi = r_hi;
  return out;
}

ExponentFit fit_singularity_exponent(const DiscreteSolution& sol, int angle, double probe_omega, double r_lo,
                                     double r_hi, bool regular_term) {
  if (sol.grid.T < std::log(1.0 / r_lo) + 4.0) {
    throw StructuralError(fmt::format("T = {} puts the inner boundary too close to the fit window; use T >= 12",
                                      sol.grid.T));
  }
  std::vector<double> r, u;
  for (int j = 0; j <= sol.grid.n_t; ++j) {
    const double rj = std::exp(sol.grid.t(j));
    r.push_back(rj);
    u.push_back(sol.sample(angle, rj, probe_omega));
  }
  return fit_singularity_exponent(r, u, r_lo, r_hi, regular_term);
}

double discrete_w2_seminorm(const DiscreteSolution& sol, double r_min, double r_max, kernels::Mode mode) {
  const auto& g = sol.grid;
  std::vector<std::pair<int, int>> rows;  // (angle, j)
  for (int k = 0; k < g.n_angles(); ++k) {
    for (int j = 1; j < g.n_t; ++j) {
      if (g.t(j) < std::log(r_min) || g.t(j) > std::log(r_max)) continue;
      rows.emplace_back(k, j);
    }
  }
  std::vector<double> dens(rows.size(), 0.0);
  auto body = [&](std::size_t idx) {
    const auto [k, j] = rows[idx];
    const int nw = g.n_omega[static_cast<std::size_t>(k)];
    const double dt = g.dt, dw = g.domega, t = g.t(j);
    double acc = 0.0;
    for (int i = 1; i < nw; ++i) {
      auto u = [&](int dj, int di) { return sol.at(k, j + dj, i + di); };
      const double ut = (u(1, 0) - u(-1, 0)) / (2 * dt);
      const double utt = (u(1, 0) - 2 * u(0, 0) + u(-1, 0)) / (dt * dt);
      const double uw = (u(0, 1) - u(0, -1)) / (2 * dw);
      const double uww = (u(0, 1) - 2 * u(0, 0) + u(0, -1)) / (dw * dw);
      const double utw = (u(1, 1) - u(1, -1) - u(-1, 1) + u(-1, -1)) / (4 * dt * dw);
      const double a = utt - ut, b = utw - uw, c = ut + uww;
      acc += std::exp(-2.0 * t) * (a * a + 2 * b * b + c * c) * dt * dw;
    }
    dens[idx] = acc;
  };
  if (mode == kernels::Mode::Serial) {
    for (std::size_t i = 0; i < rows.size(); ++i) body(i);
  } else {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < static_cast<long>(rows.size()); ++i) body(static_cast<std::size_t>(i));
  }
  return kernels::blocked_sum(dens, mode);
}

const char* to_string(Trend t) {
  switch (t) {
    case Trend::Bounded:
      return "bounded";
    case Trend::Divergent:
      return "divergent";
    case Trend::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

BlowupResult w2_blowup_diagnostic(const std::vector<DiscreteSolution>& sols, double rho0, double shrink,
                                  double r_max) {
  if (sols.size() < 3) throw std::invalid_argument("blow-up diagnostic needs at least three refinements");
  for (std::size_t i = 1; i < sols.size(); ++i) {
    if (!sols[i].grid.refines(sols[i - 1].grid)) throw std::invalid_argument("refinements are not nested");
  }
  BlowupResult out;
  for (std::size_t l = 0; l < sols.size(); ++l) {
    const double rho = rho0 * std::pow(shrink, -static_cast<double>(l));
    if (std::log(rho) <= sols[l].grid.t(1)) throw std::invalid_argument("measurement radius below the grid; increase T");
    out.radii.push_back(rho);
    out.seminorms.push_back(discrete_w2_seminorm(sols[l], rho, r_max));
  }
  for (std::size_t l = 1; l < out.seminorms.size(); ++l) {
    out.growth.push_back(out.seminorms[l] / out.seminorms[l - 1] - 1.0);
  }
  const std::size_t n = out.growth.size();
  if (n >= 2 && out.growth[n - 1] >= 0.25 && out.growth[n - 2] >= 0.25) {
    out.trend = Trend::Divergent;
    out.reason = fmt::format("seminorm grew {:.1f}% and {:.1f}% over the last two refinements",
                             100 * out.growth[n - 2], 100 * out.growth[n - 1]);
  } else if (std::abs(out.growth[n - 1]) < 0.05) {
    out.trend = Trend::Bounded;
    out.reason = fmt::format("last change {:.2f}%", 100 * out.growth[n - 1]);
  } else {
    out.trend = Trend::Inconclusive;
    out.reason = fmt::format("last change {:.1f}% is between the thresholds", 100 * out.growth[n - 1]);
  }
  return out;
}

}  // namespace nlbvp::solver
