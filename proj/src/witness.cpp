#include "nlbvp/witness.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nlbvp::classifier {
namespace {

const Complex kI(0.0, 1.0);

constexpr int kCauchyNodes = 32;
constexpr double kCauchyRadius = 0.2;

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Weighted-golden-ratio sequence in [0, 1).
double frac_seq(int i, double alpha) {
  const double v = (i + 1) * alpha;
  return v - std::floor(v);
}

constexpr double kD2[9] = {-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72,
                           8.0 / 5,    -1.0 / 5,  8.0 / 315, -1.0 / 560};
constexpr double kD1[9] = {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0,
                           4.0 / 5,   -1.0 / 5,   4.0 / 105, -1.0 / 280};

}  // namespace

double hessian_density(double t, const LogPolarDerivatives& d) {
  const double a = d.u_tt.real() - d.u_t.real();
  const double b = d.u_tw.real() - d.u_w.real();
  const double c = d.u_t.real() + d.u_ww.real();
  return std::exp(-2.0 * t) * (a * a + 2.0 * b * b + c * c);
}

double QuinticCutoff::value(double r) const {
  const double q = radius / 4.0;
  if (r <= q) return 1.0;
  if (r >= 2.0 * q) return 0.0;
  const double s = (r - q) / q;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double QuinticCutoff::d1(double r) const {
  const double q = radius / 4.0;
  if (r <= q || r >= 2.0 * q) return 0.0;
  const double s = (r - q) / q;
  return -30.0 * s * s * (1.0 - s) * (1.0 - s) / q;
}

double QuinticCutoff::d2(double r) const {
  const double q = radius / 4.0;
  if (r <= q || r >= 2.0 * q) return 0.0;
  const double s = (r - q) / q;
  return -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (q * q);
}

SingularWitness::SingularWitness(OrbitModel model, Complex lambda0, std::vector<pencil::CVector> chain,
                                 double cutoff_radius)
    : model_(std::move(model)), lambda0_(lambda0), chain_(std::move(chain)), cutoff_{cutoff_radius} {
  if (chain_.empty()) throw std::invalid_argument("witness needs at least one chain vector");
}

Complex SingularWitness::taylor_basis(int q, int k, int beta, double omega, int d) const {
  auto pick = [&](const pencil::BasisValues& b) {
    return d == 0 ? b.value[beta] : d == 1 ? b.slope[beta] : b.curvature[beta];
  };
  if (q == 0) return pick(pencil::fundamental_system(model_, k, lambda0_, omega));
  Complex acc = 0.0;
  for (int n = 0; n < kCauchyNodes; ++n) {
    const double theta = 2.0 * std::numbers::pi * n / kCauchyNodes;
    const Complex z = lambda0_ + kCauchyRadius * std::exp(kI * theta);
    acc += pick(pencil::fundamental_system(model_, k, z, omega)) * std::exp(-kI * (q * theta));
  }
  return acc / (kCauchyNodes * std::pow(kCauchyRadius, q));
}

Complex SingularWitness::profile(int p, int k, double omega, int d) const {
  Complex acc = 0.0;
  for (int q = 0; q <= p; ++q) {
    const auto& c = chain_[static_cast<std::size_t>(p - q)];
    for (int beta = 0; beta < 2; ++beta) {
      const Complex coeff = c(2 * k + beta);
      if (coeff != 0.0) acc += taylor_basis(q, k, beta, omega, d) * coeff;
    }
  }
  return acc;
}

LogPolarDerivatives SingularWitness::derivatives(int k, double t, double omega) const {
  const int m = log_power();
  const Complex mu = kI * lambda0_;
  // P_d(t) = sum_l (i t)^l / l! phi^(m-l), with its t-derivatives.
  Complex p[3] = {0.0, 0.0, 0.0}, dp[3] = {0.0, 0.0, 0.0}, ddp[3] = {0.0, 0.0, 0.0};
  double fact = 1.0;
  for (int l = 0; l <= m; ++l) {
    if (l > 0) fact *= l;
    const Complex il = std::pow(kI, l) / fact;
    for (int d = 0; d < 3; ++d) {
      const Complex phi = profile(m - l, k, omega, d);
      p[d] += il * std::pow(t, l) * phi;
      if (l >= 1) dp[d] += il * (l * std::pow(t, l - 1)) * phi;
      if (l >= 2) ddp[d] += il * (l * (l - 1) * std::pow(t, l - 2)) * phi;
    }
  }
  const Complex e = std::exp(mu * t);
  LogPolarDerivatives out;
  out.u = e * p[0];
  out.u_t = e * (mu * p[0] + dp[0]);
  out.u_tt = e * (mu * mu * p[0] + 2.0 * mu * dp[0] + ddp[0]);
  out.u_w = e * p[1];
  out.u_tw = e * (mu * p[1] + dp[1]);
  out.u_ww = e * p[2];
  return out;
}

Complex SingularWitness::value(int k, double r, double omega) const {
  const int m = log_power();
  const double t = std::log(r);
  Complex acc = 0.0;
  double fact = 1.0;
  for (int l = 0; l <= m; ++l) {
    if (l > 0) fact *= l;
    acc += std::pow(kI * t, l) / fact * profile(m - l, k, omega, 0);
  }
  return std::exp(kI * lambda0_ * t) * acc;
}

double SingularWitness::cut_value(int k, double r, double omega) const {
  const double xi = cutoff_.value(r);
  return xi == 0.0 ? 0.0 : xi * value(k, r, omega).real();
}

double SingularWitness::induced_forcing(int k, double r, double omega) const {
  const double x1 = cutoff_.d1(r), x2 = cutoff_.d2(r);
  if (x1 == 0.0 && x2 == 0.0) return 0.0;  // P W = 0 where xi is constant
  const PrincipalPart p = model_.principal_part(k);
  const double c = std::cos(omega), s = std::sin(omega);
  const double t = std::log(r);
  const LogPolarDerivatives d = derivatives(k, t, omega);
  const double w = d.u.real();
  const double w_r = d.u_t.real() / r;
  const double w_w = d.u_w.real() / r;  // (1/r) dW/domega
  const double w1 = c * w_r - s * w_w, w2 = s * w_r + c * w_w;
  const double q = p.p11 * c * c + 2.0 * p.p12 * c * s + p.p22 * s * s;
  const double p_xi = x2 * q + x1 / r * (p.p11 + p.p22 - q);
  const double g1 = x1 * (p.p11 * c + p.p12 * s), g2 = x1 * (p.p12 * c + p.p22 * s);
  return 2.0 * (g1 * w1 + g2 * w2) + w * p_xi;
}

double SingularWitness::w2_level(int m) const {
  std::vector<double> xt, wt, xw, ww;
  gauss_legendre(16, xt, wt);
  gauss_legendre(48, xw, ww);
  const double t_hi = -m * std::numbers::ln2, t_lo = -(m + 1) * std::numbers::ln2;
  double total = 0.0;
  for (int k = 0; k < model_.n_angles(); ++k) {
    const double wk = model_.half_openings[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < xt.size(); ++i) {
      const double t = 0.5 * (t_hi + t_lo) + 0.5 * (t_hi - t_lo) * xt[i];
      for (std::size_t j = 0; j < xw.size(); ++j) {
        const double omega = wk * xw[j];
        total += 0.5 * (t_hi - t_lo) * wt[i] * wk * ww[j] * hessian_density(t, derivatives(k, t, omega));
      }
    }
  }
  return total;
}

WitnessResiduals SingularWitness::residuals(int points) const {
  WitnessResiduals out;
  const int n_int = points / 2, n_bdy = points - n_int;
  const int n = model_.n_angles();
  auto cart = [&](int k, const Vec2& y) {
    return value(k, y.norm(), std::atan2(y.y(), y.x()));
  };
  for (int i = 0; i < n_int; ++i) {
    const int k = i % n;
    const double wk = model_.half_openings[static_cast<std::size_t>(k)];
    const double r = std::pow(10.0, -3.0 + 2.5 * frac_seq(i, 0.6180339887498949));
    const double omega = 0.9 * wk * (2.0 * frac_seq(i, 0.7548776662466927) - 1.0);
    const Vec2 y(r * std::cos(omega), r * std::sin(omega));
    const double h = 0.03 * r;
    Complex u11 = 0.0, u22 = 0.0, u12 = 0.0;
    for (int a = 0; a < 9; ++a) {
      u11 += kD2[a] * cart(k, y + Vec2((a - 4) * h, 0.0));
      u22 += kD2[a] * cart(k, y + Vec2(0.0, (a - 4) * h));
      if (kD1[a] == 0.0) continue;
      for (int b = 0; b < 9; ++b) {
        if (kD1[b] == 0.0) continue;
        u12 += kD1[a] * kD1[b] * cart(k, y + Vec2((a - 4) * h, (b - 4) * h));
      }
    }
    u11 /= h * h;
    u22 /= h * h;
    u12 /= h * h;
    const PrincipalPart p = model_.principal_part(k);
    const Complex res = p.p11 * u11 + 2.0 * p.p12 * u12 + p.p22 * u22;
    const double scale = std::abs(p.p11 * u11) + 2.0 * std::abs(p.p12 * u12) +
                         std::abs(p.p22 * u22) + std::abs(cart(k, y)) / (r * r);
    out.interior = std::max(out.interior, std::abs(res) / scale);
    ++out.interior_points;
  }
  const auto sides = model_.sides();
  for (int i = 0; i < n_bdy; ++i) {
    const SideRef side = sides[static_cast<std::size_t>(i) % sides.size()];
    const double r = std::pow(10.0, -3.0 + 2.5 * frac_seq(i, 0.5698402909980532));
    const double theta = model_.side_angle(side);
    Complex res = 0.0;
    double scale = 0.0;
    for (const auto* t : model_.terms_on(side)) {
      if (t->weight_at_vertex == 0.0) continue;
      const Complex term = t->weight_at_vertex * value(t->target_angle, t->homothety * r, theta + t->rotation);
      res += term;
      scale += std::abs(term);
    }
    if (scale > 0.0) out.boundary = std::max(out.boundary, std::abs(res) / scale);
    ++out.boundary_points;
  }
  return out;
}

std::vector<std::vector<double>> SingularWitness::profile_omegas(int count) const {
  return pencil::equiangular_samples(model_, count);
}

std::vector<std::vector<std::vector<Complex>>> SingularWitness::sampled_profiles(int count) const {
  const auto omegas = profile_omegas(count);
  std::vector<std::vector<std::vector<Complex>>> out;
  for (int l = 0; l <= log_power(); ++l) {
    std::vector<std::vector<Complex>> per_angle;
    for (int k = 0; k < model_.n_angles(); ++k) {
      std::vector<Complex> row;
      for (double w : omegas[static_cast<std::size_t>(k)]) row.push_back(profile(l, k, w, 0));
      per_angle.push_back(std::move(row));
    }
    out.push_back(std::move(per_angle));
  }
  return out;
}

std::vector<ForcingSample> SingularWitness::sampled_forcing(int n_r, int n_omega) const {
  std::vector<ForcingSample> out;
  const double lo = cutoff_.radius / 4.0, hi = cutoff_.radius / 2.0;
  for (int k = 0; k < model_.n_angles(); ++k) {
    const double wk = model_.half_openings[static_cast<std::size_t>(k)];
    for (int i = 0; i < n_r; ++i) {
      const double r = lo + (hi - lo) * (i + 0.5) / n_r;
      for (int j = 0; j < n_omega; ++j) {
        const double omega = -wk + 2.0 * wk * j / (n_omega - 1);
        out.push_back({k, r, omega, induced_forcing(k, r, omega)});
      }
    }
  }
  return out;
}

SingularWitness witness_singular_function(const OrbitModel& model, const pencil::PencilEigenvalue& eig,
                                          double cutoff) {
  if (eig.proper) throw std::invalid_argument("no witness exists for a proper eigenvalue");
  if (eig.coefficients.empty()) throw std::invalid_argument("eigenvalue carries no eigenvectors");
  const double k = std::round(-eig.lambda.imag());
  const bool integer_point =
      std::abs(eig.lambda.real()) < 1e-8 && k >= 1.0 && std::abs(eig.lambda.imag() + k) < 1e-8;
  if (!integer_point) return SingularWitness(model, eig.lambda, {eig.coefficients.front()}, cutoff);
  for (std::size_t v = 0; v < eig.eigenvectors.size(); ++v) {
    double res = 0.0;
    for (std::size_t j = 0; j < eig.eigenvectors[v].size(); ++j) {
      res = std::max(res, pencil::homogeneous_polynomial_residual(eig.sample_omegas[j],
                                                                  eig.eigenvectors[v][j],
                                                                  static_cast<int>(k)));
    }
    if (res >= 1e-6) return SingularWitness(model, eig.lambda, {eig.coefficients[v]}, cutoff);
  }
  if (eig.longest_chain.size() >= 2) {
    return SingularWitness(model, eig.lambda, {eig.longest_chain[0], eig.longest_chain[1]}, cutoff);
  }
  throw std::invalid_argument("every power solution is polynomial; no witness on this path");
}

double witness_cutoff_radius(const OrbitModel& model, const Truncation& tr) {
  double chi_min = 1.0;
  for (const auto& t : model.terms) chi_min = std::min(chi_min, t.homothety);
  return 0.5 * chi_min * std::min(tr.epsilon, tr.kappa2);
}

}  // namespace nlbvp::classifier
