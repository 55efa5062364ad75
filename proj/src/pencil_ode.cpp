#include <array>
#include <cmath>
#include <numbers>

#include "nlbvp/pencil.hpp"

namespace nlbvp::pencil {
namespace {

using State = std::array<Complex, 4>;  // (psi0, psi0', psi1, psi1')

State rhs(const PrincipalPart& p, Complex lambda, double omega, const State& y) {
  const auto [a, b, c] = angular_ode_coefficients(p, lambda, omega);
  return {y[1], -(b * y[1] + c * y[0]) / a, y[3], -(b * y[3] + c * y[2]) / a};
}

State rk4(const PrincipalPart& p, Complex lambda, double omega, int steps) {
  State y{1.0, 0.0, 0.0, 1.0};
  const double h = omega / steps;
  auto axpy = [](const State& y0, const State& k, double s) {
    State out;
    for (int i = 0; i < 4; ++i) out[i] = y0[i] + s * k[i];
    return out;
  };
  for (int n = 0; n < steps; ++n) {
    const double w = n * h;
    const State k1 = rhs(p, lambda, w, y);
    const State k2 = rhs(p, lambda, w + 0.5 * h, axpy(y, k1, 0.5 * h));
    const State k3 = rhs(p, lambda, w + 0.5 * h, axpy(y, k2, 0.5 * h));
    const State k4 = rhs(p, lambda, w + h, axpy(y, k3, h));
    for (int i = 0; i < 4; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return y;
}

State shoot(const PrincipalPart& p, Complex lambda, double omega, const ShootingOptions& opt) {
  if (omega == 0.0) return {1.0, 0.0, 0.0, 1.0};
  const double quadrants = std::abs(omega) / (std::numbers::pi / 2.0);
  auto steps_for = [&](int per_quadrant) {
    return std::max(1, static_cast<int>(std::ceil(per_quadrant * quadrants)));
  };
  int per_quadrant = opt.steps_per_quadrant;
  State coarse = rk4(p, lambda, omega, steps_for(per_quadrant));
  while (true) {
    const State fine = rk4(p, lambda, omega, steps_for(2 * per_quadrant));
    double change = 0.0, size = 1.0;
    for (int i = 0; i < 4; ++i) {
      change = std::max(change, std::abs(fine[i] - coarse[i]));
      size = std::max(size, std::abs(fine[i]));
    }
    // Richardson on the last pair: RK4 error is O(h^4).
    State out;
    for (int i = 0; i < 4; ++i) out[i] = fine[i] + (fine[i] - coarse[i]) / 15.0;
    if (change < opt.tolerance * size || 2 * per_quadrant >= opt.max_steps_per_quadrant) {
      return out;
    }
    per_quadrant *= 2;
    coarse = fine;
  }
}

// sinh(z w)/z, finite at z = 0.
Complex sinhc(Complex z, double w) {
  const Complex x = z * w;
  if (std::abs(x) < 1e-3) {
    const Complex x2 = x * x;
    return w * (1.0 + x2 / 6.0 + x2 * x2 / 120.0);
  }
  return std::sinh(x) / z;
}

}  // namespace

std::array<Complex, 3> angular_ode_coefficients(const PrincipalPart& p, Complex lambda,
                                                double omega) {
  const Complex mu = Complex(0.0, 1.0) * lambda;
  const double s = std::sin(omega), c = std::cos(omega);
  const double a = p.p11 * s * s - 2.0 * p.p12 * s * c + p.p22 * c * c;
  const Complex b =
      (1.0 - mu) * (2.0 * s * c * (p.p11 - p.p22) - 2.0 * p.p12 * (c * c - s * s));
  const Complex cc = p.p11 * (mu * (mu - 1.0) * c * c + mu * s * s) +
                     p.p22 * (mu * (mu - 1.0) * s * s + mu * c * c) +
                     2.0 * p.p12 * s * c * mu * (mu - 2.0);
  return {Complex(a), b, cc};
}

BasisValues fundamental_system(const OrbitModel& model, int angle, Complex lambda, double omega,
                               const ShootingOptions& opt) {
  const PrincipalPart p = model.principal_part(angle);
  BasisValues out;
  if (p.is_laplace() && !opt.force_shooting) {
    const Complex ch = std::cosh(lambda * omega);
    const Complex sh = std::sinh(lambda * omega);
    out.value[0] = ch;
    out.slope[0] = lambda * sh;
    out.curvature[0] = lambda * lambda * ch;
    out.value[1] = sinhc(lambda, omega);
    out.slope[1] = ch;
    out.curvature[1] = lambda * sh;
    return out;
  }
  const State y = shoot(p, lambda, omega, opt);
  const auto [a, b, c] = angular_ode_coefficients(p, lambda, omega);
  for (int beta = 0; beta < 2; ++beta) {
    out.value[beta] = y[2 * beta];
    out.slope[beta] = y[2 * beta + 1];
    out.curvature[beta] = -(b * out.slope[beta] + c * out.value[beta]) / a;
  }
  return out;
}

std::vector<BasisValues> fundamental_system(const OrbitModel& model, int angle, Complex lambda,
                                            std::span<const double> omegas,
                                            const ShootingOptions& opt) {
  std::vector<BasisValues> out;
  out.reserve(omegas.size());
  for (double w : omegas) out.push_back(fundamental_system(model, angle, lambda, w, opt));
  return out;
}

}  // namespace nlbvp::pencil
