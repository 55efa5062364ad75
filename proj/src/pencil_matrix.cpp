#include <Eigen/LU>
#include <cmath>
#include <numbers>

#include "nlbvp/pencil.hpp"

namespace nlbvp::pencil {
namespace {

const Complex kI(0.0, 1.0);

int row_of(const NonlocalTerm& t) { return 2 * t.source_angle + (t.sigma - 1); }

// d/dlambda of cosh(lambda w) and sinh(lambda w)/lambda.
std::array<Complex, 2> laplace_basis_dlambda(Complex lambda, double w) {
  const Complex x = lambda * w;
  Complex d1;
  if (std::abs(x) < 1e-3) {
    const Complex l2 = lambda * lambda;
    d1 = lambda * w * w * w / 3.0 + l2 * lambda * std::pow(w, 5) / 30.0;
  } else {
    d1 = (w * std::cosh(x) * lambda - std::sinh(x)) / (lambda * lambda);
  }
  return {w * std::sinh(x), d1};
}

}  // namespace

CMatrix characteristic_matrix(const OrbitModel& model, Complex lambda, const ShootingOptions& opt) {
  const int n = 2 * model.n_angles();
  CMatrix m = CMatrix::Zero(n, n);
  for (const auto& t : model.terms) {
    if (t.weight_at_vertex == 0.0) continue;
    const double w = model.side_angle(t.side()) + t.rotation;
    const BasisValues psi = fundamental_system(model, t.target_angle, lambda, w, opt);
    const Complex factor = std::exp(kI * lambda * std::log(t.homothety)) * t.weight_at_vertex;
    for (int beta = 0; beta < 2; ++beta) {
      m(row_of(t), 2 * t.target_angle + beta) += factor * psi.value[beta];
    }
  }
  return m;
}

CMatrix characteristic_matrix_derivative(const OrbitModel& model, Complex lambda,
                                         const ShootingOptions& opt) {
  const int n = 2 * model.n_angles();
  if (!model.is_laplace() || opt.force_shooting) {
    const double h = 1e-6;
    return (characteristic_matrix(model, lambda + h, opt) -
            characteristic_matrix(model, lambda - h, opt)) /
           (2.0 * h);
  }
  CMatrix d = CMatrix::Zero(n, n);
  for (const auto& t : model.terms) {
    if (t.weight_at_vertex == 0.0) continue;
    const double w = model.side_angle(t.side()) + t.rotation;
    const BasisValues psi = fundamental_system(model, t.target_angle, lambda, w, opt);
    const auto dpsi = laplace_basis_dlambda(lambda, w);
    const double ln_chi = std::log(t.homothety);
    const Complex factor = std::exp(kI * lambda * ln_chi) * t.weight_at_vertex;
    for (int beta = 0; beta < 2; ++beta) {
      d(row_of(t), 2 * t.target_angle + beta) +=
          factor * (kI * ln_chi * psi.value[beta] + dpsi[beta]);
    }
  }
  return d;
}

Complex char_det(const OrbitModel& model, Complex lambda, const ShootingOptions& opt) {
  return characteristic_matrix(model, lambda, opt).partialPivLu().determinant();
}

double hadamard_scale(const CMatrix& m) {
  double s = 1.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) s *= m.row(i).norm();
  return s;
}

std::vector<CMatrix> taylor_coefficients(const MatrixFunction& f, Complex z0, int order,
                                         double radius, int nodes) {
  std::vector<CMatrix> samples;
  samples.reserve(static_cast<std::size_t>(nodes));
  for (int n = 0; n < nodes; ++n) {
    const double theta = 2.0 * std::numbers::pi * n / nodes;
    samples.push_back(f(z0 + radius * std::exp(kI * theta)));
  }
  std::vector<CMatrix> out;
  out.push_back(f(z0));
  for (int k = 1; k <= order; ++k) {
    CMatrix acc = CMatrix::Zero(out[0].rows(), out[0].cols());
    for (int n = 0; n < nodes; ++n) {
      const double theta = 2.0 * std::numbers::pi * n / nodes;
      acc += samples[static_cast<std::size_t>(n)] * std::exp(-kI * (k * theta));
    }
    out.push_back(acc / (nodes * std::pow(radius, k)));
  }
  return out;
}

}  // namespace nlbvp::pencil
