#pragma once

#include <complex>
#include <vector>

#include "nlbvp/geometry.hpp"
#include "nlbvp/pencil.hpp"

namespace nlbvp::classifier {

using pencil::Complex;

/// Log-polar derivatives of a function u(t, omega), t = ln r.
struct LogPolarDerivatives {
  Complex u, u_t, u_tt, u_w, u_tw, u_ww;
};

/// |D^2 u|^2 dy in log-polar variables, per unit dt domega.
double hessian_density(double t, const LogPolarDerivatives& d);

/// C^2 quintic bump: 1 on r <= radius/4, 0 on r >= radius/2.
struct QuinticCutoff {
  double radius = 1.0;
  double value(double r) const;
  double d1(double r) const;
  double d2(double r) const;
};

struct ForcingSample {
  int angle = 0;
  double r = 0.0;
  double omega = 0.0;
  double f0 = 0.0;
};

struct WitnessResiduals {
  double interior = 0.0;  // max relative residual of P W
  double boundary = 0.0;  // max relative residual of the nonlocal conditions
  int interior_points = 0;
  int boundary_points = 0;
};

/// W = r^{i lambda0} sum_{l <= m} (i ln r)^l / l! phi^(m-l)(omega), with cutoff xi.
class SingularWitness {
 public:
  SingularWitness(OrbitModel model, Complex lambda0, std::vector<pencil::CVector> chain,
                  double cutoff_radius);

  int orbit_id() const { return model_.orbit_id; }
  Complex lambda0() const { return lambda0_; }
  int log_power() const { return static_cast<int>(chain_.size()) - 1; }
  double cutoff_radius() const { return cutoff_.radius; }
  const QuinticCutoff& cutoff() const { return cutoff_; }
  const OrbitModel& model() const { return model_; }

  /// d-th omega-derivative of the chain function phi^(p) on angle k.
  Complex profile(int p, int k, double omega, int d = 0) const;
  LogPolarDerivatives derivatives(int k, double t, double omega) const;
  Complex value(int k, double r, double omega) const;

  /// f0 = P(xi Re W) at a point in angle k.
  double induced_forcing(int k, double r, double omega) const;
  /// xi(r) Re W.
  double cut_value(int k, double r, double omega) const;

  /// Exact integral of |D^2 Re W|^2 over r in [2^{-m-1}, 2^{-m}] (no cutoff), all angles.
  double w2_level(int m) const;

  WitnessResiduals residuals(int points = 200) const;

  std::vector<std::vector<double>> profile_omegas(int count = 129) const;
  /// samples[l][k][i] = phi^(l) on angle k at profile_omegas[k][i].
  std::vector<std::vector<std::vector<Complex>>> sampled_profiles(int count = 129) const;
  std::vector<ForcingSample> sampled_forcing(int n_r = 32, int n_omega = 65) const;

 private:
  Complex taylor_basis(int q, int k, int beta, double omega, int d) const;

  OrbitModel model_;
  Complex lambda0_;
  std::vector<pencil::CVector> chain_;
  QuinticCutoff cutoff_;
};

/// Smallest log power making W non-polynomial, built from the Jordan data.
/// Throws std::invalid_argument for a proper eigenvalue.
SingularWitness witness_singular_function(const OrbitModel& model,
                                          const pencil::PencilEigenvalue& eig, double cutoff);

/// epsilon' = (min chi / 2) * min(epsilon, kappa2).
double witness_cutoff_radius(const OrbitModel& model, const Truncation& tr);

}  // namespace nlbvp::classifier
