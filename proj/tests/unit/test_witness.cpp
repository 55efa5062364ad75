#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nlbvp/examples.hpp"
#include "nlbvp/pencil.hpp"
#include "nlbvp/witness.hpp"
#include "oracles/closed_forms.hpp"

using namespace nlbvp;
using namespace nlbvp::classifier;

namespace {

struct Fixture {
  OrbitModel model = halfplane_rotation_model(-0.5, -0.5);
  pencil::SpectralReport spectrum = pencil::analyze(model);
  SingularWitness witness = witness_singular_function(model, spectrum.eigenvalues.at(0),
                                                      witness_cutoff_radius(model, Truncation{}));
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST(Witness, ProfileIsTwoThirdsCosine) {
  const auto& w = fixture().witness;
  EXPECT_NEAR(w.lambda0().imag(), -2.0 / 3.0, 1e-9);
  const Complex phi0 = w.profile(0, 0, 0.0);
  ASSERT_GT(std::abs(phi0), 1e-3);
  for (double om = -1.5; om <= 1.5; om += 0.25) {
    const Complex ratio = w.profile(0, 0, om) / phi0;
    EXPECT_NEAR(ratio.real(), std::cos(2.0 * om / 3.0), 1e-8) << om;
    EXPECT_NEAR(ratio.imag(), 0.0, 1e-8) << om;
  }
  EXPECT_LT(std::abs(w.value(0, 0.01, 0.4) - std::pow(0.01, 2.0 / 3.0) * w.profile(0, 0, 0.4)), 1e-12);
}

TEST(Witness, ResidualsBelowTolerance) {
  const auto r = fixture().witness.residuals(200);
  EXPECT_EQ(r.interior_points + r.boundary_points, 200);
  EXPECT_LT(r.interior, 1e-10);
  EXPECT_LT(r.boundary, 1e-10);
}

TEST(Witness, DyadicSeminormMatchesClosedForm) {
  const auto& w = fixture().witness;
  const double re = w.profile(0, 0, 0.0).real();
  for (int m : {0, 3, 10, 20}) {
    const double a = std::ldexp(1.0, -m - 1), b = std::ldexp(1.0, -m);
    const double expect = re * re * oracle::harmonic_power_w2(2.0 / 3.0, a, b);
    EXPECT_NEAR(w.w2_level(m) / expect, 1.0, 1e-6) << m;
  }
}

TEST(Witness, DyadicSeminormGrowsWithoutBound) {
  const auto& w = fixture().witness;
  std::vector<double> levels;
  for (int m = 0; m < 24; ++m) levels.push_back(w.w2_level(m));
  for (std::size_t m = levels.size() - 8; m < levels.size(); ++m) EXPECT_GT(levels[m], levels[m - 1]);
  // Ratio 2^{2/3} per level for r^{2/3}.
  EXPECT_NEAR(levels[23] / levels[22], std::pow(2.0, 2.0 / 3.0), 1e-6);
}

TEST(Witness, CutoffLocalizesTheForcing) {
  const auto& w = fixture().witness;
  const double R = w.cutoff_radius();
  EXPECT_DOUBLE_EQ(R, 0.03125);
  EXPECT_NEAR(w.induced_forcing(0, 0.2 * R, 0.3), 0.0, 1e-8);
  EXPECT_EQ(w.induced_forcing(0, 0.6 * R, 0.3), 0.0);
  EXPECT_EQ(w.cut_value(0, 0.6 * R, 0.3), 0.0);
  EXPECT_GT(std::abs(w.induced_forcing(0, 0.375 * R, 0.3)), 1e-3);
  EXPECT_DOUBLE_EQ(w.cut_value(0, 0.1 * R, 0.3), w.value(0, 0.1 * R, 0.3).real());
}

TEST(Witness, SamplesHaveRequestedShape) {
  const auto& w = fixture().witness;
  const auto p = w.sampled_profiles(17);
  ASSERT_EQ(p.size(), 1u);
  ASSERT_EQ(p[0].size(), 1u);
  EXPECT_EQ(p[0][0].size(), 17u);
  EXPECT_EQ(w.sampled_forcing(4, 5).size(), 20u);
}

TEST(Witness, ProperEigenvalueIsRefused) {
  const auto m = halfplane_rotation_model(0.5, -0.5);
  const auto rep = pencil::analyze(m);
  ASSERT_EQ(rep.eigenvalues.size(), 1u);
  EXPECT_THROW(witness_singular_function(m, rep.eigenvalues[0], 0.03), std::invalid_argument);
}

TEST(Cutoff, QuinticIsTwiceDifferentiable) {
  const QuinticCutoff xi{1.0};
  EXPECT_EQ(xi.value(0.1), 1.0);
  EXPECT_EQ(xi.value(0.6), 0.0);
  EXPECT_NEAR(xi.value(0.375), 0.5, 1e-15);
  for (double r : {0.25, 0.5}) {
    EXPECT_NEAR(xi.d1(r), 0.0, 1e-12);
    EXPECT_NEAR(xi.d2(r), 0.0, 1e-9);
  }
  const double h = 1e-6;
  for (double r : {0.3, 0.4, 0.45}) {
    EXPECT_NEAR(xi.d1(r), (xi.value(r + h) - xi.value(r - h)) / (2 * h), 1e-6);
    EXPECT_NEAR(xi.d2(r), (xi.d1(r + h) - xi.d1(r - h)) / (2 * h), 1e-4);
  }
}

TEST(HessianDensity, QuadraticHarmonic) {
  // u = y1^2 - y2^2 = e^{2t} cos 2 omega has |D^2 u|^2 = 8 per unit area.
  const double t = -1.0, om = 0.3;
  const double e = std::exp(2 * t), c = std::cos(2 * om), s = std::sin(2 * om);
  LogPolarDerivatives d{e * c, 2 * e * c, 4 * e * c, -2 * e * s, -4 * e * s, -4 * e * c};
  EXPECT_NEAR(hessian_density(t, d), 8.0 * std::exp(2 * t), 1e-12);
}
