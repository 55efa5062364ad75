#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nlbvp/geometry.hpp"
#include "nlbvp/pencil.hpp"
#include "oracles/closed_forms.hpp"

using namespace nlbvp;
using pencil::Complex;
constexpr double kPi = std::numbers::pi;

namespace {

OrbitModel symmetric_halfplane(double s) { return halfplane_rotation_model(s / 2.0, s / 2.0); }

// Dirichlet problem for p11 d1^2 + p22 d2^2 on |omega| < w0. Rescaling the
// axes turns it into the Laplacian on an angle of half-opening theta0.
double anisotropic_dirichlet_exponent(double p11, double p22, double w0) {
  const double theta0 = std::atan2(std::sin(w0) / std::sqrt(p22), std::cos(w0) / std::sqrt(p11));
  return kPi / (2.0 * theta0);
}

}  // namespace

TEST(ClosedForm, ArctanAndArccosFormsAgreeOnTheBand) {
  for (double s = -1.95; s < 0.0; s += 0.05) {
    const auto a = oracle::halfplane_arctan(s);
    ASSERT_TRUE(a.has_value());
    EXPECT_NEAR(a->imag(), oracle::halfplane_arccos(s).imag(), 1e-14) << s;
  }
}

TEST(FindEigenvalues, MatchesClosedFormOnTheImproperInterval) {
  for (double s : {-1.9, -1.5, -1.0, -0.5, -0.1}) {
    const auto rs = pencil::find_eigenvalues(symmetric_halfplane(s));
    ASSERT_EQ(rs.roots.size(), 1u) << s;
    EXPECT_EQ(rs.roots[0].multiplicity, 1);
    EXPECT_EQ(rs.winding, 1);
    const Complex expect = *oracle::halfplane_arctan(s);
    EXPECT_LE(std::abs(rs.roots[0].lambda - expect), 1e-8) << s;
  }
}

TEST(FindEigenvalues, ZeroBeyondTheBand) {
  for (double s : {-3.0, -2.0, 0.5, 1.0, 2.5}) {
    EXPECT_EQ(pencil::count_zeros_in_band(symmetric_halfplane(s)), 0) << s;
  }
}

TEST(Analyze, CaseLabelsAcrossParameterRange) {
  for (int i = 0; i <= 40; ++i) {
    const double s = (i - 20) * 0.15;
    const auto rep = pencil::analyze(symmetric_halfplane(s));
    EXPECT_EQ(rep.argument_principle_count, rep.enumerated_multiplicity()) << s;
    EXPECT_TRUE(rep.unresolved.empty()) << s;
    int label = 1;
    if (rep.has_improper()) label = 3;
    else if (rep.has_proper_minus_i()) label = 2;
    EXPECT_EQ(label, oracle::halfplane_case(s)) << "s = " << s;
  }
}

TEST(Analyze, ZeroSumGivesProperMinusI) {
  for (double b1 : {0.0, 0.5, -1.3}) {
    const auto rep = pencil::analyze(halfplane_rotation_model(b1, -b1));
    ASSERT_EQ(rep.eigenvalues.size(), 1u);
    const auto& e = rep.eigenvalues[0];
    EXPECT_LT(std::abs(e.lambda - Complex(0.0, -1.0)), 1e-10);
    EXPECT_TRUE(e.proper);
    EXPECT_FALSE(e.ambiguous);
    EXPECT_LT(e.polynomial_residual, 1e-8);
  }
}

TEST(Analyze, ImproperEigenvectorIsNotPolynomial) {
  const auto rep = pencil::analyze(symmetric_halfplane(-1.0));
  ASSERT_EQ(rep.eigenvalues.size(), 1u);
  EXPECT_FALSE(rep.eigenvalues[0].proper);
  EXPECT_NEAR(rep.eigenvalues[0].lambda.imag(), -2.0 / 3.0, 1e-9);
}

TEST(Analyze, DirichletReentrantAngle) {
  // Half-opening 3 pi / 4: u = r^{2/3} cos(2 omega / 3).
  const auto rep = pencil::analyze(dirichlet_model(3.0 * kPi / 4.0));
  ASSERT_EQ(rep.eigenvalues.size(), 1u);
  EXPECT_NEAR(rep.eigenvalues[0].lambda.imag(), -2.0 / 3.0, 1e-8);
  EXPECT_NEAR(rep.eigenvalues[0].lambda.real(), 0.0, 1e-8);
}

TEST(Analyze, GeneralPrincipalPartMatchesRescaledLaplacian) {
  auto model = dirichlet_model(3.0 * kPi / 4.0);
  model.principal = {PrincipalPart{2.0, 0.0, 1.0}};
  const double expect = anisotropic_dirichlet_exponent(2.0, 1.0, 3.0 * kPi / 4.0);
  ASSERT_LT(expect, 1.0);
  const auto rep = pencil::analyze(model);
  ASSERT_EQ(rep.eigenvalues.size(), 1u);
  EXPECT_NEAR(rep.eigenvalues[0].lambda.imag(), -expect, 1e-7);
}

TEST(Analyze, GeneralPrincipalPartOnHalfPlaneKeepsPolynomialSolution) {
  // Any constant-coefficient operator annihilates y2, so -i stays proper.
  auto model = dirichlet_model(kPi / 2.0);
  model.principal = {PrincipalPart{1.5, 0.4, 0.8}};
  const auto rep = pencil::analyze(model);
  ASSERT_EQ(rep.eigenvalues.size(), 1u);
  EXPECT_LT(std::abs(rep.eigenvalues[0].lambda - Complex(0.0, -1.0)), 1e-8);
  EXPECT_TRUE(rep.eigenvalues[0].proper);
}

TEST(FundamentalSystem, ShootingAgreesWithClosedForm) {
  const auto model = dirichlet_model(kPi / 2.0);
  pencil::ShootingOptions shoot;
  shoot.force_shooting = true;
  for (Complex lambda : {Complex(0.3, -0.4), Complex(-1.2, -0.9), Complex(0.0, -2.0 / 3.0)}) {
    for (double omega : {-1.2, 0.4, 1.5}) {
      const auto a = pencil::fundamental_system(model, 0, lambda, omega);
      const auto b = pencil::fundamental_system(model, 0, lambda, omega, shoot);
      for (int k = 0; k < 2; ++k) {
        EXPECT_LT(std::abs(a.value[k] - b.value[k]), 1e-9);
        EXPECT_LT(std::abs(a.slope[k] - b.slope[k]), 1e-9);
      }
    }
  }
}

TEST(FundamentalSystem, SolvesTheAngularEquation) {
  const PrincipalPart p{1.7, -0.3, 0.9};
  OrbitModel model = dirichlet_model(kPi / 2.0);
  model.principal = {p};
  const Complex lambda(0.2, -0.6);
  for (double omega : {-1.0, 0.1, 1.3}) {
    const auto v = pencil::fundamental_system(model, 0, lambda, omega);
    const auto c = pencil::angular_ode_coefficients(p, lambda, omega);
    for (int k = 0; k < 2; ++k) {
      const Complex r = c[0] * v.curvature[k] + c[1] * v.slope[k] + c[2] * v.value[k];
      EXPECT_LT(std::abs(r), 1e-8 * (1.0 + std::abs(v.value[k])));
    }
  }
}

TEST(FundamentalSystem, PowerSolutionSatisfiesThePde) {
  // u = r^{i lambda} phi(omega) with phi from the fundamental system solves P u = 0.
  const PrincipalPart p{1.4, 0.25, 0.7};
  OrbitModel model = dirichlet_model(kPi / 2.0);
  model.principal = {p};
  const Complex lambda(0.1, -0.7);
  auto u = [&](double x, double y) {
    const double r = std::hypot(x, y), w = std::atan2(y, x);
    const auto v = pencil::fundamental_system(model, 0, lambda, w);
    return std::exp(Complex(0.0, 1.0) * lambda * std::log(r)) * (v.value[0] + 0.5 * v.value[1]);
  };
  const double x = 0.6, y = 0.3, h = 1e-3;
  const Complex uxx = (u(x + h, y) - 2.0 * u(x, y) + u(x - h, y)) / (h * h);
  const Complex uyy = (u(x, y + h) - 2.0 * u(x, y) + u(x, y - h)) / (h * h);
  const Complex uxy = (u(x + h, y + h) - u(x + h, y - h) - u(x - h, y + h) + u(x - h, y - h)) / (4 * h * h);
  const Complex pu = p.p11 * uxx + 2.0 * p.p12 * uxy + p.p22 * uyy;
  EXPECT_LT(std::abs(pu), 1e-5 * std::abs(u(x, y)));
}

TEST(Jordan, SyntheticChainOfLengthTwo) {
  const pencil::MatrixFunction m = [](Complex z) {
    pencil::CMatrix a(2, 2);
    a << z, 1.0, 0.0, z;
    return a;
  };
  const auto js = pencil::jordan_structure(m, Complex(0.0), 2);
  EXPECT_EQ(js.partial_multiplicities, (std::vector<int>{2}));
  ASSERT_EQ(js.longest_chain.size(), 2u);
  const auto& c0 = js.longest_chain[0];
  const auto& c1 = js.longest_chain[1];
  // M(0) c1 + M'(0) c0 = 0 with M(0) c0 = 0.
  pencil::CMatrix m0(2, 2), m1(2, 2);
  m0 << 0.0, 1.0, 0.0, 0.0;
  m1 << 1.0, 0.0, 0.0, 1.0;
  EXPECT_LT((m0 * c0).norm(), 1e-10);
  EXPECT_LT((m0 * c1 + m1 * c0).norm(), 1e-10);
  EXPECT_GT(c0.norm(), 0.5);
}

TEST(Jordan, SemisimpleDoubleRoot) {
  const pencil::MatrixFunction m = [](Complex z) {
    pencil::CMatrix a(2, 2);
    a << z - 0.5, 0.0, 0.0, 2.0 * (z - 0.5);
    return a;
  };
  const auto js = pencil::jordan_structure(m, Complex(0.5), 2);
  EXPECT_EQ(js.partial_multiplicities, (std::vector<int>{1, 1}));
  EXPECT_EQ(js.eigenvectors.size(), 2u);
  EXPECT_FALSE(js.ambiguous);
}

TEST(Jordan, TaylorCoefficientsOfPolynomial) {
  const pencil::MatrixFunction m = [](Complex z) {
    pencil::CMatrix a(1, 1);
    a << 1.0 + 2.0 * z + 3.0 * z * z;
    return a;
  };
  const auto t = pencil::taylor_coefficients(m, Complex(0.0), 3);
  EXPECT_LT(std::abs(t[0](0, 0) - 1.0), 1e-13);
  EXPECT_LT(std::abs(t[1](0, 0) - 2.0), 1e-13);
  EXPECT_LT(std::abs(t[2](0, 0) - 3.0), 1e-13);
  EXPECT_LT(std::abs(t[3](0, 0)), 1e-13);
}

TEST(Winding, CountsZerosOfScalarFunction) {
  auto f = [](Complex z) { return (z - Complex(0.1, -0.5)) * (z - Complex(-0.3, -0.5)) * (z - Complex(2.0, 0.0)); };
  auto scale = [](Complex z) { return 1.0 + std::pow(std::abs(z), 3); };
  EXPECT_EQ(pencil::winding_number(f, scale, Complex(-1.0, -1.0), Complex(1.0, -0.1)), 2);
}

TEST(HomogeneousPolynomial, ResidualSeparatesPolynomialsFromPowers) {
  std::vector<double> w;
  std::vector<Complex> poly, power;
  for (int i = 0; i <= 64; ++i) {
    const double om = -kPi / 2 + i * kPi / 64;
    w.push_back(om);
    poly.emplace_back(std::cos(om) * std::sin(om));
    power.emplace_back(std::cos(2.0 * om / 3.0));
  }
  EXPECT_LT(pencil::homogeneous_polynomial_residual(w, poly, 2), 1e-12);
  EXPECT_GT(pencil::homogeneous_polynomial_residual(w, power, 1), 1e-3);
}
