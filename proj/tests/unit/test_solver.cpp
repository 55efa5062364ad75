#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>

#include "nlbvp/errors.hpp"
#include "nlbvp/examples.hpp"
#include "nlbvp/pencil.hpp"
#include "nlbvp/solver.hpp"
#include "nlbvp/witness.hpp"

using namespace nlbvp;
using namespace nlbvp::solver;
constexpr double kPi = std::numbers::pi;

namespace {

ProblemData dirichlet_y1_data() {
  ProblemData d;
  d.volume = [](int, const Vec2&) { return 0.0; };
  d.outer = [](int, const Vec2& y) { return y.x(); };
  d.side = [](SideRef, double) { return 0.0; };
  return d;
}

double max_error_y1(int n) {
  const auto m = dirichlet_model(kPi / 2);
  const auto grid = LogPolarGrid::build(m, {n, n, 12.0});
  const auto sol = solve(assemble(m, {}, grid, dirichlet_y1_data()));
  double err = 0.0;
  for (int j = 0; j <= grid.n_t; ++j) {
    for (int i = 0; i <= n; ++i) {
      const double r = std::exp(grid.t(j));
      err = std::max(err, std::abs(sol.at(0, j, i) - r * std::cos(grid.omega(0, i))));
    }
  }
  return err;
}

ProblemSpec forced(ProblemSpec s) {
  s.rhs.volume = ScalarFunction::custom("1+y1", [](const Vec2& y) { return 1.0 + y.x(); },
                                        [](const Vec2&) { return Vec2(1.0, 0.0); });
  return s;
}

}  // namespace

TEST(Grid, StepsAndIndexing) {
  const auto g = LogPolarGrid::build(halfplane_rotation_model(0.5, 0.5), {64, 128, 8.0});
  EXPECT_DOUBLE_EQ(g.dt, 8.0 / 128);
  EXPECT_DOUBLE_EQ(g.domega, kPi / 64);
  EXPECT_EQ(g.size(), 65 * 129);
  EXPECT_EQ(g.index(0, 1, 0), 65);
  EXPECT_DOUBLE_EQ(g.t(128), 0.0);
  EXPECT_DOUBLE_EQ(g.omega(0, 32), 0.0);
}

TEST(Grid, RotationMustFallOnTheOmegaGrid) {
  EXPECT_THROW(LogPolarGrid::build(halfplane_rotation_model(0.5, 0.5), {63, 64, 6.0}), StructuralError);
  EXPECT_NO_THROW(LogPolarGrid::build(dirichlet_model(kPi / 2), {63, 64, 6.0}));
}

TEST(Grid, HomothetyMustFallOnTheTGrid) {
  OrbitModel m = halfplane_rotation_model(0.5, 0.5);
  for (auto& t : m.terms) {
    if (!t.is_identity()) t.homothety = 2.0;
  }
  EXPECT_THROW(LogPolarGrid::build(m, {64, 512, 12.0}), StructuralError);
  const double dt = std::log(2.0) / 8;
  EXPECT_NO_THROW(LogPolarGrid::build(m, {64, 64, 64 * dt}));
}

TEST(Grid, RefinementRelation) {
  const auto m = dirichlet_model(kPi / 2);
  const auto a = LogPolarGrid::build(m, {16, 32, 6.0});
  const auto b = LogPolarGrid::build(m, {32, 64, 6.0});
  const auto c = LogPolarGrid::build(m, {32, 64, 7.0});
  EXPECT_TRUE(b.refines(a));
  EXPECT_FALSE(a.refines(b));
  EXPECT_FALSE(c.refines(a));
}

TEST(Assemble, SideRowsReferenceTheCentralRay) {
  const auto m = halfplane_rotation_model(0.5, 0.25);
  const auto grid = LogPolarGrid::build(m, {32, 32, 6.0});
  ProblemData d = dirichlet_y1_data();
  const auto p = assemble(m, {}, grid, d);
  EXPECT_EQ(p.matrix.rows(), p.matrix.cols());
  EXPECT_EQ(p.matrix.rows(), grid.size());
  EXPECT_EQ(p.zero_extended_terms, 0);
  for (int j = 0; j < grid.n_t; ++j) {
    const int row = grid.index(0, j, 0);
    EXPECT_DOUBLE_EQ(p.matrix.coeff(row, row), 1.0);
    EXPECT_DOUBLE_EQ(p.matrix.coeff(row, grid.index(0, j, 16)), 0.5);
    const int row2 = grid.index(0, j, 32);
    EXPECT_DOUBLE_EQ(p.matrix.coeff(row2, grid.index(0, j, 16)), 0.25);
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(p.matrix, row); it; ++it) {
      EXPECT_TRUE(it.col() == row || it.col() == grid.index(0, j, 16));
    }
  }
}

TEST(Assemble, GeneralPrincipalPartIsRejected) {
  OrbitModel m = dirichlet_model(kPi / 2);
  m.principal = {PrincipalPart{2.0, 0.0, 1.0}};
  const auto grid = LogPolarGrid::build(m, {16, 16, 6.0});
  EXPECT_THROW(assemble(m, {}, grid, dirichlet_y1_data()), StructuralError);
}

TEST(Solve, DirichletLinearFieldConvergesAtSecondOrder) {
  const double e64 = max_error_y1(64), e128 = max_error_y1(128);
  EXPECT_LT(e64, 1e-3);
  EXPECT_GT(std::log2(e64 / e128), 1.9);
}

TEST(Solve, ZeroDataGivesZero) {
  auto s = examples::spec("case2");
  s.rhs.volume = ScalarFunction::zero();
  const auto sol = solve(assemble(s, 0, {32, 64, 8.0}));
  EXPECT_EQ(sol.values.lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(Solve, IterativeAndDirectAgree) {
  const auto p = assemble(examples::spec("case1"), 0, {32, 64, 8.0});
  const auto a = solve(p);
  SolveOptions direct;
  direct.direct_only = true;
  const auto b = solve(p, direct);
  EXPECT_EQ(b.info.method, "sparse-lu");
  EXPECT_LT((a.values - b.values).lpNorm<Eigen::Infinity>(), 1e-8 * (1.0 + b.values.lpNorm<Eigen::Infinity>()));
  EXPECT_LT(a.info.relative_residual, 1e-9);
}

TEST(Solve, ManufacturedFieldConverges) {
  const auto run = examples::manufactured_run(dirichlet_model(kPi / 2), {32, 64, 6.0});
  ASSERT_EQ(run.orders.size(), 2u);
  for (double o : run.orders) EXPECT_GE(o, 1.8);
  EXPECT_LT(run.l2_error[2], run.l2_error[1]);
}

TEST(Solve, WitnessForcingReproducesTheCutWitness) {
  const auto model = halfplane_rotation_model(-0.5, -0.5);
  const auto rep = pencil::analyze(model);
  const auto w = classifier::witness_singular_function(model, rep.eigenvalues.at(0),
                                                       classifier::witness_cutoff_radius(model, Truncation{}));
  ProblemData d = dirichlet_y1_data();
  d.outer = [](int, const Vec2&) { return 0.0; };
  d.volume = [&w](int k, const Vec2& y) { return w.induced_forcing(k, y.norm(), std::atan2(y.y(), y.x())); };
  std::vector<double> errors;
  for (int f : {1, 2, 4}) {
    const auto grid = LogPolarGrid::build(model, {32 * f, 64 * f, 12.0});
    const auto sol = solve(assemble(model, {}, grid, d));
    double e2 = 0.0, n2 = 0.0;
    for (int j = 0; j <= grid.n_t; ++j) {
      for (int i = 0; i <= grid.n_omega[0]; ++i) {
        const double r = std::exp(grid.t(j)), om = grid.omega(0, i);
        const double exact = w.cut_value(0, r, om);
        e2 += r * r * std::pow(sol.at(0, j, i) - exact, 2);
        n2 += r * r * exact * exact;
      }
    }
    errors.push_back(std::sqrt(e2 / n2));
  }
  EXPECT_LT(errors[1], errors[0]);
  EXPECT_LT(errors[2], errors[1]);
  EXPECT_LT(errors[2], 0.3);
}

TEST(Fit, SyntheticTwoThirdsField) {
  std::vector<double> r, u;
  for (int j = 0; j <= 512; ++j) {
    const double rr = std::exp(-12.0 + j * 12.0 / 512);
    r.push_back(rr);
    u.push_back(1.0 + std::pow(rr, 2.0 / 3.0));
  }
  for (bool regular : {true, false}) {
    const auto fit = fit_singularity_exponent(r, u, 1.0 / 512, 0.125, regular);
    EXPECT_NEAR(fit.alpha, 2.0 / 3.0, 1e-3);
    EXPECT_NEAR(fit.C, 1.0, 1e-6);
    EXPECT_NEAR(fit.A, 1.0, 1e-3);
    EXPECT_GT(fit.samples, 50);
  }
}

TEST(Fit, RegularTermAbsorbsQuadratic) {
  std::vector<double> r, u;
  for (int j = 0; j <= 400; ++j) {
    const double rr = std::exp(-10.0 + j * 10.0 / 400);
    r.push_back(rr);
    u.push_back(0.5 - 2.0 * std::pow(rr, 0.8) + 3.0 * rr * rr);
  }
  const auto fit = fit_singularity_exponent(r, u);
  EXPECT_NEAR(fit.alpha, 0.8, 1e-6);
  EXPECT_NEAR(fit.B, 3.0, 1e-4);
}

TEST(Fit, ShortTruncationIsRefused) {
  const auto sol = solve(assemble(forced(examples::spec("case3")), 0, {32, 64, 8.0}));
  EXPECT_THROW(fit_singularity_exponent(sol, 0, 0.0), StructuralError);
}

TEST(Fit, DirichletExponentIsOne) {
  const auto sol = solve(assemble(forced(examples::spec("dirichlet")), 0, {128, 256, 12.0}));
  const auto fit = fit_singularity_exponent(sol, 0, 0.0);
  EXPECT_NEAR(fit.alpha, 1.0, 0.02);
}

TEST(Seminorm, SerialAndParallelAgree) {
  const auto sol = solve(assemble(examples::spec("case1"), 0, {32, 64, 8.0}));
  const double a = discrete_w2_seminorm(sol, 1e-3, 0.5, kernels::Mode::Serial);
  const double b = discrete_w2_seminorm(sol, 1e-3, 0.5, kernels::Mode::Parallel);
  EXPECT_EQ(a, b);
  EXPECT_GT(a, 0.0);
}

TEST(Seminorm, HarmonicQuadraticHasConstantDensity) {
  // u = y1^2 - y2^2 on the half plane: |D^2 u|^2 = 8, area of r in [a, b] is pi (b^2 - a^2) / 2.
  const auto m = dirichlet_model(kPi / 2);
  const auto grid = LogPolarGrid::build(m, {256, 256, 6.0});
  DiscreteSolution sol{grid, Eigen::VectorXd(grid.size()), {}};
  for (int j = 0; j <= grid.n_t; ++j) {
    for (int i = 0; i <= 256; ++i) {
      const double r = std::exp(grid.t(j));
      sol.values(grid.index(0, j, i)) = r * r * std::cos(2.0 * grid.omega(0, i));
    }
  }
  const double w2 = discrete_w2_seminorm(sol, 0.1, 0.5);
  EXPECT_NEAR(w2 / (8.0 * kPi * (0.25 - 0.01) / 2.0), 1.0, 0.05);
}

TEST(Blowup, NonNestedGridsAreRejected) {
  const auto s = examples::spec("case1");
  std::vector<DiscreteSolution> sols{solve(assemble(s, 0, {16, 32, 6.0})), solve(assemble(s, 0, {16, 32, 6.0}))};
  EXPECT_THROW(w2_blowup_diagnostic(sols), std::invalid_argument);
}

TEST(SolutionIo, CsvAndBinaryDumps) {
  const auto sol = solve(assemble(examples::spec("case1"), 0, {8, 8, 4.0}));
  const auto dir = std::filesystem::temp_directory_path() / "nlbvp_solver_io";
  std::filesystem::create_directories(dir);
  write_csv(sol, dir / "u.csv");
  write_binary(sol, dir / "u.bin", dir / "u.json");
  EXPECT_EQ(std::filesystem::file_size(dir / "u.bin"), sizeof(double) * static_cast<std::size_t>(sol.values.size()));
  std::ifstream side(dir / "u.json");
  const auto j = nlohmann::json::parse(side);
  EXPECT_EQ(j["n_t"].get<int>(), 8);
  EXPECT_EQ(j["format"].get<std::string>(), "float64-le");
  std::ifstream bin(dir / "u.bin", std::ios::binary);
  std::vector<double> back(static_cast<std::size_t>(sol.values.size()));
  bin.read(reinterpret_cast<char*>(back.data()), static_cast<std::streamsize>(back.size() * sizeof(double)));
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(back[i], sol.values(static_cast<Eigen::Index>(i)));
  std::ifstream csv(dir / "u.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "angle,t,omega,value");
  std::filesystem::remove_all(dir);
}
