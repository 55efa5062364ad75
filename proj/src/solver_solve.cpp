#include <fmt/format.h>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include "nlbvp/errors.hpp"
#include "nlbvp/solver.hpp"

namespace nlbvp::solver {
namespace {

double relative_residual(const kernels::CsrMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double nb = b.norm();
  const double nr = kernels::residual_norm(a, {x.data(), static_cast<std::size_t>(x.size())},
                                           {b.data(), static_cast<std::size_t>(b.size())},
                                           kernels::Mode::Parallel);
  return nb > 0.0 ? nr / nb : nr;
}

}  // namespace

DiscreteSolution solve(const DiscreteProblem& problem, const SolveOptions& opt) {
  DiscreteSolution sol;
  sol.grid = problem.grid;
  const Eigen::VectorXd& b = problem.rhs;
  if (b.squaredNorm() == 0.0) {
    sol.values = Eigen::VectorXd::Zero(b.size());
    sol.info.method = "trivial";
    return sol;
  }
  const auto csr = kernels::CsrMatrix::from_eigen(problem.matrix);

  if (!opt.direct_only) {
    Eigen::GMRES<SparseMatrix, Eigen::IncompleteLUT<double>> gmres;
    gmres.preconditioner().setDroptol(opt.ilut_droptol);
    gmres.preconditioner().setFillfactor(opt.ilut_fill);
    gmres.set_restart(opt.restart);
    gmres.setMaxIterations(opt.max_iterations);
    gmres.setTolerance(opt.tolerance);
    gmres.compute(problem.matrix);
    if (gmres.info() == Eigen::Success) {
      Eigen::VectorXd x = gmres.solve(b);
      const double res = relative_residual(csr, x, b);
      sol.info.iterations = static_cast<int>(gmres.iterations());
      if (x.allFinite() && res <= opt.tolerance * 10.0) {
        sol.values = std::move(x);
        sol.info.method = "gmres+ilut";
        sol.info.relative_residual = res;
        return sol;
      }
      sol.info.note = fmt::format("gmres stalled at relative residual {:.3g} after {} iterations", res,
                                  sol.info.iterations);
    } else {
      sol.info.note = "incomplete factorization failed";
    }
    sol.info.fallback = true;
  }

  Eigen::SparseMatrix<double> cm = problem.matrix;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(cm);
  if (lu.info() != Eigen::Success) {
    throw SingularSystem(fmt::format("sparse LU failed ({}); the discrete problem may sit on an eigenvalue. {}",
                                     lu.lastErrorMessage(), sol.info.note));
  }
  Eigen::VectorXd x = lu.solve(b);
  const double res = relative_residual(csr, x, b);
  if (!x.allFinite() || res > 1e-8) {
    throw SingularSystem(fmt::format("direct solve residual {:.3g}; the discrete problem is near singular", res));
  }
  sol.values = std::move(x);
  sol.info.method = "sparse-lu";
  sol.info.relative_residual = res;
  return sol;
}

}  // namespace nlbvp::solver
