#pragma once

#include <Eigen/SparseCore>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nlbvp/geometry.hpp"
#include "nlbvp/pencil.hpp"

// Hot loops in two flavours: a serial reference and an OpenMP version.
// Reductions are blocked with a fixed block size so both give bit-identical
// results regardless of the thread count.
namespace nlbvp::kernels {

enum class Mode { Serial, Parallel };

/// Sets the OpenMP thread count (n <= 0 keeps the default); returns the count in effect.
int set_threads(int n);
int max_threads();

struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  static CsrMatrix from_eigen(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m);
};

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y, Mode mode);

/// Sum in fixed blocks of 1024, partial sums added left to right.
double blocked_sum(std::span<const double> v, Mode mode);

/// ||b - A x||_2.
double residual_norm(const CsrMatrix& a, std::span<const double> x, std::span<const double> b, Mode mode);

/// out[m] = level(m) for m = 0..levels-1; level must be thread-safe.
std::vector<double> dyadic_levels(const std::function<double(int)>& level, int levels, Mode mode);

/// det M(lambda) for each lambda.
std::vector<pencil::Complex> batched_det(const OrbitModel& model, std::span<const pencil::Complex> lambdas,
                                         Mode mode);

struct SweepRow {
  double s = 0.0;
  int count = 0;  // argument-principle count in the band
  std::vector<pencil::Complex> eigenvalues;
  std::vector<bool> proper;
  pencil::HalfPlaneCase label = pencil::HalfPlaneCase::NoEigenvalues;
  std::optional<pencil::Complex> oracle;
};

/// Band spectrum of the half-plane rotation model with b1 = b2 = s/2.
std::vector<SweepRow> s_sweep(std::span<const double> s_values, const pencil::SpectrumOptions& opt,
                              Mode mode);

}  // namespace nlbvp::kernels
