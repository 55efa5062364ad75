#include "nlbvp/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <exception>

namespace nlbvp::kernels {
namespace {

constexpr std::size_t kBlock = 1024;

// Runs body(i) for i in [0, n); rethrows the first exception after the loop.
template <class Body>
void for_each_index(int n, Mode mode, Body&& body) {
  if (mode == Mode::Serial) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(nlbvp_kernels_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

int set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
  return omp_get_max_threads();
}

int max_threads() { return omp_get_max_threads(); }

CsrMatrix CsrMatrix::from_eigen(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m) {
  CsrMatrix a;
  Eigen::SparseMatrix<double, Eigen::RowMajor> c = m;
  c.makeCompressed();
  a.rows = static_cast<int>(c.rows());
  a.cols = static_cast<int>(c.cols());
  a.row_ptr.assign(c.outerIndexPtr(), c.outerIndexPtr() + c.rows() + 1);
  a.col.assign(c.innerIndexPtr(), c.innerIndexPtr() + c.nonZeros());
  a.val.assign(c.valuePtr(), c.valuePtr() + c.nonZeros());
  return a;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y, Mode mode) {
  auto row = [&](int i) {
    double acc = 0.0;
    for (int p = a.row_ptr[static_cast<std::size_t>(i)]; p < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++p) {
      acc += a.val[static_cast<std::size_t>(p)] * x[static_cast<std::size_t>(a.col[static_cast<std::size_t>(p)])];
    }
    y[static_cast<std::size_t>(i)] = acc;
  };
  if (mode == Mode::Serial) {
    for (int i = 0; i < a.rows; ++i) row(i);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.rows; ++i) row(i);
}

double blocked_sum(std::span<const double> v, Mode mode) {
  const std::size_t nb = (v.size() + kBlock - 1) / kBlock;
  std::vector<double> partial(nb, 0.0);
  auto block = [&](long b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(v.size(), lo + kBlock);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += v[i];
    partial[static_cast<std::size_t>(b)] = acc;
  };
  if (mode == Mode::Serial) {
    for (long b = 0; b < static_cast<long>(nb); ++b) block(b);
  } else {
#pragma omp parallel for schedule(static)
    for (long b = 0; b < static_cast<long>(nb); ++b) block(b);
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double residual_norm(const CsrMatrix& a, std::span<const double> x, std::span<const double> b, Mode mode) {
  std::vector<double> r(static_cast<std::size_t>(a.rows));
  spmv(a, x, r, mode);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = b[i] - r[i];
    r[i] = d * d;
  }
  return std::sqrt(blocked_sum(r, mode));
}

std::vector<double> dyadic_levels(const std::function<double(int)>& level, int levels, Mode mode) {
  std::vector<double> out(static_cast<std::size_t>(levels), 0.0);
  for_each_index(levels, mode, [&](int m) { out[static_cast<std::size_t>(m)] = level(m); });
  return out;
}

std::vector<pencil::Complex> batched_det(const OrbitModel& model, std::span<const pencil::Complex> lambdas,
                                         Mode mode) {
  std::vector<pencil::Complex> out(lambdas.size());
  for_each_index(static_cast<int>(lambdas.size()), mode,
                 [&](int i) { out[static_cast<std::size_t>(i)] = pencil::char_det(model, lambdas[static_cast<std::size_t>(i)]); });
  return out;
}

std::vector<SweepRow> s_sweep(std::span<const double> s_values, const pencil::SpectrumOptions& opt, Mode mode) {
  std::vector<SweepRow> out(s_values.size());
  for_each_index(static_cast<int>(s_values.size()), mode, [&](int i) {
    const double s = s_values[static_cast<std::size_t>(i)];
    const auto rep = pencil::analyze(halfplane_rotation_model(s / 2.0, s / 2.0), opt);
    SweepRow row;
    row.s = s;
    row.count = rep.argument_principle_count;
    for (const auto& e : rep.eigenvalues) {
      row.eigenvalues.push_back(e.lambda);
      row.proper.push_back(e.proper);
    }
    if (rep.eigenvalues.empty()) {
      row.label = pencil::HalfPlaneCase::NoEigenvalues;
    } else if (rep.has_improper()) {
      row.label = pencil::HalfPlaneCase::Improper;
    } else {
      row.label = pencil::HalfPlaneCase::ProperMinusI;
    }
    const auto oracle = pencil::laplace_halfpi_oracle(s);
    row.oracle = oracle.lambda;
    out[static_cast<std::size_t>(i)] = std::move(row);
  });
  return out;
}

}  // namespace nlbvp::kernels
