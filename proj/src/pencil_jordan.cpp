#include <fmt/format.h>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

#include "nlbvp/errors.hpp"
#include "nlbvp/pencil.hpp"

namespace nlbvp::pencil {
namespace {

constexpr double kRankCut = 1e-8;
constexpr double kMinGap = 1e2;
constexpr double kChainTol = 1e-7;

struct RankInfo {
  Eigen::Index rank = 0;
  bool ambiguous = false;
};

RankInfo numerical_rank(const Eigen::VectorXd& sv) {
  RankInfo out;
  if (sv.size() == 0 || sv(0) == 0.0) return out;
  const double top = sv(0);
  while (out.rank < sv.size() && sv(out.rank) / top >= kRankCut) ++out.rank;
  if (out.rank > 0 && out.rank < sv.size()) {
    const double dropped = sv(out.rank);
    out.ambiguous = dropped > 0.0 && sv(out.rank - 1) / dropped < kMinGap;
  }
  return out;
}

CMatrix block_toeplitz(const std::vector<CMatrix>& t, int p) {
  const Eigen::Index n = t[0].rows();
  CMatrix l = CMatrix::Zero(p * n, p * n);
  for (int a = 0; a < p; ++a) {
    for (int b = 0; b <= a; ++b) l.block(a * n, b * n, n, n) = t[static_cast<std::size_t>(a - b)];
  }
  return l;
}

CVector normalized(CVector v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const Complex phase = v(imax) / std::abs(v(imax));
  v /= phase;
  v /= v.norm();
  return v;
}

}  // namespace

JordanStructure jordan_structure(const std::vector<CMatrix>& taylor, int algebraic_multiplicity) {
  if (taylor.empty()) throw std::invalid_argument("jordan_structure: no Taylor coefficients");
  const int kappa = std::max(1, algebraic_multiplicity);
  if (static_cast<int>(taylor.size()) < kappa + 1) {
    throw std::invalid_argument("jordan_structure: need Taylor coefficients up to the multiplicity");
  }
  const CMatrix& t0 = taylor[0];
  const Eigen::Index n = t0.rows();
  JordanStructure out;

  Eigen::JacobiSVD<CMatrix> svd0(t0, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd sv0 = svd0.singularValues();
  out.singular_values.assign(sv0.data(), sv0.data() + sv0.size());
  const RankInfo r0 = numerical_rank(sv0);
  out.ambiguous = r0.ambiguous;
  if (r0.rank == n) {
    throw NumericalError("jordan_structure: matrix is not singular at the given point");
  }

  // dim ker L_p = sum_i min(m_i, p) for the lower block Toeplitz matrix L_p.
  std::vector<Eigen::Index> kernel_dims{0};
  Eigen::Index found = 0;
  for (int p = 1; p <= kappa; ++p) {
    const CMatrix l = block_toeplitz(taylor, p);
    Eigen::JacobiSVD<CMatrix> svd(l);
    const RankInfo r = numerical_rank(svd.singularValues());
    out.ambiguous = out.ambiguous || r.ambiguous;
    kernel_dims.push_back(l.rows() - r.rank);
    const Eigen::Index chains_at_least_p = kernel_dims[static_cast<std::size_t>(p)] -
                                           kernel_dims[static_cast<std::size_t>(p - 1)];
    found += chains_at_least_p;
    if (chains_at_least_p == 0 || found >= kappa) break;
  }
  // Lengths: count chains of length >= p for successive p.
  std::vector<Eigen::Index> at_least;
  for (std::size_t p = 1; p < kernel_dims.size(); ++p) {
    at_least.push_back(kernel_dims[p] - kernel_dims[p - 1]);
  }
  at_least.push_back(0);
  for (std::size_t p = 0; p + 1 < at_least.size(); ++p) {
    const Eigen::Index exact = at_least[p] - at_least[p + 1];
    for (Eigen::Index i = 0; i < exact; ++i) out.partial_multiplicities.push_back(static_cast<int>(p + 1));
  }
  std::sort(out.partial_multiplicities.rbegin(), out.partial_multiplicities.rend());

  const CMatrix range = svd0.matrixU().leftCols(r0.rank);
  const CMatrix pinv = svd0.matrixV().leftCols(r0.rank) *
                       sv0.head(r0.rank).cwiseInverse().asDiagonal() *
                       svd0.matrixU().leftCols(r0.rank).adjoint();
  const double scale = sv0(0) + (taylor.size() > 1 ? taylor[1].norm() : 0.0);
  auto solvable = [&](const CVector& rhs) {
    const CVector residual = rhs - range * (range.adjoint() * rhs);
    return residual.norm() <= kChainTol * scale;
  };

  for (Eigen::Index k = r0.rank; k < n; ++k) {
    const CVector c = normalized(svd0.matrixV().col(k));
    out.eigenvectors.push_back(c);
    out.has_associated.push_back(taylor.size() > 1 && solvable(taylor[1] * c));
  }
  const bool any_assoc =
      std::find(out.has_associated.begin(), out.has_associated.end(), true) != out.has_associated.end();
  const int longest = out.partial_multiplicities.empty() ? 1 : out.partial_multiplicities.front();
  if (any_assoc != (longest > 1)) out.ambiguous = true;

  // Chain from the first eigenvector with an associated vector (or the first one).
  std::size_t start = 0;
  for (std::size_t i = 0; i < out.has_associated.size(); ++i) {
    if (out.has_associated[i]) {
      start = i;
      break;
    }
  }
  out.longest_chain.push_back(out.eigenvectors[start]);
  for (int p = 1; p < longest && p < static_cast<int>(taylor.size()); ++p) {
    CVector rhs = CVector::Zero(n);
    for (int q = 1; q <= p; ++q) {
      rhs += taylor[static_cast<std::size_t>(q)] * out.longest_chain[static_cast<std::size_t>(p - q)];
    }
    if (!solvable(rhs)) break;
    out.longest_chain.push_back(-pinv * rhs);
  }
  return out;
}

JordanStructure jordan_structure(const MatrixFunction& m, Complex lambda0, int algebraic_multiplicity) {
  return jordan_structure(taylor_coefficients(m, lambda0, std::max(1, algebraic_multiplicity)),
                          algebraic_multiplicity);
}

JordanStructure jordan_structure(const OrbitModel& model, Complex lambda0, int algebraic_multiplicity,
                                 const ShootingOptions& opt) {
  const MatrixFunction f = [&](Complex z) { return characteristic_matrix(model, z, opt); };
  return jordan_structure(f, lambda0, algebraic_multiplicity);
}

std::vector<std::vector<double>> equiangular_samples(const OrbitModel& model, int count) {
  std::vector<std::vector<double>> out;
  for (double w : model.half_openings) {
    std::vector<double> row(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) row[static_cast<std::size_t>(i)] = -w + 2.0 * w * i / (count - 1);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::vector<Complex>> sample_eigenvector(const OrbitModel& model, Complex lambda,
                                                     const CVector& c,
                                                     const std::vector<std::vector<double>>& omegas,
                                                     const ShootingOptions& opt) {
  std::vector<std::vector<Complex>> out;
  for (int j = 0; j < model.n_angles(); ++j) {
    const auto& ws = omegas[static_cast<std::size_t>(j)];
    const auto basis = fundamental_system(model, j, lambda, ws, opt);
    std::vector<Complex> phi;
    phi.reserve(ws.size());
    for (const auto& b : basis) phi.push_back(c(2 * j) * b.value[0] + c(2 * j + 1) * b.value[1]);
    out.push_back(std::move(phi));
  }
  return out;
}

double homogeneous_polynomial_residual(std::span<const double> omegas,
                                       std::span<const Complex> phi, int degree) {
  const auto n = static_cast<Eigen::Index>(omegas.size());
  CMatrix basis(n, degree + 1);
  CVector rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = std::cos(omegas[static_cast<std::size_t>(i)]);
    const double s = std::sin(omegas[static_cast<std::size_t>(i)]);
    for (int a = 0; a <= degree; ++a) basis(i, a) = std::pow(c, a) * std::pow(s, degree - a);
    rhs(i) = phi[static_cast<std::size_t>(i)];
  }
  const double norm = rhs.norm();
  if (norm == 0.0) return 0.0;
  const CVector x = basis.colPivHouseholderQr().solve(rhs);
  return (basis * x - rhs).norm() / norm;
}

ProperVerdict is_proper(const OrbitModel& /*model*/, const PencilEigenvalue& eig) {
  ProperVerdict v;
  const double k = std::round(-eig.lambda.imag());
  if (!(std::abs(eig.lambda.real()) < 1e-8 && k >= 1.0 && std::abs(eig.lambda.imag() + k) < 1e-8)) {
    v.reason = "lambda is not of the form -ik";
    return v;
  }
  const bool chains = std::any_of(eig.partial_multiplicities.begin(), eig.partial_multiplicities.end(),
                                  [](int m) { return m > 1; }) ||
                      std::find(eig.has_associated.begin(), eig.has_associated.end(), true) !=
                          eig.has_associated.end();
  if (chains) {
    v.reason = "an eigenvector has an associated vector";
    return v;
  }
  for (const auto& vec : eig.eigenvectors) {
    for (std::size_t j = 0; j < vec.size(); ++j) {
      v.polynomial_residual = std::max(
          v.polynomial_residual,
          homogeneous_polynomial_residual(eig.sample_omegas[j], vec[j], static_cast<int>(k)));
    }
  }
  if (v.polynomial_residual < 1e-6) {
    v.proper = true;
    v.reason = "power solutions are homogeneous polynomials";
  } else if (v.polynomial_residual <= 1e-3) {
    v.ambiguous = true;
    v.reason = fmt::format("polynomial residual {:.3g} in the review zone [1e-6, 1e-3]",
                           v.polynomial_residual);
  } else {
    v.reason = "power solution is not a polynomial";
  }
  return v;
}

PencilEigenvalue describe_eigenvalue(const OrbitModel& model, const RootEstimate& root,
                                     const ShootingOptions& opt) {
  PencilEigenvalue e;
  e.lambda = root.lambda;
  e.algebraic_multiplicity = root.multiplicity;
  const JordanStructure js = jordan_structure(model, root.lambda, root.multiplicity, opt);
  e.partial_multiplicities = js.partial_multiplicities;
  e.coefficients = js.eigenvectors;
  e.has_associated = js.has_associated;
  e.longest_chain = js.longest_chain;
  e.sample_omegas = equiangular_samples(model);
  for (const auto& c : js.eigenvectors) {
    e.eigenvectors.push_back(sample_eigenvector(model, root.lambda, c, e.sample_omegas, opt));
  }
  int total = 0;
  for (int m : e.partial_multiplicities) total += m;
  const ProperVerdict pv = is_proper(model, e);
  e.proper = pv.proper;
  e.polynomial_residual = pv.polynomial_residual;
  e.ambiguous = js.ambiguous || pv.ambiguous;
  e.note = pv.reason;
  if (total != e.algebraic_multiplicity) {
    e.ambiguous = true;
    e.note += fmt::format("; partial multiplicities sum to {} but winding gives {}", total,
                          e.algebraic_multiplicity);
  }
  return e;
}

}  // namespace nlbvp::pencil
