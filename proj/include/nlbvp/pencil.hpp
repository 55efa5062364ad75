#pragma once

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlbvp/geometry.hpp"

namespace nlbvp::pencil {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct ShootingOptions {
  int steps_per_quadrant = 512;
  int max_steps_per_quadrant = 8192;
  double tolerance = 1e-10;
  bool force_shooting = false;  // bypass the Laplace closed form
};

/// The two fundamental solutions with (phi, phi')(0) = (1, 0) and (0, 1),
/// and their first two omega-derivatives, at one omega.
struct BasisValues {
  Complex value[2];
  Complex slope[2];
  Complex curvature[2];
};

BasisValues fundamental_system(const OrbitModel& model, int angle, Complex lambda, double omega,
                               const ShootingOptions& opt = {});
std::vector<BasisValues> fundamental_system(const OrbitModel& model, int angle, Complex lambda,
                                            std::span<const double> omegas,
                                            const ShootingOptions& opt = {});

/// Coefficients (A, B, C) of A phi'' + B phi' + C phi = 0 at omega for mu = i lambda.
std::array<Complex, 3> angular_ode_coefficients(const PrincipalPart& p, Complex lambda,
                                                double omega);

/// 2N x 2N matrix; row 2j + sigma - 1, column 2k + beta.
CMatrix characteristic_matrix(const OrbitModel& model, Complex lambda,
                              const ShootingOptions& opt = {});
/// d/dlambda of characteristic_matrix: closed form for Laplace, central differences otherwise.
CMatrix characteristic_matrix_derivative(const OrbitModel& model, Complex lambda,
                                         const ShootingOptions& opt = {});
Complex char_det(const OrbitModel& model, Complex lambda, const ShootingOptions& opt = {});
/// Product of row 2-norms; |det| / hadamard_scale is in [0, 1].
double hadamard_scale(const CMatrix& m);

/// Taylor coefficients f^(k)(z0)/k!, k = 0..order, by a trapezoid Cauchy integral.
using MatrixFunction = std::function<CMatrix(Complex)>;
std::vector<CMatrix> taylor_coefficients(const MatrixFunction& f, Complex z0, int order,
                                         double radius = 0.2, int nodes = 32);

struct Band {
  double im_min = -1.0;
  double im_max = -1e-6;
  bool closed_below = true;
};

struct Window {
  double re_min = -8.0;
  double re_max = 8.0;
};

struct ContourOptions {
  int initial_segments = 64;
  double max_arg_step = 0.5235987755982988;  // pi/6
  int max_depth = 48;
  double zero_threshold = 1e-13;
  int dilation_retries = 5;
  double bottom_margin = 1e-6;
  ShootingOptions shooting;
};

/// Winding of det over the boundary of [re_min, re_max] x [im_lo, im_hi].
/// Throws ContourOnZero if det (relative) vanishes on the boundary.
int winding_number(const OrbitModel& model, Complex lo, Complex hi, const ContourOptions& opt = {});
/// Same for an arbitrary analytic scalar function with a scale for the zero test.
int winding_number(const std::function<Complex(Complex)>& f,
                   const std::function<double(Complex)>& scale, Complex lo, Complex hi,
                   const ContourOptions& opt = {});

int count_zeros_in_band(const OrbitModel& model, const Band& band = {}, const Window& window = {},
                        const ContourOptions& opt = {});

struct RootEstimate {
  Complex lambda;
  int multiplicity = 0;
  bool resolved = true;
  bool from_edge_scan = false;
  Complex box_lo, box_hi;
  int box_winding = 0;
};

struct RootSearch {
  std::vector<RootEstimate> roots;   // resolved only
  std::vector<RootEstimate> unresolved;
  int winding = 0;                   // over the whole band contour
};

RootSearch find_eigenvalues(const OrbitModel& model, const Band& band = {},
                            const Window& window = {}, const ContourOptions& opt = {});

struct JordanStructure {
  std::vector<int> partial_multiplicities;
  std::vector<CVector> eigenvectors;     // coefficient vectors c in C^{2N}
  std::vector<bool> has_associated;
  std::vector<CVector> longest_chain;    // c^(0), c^(1), ... for the witness
  bool ambiguous = false;
  std::vector<double> singular_values;   // of M(lambda0)
};

/// Jordan structure of an analytic matrix function from its Taylor coefficients.
JordanStructure jordan_structure(const std::vector<CMatrix>& taylor, int algebraic_multiplicity);
JordanStructure jordan_structure(const MatrixFunction& m, Complex lambda0,
                                 int algebraic_multiplicity);
JordanStructure jordan_structure(const OrbitModel& model, Complex lambda0,
                                 int algebraic_multiplicity, const ShootingOptions& opt = {});

struct PencilEigenvalue {
  Complex lambda;
  int algebraic_multiplicity = 1;
  std::vector<int> partial_multiplicities;
  std::vector<CVector> coefficients;
  std::vector<bool> has_associated;
  std::vector<CVector> longest_chain;
  /// eigenvectors[v][j] = samples of phi_j on sample_omegas[j].
  std::vector<std::vector<std::vector<Complex>>> eigenvectors;
  std::vector<std::vector<double>> sample_omegas;
  bool proper = false;
  bool ambiguous = false;
  double polynomial_residual = 0.0;
  std::string note;
};

/// Angular functions phi_j(omega) = sum_beta c_{j beta} psi_beta(omega; lambda).
std::vector<std::vector<Complex>> sample_eigenvector(const OrbitModel& model, Complex lambda,
                                                     const CVector& c,
                                                     const std::vector<std::vector<double>>& omegas,
                                                     const ShootingOptions& opt = {});
std::vector<std::vector<double>> equiangular_samples(const OrbitModel& model, int count = 64);

struct ProperVerdict {
  bool proper = false;
  bool ambiguous = false;
  double polynomial_residual = 0.0;
  std::string reason;
};

/// Least-squares residual of phi against cos^a sin^(k-a), a = 0..k, relative to |phi|.
double homogeneous_polynomial_residual(std::span<const double> omegas,
                                       std::span<const Complex> phi, int degree);

ProperVerdict is_proper(const OrbitModel& model, const PencilEigenvalue& eig);

/// Builds a full PencilEigenvalue (Jordan data, samples, proper flag) from a root.
PencilEigenvalue describe_eigenvalue(const OrbitModel& model, const RootEstimate& root,
                                     const ShootingOptions& opt = {});

struct SpectralReport {
  int orbit_id = 0;
  Band band;
  Window window;
  std::vector<PencilEigenvalue> eigenvalues;
  std::vector<RootEstimate> unresolved;
  int argument_principle_count = 0;
  std::vector<std::string> warnings;

  int enumerated_multiplicity() const;
  bool has_improper() const;
  bool has_proper_minus_i() const;
  bool any_ambiguous() const;
};

struct SpectrumOptions {
  Band band;
  Window window;
  ContourOptions contour;
  bool compare_wide_window = true;
};

SpectralReport analyze(const OrbitModel& model, const SpectrumOptions& opt = {});

enum class HalfPlaneCase { NoEigenvalues = 1, ProperMinusI = 2, Improper = 3 };

struct OracleResult {
  HalfPlaneCase kind;
  std::optional<Complex> lambda;
};

/// Closed-form band spectrum of the half-plane rotation model with s = b1 + b2.
OracleResult laplace_halfpi_oracle(double s);

}  // namespace nlbvp::pencil
