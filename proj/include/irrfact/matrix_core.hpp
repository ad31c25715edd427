// Dense complex matrix primitives: adjoints, spectra, singular values,
// numerical rank, range projections and polar partial isometries.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace irrfact {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Numerical thresholds governing every rank, separation and verdict decision.
struct ToleranceConfig {
  double rank_tol = 1e-9;      // relative singular-value cutoff
  double sep_tol = 1e-6;       // minimum accepted spectral separation
  double residual_tol = 1e-8;  // factorization residual acceptance
  double irr_tol = 1e-7;       // commutant-dimension gap cutoff

  void validate() const;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A stated hypothesis of an operation does not hold for the given input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Eigenvalue iteration did not converge within its cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Spectra too close: the construction (or solve) is ill-posed at this tolerance.
class SeparationError : public Error {
 public:
  using Error::Error;
};

// A verdict sits inside the tolerance band and cannot be trusted either way.
class IndeterminateError : public Error {
 public:
  using Error::Error;
};

// A construction finished but its output failed verification.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

// Repeated random sampling failed certification (broken tolerances).
class SamplingError : public Error {
 public:
  using Error::Error;
};

// Self-adjoint idempotent together with its rank.
struct Projection {
  Matrix matrix;
  Index rank = 0;

  Index dim() const { return matrix.rows(); }
};

// V with V*V = initial and VV* = final. The matrix may be rectangular
// (an isometric embedding of C^k into C^n is a partial isometry too).
struct PartialIsometry {
  Matrix matrix;
  Projection initial;
  Projection final;
};

Matrix adjoint(const Matrix& m);

// Largest singular value.
double op_norm(const Matrix& m);

bool all_finite(const Matrix& m);

// All n eigenvalues with multiplicity, unordered.
Vector eigenvalues(const Matrix& m);

// Count of singular values above rank_tol * sigma_max; 0 for the
// (numerically) zero matrix, whose sigma_max falls below rank_tol itself.
Index numerical_rank(const Matrix& m, const ToleranceConfig& cfg);

// Orthogonal projection onto the span of the retained left singular vectors.
Projection range_projection(const Matrix& t, const ToleranceConfig& cfg);

// V from the SVD of T with singular directions below the cutoff discarded:
// T = V H with H psd, V*V = R(T*), VV* = R(T).
PartialIsometry polar_partial_isometry(const Matrix& t, const ToleranceConfig& cfg);

// min |lambda_i(a) - mu_j(b)| over all eigenvalue pairs; +inf if either is 0x0.
double spectral_separation(const Matrix& a, const Matrix& b);

// Validate the projection laws on m within residual_tol and count its rank.
Projection make_projection(const Matrix& m, const ToleranceConfig& cfg);

// Orthonormal basis (dim x rank isometry) of the range of a projection.
Matrix range_basis(const Projection& p);

}  // namespace irrfact
