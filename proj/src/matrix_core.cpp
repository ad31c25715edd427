#include "irrfact/matrix_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace irrfact {

void ToleranceConfig::validate() const {
  if (!(rank_tol > 0) || !(sep_tol > 0) || !(residual_tol > 0) || !(irr_tol > 0)) {
    throw PreconditionError("tolerances must be strictly positive");
  }
  if (!(rank_tol < 1)) {
    throw PreconditionError("rank_tol must be below 1");
  }
}

Matrix adjoint(const Matrix& m) { return m.adjoint(); }

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.jacobiSvd().singularValues()(0);
}

bool all_finite(const Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      const Complex& z = m(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  }
  return true;
}

Vector eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw PreconditionError("eigenvalues: matrix must be square");
  }
  if (m.rows() == 0) return Vector(0);
  Eigen::ComplexEigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("eigenvalue iteration did not converge");
  }
  return solver.eigenvalues();
}

Index numerical_rank(const Matrix& m, const ToleranceConfig& cfg) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  if (smax <= cfg.rank_tol) return 0;
  const double cut = cfg.rank_tol * smax;
  Index r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  return r;
}

namespace {

// Shared SVD-with-cutoff: returns rank r and the thin factors.
struct CutSvd {
  Matrix u;  // m x r
  Matrix v;  // n x r
  Eigen::VectorXd sv;
  Index rank;
};

CutSvd cut_svd(const Matrix& t, const ToleranceConfig& cfg) {
  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  Index r = 0;
  if (smax > cfg.rank_tol) {
    const double cut = cfg.rank_tol * smax;
    while (r < sv.size() && sv(r) > cut) ++r;
  }
  return {svd.matrixU().leftCols(r), svd.matrixV().leftCols(r), sv.head(r), r};
}

}  // namespace

Projection range_projection(const Matrix& t, const ToleranceConfig& cfg) {
  CutSvd s = cut_svd(t, cfg);
  Projection p;
  p.matrix = s.u * s.u.adjoint();
  if (s.rank == 0) p.matrix = Matrix::Zero(t.rows(), t.rows());
  p.rank = s.rank;
  return p;
}

PartialIsometry polar_partial_isometry(const Matrix& t, const ToleranceConfig& cfg) {
  CutSvd s = cut_svd(t, cfg);
  PartialIsometry v;
  v.matrix = s.u * s.v.adjoint();
  if (s.rank == 0) v.matrix = Matrix::Zero(t.rows(), t.cols());
  v.initial.matrix = s.v * s.v.adjoint();
  if (s.rank == 0) v.initial.matrix = Matrix::Zero(t.cols(), t.cols());
  v.initial.rank = s.rank;
  v.final.matrix = s.u * s.u.adjoint();
  if (s.rank == 0) v.final.matrix = Matrix::Zero(t.rows(), t.rows());
  v.final.rank = s.rank;
  return v;
}

double spectral_separation(const Matrix& a, const Matrix& b) {
  if (a.rows() == 0 || b.rows() == 0) {
    return std::numeric_limits<double>::infinity();
  }
  Vector ea = eigenvalues(a);
  Vector eb = eigenvalues(b);
  double sep = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < ea.size(); ++i) {
    for (Index j = 0; j < eb.size(); ++j) {
      sep = std::min(sep, std::abs(ea(i) - eb(j)));
    }
  }
  return sep;
}

Projection make_projection(const Matrix& m, const ToleranceConfig& cfg) {
  if (m.rows() != m.cols()) {
    throw PreconditionError("projection: matrix must be square");
  }
  const double scale = 1.0 + m.norm();
  if ((m - m.adjoint()).norm() > cfg.residual_tol * scale) {
    throw PreconditionError("projection: matrix is not self-adjoint");
  }
  if ((m * m - m).norm() > cfg.residual_tol * scale) {
    throw PreconditionError("projection: matrix is not idempotent");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  Index r = 0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > 0.5) ++r;
  }
  return Projection{m, r};
}

Matrix range_basis(const Projection& p) {
  const Index n = p.dim();
  if (p.rank == 0) return Matrix(n, 0);
  Matrix herm = (p.matrix + p.matrix.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  // eigenvalues ascending: the range spans the top `rank` eigenvectors
  return es.eigenvectors().rightCols(p.rank);
}

}  // namespace irrfact
