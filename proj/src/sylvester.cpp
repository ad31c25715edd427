#include "irrfact/sylvester.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

namespace irrfact {

namespace {

// I_q (x) A - B^T (x) I_p, acting on column-major vec(X) for X of shape p x q.
Matrix sylvester_operator(const Matrix& a, const Matrix& b) {
  const Index p = a.rows();
  const Index q = b.rows();
  Matrix op = Matrix::Zero(p * q, p * q);
  for (Index j = 0; j < q; ++j) {
    op.block(j * p, j * p, p, p) = a;
    for (Index l = 0; l < q; ++l) {
      for (Index i = 0; i < p; ++i) op(j * p + i, l * p + i) -= b(l, j);
    }
  }
  return op;
}

void check_square(const Matrix& m, const char* name) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw PreconditionError(std::string(name) + " must be square and nonempty");
  }
}

}  // namespace

Matrix sylvester_solve(const SylvesterProblem& prob, const ToleranceConfig& cfg) {
  check_square(prob.a, "sylvester: A");
  check_square(prob.b, "sylvester: B");
  const Index p = prob.a.rows();
  const Index q = prob.b.rows();
  if (prob.c.rows() != p || prob.c.cols() != q) {
    throw PreconditionError("sylvester: C has incompatible shape");
  }
  const double sep = spectral_separation(prob.a, prob.b);
  if (!(sep > cfg.sep_tol)) {
    throw SeparationError("sylvester: spectral separation " + std::to_string(sep) +
                          " below threshold, operator may be singular");
  }

  Matrix op = sylvester_operator(prob.a, prob.b);
  Eigen::Map<const Vector> rhs(prob.c.data(), p * q);
  Vector x = op.partialPivLu().solve(rhs);
  Matrix sol = Eigen::Map<const Matrix>(x.data(), p, q);

  const double resid = (prob.a * sol - sol * prob.b - prob.c).norm();
  if (!(resid <= cfg.residual_tol * (1.0 + prob.c.norm()))) {
    throw Error("sylvester: linear solve residual " + std::to_string(resid) +
                " exceeds tolerance");
  }
  return sol;
}

std::vector<Matrix> intertwiner_space(const Matrix& a, const Matrix& b,
                                      const ToleranceConfig& cfg) {
  check_square(a, "intertwiner: A");
  check_square(b, "intertwiner: B");
  const Index p = a.rows();
  const Index q = b.rows();
  Matrix op = sylvester_operator(a, b);
  Eigen::JacobiSVD<Matrix> svd(op, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double cut = smax <= cfg.rank_tol ? cfg.rank_tol : cfg.rank_tol * smax;

  std::vector<Matrix> basis;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= cut) {
      Vector v = svd.matrixV().col(i);
      basis.push_back(Eigen::Map<const Matrix>(v.data(), p, q));
    }
  }
  if (smax <= cfg.rank_tol && sv.size() == 0) basis.clear();
  return basis;
}

}  // namespace irrfact
