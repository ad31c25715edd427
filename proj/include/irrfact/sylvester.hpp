// The Sylvester map X -> AX - XB: solving AX - XB = C when the spectra of A
// and B are disjoint, and computing the space of intertwiners {X : AX = XB}.
#pragma once

#include <vector>

#include "irrfact/matrix_core.hpp"

namespace irrfact {

struct SylvesterProblem {
  Matrix a;  // p x p
  Matrix b;  // q x q
  Matrix c;  // p x q right-hand side (rectangular allowed)
};

// Solve AX - XB = C by vectorizing into a pq x pq linear system.
// Requires spectral_separation(a, b) > sep_tol; the map is invertible then.
Matrix sylvester_solve(const SylvesterProblem& prob, const ToleranceConfig& cfg);

// Frobenius-orthonormal basis of {X : AX = XB}, from the near-nullspace of
// the vectorized map. Empty when the spectra are disjoint.
std::vector<Matrix> intertwiner_space(const Matrix& a, const Matrix& b,
                                      const ToleranceConfig& cfg);

}  // namespace irrfact
