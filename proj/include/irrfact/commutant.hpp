// The relative commutant of {T, T*} in M_n(C): basis computation, the two
// irreducibility oracles, and splitting T into irreducible diagonal blocks
// along minimal commutant projections.
#pragma once

#include <optional>
#include <random>
#include <vector>

#include "irrfact/matrix_core.hpp"

namespace irrfact {

// Frobenius-orthonormal basis of {Q : QT = TQ, QT* = T*Q}.
struct CommutantBasis {
  Index dimension = 0;
  std::vector<Matrix> basis;
};

struct IrreducibilityCertificate {
  bool verdict = false;
  Index commutant_dim = 0;
  // second-smallest singular value of the stacked commutation system;
  // large means the nullspace is exactly one-dimensional
  double second_singular_gap = 0.0;
  Index burnside_dim = 0;  // dimension of the span of words in T and T*
};

// Mutually orthogonal projections summing to I, each commuting with T, with
// isometric embeddings onto their ranges and the compressed (irreducible)
// corner matrices.
struct BlockDecomposition {
  std::vector<Projection> projections;      // ambient n x n
  std::vector<PartialIsometry> embeddings;  // n x k_j isometries, VV* = P_j
  std::vector<Matrix> corners;              // k_j x k_j compressions of T
};

CommutantBasis commutant_basis(const Matrix& t, const ToleranceConfig& cfg);

// Verdict from the commutant nullspace, cross-checked against the word-span
// oracle; raises IndeterminateError when the singular-value gap is inside
// irr_tol or the two oracles disagree.
IrreducibilityCertificate is_irreducible(const Matrix& t, const ToleranceConfig& cfg);

// Independent oracle: the unital *-algebra of words in T and T* spans all of
// M_n exactly when T is irreducible.
bool burnside_irreducible(const Matrix& t, const ToleranceConfig& cfg);

// A projection P with P != 0, I commuting with T and T*, or nullopt when T is
// irreducible. Built as a spectral projection of a random Hermitian element
// of the commutant, split at its largest interior eigenvalue gap.
std::optional<Projection> find_nontrivial_projection(const Matrix& t,
                                                     const ToleranceConfig& cfg,
                                                     std::mt19937_64& rng);

std::optional<Projection> find_nontrivial_projection(const Matrix& t,
                                                     const ToleranceConfig& cfg);

// Recursive splitting along commutant projections until every corner is
// irreducible. Reassembling sum_j V_j corner_j V_j* recovers T.
BlockDecomposition block_decomposition(const Matrix& t, const ToleranceConfig& cfg,
                                       std::mt19937_64& rng);

BlockDecomposition block_decomposition(const Matrix& t, const ToleranceConfig& cfg);

}  // namespace irrfact
