// Constructive factorization steps. Each operation builds explicit factors
// whose irreducibility is certified by both oracles before returning.
#pragma once

#include <optional>
#include <random>
#include <vector>

#include "irrfact/factorization.hpp"
#include "irrfact/matrix_core.hpp"

namespace irrfact {

// Two certified-irreducible factors of a target.
struct FactorPair {
  Matrix left;
  Matrix right;
  Matrix target;  // left * right
};

// a irreducible and nonzero, b irreducible and invertible; the recurring
// shape fed into the chaining and zero-absorption steps.
struct IrrInvPair {
  Matrix a;
  Matrix b;
};

// T irreducible: returns X = T (lambda I - T)^{-1} and Y = lambda I - T with
// lambda outside the spectrum. X and Y commute, multiply to T, and generate
// the same algebra as T. An explicit lambda may be supplied (it is validated);
// otherwise one well clear of the spectrum is chosen.
IrrInvPair resolvent_split(const Matrix& t, const ToleranceConfig& cfg,
                           std::optional<Complex> lambda = std::nullopt);

// Assemble [[T11, 0], [T21, T22]] under the triangular irreducibility
// criterion: T11 irreducible, T21 of full range onto the second corner,
// spectra of T11 and T22 disjoint. The result is irreducible.
Matrix build_triangular(const Matrix& t11, const Matrix& t21, const Matrix& t22,
                        const ToleranceConfig& cfg);

// TP = PT and rank(P) >= rank(I-P); corner_pair = (a, b) supported on ran P
// (ambient matrices with a b = TP, a irreducible, b invertible on the corner).
// Returns certified factors X = a + lambda V + lambda (I-P),
// Y = b - V b + lambda^{-1} T(I-P).
FactorPair half_exceed(const Matrix& t, const Projection& p,
                       const IrrInvPair& corner_pair, const ToleranceConfig& cfg);

// TP = PT and rank(P) = n/2: factor T with no condition on the corners,
// using a sampled invertible irreducible generator on one half and its
// unitary copy on the other.
FactorPair half_exact(const Matrix& t, const Projection& p, const ToleranceConfig& cfg,
                      std::mt19937_64& rng);
FactorPair half_exact(const Matrix& t, const Projection& p, const ToleranceConfig& cfg);

// Combine factor pairs on two corners into one pair on the direct sum
// (coordinates: corner 1 first). The left factor of pair 1 is rescaled so its
// nonzero singular values dominate pair 2's left factor, and the right
// factors get disjoint spectra.
IrrInvPair closed_range_pair(const IrrInvPair& pair1, const IrrInvPair& pair2,
                             const ToleranceConfig& cfg);

// Left fold of closed_range_pair over a nonempty list of corner pairs.
IrrInvPair closed_range_chain(const std::vector<IrrInvPair>& pairs,
                              const ToleranceConfig& cfg);

// Extend factors of a nonzero T on a p-dimensional corner to factors of
// T (+) 0_k, k even >= 2, by splitting the zero space into two equivalent
// halves carrying a sampled invertible irreducible generator.
FactorPair add_zero_even(const FactorPair& pair, Index k, const ToleranceConfig& cfg,
                         std::mt19937_64& rng);

// Absorb k >= 0 zero directions into an (irreducible, invertible) pair:
// even k directly, odd k via one half_exceed step then the even case.
FactorPair add_zeros(const IrrInvPair& pair, Index k, const ToleranceConfig& cfg,
                     std::mt19937_64& rng);

// Factor the zero matrix: (0, 1) for n = 1, two irreducible factors for even
// n, three (a nilpotent Jordan block times two factors of a rank-one
// projection) for odd n >= 3 where two are impossible.
Factorization zero_factor(Index n, const ToleranceConfig& cfg, std::mt19937_64& rng);

// Block-diagonal product construction on direct-sum coordinates: block 1's
// right factor invertible, block 2's left factor invertible, dim(1) <=
// dim(2). Rescales blocks to pairwise-distinct norms with the needed
// spectral disjointness, then couples the blocks through partial isometries.
FactorPair prop_key_factor(const std::vector<IrrInvPair>& block_pairs,
                           const ToleranceConfig& cfg);

// A partial isometry V from ran(Q) into the span of the given orthogonal
// parts with P_j V != 0 for every part, via a 2^{-j}-weighted sum of
// per-part isometries and a polar decomposition.
PartialIsometry nonvanishing_partial_isometry(const std::vector<Projection>& parts,
                                              const Projection& q,
                                              const ToleranceConfig& cfg);

// Certify irreducibility, mapping failures to ConstructionError (used on the
// outputs of every construction above).
IrreducibilityCertificate certify_irreducible(const Matrix& m, const ToleranceConfig& cfg,
                                              const std::string& what);

// Ginibre sample shifted so its spectrum sits in a disk away from the given
// forbidden eigenvalues, resampled until certified irreducible.
Matrix sample_invertible_irreducible(Index k, const std::vector<Vector>& forbidden,
                                     const ToleranceConfig& cfg, std::mt19937_64& rng);

}  // namespace irrfact
