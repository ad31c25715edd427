// Top-level pipeline: split along the commutant, factor every irreducible
// corner, chain the corners back together, absorb zero directions, certify.
#pragma once

#include <cstdint>

#include "irrfact/constructions.hpp"
#include "irrfact/factorization.hpp"

namespace irrfact {

// Factor any square T into certified-irreducible factors: two of them, or
// three for the zero matrix in odd dimension >= 3 where two are impossible.
Factorization factor(const Matrix& t, const ToleranceConfig& cfg, uint64_t seed = 0);

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double margin = 0.0;  // how far inside (positive) or outside the bound
  std::string detail;
};

struct VerifyReport {
  bool ok = false;
  std::vector<VerifyCheck> checks;
};

// Independent re-check of a factorization: product residual plus both
// irreducibility oracles on every factor. Failures become report entries,
// never exceptions.
VerifyReport verify(const Matrix& t, const Factorization& f, const ToleranceConfig& cfg);

// Ginibre sample resampled until certified irreducible; deterministic per seed.
Matrix random_irreducible(Index n, uint64_t seed, const ToleranceConfig& cfg);

}  // namespace irrfact
