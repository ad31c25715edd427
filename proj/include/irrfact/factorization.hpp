// The result type of the factorization pipeline: ordered factors, residual,
// per-factor certificates, and the construction route that produced them.
#pragma once

#include <string>
#include <vector>

#include "irrfact/commutant.hpp"

namespace irrfact {

enum class Route {
  resolvent,        // T irreducible: resolvent splitting
  half_exact,       // balanced commuting projection
  half_exceed,      // dominant commuting projection
  chain_add_zeros,  // per-block split, closed-range chaining, zero absorption
  prop_key,         // block-diagonal product construction
  zero_parity,      // the zero matrix, by dimension parity
};

std::string route_name(Route r);

struct Factorization {
  std::vector<Matrix> factors;  // length 2, or 3 for 0 in odd dimension >= 3
  double residual = 0.0;        // ||product of factors - T||_F
  std::vector<IrreducibilityCertificate> certificates;
  Route route = Route::resolvent;
  std::vector<std::string> warnings;
};

}  // namespace irrfact
