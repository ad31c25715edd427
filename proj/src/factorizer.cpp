#include "irrfact/factorizer.hpp"

#include <algorithm>
#include <numeric>

namespace irrfact {

namespace {

Matrix ginibre(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(n, n);
  const double scale = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = Complex(gauss(rng), gauss(rng)) * scale;
  return g;
}

void check_input(const Matrix& t, const ToleranceConfig& cfg) {
  cfg.validate();
  if (t.rows() != t.cols() || t.rows() == 0) {
    throw PreconditionError("factor: matrix must be square and nonempty");
  }
  if (!all_finite(t)) {
    throw PreconditionError("factor: matrix has non-finite entries");
  }
}

// 0/1 subset of block ranks summing to half the dimension, if one exists.
std::optional<std::vector<std::size_t>> balanced_subset(const std::vector<Index>& ranks,
                                                        Index half) {
  std::vector<int> from(static_cast<std::size_t>(half) + 1, -2);
  from[0] = -1;
  for (std::size_t j = 0; j < ranks.size(); ++j) {
    for (Index s = half; s >= ranks[j]; --s) {
      if (from[static_cast<std::size_t>(s)] == -2 &&
          from[static_cast<std::size_t>(s - ranks[j])] != -2) {
        from[static_cast<std::size_t>(s)] = static_cast<int>(j);
      }
    }
  }
  if (from[static_cast<std::size_t>(half)] == -2) return std::nullopt;
  std::vector<std::size_t> subset;
  Index s = half;
  while (s > 0) {
    int j = from[static_cast<std::size_t>(s)];
    subset.push_back(static_cast<std::size_t>(j));
    s -= ranks[static_cast<std::size_t>(j)];
  }
  return subset;
}

void finalize(Factorization& f, const Matrix& t, const ToleranceConfig& cfg) {
  Matrix prod = f.factors[0];
  for (std::size_t i = 1; i < f.factors.size(); ++i) prod = prod * f.factors[i];
  f.residual = (prod - t).norm();
  f.certificates.clear();
  for (std::size_t i = 0; i < f.factors.size(); ++i) {
    IrreducibilityCertificate cert;
    try {
      cert = is_irreducible(f.factors[i], cfg);
    } catch (const IndeterminateError& e) {
      throw ConstructionError("factor (route " + route_name(f.route) + "): factor " +
                              std::to_string(i) + " certification indeterminate: " + e.what());
    }
    if (!cert.verdict) {
      throw ConstructionError("factor (route " + route_name(f.route) + "): factor " +
                              std::to_string(i) + " is not irreducible");
    }
    f.certificates.push_back(cert);
  }
  if (!(f.residual <= cfg.residual_tol * (1.0 + t.norm()))) {
    throw ConstructionError("factor (route " + route_name(f.route) + "): residual " +
                            std::to_string(f.residual) + " exceeds tolerance");
  }
}

}  // namespace

Factorization factor(const Matrix& t, const ToleranceConfig& cfg, uint64_t seed) {
  check_input(t, cfg);
  const Index n = t.rows();
  std::mt19937_64 rng(seed);

  if (numerical_rank(t, cfg) == 0) {
    Factorization f = zero_factor(n, cfg, rng);
    finalize(f, Matrix::Zero(n, n), cfg);
    return f;
  }

  Factorization f;
  IrreducibilityCertificate cert = is_irreducible(t, cfg);
  if (cert.verdict && cert.second_singular_gap < 10.0 * cfg.irr_tol) {
    f.warnings.push_back("input is near-reducible (commutant gap " +
                         std::to_string(cert.second_singular_gap) +
                         "); factors may be ill-conditioned");
  }

  if (cert.verdict) {
    IrrInvPair pair = resolvent_split(t, cfg);
    f.route = Route::resolvent;
    f.factors = {pair.a, pair.b};
    finalize(f, t, cfg);
    return f;
  }

  BlockDecomposition bd = block_decomposition(t, cfg, rng);
  const std::size_t m = bd.corners.size();

  std::vector<Index> ranks(m);
  for (std::size_t j = 0; j < m; ++j) ranks[j] = bd.projections[j].rank;

  if (n % 2 == 0) {
    if (auto subset = balanced_subset(ranks, n / 2)) {
      Matrix pm = Matrix::Zero(n, n);
      for (std::size_t j : *subset) pm += bd.projections[j].matrix;
      pm = (pm + pm.adjoint()) / 2.0;
      FactorPair fp = half_exact(t, Projection{pm, n / 2}, cfg, rng);
      f.route = Route::half_exact;
      f.factors = {fp.left, fp.right};
      finalize(f, t, cfg);
      return f;
    }
  }

  // group the nonzero corners (largest first), factor each, chain, then
  // absorb whatever zero corners remain
  const double zero_cut = cfg.rank_tol * (1.0 + t.norm());
  std::vector<std::size_t> nonzero, zero;
  for (std::size_t j = 0; j < m; ++j) {
    (bd.corners[j].norm() <= zero_cut ? zero : nonzero).push_back(j);
  }
  std::stable_sort(nonzero.begin(), nonzero.end(), [&](std::size_t a, std::size_t b) {
    return bd.corners[a].rows() > bd.corners[b].rows();
  });

  std::vector<IrrInvPair> pairs;
  pairs.reserve(nonzero.size());
  for (std::size_t j : nonzero) {
    pairs.push_back(resolvent_split(bd.corners[j], cfg));
  }
  IrrInvPair chained = closed_range_chain(pairs, cfg);

  Index zero_dims = 0;
  for (std::size_t j : zero) zero_dims += bd.corners[j].rows();

  Matrix x_local, y_local;
  if (zero_dims == 0) {
    x_local = chained.a;
    y_local = chained.b;
  } else {
    FactorPair fp = add_zeros(chained, zero_dims, cfg, rng);
    x_local = fp.left;
    y_local = fp.right;
  }

  Matrix u(n, n);
  Index col = 0;
  for (std::size_t j : nonzero) {
    u.middleCols(col, bd.corners[j].rows()) = bd.embeddings[j].matrix;
    col += bd.corners[j].rows();
  }
  for (std::size_t j : zero) {
    u.middleCols(col, bd.corners[j].rows()) = bd.embeddings[j].matrix;
    col += bd.corners[j].rows();
  }

  f.route = Route::chain_add_zeros;
  f.factors = {u * x_local * u.adjoint(), u * y_local * u.adjoint()};
  finalize(f, t, cfg);
  return f;
}

VerifyReport verify(const Matrix& t, const Factorization& f, const ToleranceConfig& cfg) {
  VerifyReport report;
  report.ok = true;
  auto add = [&](VerifyCheck c) {
    report.ok = report.ok && c.passed;
    report.checks.push_back(std::move(c));
  };

  if (f.factors.empty()) {
    add({"factor list nonempty", false, 0.0, "no factors present"});
    return report;
  }

  Matrix prod = f.factors[0];
  for (std::size_t i = 1; i < f.factors.size(); ++i) prod = prod * f.factors[i];
  const double resid = (prod - t).norm();
  const double bound = cfg.residual_tol * (1.0 + t.norm());
  add({"product residual", resid <= bound, bound - resid,
       "residual " + std::to_string(resid) + " against bound " + std::to_string(bound)});

  for (std::size_t i = 0; i < f.factors.size(); ++i) {
    const std::string tag = "factor " + std::to_string(i);
    try {
      IrreducibilityCertificate cert = is_irreducible(f.factors[i], cfg);
      add({tag + " commutant oracle", cert.verdict,
           cert.second_singular_gap - cfg.irr_tol,
           "commutant dimension " + std::to_string(cert.commutant_dim)});
    } catch (const Error& e) {
      add({tag + " commutant oracle", false, 0.0, e.what()});
    }
    try {
      bool irr = burnside_irreducible(f.factors[i], cfg);
      const Index n2 = f.factors[i].rows() * f.factors[i].rows();
      add({tag + " burnside oracle", irr, 0.0,
           irr ? "word span saturates " + std::to_string(n2) + " dimensions"
               : "word span is a proper subalgebra"});
    } catch (const Error& e) {
      add({tag + " burnside oracle", false, 0.0, e.what()});
    }
  }
  return report;
}

Matrix random_irreducible(Index n, uint64_t seed, const ToleranceConfig& cfg) {
  if (n < 1) {
    throw PreconditionError("random_irreducible: dimension must be positive");
  }
  cfg.validate();
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 10; ++attempt) {
    Matrix g = ginibre(n, rng);
    try {
      if (is_irreducible(g, cfg).verdict) return g;
    } catch (const IndeterminateError&) {
      // resample
    }
  }
  throw SamplingError("random_irreducible: 10 consecutive samples failed certification");
}

}  // namespace irrfact
