#include "irrfact/commutant.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace irrfact {

namespace {

constexpr uint64_t kDefaultSeed = 0x5eed0c0ffee0ull;

void check_square(const Matrix& t) {
  if (t.rows() != t.cols() || t.rows() == 0) {
    throw PreconditionError("commutant: matrix must be square and nonempty");
  }
}

// Singular values (ascending) and right singular vectors of the stacked map
// Q -> (QT - TQ, QT* - T*Q), with T normalized so cutoffs are scale-free.
struct CommutationSvd {
  Eigen::VectorXd sv;   // ascending
  Matrix v;             // n^2 x n^2 right singular vectors, matching sv order
  Index null_dim = 0;   // count below the rank cutoff
};

CommutationSvd commutation_svd(const Matrix& t, const ToleranceConfig& cfg) {
  const Index n = t.rows();
  const double scale = std::max(1.0, t.norm());
  const Matrix tn = t / scale;
  const Matrix tns = tn.adjoint();

  // column-major vec: vec(QM - MQ) = (M^T (x) I - I (x) M) vec(Q)
  Matrix sys = Matrix::Zero(2 * n * n, n * n);
  for (int half = 0; half < 2; ++half) {
    const Matrix& m = half == 0 ? tn : tns;
    const Index off = half * n * n;
    for (Index j = 0; j < n; ++j) {
      for (Index l = 0; l < n; ++l) {
        for (Index i = 0; i < n; ++i) sys(off + j * n + i, l * n + i) += m(l, j);
      }
      sys.block(off + j * n, j * n, n, n) -= m;
    }
  }

  Eigen::JacobiSVD<Matrix> svd(sys, Eigen::ComputeFullV);
  CommutationSvd out;
  out.sv = svd.singularValues().reverse();  // ascending
  out.v = Matrix(n * n, n * n);
  for (Index i = 0; i < n * n; ++i) out.v.col(i) = svd.matrixV().col(n * n - 1 - i);
  const double smax = svd.singularValues()(0);
  const double cut = smax <= cfg.rank_tol ? cfg.rank_tol : cfg.rank_tol * smax;
  Index d = 0;
  while (d < out.sv.size() && out.sv(d) <= cut) ++d;
  out.null_dim = d;
  return out;
}

Index burnside_span_dim(const Matrix& t, const ToleranceConfig& cfg) {
  const Index n = t.rows();
  const Index full = n * n;
  const double scale = t.norm();
  const Matrix tn = scale > 0 ? Matrix(t / scale) : t;
  const Matrix tns = tn.adjoint();

  std::vector<Vector> basis;  // orthonormal vec'd span
  std::vector<Matrix> frontier;

  // Everything is kept at unit scale (||tn||_F = 1, basis orthonormal), so a
  // genuinely new direction has an O(1)-calibrated absolute residual, while a
  // product that cancels exactly leaves only roundoff. Normalizing candidates
  // before projecting would blow that roundoff up into a fake direction.
  auto try_add = [&](const Matrix& w) -> bool {
    Vector v = Eigen::Map<const Vector>(w.data(), full);
    // re-orthogonalize twice for stability
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) v -= b.dot(v) * b;
    }
    double rn = v.norm();
    if (rn <= cfg.irr_tol) return false;
    basis.push_back(v / rn);
    frontier.push_back(Eigen::Map<const Matrix>(basis.back().data(), n, n));
    return true;
  };

  try_add(Matrix::Identity(n, n) / std::sqrt(static_cast<double>(n)));
  const Index cap = 2 * full;
  for (Index round = 0; round < cap && static_cast<Index>(basis.size()) < full; ++round) {
    std::vector<Matrix> prev;
    prev.swap(frontier);
    bool grew = false;
    for (const auto& w : prev) {
      if (static_cast<Index>(basis.size()) >= full) break;
      grew |= try_add(tn * w);
      if (static_cast<Index>(basis.size()) >= full) break;
      grew |= try_add(tns * w);
    }
    if (!grew) break;
  }
  return static_cast<Index>(basis.size());
}

}  // namespace

CommutantBasis commutant_basis(const Matrix& t, const ToleranceConfig& cfg) {
  check_square(t);
  const Index n = t.rows();
  CommutationSvd cs = commutation_svd(t, cfg);
  CommutantBasis out;
  out.dimension = cs.null_dim;
  out.basis.reserve(cs.null_dim);
  for (Index i = 0; i < cs.null_dim; ++i) {
    Vector v = cs.v.col(i);
    out.basis.push_back(Eigen::Map<const Matrix>(v.data(), n, n));
  }
  return out;
}

IrreducibilityCertificate is_irreducible(const Matrix& t, const ToleranceConfig& cfg) {
  check_square(t);
  const Index n = t.rows();
  CommutationSvd cs = commutation_svd(t, cfg);
  const Index d = cs.null_dim;

  if (d < n * n) {
    const double gap = cs.sv(d) - (d > 0 ? cs.sv(d - 1) : 0.0);
    if (gap < cfg.irr_tol) {
      throw IndeterminateError(
          "irreducibility verdict indeterminate: singular-value gap " +
          std::to_string(gap) + " inside tolerance; tighten tolerances or perturb");
    }
  }

  IrreducibilityCertificate cert;
  cert.commutant_dim = d;
  cert.second_singular_gap =
      n * n >= 2 ? cs.sv(1) : std::numeric_limits<double>::infinity();
  cert.verdict = (d == 1);
  cert.burnside_dim = burnside_span_dim(t, cfg);

  if (cert.verdict != (cert.burnside_dim == n * n)) {
    throw IndeterminateError(
        "irreducibility oracles disagree (commutant dim " +
        std::to_string(cert.commutant_dim) + ", word span " +
        std::to_string(cert.burnside_dim) + " of " + std::to_string(n * n) + ")");
  }
  return cert;
}

bool burnside_irreducible(const Matrix& t, const ToleranceConfig& cfg) {
  check_square(t);
  const Index n = t.rows();
  return burnside_span_dim(t, cfg) == n * n;
}

std::optional<Projection> find_nontrivial_projection(const Matrix& t,
                                                     const ToleranceConfig& cfg,
                                                     std::mt19937_64& rng) {
  check_square(t);
  const Index n = t.rows();
  CommutationSvd cs = commutation_svd(t, cfg);
  const Index d = cs.null_dim;
  if (d < n * n) {
    const double gap = cs.sv(d) - (d > 0 ? cs.sv(d - 1) : 0.0);
    if (gap < cfg.irr_tol) {
      throw IndeterminateError("commutant dimension indeterminate");
    }
  }
  if (d <= 1) return std::nullopt;

  std::vector<Matrix> basis;
  for (Index i = 0; i < d; ++i) {
    Vector v = cs.v.col(i);
    basis.push_back(Eigen::Map<const Matrix>(v.data(), n, n));
  }

  const double commute_tol = cfg.residual_tol * (1.0 + t.norm());
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const Complex iunit(0.0, 1.0);

  for (int attempt = 0; attempt < 32; ++attempt) {
    Matrix h = Matrix::Zero(n, n);
    for (const auto& q : basis) {
      h += coeff(rng) * (q + q.adjoint()) / 2.0;
      h += coeff(rng) * ((q - q.adjoint()) / (2.0 * iunit));
    }
    const double hn = h.norm();
    if (hn < 1e-12) continue;
    // reject near-scalar combinations
    Matrix dev = h - (h.trace() / static_cast<double>(n)) * Matrix::Identity(n, n);
    if (dev.norm() < 1e-8 * hn) continue;

    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const auto& ev = es.eigenvalues();
    Index split = 0;
    double best_gap = -1.0;
    for (Index i = 0; i + 1 < n; ++i) {
      double g = ev(i + 1) - ev(i);
      if (g > best_gap) {
        best_gap = g;
        split = i + 1;
      }
    }
    if (best_gap < 1e-10 * (1.0 + hn)) continue;

    Matrix w = es.eigenvectors().leftCols(split);
    Matrix pm = w * w.adjoint();
    const double resid = (pm * t - t * pm).norm() + (pm * t.adjoint() - t.adjoint() * pm).norm();
    if (resid <= commute_tol) {
      return Projection{pm, split};
    }
  }
  throw IndeterminateError(
      "no commuting projection met the residual tolerance after 32 attempts");
}

std::optional<Projection> find_nontrivial_projection(const Matrix& t,
                                                     const ToleranceConfig& cfg) {
  std::mt19937_64 rng(kDefaultSeed);
  return find_nontrivial_projection(t, cfg, rng);
}

namespace {

void decompose_rec(const Matrix& embedding, const Matrix& corner,
                   const ToleranceConfig& cfg, std::mt19937_64& rng,
                   BlockDecomposition& out) {
  IrreducibilityCertificate cert = is_irreducible(corner, cfg);
  if (cert.verdict) {
    const Index n = embedding.rows();
    const Index k = embedding.cols();
    PartialIsometry emb;
    emb.matrix = embedding;
    emb.initial = Projection{Matrix::Identity(k, k), k};
    emb.final = Projection{embedding * embedding.adjoint(), k};
    out.projections.push_back(emb.final);
    out.embeddings.push_back(std::move(emb));
    out.corners.push_back(corner);
    (void)n;
    return;
  }
  std::optional<Projection> p = find_nontrivial_projection(corner, cfg, rng);
  if (!p) {
    throw ConstructionError("block split: reducible corner produced no projection");
  }
  Projection q{Matrix::Identity(corner.rows(), corner.rows()) - p->matrix,
               corner.rows() - p->rank};
  Matrix w1 = range_basis(*p);
  Matrix w2 = range_basis(q);
  decompose_rec(embedding * w1, w1.adjoint() * corner * w1, cfg, rng, out);
  decompose_rec(embedding * w2, w2.adjoint() * corner * w2, cfg, rng, out);
}

}  // namespace

BlockDecomposition block_decomposition(const Matrix& t, const ToleranceConfig& cfg,
                                       std::mt19937_64& rng) {
  check_square(t);
  BlockDecomposition out;
  decompose_rec(Matrix::Identity(t.rows(), t.rows()), t, cfg, rng, out);
  return out;
}

BlockDecomposition block_decomposition(const Matrix& t, const ToleranceConfig& cfg) {
  std::mt19937_64 rng(kDefaultSeed);
  return block_decomposition(t, cfg, rng);
}

}  // namespace irrfact
