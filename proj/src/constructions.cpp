#include "irrfact/constructions.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>

namespace irrfact {

namespace {

constexpr uint64_t kDefaultSeed = 0x5eed0c0ffee1ull;
constexpr int kLambdaSteps = 60;

Matrix ginibre(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(n, n);
  const double scale = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = Complex(gauss(rng), gauss(rng)) * scale;
  return g;
}

double residual_bound(const Matrix& target, const ToleranceConfig& cfg) {
  return cfg.residual_tol * (1.0 + target.norm());
}

void check_product(const Matrix& left, const Matrix& right, const Matrix& target,
                   const ToleranceConfig& cfg, const char* what) {
  const double resid = (left * right - target).norm();
  if (!(resid <= residual_bound(target, cfg))) {
    throw ConstructionError(std::string(what) + ": factor product residual " +
                            std::to_string(resid) + " exceeds tolerance");
  }
}

bool invertible(const Matrix& m, const ToleranceConfig& cfg) {
  return numerical_rank(m, cfg) == m.rows();
}

// Corner inverse helper: X assumed invertible (full numerical rank).
Matrix inverse(const Matrix& m) { return m.partialPivLu().inverse(); }

double max_abs(const Vector& v) {
  double out = 0.0;
  for (Index i = 0; i < v.size(); ++i) out = std::max(out, std::abs(v(i)));
  return out;
}

double min_pair_dist(const Vector& a, const Vector& b) {
  double out = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < a.size(); ++i)
    for (Index j = 0; j < b.size(); ++j) out = std::min(out, std::abs(a(i) - b(j)));
  return out;
}

}  // namespace

IrreducibilityCertificate certify_irreducible(const Matrix& m, const ToleranceConfig& cfg,
                                              const std::string& what) {
  IrreducibilityCertificate cert;
  try {
    cert = is_irreducible(m, cfg);
  } catch (const IndeterminateError& e) {
    throw ConstructionError(what + ": certification indeterminate (" + e.what() + ")");
  }
  if (!cert.verdict) {
    throw ConstructionError(what + ": constructed factor failed irreducibility (commutant dim " +
                            std::to_string(cert.commutant_dim) + ")");
  }
  return cert;
}

Matrix sample_invertible_irreducible(Index k, const std::vector<Vector>& forbidden,
                                     const ToleranceConfig& cfg, std::mt19937_64& rng) {
  double keep_out = 0.0;
  for (const auto& spec : forbidden) keep_out = std::max(keep_out, max_abs(spec));
  const double center = keep_out + 1.5;  // spectrum lands in disk(center, 0.5)
  for (int attempt = 0; attempt < 10; ++attempt) {
    Matrix g = ginibre(k, rng);
    const double gn = op_norm(g);
    Matrix x = center * Matrix::Identity(k, k);
    if (gn > 0) x += (0.5 / gn) * g;
    try {
      if (is_irreducible(x, cfg).verdict) return x;
    } catch (const IndeterminateError&) {
      // resample
    }
  }
  throw SamplingError("invertible irreducible sampling failed 10 times (broken tolerances?)");
}

IrrInvPair resolvent_split(const Matrix& t, const ToleranceConfig& cfg,
                           std::optional<Complex> lambda) {
  IrreducibilityCertificate cert;
  try {
    cert = is_irreducible(t, cfg);
  } catch (const IndeterminateError&) {
    throw;
  }
  if (!cert.verdict) {
    throw PreconditionError("resolvent_split: input is not irreducible");
  }
  if (t.norm() <= cfg.rank_tol) {
    throw PreconditionError("resolvent_split: nonzero input required");
  }
  const Index n = t.rows();
  Complex lam;
  if (lambda) {
    lam = *lambda;
    Vector ev = eigenvalues(t);
    double dist = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) dist = std::min(dist, std::abs(lam - ev(i)));
    if (!(dist > cfg.sep_tol)) {
      throw PreconditionError("resolvent_split: supplied lambda is inside the spectrum");
    }
  } else {
    lam = Complex(2.0 * (1.0 + t.norm()), 0.0);
  }
  Matrix y = lam * Matrix::Identity(n, n) - t;
  // X = T Y^{-1}, solved as Y^T X^T = T^T
  Matrix x = y.transpose().partialPivLu().solve(t.transpose()).transpose();

  check_product(x, y, t, cfg, "resolvent_split");
  certify_irreducible(x, cfg, "resolvent_split left factor");
  certify_irreducible(y, cfg, "resolvent_split right factor");
  return IrrInvPair{x, y};
}

Matrix build_triangular(const Matrix& t11, const Matrix& t21, const Matrix& t22,
                        const ToleranceConfig& cfg) {
  const Index p = t11.rows();
  const Index q = t22.rows();
  if (t11.cols() != p || t22.cols() != q || t21.rows() != q || t21.cols() != p) {
    throw PreconditionError("build_triangular: inconsistent block shapes");
  }
  if (!is_irreducible(t11, cfg).verdict) {
    throw PreconditionError("build_triangular: T11 is not irreducible");
  }
  if (numerical_rank(t21, cfg) != q) {
    throw PreconditionError("build_triangular: T21 does not have full range onto block 2");
  }
  const double sep = spectral_separation(t11, t22);
  if (!(sep > cfg.sep_tol)) {
    throw PreconditionError("build_triangular: spectra of T11 and T22 are not disjoint (separation " +
                            std::to_string(sep) + ")");
  }
  Matrix t = Matrix::Zero(p + q, p + q);
  t.topLeftCorner(p, p) = t11;
  t.bottomLeftCorner(q, p) = t21;
  t.bottomRightCorner(q, q) = t22;
  return t;
}

FactorPair half_exceed(const Matrix& t, const Projection& p,
                       const IrrInvPair& corner_pair, const ToleranceConfig& cfg) {
  const Index n = t.rows();
  if (p.dim() != n) {
    throw PreconditionError("half_exceed: projection dimension mismatch");
  }
  const Index pr = p.rank;
  const Index qr = n - pr;
  if (pr < qr) {
    throw PreconditionError("half_exceed: rank(P) must be at least rank(I-P)");
  }
  const Matrix& pm = p.matrix;
  if ((t * pm - pm * t).norm() > residual_bound(t, cfg)) {
    throw PreconditionError("half_exceed: T does not commute with P");
  }
  const Matrix& a = corner_pair.a;
  const Matrix& b = corner_pair.b;
  if (a.rows() != n || b.rows() != n) {
    throw PreconditionError("half_exceed: corner pair must be ambient matrices supported on P");
  }
  if ((a - pm * a * pm).norm() > residual_bound(a, cfg) ||
      (b - pm * b * pm).norm() > residual_bound(b, cfg)) {
    throw PreconditionError("half_exceed: corner pair not supported on ran P");
  }
  if ((a * b - t * pm).norm() > residual_bound(t, cfg)) {
    throw PreconditionError("half_exceed: corner pair does not factor TP");
  }

  if (qr == 0) {
    FactorPair fp{a, b, t};
    check_product(fp.left, fp.right, t, cfg, "half_exceed");
    certify_irreducible(fp.left, cfg, "half_exceed left factor");
    certify_irreducible(fp.right, cfg, "half_exceed right factor");
    return fp;
  }

  Matrix u1 = range_basis(p);
  Projection pc{Matrix::Identity(n, n) - pm, qr};
  Matrix u2 = range_basis(pc);
  if (numerical_rank(u1.adjoint() * b * u1, cfg) != pr) {
    throw PreconditionError("half_exceed: right corner factor is not invertible on ran P");
  }

  const Matrix t2 = pc.matrix * t * pc.matrix;
  const Vector spec_a = eigenvalues(u1.adjoint() * a * u1);
  const Vector spec_b = eigenvalues(u1.adjoint() * b * u1);
  const Matrix t2c = u2.adjoint() * t2 * u2;
  const Vector spec_t2 = eigenvalues(t2c);

  double lam = 2.0 * (1.0 + t.norm() + a.norm());
  int step = 0;
  for (; step < kLambdaSteps; ++step, lam *= 2.0) {
    bool clear = true;
    for (Index i = 0; i < spec_a.size(); ++i) {
      if (std::abs(Complex(lam, 0) - spec_a(i)) <= cfg.sep_tol) clear = false;
    }
    if (clear && min_pair_dist(spec_b, spec_t2 / lam) > cfg.sep_tol) break;
  }
  if (step == kLambdaSteps) {
    throw SeparationError("half_exceed: no scale separated the right-factor spectra");
  }

  Matrix v = u2 * u1.leftCols(qr).adjoint();  // partial isometry onto ran(I-P)
  Matrix x = a + lam * v + lam * pc.matrix;
  Matrix y = b - v * b + t2 / lam;

  check_product(x, y, t, cfg, "half_exceed");
  certify_irreducible(x, cfg, "half_exceed left factor");
  certify_irreducible(y, cfg, "half_exceed right factor");
  return FactorPair{x, y, t};
}

FactorPair half_exact(const Matrix& t, const Projection& p, const ToleranceConfig& cfg,
                      std::mt19937_64& rng) {
  const Index n = t.rows();
  if (p.dim() != n) {
    throw PreconditionError("half_exact: projection dimension mismatch");
  }
  const Index h = p.rank;
  if (n % 2 != 0 || h != n - h) {
    throw PreconditionError("half_exact: rank(P) must equal rank(I-P); impossible in odd dimension");
  }
  const Matrix& pm = p.matrix;
  if ((t * pm - pm * t).norm() > residual_bound(t, cfg)) {
    throw PreconditionError("half_exact: T does not commute with P");
  }

  Matrix u1 = range_basis(p);
  Projection pc{Matrix::Identity(n, n) - pm, h};
  Matrix u2 = range_basis(pc);
  const Matrix t1c = u1.adjoint() * t * u1;
  const Matrix t2c = u2.adjoint() * t * u2;

  Matrix x1c = sample_invertible_irreducible(h, {}, cfg, rng);
  Matrix x1c_inv = inverse(x1c);
  const Vector spec_x1 = eigenvalues(x1c);
  const Vector spec_x1_inv = eigenvalues(x1c_inv);
  const Vector spec_m2 = eigenvalues(x1c_inv * t2c);

  double lam = 1.0;
  int step = 0;
  for (; step < kLambdaSteps; ++step, lam *= 0.5) {
    const Vector spec_m1 = eigenvalues(lam * t1c * x1c);
    if (min_pair_dist(spec_m1, spec_x1) > cfg.sep_tol &&
        min_pair_dist(spec_x1_inv / lam, spec_m2) > cfg.sep_tol) {
      break;
    }
  }
  if (step == kLambdaSteps) {
    throw SeparationError("half_exact: no scale achieved the two spectral disjointness conditions");
  }

  const Matrix t1 = pm * t * pm;
  const Matrix t2 = pc.matrix * t * pc.matrix;
  const Matrix e21 = u2 * u1.adjoint();
  const Matrix x1 = u1 * x1c * u1.adjoint();
  const Matrix x2 = u2 * x1c * u2.adjoint();
  const Matrix x1_inv = u1 * x1c_inv * u1.adjoint();
  const Matrix x2_inv = u2 * x1c_inv * u2.adjoint();

  Matrix x = lam * t1 * x1 + lam * e21 * x1 + x2;
  Matrix y = x1_inv / lam - x2_inv * e21 + x2_inv * t2;

  check_product(x, y, t, cfg, "half_exact");
  certify_irreducible(x, cfg, "half_exact left factor");
  certify_irreducible(y, cfg, "half_exact right factor");
  return FactorPair{x, y, t};
}

FactorPair half_exact(const Matrix& t, const Projection& p, const ToleranceConfig& cfg) {
  std::mt19937_64 rng(kDefaultSeed);
  return half_exact(t, p, cfg, rng);
}

IrrInvPair closed_range_pair(const IrrInvPair& pair1, const IrrInvPair& pair2,
                             const ToleranceConfig& cfg) {
  const Index k1 = pair1.a.rows();
  const Index k2 = pair2.a.rows();
  Eigen::JacobiSVD<Matrix> svd1(pair1.a, Eigen::ComputeThinV);
  const Index r1 = numerical_rank(pair1.a, cfg);
  if (r1 == 0) {
    throw PreconditionError("closed_range_pair: left factor of pair 1 must be nonzero");
  }
  if (numerical_rank(pair2.a, cfg) == 0) {
    throw PreconditionError("closed_range_pair: left factor of pair 2 must be nonzero");
  }
  if (!invertible(pair1.b, cfg) || !invertible(pair2.b, cfg)) {
    throw PreconditionError("closed_range_pair: right factors must be invertible");
  }

  const double a2_norm = op_norm(pair2.a);
  const double sigma_min = svd1.singularValues()(r1 - 1);
  const Vector spec_b1 = eigenvalues(pair1.b);
  const Vector spec_b2 = eigenvalues(pair2.b);

  double lam = std::max(1.0, 1.01 * std::sqrt(1.0 + 2.0 * a2_norm * a2_norm) / sigma_min);
  int step = 0;
  for (; step < kLambdaSteps; ++step, lam *= 2.0) {
    if (min_pair_dist(spec_b1 / lam, spec_b2) > cfg.sep_tol) break;
  }
  if (step == kLambdaSteps) {
    throw SeparationError("closed_range_pair: right-factor spectra could not be separated");
  }

  // v: initial direction of the coupling isometry; inside ker(a1) when a1 is
  // singular (so the coupling annihilates ran a1*), else the top direction.
  Vector v = r1 < k1 ? svd1.matrixV().col(k1 - 1) : svd1.matrixV().col(0);
  Eigen::JacobiSVD<Matrix> svd2(pair2.a, Eigen::ComputeThinV);
  Vector w = svd2.matrixV().col(0);  // a2 w realizes ||a2||

  const Index m = k1 + k2;
  Matrix a = Matrix::Zero(m, m);
  a.topLeftCorner(k1, k1) = lam * pair1.a;
  a.bottomRightCorner(k2, k2) = pair2.a;
  a.bottomLeftCorner(k2, k1) = (pair2.a * w) * v.adjoint();

  Matrix b = Matrix::Zero(m, m);
  b.topLeftCorner(k1, k1) = pair1.b / lam;
  b.bottomRightCorner(k2, k2) = pair2.b;
  b.bottomLeftCorner(k2, k1) = -w * (v.adjoint() * (pair1.b / lam));

  Matrix target = Matrix::Zero(m, m);
  target.topLeftCorner(k1, k1) = pair1.a * pair1.b;
  target.bottomRightCorner(k2, k2) = pair2.a * pair2.b;

  check_product(a, b, target, cfg, "closed_range_pair");
  certify_irreducible(a, cfg, "closed_range_pair left factor");
  certify_irreducible(b, cfg, "closed_range_pair right factor");
  if (!invertible(b, cfg)) {
    throw ConstructionError("closed_range_pair: combined right factor lost invertibility");
  }
  return IrrInvPair{a, b};
}

IrrInvPair closed_range_chain(const std::vector<IrrInvPair>& pairs,
                              const ToleranceConfig& cfg) {
  if (pairs.empty()) {
    throw PreconditionError("closed_range_chain: empty list");
  }
  IrrInvPair acc = pairs.front();
  for (std::size_t j = 1; j < pairs.size(); ++j) {
    acc = closed_range_pair(acc, pairs[j], cfg);
  }
  return acc;
}

FactorPair add_zero_even(const FactorPair& pair, Index k, const ToleranceConfig& cfg,
                         std::mt19937_64& rng) {
  if (k < 2 || k % 2 != 0) {
    throw PreconditionError("add_zero_even: zero-direction count must be even and at least 2");
  }
  const Index p = pair.target.rows();
  if (pair.target.norm() <= cfg.rank_tol) {
    throw PreconditionError("add_zero_even: target must be nonzero");
  }
  check_product(pair.left, pair.right, pair.target, cfg, "add_zero_even input");

  const Index h = k / 2;
  const Index m = p + k;
  Matrix x1c = sample_invertible_irreducible(
      h, {eigenvalues(pair.left), eigenvalues(pair.right)}, cfg, rng);

  Matrix a = Matrix::Zero(m, m);
  a.topLeftCorner(p, p) = pair.left;
  Matrix b = Matrix::Zero(m, m);
  b.topLeftCorner(p, p) = pair.right;

  Matrix e21 = Matrix::Zero(m, m);
  e21.block(p + h, p, h, h) = Matrix::Identity(h, h);
  Matrix x1 = Matrix::Zero(m, m);
  x1.block(p, p, h, h) = x1c;
  Matrix x2 = Matrix::Zero(m, m);
  x2.block(p + h, p + h, h, h) = x1c;

  // V = w v*: v the top left-singular direction of the right factor
  // (so V B != 0 with the largest margin), w in the second zero half.
  Eigen::JacobiSVD<Matrix> svdb(pair.right, Eigen::ComputeThinU);
  Vector v = Vector::Zero(m);
  v.head(p) = svdb.matrixU().col(0);
  Vector w = Vector::Zero(m);
  w(p + h) = 1.0;
  Matrix vmat = w * v.adjoint();

  Matrix x = a + x2 * vmat + e21 + x2;
  Matrix y = b + x1 - vmat * b - e21;

  Matrix target = Matrix::Zero(m, m);
  target.topLeftCorner(p, p) = pair.target;

  check_product(x, y, target, cfg, "add_zero_even");
  certify_irreducible(x, cfg, "add_zero_even left factor");
  certify_irreducible(y, cfg, "add_zero_even right factor");
  return FactorPair{x, y, target};
}

FactorPair add_zeros(const IrrInvPair& pair, Index k, const ToleranceConfig& cfg,
                     std::mt19937_64& rng) {
  if (k < 0) {
    throw PreconditionError("add_zeros: negative zero-direction count");
  }
  const Index p = pair.a.rows();
  if (numerical_rank(pair.a, cfg) == 0) {
    throw PreconditionError("add_zeros: left factor must be nonzero");
  }
  if (!invertible(pair.b, cfg)) {
    throw PreconditionError("add_zeros: right factor must be invertible");
  }
  Matrix product = pair.a * pair.b;
  if (k == 0) {
    return FactorPair{pair.a, pair.b, product};
  }
  if (k % 2 == 0) {
    return add_zero_even(FactorPair{pair.a, pair.b, product}, k, cfg, rng);
  }

  // absorb one zero direction through the dominant-projection construction
  const Index m = p + 1;
  Matrix t_ext = Matrix::Zero(m, m);
  t_ext.topLeftCorner(p, p) = product;
  Matrix pm = Matrix::Zero(m, m);
  pm.topLeftCorner(p, p) = Matrix::Identity(p, p);
  Projection proj{pm, p};
  Matrix a_ext = Matrix::Zero(m, m);
  a_ext.topLeftCorner(p, p) = pair.a;
  Matrix b_ext = Matrix::Zero(m, m);
  b_ext.topLeftCorner(p, p) = pair.b;

  FactorPair fp = half_exceed(t_ext, proj, IrrInvPair{a_ext, b_ext}, cfg);
  if (k == 1) return fp;
  return add_zero_even(fp, k - 1, cfg, rng);
}

Factorization zero_factor(Index n, const ToleranceConfig& cfg, std::mt19937_64& rng) {
  if (n < 1) {
    throw PreconditionError("zero_factor: dimension must be positive");
  }
  Factorization f;
  f.route = Route::zero_parity;

  if (n == 1) {
    Matrix zero(1, 1), one(1, 1);
    zero << 0.0;
    one << 1.0;
    f.factors = {zero, one};
  } else if (n % 2 == 0) {
    Matrix pm = Matrix::Zero(n, n);
    pm.topLeftCorner(n / 2, n / 2) = Matrix::Identity(n / 2, n / 2);
    FactorPair fp = half_exact(Matrix::Zero(n, n), Projection{pm, n / 2}, cfg, rng);
    f.factors = {fp.left, fp.right};
  } else {
    // J irreducible with J e_1 = 0; the rank-one projection onto e_1 is then
    // factored on its own (one nonzero direction plus n-1 zeros, n-1 even).
    Matrix j = Matrix::Zero(n, n);
    for (Index i = 0; i + 1 < n; ++i) j(i, i + 1) = 1.0;
    Matrix one(1, 1);
    one << 1.0;
    IrrInvPair unit = resolvent_split(one, cfg);
    FactorPair fp = add_zeros(unit, n - 1, cfg, rng);
    f.factors = {j, fp.left, fp.right};
  }

  Matrix prod = f.factors[0];
  for (std::size_t i = 1; i < f.factors.size(); ++i) prod = prod * f.factors[i];
  f.residual = prod.norm();
  for (const auto& factor : f.factors) {
    f.certificates.push_back(certify_irreducible(factor, cfg, "zero_factor factor"));
  }
  if (!(f.residual <= 1e-10)) {
    throw ConstructionError("zero_factor: product norm " + std::to_string(f.residual) +
                            " above bound");
  }
  return f;
}

PartialIsometry nonvanishing_partial_isometry(const std::vector<Projection>& parts,
                                              const Projection& q,
                                              const ToleranceConfig& cfg) {
  if (parts.empty()) {
    throw PreconditionError("nonvanishing_partial_isometry: no parts given");
  }
  if (q.rank < 1) {
    throw PreconditionError("nonvanishing_partial_isometry: Q must be nonzero");
  }
  const Index n = q.dim();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].rank < 1) {
      throw PreconditionError("nonvanishing_partial_isometry: part " + std::to_string(i) +
                              " is zero");
    }
    if (parts[i].dim() != n) {
      throw PreconditionError("nonvanishing_partial_isometry: dimension mismatch");
    }
    for (std::size_t l = 0; l < i; ++l) {
      if ((parts[i].matrix * parts[l].matrix).norm() > cfg.residual_tol * n) {
        throw PreconditionError("nonvanishing_partial_isometry: parts are not orthogonal");
      }
    }
  }

  Matrix z = range_basis(q);
  Matrix t = Matrix::Zero(n, n);
  double weight = 0.5;
  for (const auto& part : parts) {
    Matrix wj = range_basis(part);
    const Index mj = std::min(wj.cols(), z.cols());
    t += weight * wj.leftCols(mj) * z.leftCols(mj).adjoint();
    weight *= 0.5;
  }
  PartialIsometry v = polar_partial_isometry(t, cfg);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if ((parts[i].matrix * v.matrix).norm() <= cfg.rank_tol) {
      throw ConstructionError("nonvanishing_partial_isometry: part " + std::to_string(i) +
                              " annihilates the result");
    }
  }
  return v;
}

FactorPair prop_key_factor(const std::vector<IrrInvPair>& block_pairs,
                           const ToleranceConfig& cfg) {
  const std::size_t nblocks = block_pairs.size();
  if (nblocks < 2) {
    throw PreconditionError("prop_key_factor: at least two blocks required");
  }
  std::vector<Index> dims(nblocks);
  std::vector<Index> offsets(nblocks);
  Index m = 0;
  for (std::size_t j = 0; j < nblocks; ++j) {
    dims[j] = block_pairs[j].a.rows();
    offsets[j] = m;
    m += dims[j];
    if (numerical_rank(block_pairs[j].a, cfg) == 0) {
      throw PreconditionError("prop_key_factor: block " + std::to_string(j) +
                              " has zero left factor");
    }
  }
  if (!invertible(block_pairs[0].b, cfg)) {
    throw PreconditionError("prop_key_factor: block 1 right factor must be invertible");
  }
  if (!invertible(block_pairs[1].a, cfg)) {
    throw PreconditionError("prop_key_factor: block 2 left factor must be invertible");
  }
  if (dims[0] > dims[1]) {
    throw PreconditionError("prop_key_factor: block 1 must not exceed block 2 in dimension");
  }

  std::vector<Vector> spec_a(nblocks), spec_b(nblocks);
  std::vector<double> norm_a(nblocks), norm_b(nblocks);
  for (std::size_t j = 0; j < nblocks; ++j) {
    spec_a[j] = eigenvalues(block_pairs[j].a);
    spec_b[j] = eigenvalues(block_pairs[j].b);
    norm_a[j] = op_norm(block_pairs[j].a);
    norm_b[j] = op_norm(block_pairs[j].b);
  }

  // middle-block scales in [1, 2] with pairwise-distinct scaled norms
  std::vector<double> lam(nblocks, 1.0);
  const double margin = 10.0 * cfg.irr_tol;
  double delta = nblocks > 2 ? 0.5 / static_cast<double>(nblocks) : 0.0;
  bool distinct = false;
  for (int attempt = 0; attempt < 50 && !distinct; ++attempt) {
    for (std::size_t j = 2; j < nblocks; ++j) {
      lam[j] = 1.0 + static_cast<double>(j - 1) * delta;
    }
    distinct = true;
    for (std::size_t j = 2; j < nblocks && distinct; ++j) {
      for (std::size_t l = 2; l < j && distinct; ++l) {
        if (std::abs(lam[j] * norm_a[j] - lam[l] * norm_a[l]) <= margin ||
            std::abs(norm_b[j] / lam[j] - norm_b[l] / lam[l]) <= margin) {
          distinct = false;
        }
      }
    }
    if (!distinct) delta *= 1.0 + 0.137;
  }
  if (!distinct) {
    throw Error("prop_key_factor: could not make middle-block norms distinct");
  }

  // joint escalation: block 2 scaled up (left factors), block 1 scaled down
  // (right factors), until spectra disjoint and all norms pairwise distinct
  int step = 0;
  for (; step < kLambdaSteps; ++step) {
    lam[1] = 2.0 * std::pow(2.0, step);
    lam[0] = 0.5 * std::pow(2.0, -step);
    bool ok = true;
    for (std::size_t j = 0; j < nblocks && ok; ++j) {
      if (j != 1 && min_pair_dist(lam[1] * spec_a[1], lam[j] * spec_a[j]) <= cfg.sep_tol)
        ok = false;
      if (j != 0 && min_pair_dist(spec_b[0] / lam[0], spec_b[j] / lam[j]) <= cfg.sep_tol)
        ok = false;
    }
    for (std::size_t j = 0; j < nblocks && ok; ++j) {
      for (std::size_t l = 0; l < j && ok; ++l) {
        if (std::abs(lam[j] * norm_a[j] - lam[l] * norm_a[l]) <= margin ||
            std::abs(norm_b[j] / lam[j] - norm_b[l] / lam[l]) <= margin) {
          ok = false;
        }
      }
    }
    if (ok) break;
  }
  if (step == kLambdaSteps) {
    throw SeparationError("prop_key_factor: block rescaling search exhausted");
  }

  Matrix afull = Matrix::Zero(m, m);
  Matrix bfull = Matrix::Zero(m, m);
  Matrix target = Matrix::Zero(m, m);
  for (std::size_t j = 0; j < nblocks; ++j) {
    afull.block(offsets[j], offsets[j], dims[j], dims[j]) = lam[j] * block_pairs[j].a;
    bfull.block(offsets[j], offsets[j], dims[j], dims[j]) = block_pairs[j].b / lam[j];
    target.block(offsets[j], offsets[j], dims[j], dims[j]) =
        block_pairs[j].a * block_pairs[j].b;
  }

  // U: isometry of block 1 into block 2
  Matrix u = Matrix::Zero(m, m);
  u.block(offsets[1], offsets[0], dims[0], dims[0]) = Matrix::Identity(dims[0], dims[0]);

  // V: hits every trailing block through the range of its left factor
  Matrix v = Matrix::Zero(m, m);
  if (nblocks > 2) {
    std::vector<Projection> parts;
    for (std::size_t j = 2; j < nblocks; ++j) {
      Projection r = range_projection(block_pairs[j].a.adjoint(), cfg);
      Projection embedded{Matrix::Zero(m, m), r.rank};
      embedded.matrix.block(offsets[j], offsets[j], dims[j], dims[j]) = r.matrix;
      parts.push_back(std::move(embedded));
    }
    Projection p1{Matrix::Zero(m, m), dims[0]};  // identity on block 1
    p1.matrix.block(offsets[0], offsets[0], dims[0], dims[0]) =
        Matrix::Identity(dims[0], dims[0]);
    v = nonvanishing_partial_isometry(parts, p1, cfg).matrix;
  }

  Matrix a2_embedded = Matrix::Zero(m, m);
  a2_embedded.block(offsets[1], offsets[1], dims[1], dims[1]) = lam[1] * block_pairs[1].a;
  Matrix b1_embedded = Matrix::Zero(m, m);
  b1_embedded.block(offsets[0], offsets[0], dims[0], dims[0]) = block_pairs[0].b / lam[0];
  Matrix x3 = Matrix::Zero(m, m);
  for (std::size_t j = 2; j < nblocks; ++j) {
    x3.block(offsets[j], offsets[j], dims[j], dims[j]) = lam[j] * block_pairs[j].a;
  }

  Matrix x = afull + a2_embedded * u + x3 * v;
  Matrix y = bfull - u * b1_embedded - v * b1_embedded;

  check_product(x, y, target, cfg, "prop_key_factor");
  certify_irreducible(x, cfg, "prop_key_factor left factor");
  certify_irreducible(y, cfg, "prop_key_factor right factor");
  return FactorPair{x, y, target};
}

std::string route_name(Route r) {
  switch (r) {
    case Route::resolvent: return "resolvent";
    case Route::half_exact: return "half_exact";
    case Route::half_exceed: return "half_exceed";
    case Route::chain_add_zeros: return "chain+add_zeros";
    case Route::prop_key: return "prop_key";
    case Route::zero_parity: return "zero_parity";
  }
  return "unknown";
}

}  // namespace irrfact
