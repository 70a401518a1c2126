#include "mostow/cartan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mostow/error.hpp"

namespace mostow {

namespace {

std::vector<Matrix> select(const LieAlgebraPresentation& g, const std::vector<int>& idx) {
  std::vector<Matrix> out;
  out.reserve(idx.size());
  for (int i : idx) {
    if (i < 0 || i >= g.dim()) {
      throw Error(ErrorCode::IndexOutOfRange, "split index " + std::to_string(i));
    }
    out.push_back(g.basis[i]);
  }
  return out;
}

// Frobenius modified Gram-Schmidt; drops elements whose residual falls below
// tol relative to the largest input norm.
std::vector<Matrix> orthonormalize(const std::vector<Matrix>& in, double tol = 1e-10) {
  double scale = 0.0;
  for (const Matrix& m : in) scale = std::max(scale, m.norm());
  std::vector<Matrix> out;
  if (scale == 0.0) return out;
  for (const Matrix& m : in) {
    Matrix r = m;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Matrix& q : out) r -= (r.array() * q.array()).sum() * q;
    }
    const double nr = r.norm();
    if (nr > tol * scale) out.push_back(r / nr);
  }
  return out;
}

double projection_residual(const std::vector<Matrix>& onb, const Matrix& t) {
  Matrix r = t;
  for (int pass = 0; pass < 2; ++pass) {
    for (const Matrix& q : onb) r -= (r.array() * q.array()).sum() * q;
  }
  return r.norm();
}

double membership(const std::vector<Matrix>& left, const std::vector<Matrix>& right,
                  const std::vector<Matrix>& target) {
  const std::vector<Matrix> onb = orthonormalize(target);
  double worst = 0.0;
  for (const Matrix& a : left) {
    for (const Matrix& b : right) {
      const double scale = a.norm() * b.norm();
      if (scale == 0.0) continue;
      worst = std::max(worst, projection_residual(onb, bracket(a, b)) / scale);
    }
  }
  return worst;
}

Vector block_eigenvalues(const SymMatrix& b, const std::vector<int>& idx) {
  const int m = static_cast<int>(idx.size());
  Matrix block(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) block(i, j) = b(idx[i], idx[j]);
  }
  return sym_eig(SymMatrix(block)).eigenvalues;
}

double lambda_min(const Matrix& s, Vector* eigvec = nullptr, double* lmax = nullptr) {
  const EigenDecomposition ed = sym_eig(SymMatrix(s));
  if (eigvec) *eigvec = ed.eigenvectors.col(0);
  if (lmax) *lmax = ed.eigenvalues(ed.eigenvalues.size() - 1);
  return ed.eigenvalues(0);
}

Matrix combine(const std::vector<Matrix>& span, const Vector& c) {
  Matrix s = Matrix::Zero(span[0].rows(), span[0].cols());
  for (std::size_t i = 0; i < span.size(); ++i) s += c(static_cast<Eigen::Index>(i)) * span[i];
  return s;
}

}  // namespace

std::vector<Matrix> CartanSplit::k_basis() const { return select(g, k_idx); }
std::vector<Matrix> CartanSplit::p_basis() const { return select(g, p_idx); }

Matrix elementary(int n, int i, int j) {
  Matrix e = Matrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

std::string SplitReport::weakest_clause() const {
  if (!partition_ok) return "index partition";
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::pair<double, const char*> scores[] = {
      {kk_residual / kMembershipTol, "[k,k] in k"},
      {kp_residual / kMembershipTol, "[k,p] in p"},
      {pp_residual / kMembershipTol, "[p,p] in k"},
      {killing_k_max < 0.0 ? kKillingSignTol / -killing_k_max : inf,
       "Killing form negative definite on k"},
      {killing_p_min > 0.0 ? kKillingSignTol / killing_p_min : inf,
       "Killing form positive definite on p"},
  };
  const auto* worst = std::max_element(std::begin(scores), std::end(scores),
                                       [](const auto& a, const auto& b) { return a.first < b.first; });
  return worst->second;
}

SplitReport validate_cartan_split(const CartanSplit& split) {
  SplitReport r;
  const int d = split.g.dim();
  std::vector<int> seen(d, 0);
  r.partition_ok = true;
  for (const auto* idx : {&split.k_idx, &split.p_idx}) {
    for (int i : *idx) {
      if (i < 0 || i >= d || seen[i]++) r.partition_ok = false;
    }
  }
  r.partition_ok = r.partition_ok && std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
  if (!r.partition_ok) return r;

  const std::vector<Matrix> k = split.k_basis();
  const std::vector<Matrix> p = split.p_basis();
  r.kk_residual = membership(k, k, k);
  r.kp_residual = membership(k, p, p);
  r.pp_residual = membership(p, p, k);
  r.kk_ok = r.kk_residual <= kMembershipTol;
  r.kp_ok = r.kp_residual <= kMembershipTol;
  r.pp_ok = r.pp_residual <= kMembershipTol;

  const SymMatrix b = killing_matrix(structure_constants(split.g));
  const double scale = d > 0 ? sym_eig(b).eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  if (!split.k_idx.empty()) {
    const Vector ev = block_eigenvalues(b, split.k_idx);
    r.killing_k_max = scale > 0.0 ? ev.maxCoeff() / scale : 0.0;
    r.k_negative = r.killing_k_max < -kKillingSignTol;
  } else {
    r.k_negative = true;
  }
  if (!split.p_idx.empty()) {
    const Vector ev = block_eigenvalues(b, split.p_idx);
    r.killing_p_min = scale > 0.0 ? ev.minCoeff() / scale : 0.0;
    r.p_positive = r.killing_p_min > kKillingSignTol;
  } else {
    r.p_positive = true;
  }
  return r;
}

Matrix compatibility_operator(const CartanSplit& split) {
  const int n = split.g.n;
  const int cols = sym_dim(n);
  const int blocks = static_cast<int>(split.k_idx.size() + split.p_idx.size());
  Matrix m(static_cast<Eigen::Index>(blocks) * n * n, cols);
  const std::vector<Matrix> k = split.k_basis();
  const std::vector<Matrix> p = split.p_basis();
  for (int c = 0; c < cols; ++c) {
    const Matrix e = coords_to_sym(Vector::Unit(cols, c), n).matrix();
    int row = 0;
    for (const Matrix& x : k) {
      m.col(c).segment(row, n * n) = (x.transpose() * e + e * x).reshaped();
      row += n * n;
    }
    for (const Matrix& y : p) {
      m.col(c).segment(row, n * n) = (y.transpose() * e - e * y).reshaped();
      row += n * n;
    }
  }
  return m;
}

CompatibilityResiduals compatibility_residuals(const CartanSplit& split, const Matrix& s) {
  CompatibilityResiduals r;
  const double ns = s.norm();
  for (const Matrix& x : split.k_basis()) {
    r.k_residual = std::max(r.k_residual, (x.transpose() * s + s * x).norm() / ns);
  }
  for (const Matrix& y : split.p_basis()) {
    r.p_residual = std::max(r.p_residual, (y.transpose() * s - s * y).norm() / ns);
  }
  return r;
}

PdSearchResult find_positive_definite(const std::vector<Matrix>& span, Rng& rng, int iterations,
                                      int random_starts) {
  PdSearchResult best;
  const int m = static_cast<int>(span.size());
  if (m == 0) return best;
  best.min_eig = -std::numeric_limits<double>::infinity();

  std::vector<Vector> starts;
  for (int i = 0; i < m; ++i) {
    starts.push_back(Vector::Unit(m, i));
    starts.push_back(-Vector::Unit(m, i));
  }
  for (int r = 0; r < random_starts; ++r) {
    Vector c(m);
    for (int i = 0; i < m; ++i) c(i) = rng.normal();
    starts.push_back(c.normalized());
  }

  for (Vector c : starts) {
    for (int it = 1; it <= iterations; ++it) {
      const Matrix s = combine(span, c);
      Vector v;
      double lmax = 0.0;
      const double lmin = lambda_min(s, &v, &lmax);
      if (lmin > best.min_eig) {
        best.min_eig = lmin;
        best.max_eig = lmax;
        best.s = s;
      }
      Vector grad(m);
      for (int i = 0; i < m; ++i) grad(i) = v.dot(span[i] * v);
      c += grad / std::sqrt(static_cast<double>(it));
      c.normalize();
    }
  }
  best.found = best.max_eig > 0.0 && best.min_eig > 1e-6 * best.max_eig;
  return best;
}

CompatibilityCertificate compatible_metric(const CartanSplit& split, Rng& rng, double rel_tol) {
  const int n = split.g.n;
  const Matrix kernel = nullspace(compatibility_operator(split), rel_tol);
  const int m = static_cast<int>(kernel.cols());
  if (m == 0) {
    const SplitReport rep = validate_cartan_split(split);
    throw Error(ErrorCode::EmptyKernel,
                "no symmetric S satisfies the invariance constraints; weakest input clause: " +
                    rep.weakest_clause());
  }
  std::vector<Matrix> span;
  for (int i = 0; i < m; ++i) span.push_back(coords_to_sym(kernel.col(i), n).matrix());

  Matrix s;
  bool found = false;
  if (m == 1) {
    for (double sign : {1.0, -1.0}) {
      double lmax = 0.0;
      const double lmin = lambda_min(sign * span[0], nullptr, &lmax);
      if (lmax > 0.0 && lmin > 1e-6 * lmax) {
        s = sign * span[0];
        found = true;
        break;
      }
    }
  } else {
    const PdSearchResult res = find_positive_definite(span, rng);
    found = res.found;
    s = res.s;
  }
  if (!found) {
    const SplitReport rep = validate_cartan_split(split);
    throw Error(ErrorCode::NoPositiveDefiniteElement,
                "kernel of dimension " + std::to_string(m) +
                    " has no positive-definite element; weakest input clause: " +
                    rep.weakest_clause());
  }

  const Vector lam = sym_eig(SymMatrix(s)).eigenvalues;
  const double logdet = lam.array().log().sum();
  s *= std::exp(-logdet / n);

  CompatibilityCertificate cert;
  cert.s = SymMatrix(s);
  const CompatibilityResiduals res = compatibility_residuals(split, cert.s.matrix());
  cert.k_residual = res.k_residual;
  cert.p_residual = res.p_residual;
  const Vector ev = sym_eig(cert.s).eigenvalues;
  cert.min_eig_s = ev(0);
  cert.eig_ratio = ev(0) / ev(ev.size() - 1);
  cert.kernel_dim = m;
  return cert;
}

Matrix AmbientSplit::theta(const Matrix& x) const {
  const Matrix sinv = s.matrix().inverse();
  return -sinv * x.transpose() * s.matrix();
}

AmbientSplit ambient_split(const SymMatrix& s) {
  const Vector ev = sym_eig(s).eigenvalues;
  if (ev.size() == 0 || !(ev(0) > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite, "ambient inner product must be positive definite");
  }
  const int n = s.size();
  AmbientSplit amb;
  amb.s = s;
  std::vector<Matrix> standard;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) standard.push_back(elementary(n, i, j));
    }
  }
  for (int i = 0; i + 1 < n; ++i) {
    standard.push_back(elementary(n, i, i) - elementary(n, i + 1, i + 1));
  }
  std::vector<Matrix> plus;
  std::vector<Matrix> minus;
  for (const Matrix& x : standard) {
    const Matrix tx = amb.theta(x);
    plus.push_back(0.5 * (x + tx));
    minus.push_back(0.5 * (x - tx));
  }
  amb.a_basis = orthonormalize(plus);
  amb.s_basis = orthonormalize(minus);
  return amb;
}

SpdPoint base_point(const SymMatrix& s) {
  return SpdPoint(spd_map(s, SpdFunction::Inv));
}

CartanSplit conjugate_presentation(const Matrix& g0, const CartanSplit& split) {
  const int n = split.g.n;
  if (g0.rows() != n || g0.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "conjugating matrix size");
  }
  const Vector sigma = Eigen::JacobiSVD<Matrix>(g0).singularValues();
  if (!g0.allFinite() || !(sigma(n - 1) > 1e-12 * sigma(0))) {
    throw Error(ErrorCode::Singular, "conjugating matrix is singular");
  }
  const Eigen::PartialPivLU<Matrix> lu(g0);
  const Matrix g = g0 * std::pow(std::abs(lu.determinant()), -1.0 / n);
  const Matrix ginv = g.partialPivLu().inverse();
  CartanSplit out = split;
  for (Matrix& x : out.g.basis) x = g * x * ginv;
  return out;
}

double triple_system_residual(const std::vector<Matrix>& elements) {
  std::vector<Matrix> unit;
  for (const Matrix& e : elements) {
    const double ne = e.norm();
    if (ne > 0.0) unit.push_back(e / ne);
  }
  const std::vector<Matrix> onb = orthonormalize(unit);
  double worst = 0.0;
  for (const Matrix& a : unit) {
    for (const Matrix& b : unit) {
      const Matrix ab = bracket(a, b);
      for (const Matrix& c : unit) {
        worst = std::max(worst, projection_residual(onb, bracket(ab, c)));
      }
    }
  }
  return worst;
}

TripleSystemBasis normal_triple_system(const CartanSplit& split, const AmbientSplit& amb,
                                       double rel_tol) {
  const CompatibilityResiduals cr = compatibility_residuals(split, amb.s.matrix());
  if (cr.k_residual > kCompatTol || cr.p_residual > kCompatTol) {
    std::ostringstream msg;
    msg << "split is not compatible with the ambient inner product (k residual "
        << cr.k_residual << ", p residual " << cr.p_residual << ")";
    throw Error(ErrorCode::IncompatibleInputs, msg.str());
  }
  const int n = split.g.n;
  std::vector<Matrix> p;
  for (const Matrix& z : split.p_basis()) p.push_back(z / z.norm());
  const int m = static_cast<int>(amb.s_basis.size());
  const int rows_per = n * n + 1;
  Matrix c(static_cast<Eigen::Index>(p.size()) * rows_per, m);
  for (int j = 0; j < m; ++j) {
    const Matrix& b = amb.s_basis[j];
    for (std::size_t z = 0; z < p.size(); ++z) {
      const Eigen::Index row = static_cast<Eigen::Index>(z) * rows_per;
      c.col(j).segment(row, n * n) = bracket(b, p[z]).reshaped();
      c(row + n * n, j) = (b * p[z]).trace();
    }
  }
  const Matrix ker = nullspace(c, rel_tol);
  std::vector<Matrix> raw;
  for (Eigen::Index col = 0; col < ker.cols(); ++col) {
    Matrix y = Matrix::Zero(n, n);
    for (int j = 0; j < m; ++j) y += ker(j, col) * amb.s_basis[j];
    raw.push_back(y);
  }
  TripleSystemBasis out;
  out.basis = orthonormalize(raw);
  for (const Matrix& y : out.basis) {
    for (const Matrix& z : p) {
      out.orthogonality_residual = std::max(out.orthogonality_residual, std::abs((y * z).trace()));
      out.commutation_residual = std::max(out.commutation_residual, bracket(y, z).norm());
    }
  }
  out.triple_residual = triple_system_residual(out.basis);
  std::vector<Matrix> sum = p;
  sum.insert(sum.end(), out.basis.begin(), out.basis.end());
  out.sum_triple_residual = triple_system_residual(sum);
  return out;
}

}  // namespace mostow
