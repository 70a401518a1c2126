#include "mostow/liealg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mostow/error.hpp"

namespace mostow {

StructureConstants::StructureConstants(int d)
    : d_(d), c_(static_cast<std::size_t>(d) * d * d, 0.0) {}

void StructureConstants::set_pair(int i, int j, const Vector& coeffs) {
  if (i == j) return;
  for (int k = 0; k < d_; ++k) {
    c_[index(i, j, k)] = coeffs(k);
    c_[index(j, i, k)] = -coeffs(k);
  }
}

double StructureConstants::norm() const {
  double s = 0.0;
  for (double v : c_) s += v * v;
  return std::sqrt(s);
}

double StructureConstants::jacobi_residual() const {
  const double scale = std::max(1.0, norm() * norm());
  double worst = 0.0;
  // [[X_i,X_j],X_k] + [[X_j,X_k],X_i] + [[X_k,X_i],X_j] = 0, coefficient of X_l.
  for (int i = 0; i < d_; ++i) {
    for (int j = i + 1; j < d_; ++j) {
      for (int k = j + 1; k < d_; ++k) {
        for (int l = 0; l < d_; ++l) {
          double s = 0.0;
          for (int m = 0; m < d_; ++m) {
            s += (*this)(i, j, m) * (*this)(m, k, l) +
                 (*this)(j, k, m) * (*this)(m, i, l) +
                 (*this)(k, i, m) * (*this)(m, j, l);
          }
          worst = std::max(worst, std::abs(s));
        }
      }
    }
  }
  return worst / scale;
}

Matrix bracket(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols() || x.rows() != x.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "bracket operands must be equal-size square matrices");
  }
  return x * y - y * x;
}

Matrix basis_gram(const std::vector<Matrix>& basis) {
  const int d = static_cast<int>(basis.size());
  Matrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      g(i, j) = g(j, i) = (basis[i].array() * basis[j].array()).sum();
    }
  }
  return g;
}

namespace {

double independence_ratio(const Matrix& gram) {
  if (gram.rows() == 0) return 1.0;
  const Vector ev = sym_eig(SymMatrix(gram)).eigenvalues;
  const double lmax = ev(ev.size() - 1);
  if (!(lmax > 0.0)) return 0.0;
  return ev(0) / lmax;
}

}  // namespace

StructureConstants structure_constants(const LieAlgebraPresentation& g) {
  const int d = g.dim();
  for (const Matrix& x : g.basis) {
    if (x.rows() != g.n || x.cols() != g.n) {
      throw Error(ErrorCode::DimensionMismatch, "basis element is not n x n");
    }
  }
  const Matrix gram = basis_gram(g.basis);
  if (independence_ratio(gram) <= kIndependenceTol) {
    throw Error(ErrorCode::DegenerateBasis, "basis Gram matrix is singular");
  }
  Matrix a(static_cast<Eigen::Index>(g.n) * g.n, d);
  for (int k = 0; k < d; ++k) a.col(k) = g.basis[k].reshaped();
  const Eigen::LDLT<Matrix> normal(gram);

  StructureConstants sc(d);
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const Vector b = bracket(g.basis[i], g.basis[j]).reshaped();
      const Vector c = normal.solve(a.transpose() * b);
      sc.set_pair(i, j, c);
      const double r = (a * c - b).norm() / std::max(1.0, b.norm());
      worst = std::max(worst, r);
    }
  }
  sc.closure_residual = worst;
  return sc;
}

Matrix adjoint_matrix(const StructureConstants& sc, int i) {
  const int d = sc.dim();
  if (i < 0 || i >= d) {
    throw Error(ErrorCode::IndexOutOfRange,
                "basis index " + std::to_string(i) + " outside [0," + std::to_string(d) + ")");
  }
  Matrix ad(d, d);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) ad(k, j) = sc(i, j, k);
  }
  return ad;
}

SymMatrix killing_matrix(const StructureConstants& sc) {
  if (sc.closure_residual > 1e-8) {
    throw Error(ErrorCode::NotClosed,
                "closure residual " + std::to_string(sc.closure_residual) + " exceeds 1e-8");
  }
  const int d = sc.dim();
  std::vector<Matrix> ads;
  ads.reserve(d);
  for (int i = 0; i < d; ++i) ads.push_back(adjoint_matrix(sc, i));
  Matrix b(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      // tr(A B) = sum A^T .* B
      b(i, j) = b(j, i) = (ads[i].transpose().array() * ads[j].array()).sum();
    }
  }
  return SymMatrix(b);
}

SemisimplicityVerdict is_semisimple(const SymMatrix& killing, double rel_tol) {
  if (killing.size() == 0) {
    throw Error(ErrorCode::ZeroAlgebra, "semisimplicity of the zero algebra is undefined");
  }
  const Vector ev = sym_eig(killing).eigenvalues.cwiseAbs();
  const double lmax = ev.maxCoeff();
  const double lmin = ev.minCoeff();
  SemisimplicityVerdict v;
  v.ratio = lmax > 0.0 ? lmin / lmax : 0.0;
  v.semisimple = lmax > 0.0 && lmin > rel_tol * lmax;
  return v;
}

ValidationReport validate_presentation(const LieAlgebraPresentation& g) {
  ValidationReport r;
  for (const Matrix& x : g.basis) {
    if (x.rows() != g.n || x.cols() != g.n) {
      throw Error(ErrorCode::DimensionMismatch, "basis element is not n x n");
    }
    r.trace_max = std::max(r.trace_max, std::abs(x.trace()) / std::max(1.0, x.norm()));
  }
  r.traceless_ok = r.trace_max <= kTraceTol;
  r.independence = independence_ratio(basis_gram(g.basis));
  r.independent_ok = r.independence > kIndependenceTol;
  if (r.independent_ok) {
    r.closure_residual = structure_constants(g).closure_residual;
    r.closed_ok = *r.closure_residual <= kClosureTol;
  }
  return r;
}

}  // namespace mostow
