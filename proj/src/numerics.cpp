#include "mostow/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mostow/error.hpp"

namespace mostow {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateBasis: return "DegenerateBasis";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::ZeroAlgebra: return "ZeroAlgebra";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyKernel: return "EmptyKernel";
    case ErrorCode::NoPositiveDefiniteElement: return "NoPositiveDefiniteElement";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::IncompatibleInputs: return "IncompatibleInputs";
    case ErrorCode::NotTraceless: return "NotTraceless";
    case ErrorCode::BaseMismatch: return "BaseMismatch";
    case ErrorCode::DegeneratePlane: return "DegeneratePlane";
    case ErrorCode::DegenerateOrbit: return "DegenerateOrbit";
    case ErrorCode::NotNormal: return "NotNormal";
    case ErrorCode::EmptyFixedSet: return "EmptyFixedSet";
    case ErrorCode::ConstraintViolated: return "ConstraintViolated";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

SymMatrix::SymMatrix(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "symmetric matrix must be square, got " + std::to_string(a.rows()) +
                    "x" + std::to_string(a.cols()));
  }
  m_ = 0.5 * (a + a.transpose());
}

SymMatrix SymMatrix::identity(int n) { return SymMatrix(Matrix::Identity(n, n)); }
SymMatrix SymMatrix::zero(int n) { return SymMatrix(Matrix::Zero(n, n)); }

bool all_finite(const Matrix& m) { return m.allFinite(); }

EigenDecomposition sym_eig(const SymMatrix& a) {
  if (!all_finite(a.matrix())) {
    throw Error(ErrorCode::NonFinite, "sym_eig input has NaN/Inf entries");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  return {solver.eigenvalues(), solver.eigenvectors()};
}

SymMatrix spd_map(const SymMatrix& p, SpdFunction f) {
  const EigenDecomposition ed = sym_eig(p);
  const Vector& lam = ed.eigenvalues;
  const int n = p.size();
  if (f != SpdFunction::Exp && n > 0) {
    const double lmax = lam(n - 1);
    if (!(lmax > 0.0) || !(lam(0) > 1e-12 * lmax)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "min eigenvalue " + std::to_string(lam(0)) + " vs max " +
                      std::to_string(lmax));
    }
  }
  Vector mapped(n);
  for (int i = 0; i < n; ++i) {
    const double l = lam(i);
    switch (f) {
      case SpdFunction::Exp: mapped(i) = std::exp(l); break;
      case SpdFunction::Log: mapped(i) = std::log(l); break;
      case SpdFunction::Sqrt: mapped(i) = std::sqrt(l); break;
      case SpdFunction::InvSqrt: mapped(i) = 1.0 / std::sqrt(l); break;
      case SpdFunction::Inv: mapped(i) = 1.0 / l; break;
    }
  }
  const Matrix& q = ed.eigenvectors;
  return SymMatrix(q * mapped.asDiagonal() * q.transpose());
}

Matrix matrix_exp(const Matrix& x) {
  if (x.rows() != x.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix_exp needs a square matrix");
  }
  if (!all_finite(x)) {
    throw Error(ErrorCode::NonFinite, "matrix_exp input has NaN/Inf entries");
  }
  const int n = static_cast<int>(x.rows());
  // Scale until ||x / 2^s||_1 <= 1/4; 18 Taylor terms then leave a remainder
  // below 0.25^19 / 19! ~ 1e-29.
  const double norm = x.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  }
  const Matrix a = x / std::ldexp(1.0, squarings);
  Matrix term = Matrix::Identity(n, n);
  Matrix sum = term;
  for (int k = 1; k <= 18; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

Matrix nullspace(const Matrix& m, double rel_tol) {
  const Eigen::Index cols = m.cols();
  if (cols == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(cols, cols);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  const double cutoff = rel_tol * smax;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) ++rank;
  }
  return svd.matrixV().rightCols(cols - rank);
}

int sym_dim(int n) { return n * (n + 1) / 2; }

Vector sym_to_coords(const Matrix& s) {
  const int n = static_cast<int>(s.rows());
  Vector c(sym_dim(n));
  int idx = 0;
  for (int i = 0; i < n; ++i) c(idx++) = s(i, i);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      c(idx++) = std::numbers::sqrt2 * 0.5 * (s(i, j) + s(j, i));
    }
  }
  return c;
}

SymMatrix coords_to_sym(const Vector& c, int n) {
  if (c.size() != sym_dim(n)) {
    throw Error(ErrorCode::DimensionMismatch, "coordinate vector length");
  }
  Matrix s = Matrix::Zero(n, n);
  int idx = 0;
  for (int i = 0; i < n; ++i) s(i, i) = c(idx++);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = c(idx++) / std::numbers::sqrt2;
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return SymMatrix(s);
}

double span_residual(const std::vector<Matrix>& basis, const Matrix& target,
                     Vector* coeffs) {
  const Eigen::Index len = target.size();
  if (basis.empty()) {
    if (coeffs) *coeffs = Vector();
    return target.norm();
  }
  Matrix a(len, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (basis[j].size() != len) {
      throw Error(ErrorCode::DimensionMismatch, "span_residual basis size");
    }
    a.col(static_cast<Eigen::Index>(j)) = basis[j].reshaped();
  }
  const Vector b = target.reshaped();
  const Vector x = a.colPivHouseholderQr().solve(b);
  if (coeffs) *coeffs = x;
  return (a * x - b).norm();
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

Matrix Rng::normal_matrix(int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = normal();
  }
  return m;
}

}  // namespace mostow
