#pragma once

// Reference computations written independently of the library: plain
// elimination, textbook Christoffel symbols, closed forms.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix unit(int n, int i, int j) {
  Matrix m = Matrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

/// Gaussian elimination with partial pivoting to reduced row echelon form;
/// returns a basis of the kernel read off the free columns.
inline std::vector<Vector> rref_kernel(Matrix a, double tol = 1e-9) {
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int best = r;
    for (int i = r + 1; i < rows; ++i) {
      if (std::abs(a(i, c)) > std::abs(a(best, c))) best = i;
    }
    if (std::abs(a(best, c)) <= tol * scale) continue;
    a.row(r).swap(a.row(best));
    a.row(r) /= a(r, c);
    for (int i = 0; i < rows; ++i) {
      if (i != r && a(i, c) != 0.0) a.row(i) -= a(i, c) * a.row(r);
    }
    pivots.push_back(c);
    ++r;
  }
  std::vector<Vector> kernel;
  for (int free = 0; free < cols; ++free) {
    if (std::find(pivots.begin(), pivots.end(), free) != pivots.end()) continue;
    Vector v = Vector::Zero(cols);
    v(free) = 1.0;
    for (std::size_t k = 0; k < pivots.size(); ++k) v(pivots[k]) = -a(static_cast<int>(k), free);
    kernel.push_back(v);
  }
  return kernel;
}

/// Compatibility constraints on all n^2 entries of S, plus S = S^T, as a
/// dense system; k elements need X^T S + S X = 0, p elements Y^T S = S Y.
inline Matrix brute_compat_system(int n, const std::vector<Matrix>& k,
                                  const std::vector<Matrix>& p) {
  std::vector<Vector> rows;
  auto add = [&](const Matrix& x, double sign) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        // (X^T S)_{ij} + sign (S X)_{ij} = sum_l X_{li} S_{lj} + sign S_{il} X_{lj}
        Vector row = Vector::Zero(n * n);
        for (int l = 0; l < n; ++l) {
          row(l * n + j) += x(l, i);
          row(i * n + l) += sign * x(l, j);
        }
        rows.push_back(row);
      }
    }
  };
  for (const Matrix& x : k) add(x, 1.0);
  for (const Matrix& y : p) add(y, -1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Vector row = Vector::Zero(n * n);
      row(i * n + j) = 1.0;
      row(j * n + i) = -1.0;
      rows.push_back(row);
    }
  }
  Matrix a(static_cast<int>(rows.size()), n * n);
  for (std::size_t i = 0; i < rows.size(); ++i) a.row(static_cast<int>(i)) = rows[i].transpose();
  return a;
}

inline Matrix unflatten(const Vector& v, int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = v(i * n + j);
  }
  return m;
}

inline double metric(const Matrix& p, const Matrix& u, const Matrix& v) {
  const Matrix pi = p.inverse();
  return (pi * u * pi * v).trace();
}

/// Christoffel form of the trace metric in the flat chart of the SPD cone:
/// nabla_U W = D_U W + Gamma(U, W), Gamma(U, W) = -1/2 (U P^-1 W + W P^-1 U).
/// For constant fields R(U,V)W = (D_U Gamma)(V,W) - (D_V Gamma)(U,W)
///                                + Gamma(U, Gamma(V,W)) - Gamma(V, Gamma(U,W)).
inline Matrix connection_curvature(const Matrix& p, const Matrix& u, const Matrix& v,
                                   const Matrix& w) {
  const Matrix pi = p.inverse();
  auto gamma = [&](const Matrix& a, const Matrix& b) -> Matrix {
    return -0.5 * (a * pi * b + b * pi * a);
  };
  auto d_gamma = [&](const Matrix& dir, const Matrix& a, const Matrix& b) -> Matrix {
    const Matrix dpi = -pi * dir * pi;
    return -0.5 * (a * dpi * b + b * dpi * a);
  };
  return d_gamma(u, v, w) - d_gamma(v, u, w) + gamma(u, gamma(v, w)) - gamma(v, gamma(u, w));
}

/// Matrix exponential of a symmetric matrix through its eigenbasis.
inline Matrix sym_exp(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

inline Matrix sym_sqrt(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  return es.eigenvectors() * es.eigenvalues().array().sqrt().matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

/// gamma(t) for the affine-invariant metric, from P with velocity V.
inline Matrix geodesic(const Matrix& p, const Matrix& v, double t) {
  const Matrix r = sym_sqrt(p);
  const Matrix ri = r.inverse();
  return r * sym_exp(t * ri * v * ri) * r;
}

/// 1/2 d/dt ||X.gamma(t)||^2 by central differences of the closed-form norm.
inline double half_norm_derivative(const Matrix& x, const Matrix& p, const Matrix& v, double t,
                                   double h = 1e-5) {
  auto sq = [&](double s) {
    const Matrix q = geodesic(p, v, s);
    const Matrix f = x * q + q * x.transpose();
    return metric(q, f, f);
  };
  return 0.25 * (sq(t + h) - sq(t - h)) / h;
}

/// ||X.P||_P^2 for X = E_02 + E_20 (or E_12 + E_21) at P = diag(a, a, a^-2).
inline double so21_field_norm_sq(double a) { return 2.0 * a * a * a + 4.0 + 2.0 / (a * a * a); }

/// Killing form of sl(n): B(X, Y) = 2n tr(XY).
inline double sl_killing(int n, const Matrix& x, const Matrix& y) {
  return 2.0 * n * (x * y).trace();
}

/// Coordinates of m in span(basis) by normal equations on vec(.).
inline Vector coords(const std::vector<Matrix>& basis, const Matrix& m) {
  const int d = static_cast<int>(basis.size());
  const int nn = static_cast<int>(m.size());
  Matrix a(nn, d);
  for (int i = 0; i < d; ++i) a.col(i) = basis[i].reshaped();
  return a.colPivHouseholderQr().solve(m.reshaped().eval());
}

/// Killing matrix from ad matrices built one bracket at a time.
inline Matrix killing_by_brackets(const std::vector<Matrix>& basis) {
  const int d = static_cast<int>(basis.size());
  std::vector<Matrix> ad(d, Matrix::Zero(d, d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      ad[i].col(j) = coords(basis, basis[i] * basis[j] - basis[j] * basis[i]);
    }
  }
  Matrix b(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) b(i, j) = (ad[i] * ad[j]).trace();
  }
  return b;
}

}  // namespace oracle
