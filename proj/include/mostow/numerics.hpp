#pragma once

// Dense kernels shared by every other module: symmetric eigensolver,
// spectral functions of SPD matrices, the matrix exponential, SVD nullspace
// and a portable seeded generator.

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace mostow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Real symmetric matrix. Construction symmetrizes the input, so
/// entries(i, j) == entries(j, i) holds bit for bit.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& a);

  static SymMatrix identity(int n);
  static SymMatrix zero(int n);

  int size() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  Matrix m_;
};

struct EigenDecomposition {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // orthogonal, columns
};

EigenDecomposition sym_eig(const SymMatrix& a);

enum class SpdFunction { Exp, Log, Sqrt, InvSqrt, Inv };

/// Q diag(f(lambda)) Q^T. Exp accepts any symmetric input; the others
/// require min eigenvalue > 1e-12 * max eigenvalue.
SymMatrix spd_map(const SymMatrix& p, SpdFunction f);

/// Scaling and squaring with a Taylor core.
Matrix matrix_exp(const Matrix& x);

/// Orthonormal basis (columns) of the numerical kernel of m: right singular
/// vectors whose singular value is <= rel_tol * sigma_max.
Matrix nullspace(const Matrix& m, double rel_tol = 1e-9);

/// Coordinates of a symmetric matrix in the Frobenius-orthonormal basis
/// {E_ii} u {(E_ij + E_ji)/sqrt 2, i < j}; length n(n+1)/2.
Vector sym_to_coords(const Matrix& s);
SymMatrix coords_to_sym(const Vector& c, int n);
int sym_dim(int n);

/// Least-squares fit of target in span(basis) under the Frobenius inner
/// product. Returns the Frobenius norm of the unexplained part; coefficients
/// are written to coeffs when non-null.
double span_residual(const std::vector<Matrix>& basis, const Matrix& target,
                     Vector* coeffs = nullptr);

bool all_finite(const Matrix& m);

/// Deterministic generator whose output does not depend on the standard
/// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  double normal();                       // Box-Muller
  Matrix normal_matrix(int rows, int cols);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mostow
