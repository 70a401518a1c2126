#pragma once

#include <optional>
#include <vector>

#include "mostow/numerics.hpp"

namespace mostow {

/// A matrix Lie algebra g inside sl(n, R), given by an ordered basis.
struct LieAlgebraPresentation {
  int n = 0;
  std::vector<Matrix> basis;

  int dim() const { return static_cast<int>(basis.size()); }
};

/// c(i, j, k) is the coefficient of X_k in [X_i, X_j].
class StructureConstants {
 public:
  StructureConstants() = default;
  explicit StructureConstants(int d);

  int dim() const { return d_; }
  double operator()(int i, int j, int k) const { return c_[index(i, j, k)]; }

  /// Sets c(i,j,.) and c(j,i,.) = -c(i,j,.) together; i == j is ignored.
  void set_pair(int i, int j, const Vector& coeffs);

  /// Max |Jacobi sum| over all (i,j,k,l), divided by ||c||^2.
  double jacobi_residual() const;
  double norm() const;

  double closure_residual = 0.0;

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * d_ + j) * d_ + k;
  }
  int d_ = 0;
  std::vector<double> c_;
};

Matrix bracket(const Matrix& x, const Matrix& y);

/// Least-squares expansion of every [X_i, X_j] in the basis. closure_residual
/// is the largest unexplained Frobenius norm, relative to max(1, ||[X_i,X_j]||).
StructureConstants structure_constants(const LieAlgebraPresentation& g);

/// Matrix of ad X_i acting on basis coordinates: column j holds c(i, j, .).
Matrix adjoint_matrix(const StructureConstants& sc, int i);

/// B_ij = tr(ad X_i ad X_j), computed from structure constants only.
SymMatrix killing_matrix(const StructureConstants& sc);

struct SemisimplicityVerdict {
  bool semisimple = false;
  double ratio = 0.0;  // min |eig B| / max |eig B|
};

/// Cartan's criterion: B nondegenerate.
SemisimplicityVerdict is_semisimple(const SymMatrix& killing, double rel_tol = 1e-8);

struct ValidationReport {
  double trace_max = 0.0;        // max |tr X_i| / max(1, ||X_i||)
  double independence = 0.0;     // min eig / max eig of the basis Gram matrix
  std::optional<double> closure_residual;  // absent when the basis is degenerate
  bool traceless_ok = false;
  bool independent_ok = false;
  bool closed_ok = false;

  bool pass() const { return traceless_ok && independent_ok && closed_ok; }
};

inline constexpr double kTraceTol = 1e-12;
inline constexpr double kIndependenceTol = 1e-10;
inline constexpr double kClosureTol = 1e-9;

ValidationReport validate_presentation(const LieAlgebraPresentation& g);

/// Frobenius Gram matrix of the vectorized basis.
Matrix basis_gram(const std::vector<Matrix>& basis);

}  // namespace mostow
