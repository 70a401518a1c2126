#pragma once

#include <string>
#include <vector>

#include "mostow/liealg.hpp"
#include "mostow/numerics.hpp"
#include "mostow/spdspace.hpp"

namespace mostow {

/// g = k + p given by a partition of the basis indices.
struct CartanSplit {
  LieAlgebraPresentation g;
  std::vector<int> k_idx;
  std::vector<int> p_idx;

  std::vector<Matrix> k_basis() const;
  std::vector<Matrix> p_basis() const;
};

inline constexpr double kMembershipTol = 1e-8;
inline constexpr double kKillingSignTol = 1e-8;
inline constexpr double kCompatTol = 1e-9;

struct SplitReport {
  bool partition_ok = false;
  double kk_residual = 0.0;  // [k,k] in k
  double kp_residual = 0.0;  // [k,p] in p
  double pp_residual = 0.0;  // [p,p] in k
  double killing_k_max = 0.0;  // largest eigenvalue of B on k, relative to max |eig B|
  double killing_p_min = 0.0;  // smallest eigenvalue of B on p, relative
  bool kk_ok = false;
  bool kp_ok = false;
  bool pp_ok = false;
  bool k_negative = false;
  bool p_positive = false;

  bool pass() const { return partition_ok && kk_ok && kp_ok && pp_ok && k_negative && p_positive; }
  /// Name of the clause with the least margin to its threshold.
  std::string weakest_clause() const;
};

SplitReport validate_cartan_split(const CartanSplit& split);

struct CompatibilityResiduals {
  double k_residual = 0.0;  // max ||X^T S + S X|| / ||S|| over k
  double p_residual = 0.0;  // max ||Y^T S - S Y|| / ||S|| over p
};

CompatibilityResiduals compatibility_residuals(const CartanSplit& split, const Matrix& s);

/// The linear map S -> (X^T S + S X)_{X in k}, (Y^T S - S Y)_{Y in p} on
/// sym(n) coordinates, one n^2 row block per basis element.
Matrix compatibility_operator(const CartanSplit& split);

struct PdSearchResult {
  Matrix s;  // best element found, Frobenius-normalized coefficients
  double min_eig = 0.0;
  double max_eig = 0.0;
  bool found = false;
};

/// Maximizes lambda_min(sum c_i K_i) over ||c|| = 1 by projected subgradient
/// ascent from +-K_i and 8 random directions.
PdSearchResult find_positive_definite(const std::vector<Matrix>& span, Rng& rng,
                                      int iterations = 500, int random_starts = 8);

struct CompatibilityCertificate {
  SymMatrix s;  // det S = 1
  double k_residual = 0.0;
  double p_residual = 0.0;
  double min_eig_s = 0.0;
  double eig_ratio = 0.0;  // min / max eigenvalue of S
  int kernel_dim = 0;

  bool pass() const {
    return k_residual <= kCompatTol && p_residual <= kCompatTol && min_eig_s > 0.0;
  }
};

CompatibilityCertificate compatible_metric(const CartanSplit& split, Rng& rng,
                                           double rel_tol = 1e-9);

/// Cartan decomposition of sl(n) defined by an inner product S.
struct AmbientSplit {
  SymMatrix s;
  std::vector<Matrix> a_basis;  // theta = +1: S-antisymmetric
  std::vector<Matrix> s_basis;  // theta = -1: S-symmetric traceless

  /// theta(X) = -S^-1 X^T S
  Matrix theta(const Matrix& x) const;
};

AmbientSplit ambient_split(const SymMatrix& s);

/// P = S^-1; the point of SL(n)/SO(n) whose isotropy contains k.
SpdPoint base_point(const SymMatrix& s);

/// Basis X_i -> g0 X_i g0^-1 with g0 rescaled to |det| = 1.
CartanSplit conjugate_presentation(const Matrix& g0, const CartanSplit& split);

struct TripleSystemBasis {
  std::vector<Matrix> basis;  // Frobenius-orthonormal
  double orthogonality_residual = 0.0;  // max |tr(Y Z)| over Y in n, Z in p
  double commutation_residual = 0.0;    // max ||[Y, Z]|| over Y in n, Z in p
  double triple_residual = 0.0;         // [[n,n],n] in n
  double sum_triple_residual = 0.0;     // [[p+n,p+n],p+n] in p+n

  int dim() const { return static_cast<int>(basis.size()); }
};

TripleSystemBasis normal_triple_system(const CartanSplit& split, const AmbientSplit& amb,
                                       double rel_tol = 1e-9);

/// Largest relative residual of [[a,b],c] outside span(elements), over all
/// triples of the (normalized) elements.
double triple_system_residual(const std::vector<Matrix>& elements);

/// Standard presentations used across the tests and the catalog.
Matrix elementary(int n, int i, int j);

}  // namespace mostow
