#pragma once

// The symmetric space SL(n)/SO(n) realized as determinant-one SPD matrices
// with the affine-invariant metric <U,V>_P = tr(P^-1 U P^-1 V), and the
// geometry of orbits of a matrix group acting by g.P = g P g^T.

#include <cmath>
#include <optional>
#include <vector>

#include "mostow/liealg.hpp"
#include "mostow/numerics.hpp"

namespace mostow {

class SpdPoint {
 public:
  /// Requires P positive definite with |det P - 1| <= 1e-10.
  explicit SpdPoint(const SymMatrix& p);
  /// Rescales p to unit determinant first.
  static SpdPoint normalized(const SymMatrix& p);

  int size() const { return p_.size(); }
  const Matrix& matrix() const { return p_.matrix(); }
  const SymMatrix& sym() const { return p_; }
  const Matrix& inverse() const { return inv_; }
  const Matrix& sqrt() const { return sqrt_; }
  const Matrix& inv_sqrt() const { return inv_sqrt_; }

  bool operator==(const SpdPoint& other) const { return p_.matrix() == other.p_.matrix(); }

 private:
  SpdPoint(const SymMatrix& p, bool validate);
  SymMatrix p_;
  Matrix inv_;
  Matrix sqrt_;
  Matrix inv_sqrt_;
};

/// A symmetric U with tr(P^-1 U) = 0, based at P.
class TangentVector {
 public:
  TangentVector(SpdPoint base, const Matrix& u);

  const SpdPoint& base() const { return base_; }
  const Matrix& matrix() const { return u_.matrix(); }

 private:
  SpdPoint base_;
  SymMatrix u_;
};

/// <U,V>_P on raw matrices, no base checks.
double trace_metric(const SpdPoint& p, const Matrix& u, const Matrix& v);

SpdPoint act(const Matrix& g, const SpdPoint& p);

/// X.P = X P + P X^T.
TangentVector killing_field(const Matrix& x, const SpdPoint& p);

double metric(const TangentVector& u, const TangentVector& v);
double norm(const TangentVector& u);

class GeodesicSegment {
 public:
  explicit GeodesicSegment(const TangentVector& direction);

  const SpdPoint& base() const { return direction_.base(); }
  const TangentVector& direction() const { return direction_; }

  /// P^1/2 exp(t W) P^1/2 with W = P^-1/2 V P^-1/2, before det normalization.
  Matrix evaluate_matrix(double t) const;
  SpdPoint evaluate(double t) const;
  TangentVector velocity(double t) const;

 private:
  TangentVector direction_;
  Matrix w_;
};

GeodesicSegment geodesic(const TangentVector& v);

TangentVector log_map(const SpdPoint& p, const SpdPoint& q);
/// ||log(P^-1/2 Q P^-1/2)||_F.
double distance(const SpdPoint& p, const SpdPoint& q);

/// Riemann tensor R(U,V)W = -1/4 [[U,V],W] at the identity, carried to P by
/// congruence with P^1/2.
TangentVector curvature(const TangentVector& u, const TangentVector& v,
                        const TangentVector& w);
double sectional_curvature(const TangentVector& u, const TangentVector& v);

/// Levi-Civita derivative of the Killing field X. along U.
TangentVector covariant_derivative_killing(const Matrix& x, const TangentVector& u);

/// Tangent frame and second fundamental form of the orbit G.P, where G is
/// generated by the basis of g.
class OrbitGeometry {
 public:
  static constexpr double kDropTol = 1e-10;
  static constexpr double kAmbiguousTol = 1e-8;

  OrbitGeometry(const LieAlgebraPresentation& g, const SpdPoint& p);

  const SpdPoint& point() const { return p_; }
  int orbit_dim() const { return static_cast<int>(frame_.size()); }

  /// G_ij = <X_i.P, X_j.P>_P over the full basis.
  Matrix tangent_gram() const;
  const std::vector<Matrix>& frame() const { return frame_; }

  /// Removes the orbit-tangent component and the component along P.
  Matrix normal_projection(const Matrix& v) const;
  /// ||tangential part of v|| / ||v||.
  double tangential_fraction(const Matrix& v) const;

  /// II(X_u.P, X_v.P).
  TangentVector second_fundamental_form(int u, int v) const;
  /// II on the orthonormal frame, a and b index frame().
  Matrix frame_second_fundamental_form(int a, int b) const;
  TangentVector mean_curvature() const;
  /// max ||II(e_a, e_b)|| over frame pairs.
  double max_second_fundamental_form() const;

 private:
  LieAlgebraPresentation g_;
  SpdPoint p_;
  std::vector<Matrix> fields_;      // X_i.P
  std::vector<Matrix> frame_;       // orthonormal e_a
  std::vector<Matrix> generators_;  // Y_a in g with Y_a.P = e_a
};

/// Dimension of the normal space of the orbit inside T_P SL(n)/SO(n).
int normal_dim(const OrbitGeometry& orbit);
/// Seeded unit normal vector; empty when the normal space is trivial.
std::optional<TangentVector> random_normal_direction(const OrbitGeometry& orbit, Rng& rng);

TangentVector second_fundamental_form(const LieAlgebraPresentation& g, const SpdPoint& p,
                                      int u, int v);
TangentVector mean_curvature(const LieAlgebraPresentation& g, const SpdPoint& p);

struct VariationalSample {
  double t = 0.0;
  double f = 0.0;               // -<A_{gamma'}(X.), X.> = -<II(X.,X.), gamma'>
  double f_dot_fd = 0.0;        // central difference of f
  double curvature_term = 0.0;  // <R(gamma', X.)gamma', X.>
  double nabla_term = 0.0;      // ||nabla_{gamma'} X.||^2
  double identity_residual() const {
    return std::abs(f_dot_fd - (curvature_term + nabla_term)) / (1.0 + std::abs(f_dot_fd));
  }
};

inline constexpr double kNormalityTol = 1e-6;
inline constexpr double kFdStep = 1e-4;

/// f(t) along gamma for the Killing field of X in g. Throws NotNormal when
/// gamma' has a tangential component above kNormalityTol at a sample.
std::vector<VariationalSample> variational_f(const LieAlgebraPresentation& g, const Matrix& x,
                                             const GeodesicSegment& gamma,
                                             const std::vector<double>& t_samples,
                                             double h = kFdStep);

}  // namespace mostow
