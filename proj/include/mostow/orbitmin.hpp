#pragma once

// Minimal orbits by descent: restrict to the fixed set of the compact part
// K, where all orbits are homothetic, and minimize the log orbit-volume
// density there. A critical point has vanishing mean curvature.

#include <vector>

#include "mostow/cartan.hpp"
#include "mostow/numerics.hpp"
#include "mostow/spdspace.hpp"

namespace mostow {

/// Sigma = {P : X P + P X^T = 0 for all X in k}, a linear slice of the SPD cone.
struct FixedSetChart {
  std::vector<Matrix> directions;  // Frobenius-orthonormal basis L_i of the constraint space
  SpdPoint p0;                     // interior point, det 1

  int dim() const { return static_cast<int>(directions.size()); }
};

FixedSetChart fixed_set(const CartanSplit& split, Rng& rng);

/// Max over k of ||X P + P X^T|| / (||X|| ||P||).
double fixed_set_residual(const CartanSplit& split, const Matrix& p);

/// Metric-orthonormal basis of T_P Sigma (chart directions with tr(P^-1 U) = 0).
std::vector<Matrix> chart_tangent_basis(const FixedSetChart& chart, const SpdPoint& p);

/// Point at geodesic distance `radius` from p0 along a seeded random Sigma direction.
SpdPoint seeded_start(const FixedSetChart& chart, Rng& rng, double radius = 0.5);

struct LambdaProfile {
  Matrix gram;  // <Y_i.P, Y_j.P>_P over the p-basis
  double lambda = 1.0;
  double proportionality_residual = 0.0;
};

LambdaProfile lambda_value(const CartanSplit& split, const FixedSetChart& chart,
                           const SpdPoint& p, const SpdPoint& p_ref);

/// F(P) = log det G(P), G the Gram matrix of the p-fields after the p-basis
/// has been orthonormalized for the Killing form. Defined on the whole cone.
class OrbitVolume {
 public:
  explicit OrbitVolume(const CartanSplit& split);

  double value(const Matrix& p) const;
  double directional_derivative(const Matrix& p, const Matrix& u) const;

 private:
  std::vector<Matrix> p_basis_;
};

struct MinimizeOptions {
  int max_iter = 500;
  double initial_step = 1.0;
  double backtrack = 0.5;
  double armijo = 1e-4;
  double divergence_radius = 50.0;
  double mean_curvature_tol = 1e-8;
};

struct DescentRecord {
  double objective = 0.0;
  double gradient_norm = 0.0;
  double distance_from_p0 = 0.0;
  double step = 0.0;
};

struct MinimizationResult {
  SpdPoint p_star;
  int iterations = 0;
  double final_gradient_norm = 0.0;
  double final_mean_curvature = 0.0;
  bool converged = false;
  bool diverged = false;
  std::vector<DescentRecord> history;
};

MinimizationResult minimize_volume(const CartanSplit& split, const FixedSetChart& chart,
                                   const SpdPoint& start, const MinimizeOptions& opts = {});

struct MinimalityCertificate {
  double mean_curvature_norm = 0.0;
  double k_residual = 0.0;  // compatibility residuals of S = (P*)^-1
  double p_residual = 0.0;
  double tg_residual = 0.0;  // max ||II|| on the orbit frame

  bool pass() const {
    return mean_curvature_norm <= 1e-8 && k_residual <= 1e-6 && p_residual <= 1e-6 &&
           tg_residual <= 1e-6;
  }
};

MinimalityCertificate certify_minimal(const CartanSplit& split, const SpdPoint& p_star);

}  // namespace mostow
