#include <gtest/gtest.h>

#include <cmath>

#include "mostow/error.hpp"
#include "mostow/io.hpp"
#include "mostow/orbitmin.hpp"
#include "mostow/report.hpp"
#include "oracles.hpp"

using namespace mostow;
using oracle::unit;

namespace {

CartanSplit catalog_split(const char* name) { return to_split(find_catalog_entry(name)->document); }

SpdPoint so21_point(double a) {
  return SpdPoint(SymMatrix(Eigen::Vector3d(a, a, 1.0 / (a * a)).asDiagonal().toDenseMatrix()));
}

template <typename F>
ErrorCode code_of(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(-1);
}

double riemannian_gradient_norm(const CartanSplit& s, const FixedSetChart& chart, const SpdPoint& p) {
  const OrbitVolume vol(s);
  double sq = 0.0;
  for (const Matrix& e : chart_tangent_basis(chart, p)) {
    const double d = vol.directional_derivative(p.matrix(), e);
    sq += d * d;
  }
  return std::sqrt(sq);
}

}  // namespace

TEST(FixedSet, Dimensions) {
  Rng rng(1);
  EXPECT_EQ(fixed_set(catalog_split("so21-in-sl3"), rng).dim(), 2);
  EXPECT_EQ(fixed_set(catalog_split("sl2-block-in-sl3"), rng).dim(), 2);
  EXPECT_EQ(fixed_set(catalog_split("so3-in-sl3"), rng).dim(), 1);
  EXPECT_EQ(fixed_set(catalog_split("sl3-full"), rng).dim(), 1);
  // no compact part: the whole cone
  EXPECT_EQ(fixed_set(catalog_split("solvable-2d"), rng).dim(), 3);
}

TEST(FixedSet, PointsAreFixed) {
  Rng rng(3);
  const CartanSplit s = conjugate_presentation(random_conjugator(3, rng), catalog_split("so21-in-sl3"));
  const FixedSetChart chart = fixed_set(s, rng);
  EXPECT_LT(fixed_set_residual(s, chart.p0.matrix()), 1e-10);
  const SpdPoint start = seeded_start(chart, rng, 0.5);
  EXPECT_LT(fixed_set_residual(s, start.matrix()), 1e-10);
  EXPECT_NEAR(distance(chart.p0, start), 0.5, 1e-9);
  const auto basis = chart_tangent_basis(chart, start);
  EXPECT_EQ(basis.size(), 1u);
  EXPECT_NEAR(trace_metric(start, basis[0], basis[0]), 1.0, 1e-10);
  EXPECT_NEAR(trace_metric(start, basis[0], start.matrix()), 0.0, 1e-10);
}

TEST(FixedSet, EmptyWhenKHasNoDefiniteFixedPoint) {
  CartanSplit s;
  s.g.n = 2;
  s.g.basis = {unit(2, 0, 0) - unit(2, 1, 1)};
  s.k_idx = {0};
  Rng rng(1);
  EXPECT_EQ(code_of([&] { fixed_set(s, rng); }), ErrorCode::EmptyFixedSet);
}

TEST(Lambda, So21ClosedForm) {
  const CartanSplit s = catalog_split("so21-in-sl3");
  Rng rng(5);
  const FixedSetChart chart = fixed_set(s, rng);
  const SpdPoint ref(SymMatrix::identity(3));
  for (double a : {0.5, 1.0, 2.0}) {
    const LambdaProfile lp = lambda_value(s, chart, so21_point(a), ref);
    EXPECT_NEAR(lp.lambda, oracle::so21_field_norm_sq(a) / oracle::so21_field_norm_sq(1.0), 1e-8) << a;
    EXPECT_LT(lp.proportionality_residual, 1e-8) << a;
    EXPECT_NEAR(lp.gram(0, 0), oracle::so21_field_norm_sq(a), 1e-8 * lp.gram(0, 0));
  }
}

TEST(Lambda, RejectsPointsOffTheFixedSet) {
  const CartanSplit s = catalog_split("so21-in-sl3");
  Rng rng(7);
  const FixedSetChart chart = fixed_set(s, rng);
  const SpdPoint off = SpdPoint::normalized(SymMatrix(Eigen::Vector3d(1.0, 2.0, 0.5).asDiagonal().toDenseMatrix()));
  EXPECT_EQ(code_of([&] { lambda_value(s, chart, off, chart.p0); }), ErrorCode::ConstraintViolated);
}

TEST(OrbitVolume, DerivativeMatchesFiniteDifference) {
  Rng rng(9);
  for (const char* name : {"so21-in-sl3", "sl2-irreducible-in-sl3", "sl3-full"}) {
    const OrbitVolume vol(catalog_split(name));
    const Matrix g = random_conjugator(3, rng, 0.7);
    const Matrix p = g * g.transpose();
    const Matrix u = SymMatrix(rng.normal_matrix(3, 3)).matrix();
    const double h = 1e-5;
    const double fd = (vol.value(p + h * u) - vol.value(p - h * u)) / (2 * h);
    EXPECT_NEAR(vol.directional_derivative(p, u), fd, 1e-6 * std::max(1.0, std::abs(fd))) << name;
  }
}

TEST(OrbitVolume, GradientIsTwiceMeanCurvature) {
  Rng rng(11);
  for (const char* name : {"so21-in-sl3", "sl2-irreducible-in-sl3", "sl2-block-in-sl3"}) {
    const CartanSplit s = catalog_split(name);
    const FixedSetChart chart = fixed_set(s, rng);
    for (int trial = 0; trial < 3; ++trial) {
      const SpdPoint p = seeded_start(chart, rng, 0.3 + 0.4 * trial);
      const double grad = riemannian_gradient_norm(s, chart, p);
      const double h = norm(mean_curvature(s.g, p));
      EXPECT_NEAR(grad, 2.0 * h, 1e-7 * std::max(1.0, grad)) << name;
    }
  }
}

TEST(Minimize, So21ReachesIdentity) {
  const CartanSplit s = catalog_split("so21-in-sl3");
  Rng rng(13);
  const FixedSetChart chart = fixed_set(s, rng);
  const MinimizationResult r = minimize_volume(s, chart, so21_point(2.0));
  ASSERT_TRUE(r.converged);
  EXPECT_FALSE(r.diverged);
  EXPECT_NEAR(r.p_star.matrix()(0, 0), 1.0, 1e-6);
  EXPECT_LT((r.p_star.matrix() - Matrix::Identity(3, 3)).norm(), 1e-6);
  EXPECT_LE(r.final_mean_curvature, 1e-8);
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    EXPECT_LE(r.history[i].objective, r.history[i - 1].objective + 1e-12);
  }
  EXPECT_TRUE(certify_minimal(s, r.p_star).pass());
}

TEST(Minimize, CatalogConverges) {
  for (const CatalogEntry& c : catalog()) {
    if (!c.semisimple) continue;
    Rng rng(15);
    const CartanSplit base = to_split(c.document);
    const CartanSplit s = conjugate_presentation(random_conjugator(base.g.n, rng), base);
    const FixedSetChart chart = fixed_set(s, rng);
    const MinimizationResult r = minimize_volume(s, chart, seeded_start(chart, rng));
    EXPECT_TRUE(r.converged) << c.name;
    const MinimalityCertificate mc = certify_minimal(s, r.p_star);
    EXPECT_TRUE(mc.pass()) << c.name << " H=" << mc.mean_curvature_norm << " k=" << mc.k_residual
                           << " p=" << mc.p_residual;
  }
}

TEST(Minimize, DivergenceGuard) {
  const CartanSplit s = catalog_split("so21-in-sl3");
  Rng rng(17);
  const FixedSetChart chart = fixed_set(s, rng);
  MinimizeOptions opts;
  opts.divergence_radius = 0.1;
  const MinimizationResult r = minimize_volume(s, chart, so21_point(4.0), opts);
  EXPECT_TRUE(r.diverged);
  EXPECT_FALSE(r.converged);
}

TEST(Minimize, IterationCap) {
  const CartanSplit s = catalog_split("so21-in-sl3");
  Rng rng(19);
  const FixedSetChart chart = fixed_set(s, rng);
  MinimizeOptions opts;
  opts.max_iter = 2;
  const MinimizationResult r = minimize_volume(s, chart, so21_point(3.0), opts);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.iterations, 2);
}

TEST(Certificate, RejectsNonMinimalPoint) {
  const CartanSplit s = catalog_split("so21-in-sl3");
  const MinimalityCertificate mc = certify_minimal(s, so21_point(1.3));
  EXPECT_FALSE(mc.pass());
  EXPECT_GT(mc.mean_curvature_norm, 1e-3);
}

TEST(FixedSet, ChartExamples) {
  Rng rng(21);
  const FixedSetChart so3 = fixed_set(catalog_split("so3-in-sl3"), rng);
  EXPECT_LT((so3.p0.matrix() - Matrix::Identity(3, 3)).norm(), 1e-10);
  const CartanSplit block = catalog_split("sl2-block-in-sl3");
  const FixedSetChart chart = fixed_set(block, rng);
  for (const Matrix& l : chart.directions) {
    EXPECT_LT(fixed_set_residual(block, l), 1e-10);
    EXPECT_NEAR(l(0, 0), l(1, 1), 1e-10);
    EXPECT_NEAR(l(0, 2), 0.0, 1e-10);
  }
}

TEST(Lambda, BlockIsConstantOnTheFixedSet) {
  const CartanSplit s = catalog_split("sl2-block-in-sl3");
  Rng rng(23);
  const FixedSetChart chart = fixed_set(s, rng);
  const SpdPoint ref(SymMatrix::identity(3));
  EXPECT_NEAR(lambda_value(s, chart, ref, ref).lambda, 1.0, 1e-14);
  for (double a : {0.5, 2.0, 3.0}) {
    const SpdPoint p(SymMatrix(Eigen::Vector3d(a, a, 1.0 / (a * a)).asDiagonal().toDenseMatrix()));
    const LambdaProfile lp = lambda_value(s, chart, p, ref);
    EXPECT_NEAR(lp.lambda, 1.0, 1e-12);
    EXPECT_NEAR(lp.gram(0, 0), 8.0, 1e-12);
    EXPECT_LT(lp.proportionality_residual, 1e-6);
  }
}

TEST(Lambda, ProportionalOnTheFixedSet) {
  Rng rng(25);
  for (const char* name : {"so21-in-sl3", "sl2-irreducible-in-sl3", "sl3-full", "sl2-full"}) {
    const CartanSplit s = conjugate_presentation(random_conjugator(catalog_split(name).g.n, rng), catalog_split(name));
    const FixedSetChart chart = fixed_set(s, rng);
    for (int i = 0; i < 5; ++i) {
      const SpdPoint p = seeded_start(chart, rng, 0.2 * (i + 1));
      EXPECT_LT(lambda_value(s, chart, p, chart.p0).proportionality_residual, 1e-6) << name;
    }
  }
}

TEST(OrbitVolume, ChartDirectionDerivatives) {
  Rng rng(27);
  for (const char* name : {"so21-in-sl3", "sl2-irreducible-in-sl3", "sl2-block-in-sl3"}) {
    const CartanSplit s = catalog_split(name);
    const OrbitVolume vol(s);
    const FixedSetChart chart = fixed_set(s, rng);
    for (int i = 0; i < 10; ++i) {
      const SpdPoint p = seeded_start(chart, rng, 0.1 + 0.1 * i);
      for (const Matrix& u : chart.directions) {
        const double h = 1e-5;
        const double fd = (vol.value(p.matrix() + h * u) - vol.value(p.matrix() - h * u)) / (2 * h);
        EXPECT_NEAR(vol.directional_derivative(p.matrix(), u), fd, 1e-5 * std::max(1.0, std::abs(fd))) << name;
      }
    }
  }
}

TEST(Minimize, StartAtMinimizer) {
  const CartanSplit s = catalog_split("so21-in-sl3");
  Rng rng(29);
  const FixedSetChart chart = fixed_set(s, rng);
  const MinimizationResult r = minimize_volume(s, chart, SpdPoint(SymMatrix::identity(3)));
  EXPECT_LE(r.iterations, 1);
  EXPECT_LE(r.final_gradient_norm, 1e-8);
  EXPECT_TRUE(r.converged);
}

TEST(Minimize, So21FromOneAndAHalf) {
  const CartanSplit s = catalog_split("so21-in-sl3");
  Rng rng(31);
  const FixedSetChart chart = fixed_set(s, rng);
  const MinimizationResult r = minimize_volume(s, chart, so21_point(1.5));
  ASSERT_TRUE(r.converged);
  EXPECT_LE(distance(r.p_star, SpdPoint(SymMatrix::identity(3))), 1e-6);
  EXPECT_NEAR(lambda_value(s, chart, r.p_star, SpdPoint(SymMatrix::identity(3))).lambda, 1.0, 1e-10);
}

TEST(Minimize, BlockStopsImmediately) {
  const CartanSplit s = catalog_split("sl2-block-in-sl3");
  Rng rng(33);
  const FixedSetChart chart = fixed_set(s, rng);
  const MinimizationResult r = minimize_volume(s, chart, seeded_start(chart, rng, 1.5));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_LE(r.final_mean_curvature, 1e-8);
}
