#include "mostow/spdspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mostow/error.hpp"

namespace mostow {

namespace {

void require_same_base(const TangentVector& a, const TangentVector& b) {
  if (!(a.base() == b.base())) {
    throw Error(ErrorCode::BaseMismatch, "tangent vectors are based at different points");
  }
}

void require_traceless(const Matrix& x) {
  if (x.rows() != x.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "generator must be square");
  }
  if (std::abs(x.trace()) > 1e-12 * std::max(1.0, x.norm())) {
    throw Error(ErrorCode::NotTraceless, "trace " + std::to_string(x.trace()));
  }
}

Matrix killing_value(const Matrix& x, const Matrix& p) { return x * p + p * x.transpose(); }

// nabla_U (X.) at P for raw matrices.
Matrix nabla_killing(const Matrix& x, const Matrix& u, const SpdPoint& p) {
  const Matrix w = killing_value(x, p.matrix());
  const Matrix& pinv = p.inverse();
  return x * u + u * x.transpose() - 0.5 * (u * pinv * w + w * pinv * u);
}

}  // namespace

SpdPoint::SpdPoint(const SymMatrix& p) : SpdPoint(p, true) {}

SpdPoint::SpdPoint(const SymMatrix& p, bool validate) : p_(p) {
  const EigenDecomposition ed = sym_eig(p);
  const Vector& lam = ed.eigenvalues;
  const int n = p.size();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "empty SPD point");
  if (!(lam(0) > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "min eigenvalue " + std::to_string(lam(0)));
  }
  if (validate) {
    const double det = lam.prod();
    if (std::abs(det - 1.0) > 1e-10) {
      throw Error(ErrorCode::ConstraintViolated,
                  "SPD point must have unit determinant, got " + std::to_string(det));
    }
  }
  const Matrix& q = ed.eigenvectors;
  inv_ = SymMatrix(q * lam.cwiseInverse().asDiagonal() * q.transpose()).matrix();
  sqrt_ = SymMatrix(q * lam.cwiseSqrt().asDiagonal() * q.transpose()).matrix();
  inv_sqrt_ =
      SymMatrix(q * lam.cwiseSqrt().cwiseInverse().asDiagonal() * q.transpose()).matrix();
}

SpdPoint SpdPoint::normalized(const SymMatrix& p) {
  const Vector lam = sym_eig(p).eigenvalues;
  if (lam.size() == 0 || !(lam(0) > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite, "cannot normalize a non-SPD matrix");
  }
  const double logdet = lam.array().log().sum();
  const double scale = std::exp(-logdet / static_cast<double>(p.size()));
  return SpdPoint(SymMatrix(scale * p.matrix()));
}

TangentVector::TangentVector(SpdPoint base, const Matrix& u) : base_(std::move(base)), u_(u) {
  if (u.rows() != base_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "tangent vector size differs from base");
  }
  const Matrix pu = base_.inverse() * u_.matrix();
  if (std::abs(pu.trace()) > 1e-10 * std::max(1.0, pu.norm())) {
    throw Error(ErrorCode::ConstraintViolated,
                "tangent vector violates tr(P^-1 U) = 0: " + std::to_string(pu.trace()));
  }
}

double trace_metric(const SpdPoint& p, const Matrix& u, const Matrix& v) {
  const Matrix a = p.inverse() * u;
  const Matrix b = p.inverse() * v;
  return (a.transpose().array() * b.array()).sum();
}

SpdPoint act(const Matrix& g, const SpdPoint& p) {
  if (g.rows() != p.size() || g.cols() != p.size()) {
    throw Error(ErrorCode::DimensionMismatch, "group element size differs from point");
  }
  const double det = g.partialPivLu().determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-14 * std::pow(std::max(1.0, g.norm()), g.rows())) {
    throw Error(ErrorCode::Singular, "group element is singular");
  }
  const Matrix gs = g * std::pow(std::abs(det), -1.0 / static_cast<double>(g.rows()));
  return SpdPoint::normalized(SymMatrix(gs * p.matrix() * gs.transpose()));
}

TangentVector killing_field(const Matrix& x, const SpdPoint& p) {
  require_traceless(x);
  return TangentVector(p, killing_value(x, p.matrix()));
}

double metric(const TangentVector& u, const TangentVector& v) {
  require_same_base(u, v);
  return trace_metric(u.base(), u.matrix(), v.matrix());
}

double norm(const TangentVector& u) { return std::sqrt(std::max(0.0, metric(u, u))); }

GeodesicSegment::GeodesicSegment(const TangentVector& direction)
    : direction_(direction),
      w_(SymMatrix(direction.base().inv_sqrt() * direction.matrix() *
                   direction.base().inv_sqrt())
             .matrix()) {}

Matrix GeodesicSegment::evaluate_matrix(double t) const {
  const Matrix e = spd_map(SymMatrix(t * w_), SpdFunction::Exp).matrix();
  const Matrix& s = base().sqrt();
  return SymMatrix(s * e * s).matrix();
}

SpdPoint GeodesicSegment::evaluate(double t) const {
  return SpdPoint::normalized(SymMatrix(evaluate_matrix(t)));
}

TangentVector GeodesicSegment::velocity(double t) const {
  const Matrix e = spd_map(SymMatrix(t * w_), SpdFunction::Exp).matrix();
  const Matrix& s = base().sqrt();
  return TangentVector(evaluate(t), SymMatrix(s * w_ * e * s).matrix());
}

GeodesicSegment geodesic(const TangentVector& v) { return GeodesicSegment(v); }

TangentVector log_map(const SpdPoint& p, const SpdPoint& q) {
  const SymMatrix m(p.inv_sqrt() * q.matrix() * p.inv_sqrt());
  const Matrix l = spd_map(m, SpdFunction::Log).matrix();
  Matrix v = p.sqrt() * l * p.sqrt();
  // Remove the roundoff component along P so the trace condition is exact.
  v -= (p.inverse() * v).trace() / static_cast<double>(p.size()) * p.matrix();
  return TangentVector(p, v);
}

double distance(const SpdPoint& p, const SpdPoint& q) {
  const SymMatrix m(p.inv_sqrt() * q.matrix() * p.inv_sqrt());
  return spd_map(m, SpdFunction::Log).matrix().norm();
}

TangentVector curvature(const TangentVector& u, const TangentVector& v,
                        const TangentVector& w) {
  require_same_base(u, v);
  require_same_base(u, w);
  const SpdPoint& p = u.base();
  const Matrix& is = p.inv_sqrt();
  const Matrix uu = is * u.matrix() * is;
  const Matrix vv = is * v.matrix() * is;
  const Matrix ww = is * w.matrix() * is;
  const Matrix r = -0.25 * bracket(bracket(uu, vv), ww);
  return TangentVector(p, SymMatrix(p.sqrt() * r * p.sqrt()).matrix());
}

double sectional_curvature(const TangentVector& u, const TangentVector& v) {
  const double uu = metric(u, u);
  const double vv = metric(v, v);
  const double uv = metric(u, v);
  const double area = uu * vv - uv * uv;
  if (!(area > 1e-14 * uu * vv)) {
    throw Error(ErrorCode::DegeneratePlane, "tangent vectors are linearly dependent");
  }
  return metric(curvature(u, v, v), u) / area;
}

TangentVector covariant_derivative_killing(const Matrix& x, const TangentVector& u) {
  require_traceless(x);
  return TangentVector(u.base(), SymMatrix(nabla_killing(x, u.matrix(), u.base())).matrix());
}

OrbitGeometry::OrbitGeometry(const LieAlgebraPresentation& g, const SpdPoint& p)
    : g_(g), p_(p) {
  const int d = g.dim();
  fields_.reserve(d);
  double scale = 0.0;
  for (const Matrix& x : g.basis) {
    if (x.rows() != p.size()) {
      throw Error(ErrorCode::DimensionMismatch, "algebra and point sizes differ");
    }
    fields_.push_back(killing_value(x, p.matrix()));
    // drop tolerance is measured against the generator seen from P, so a
    // field that vanishes at P is dropped even when all of them do
    scale = std::max(scale, (p.inv_sqrt() * x * p.sqrt()).norm());
  }
  if (scale == 0.0) return;

  std::vector<Vector> coeffs;
  for (int i = 0; i < d; ++i) {
    Matrix r = fields_[i];
    Vector c = Vector::Unit(d, i);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t a = 0; a < frame_.size(); ++a) {
        const double alpha = trace_metric(p, r, frame_[a]);
        r -= alpha * frame_[a];
        c -= alpha * coeffs[a];
      }
    }
    const double nr = std::sqrt(std::max(0.0, trace_metric(p, r, r)));
    if (nr <= kDropTol * scale) continue;
    if (nr <= kAmbiguousTol * scale) {
      throw Error(ErrorCode::DegenerateOrbit,
                  "orbit tangent Gram matrix is numerically singular (relative residual " +
                      std::to_string(nr / scale) + ")");
    }
    frame_.push_back(SymMatrix(r / nr).matrix());
    coeffs.push_back(c / nr);
  }
  generators_.reserve(frame_.size());
  for (const Vector& c : coeffs) {
    Matrix y = Matrix::Zero(p.size(), p.size());
    for (int i = 0; i < d; ++i) y += c(i) * g.basis[i];
    generators_.push_back(std::move(y));
  }
}

Matrix OrbitGeometry::tangent_gram() const {
  const int d = static_cast<int>(fields_.size());
  Matrix gram(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) gram(i, j) = gram(j, i) = trace_metric(p_, fields_[i], fields_[j]);
  }
  return gram;
}

Matrix OrbitGeometry::normal_projection(const Matrix& v) const {
  Matrix r = v;
  for (int pass = 0; pass < 2; ++pass) {
    for (const Matrix& e : frame_) r -= trace_metric(p_, r, e) * e;
  }
  r -= (p_.inverse() * r).trace() / static_cast<double>(p_.size()) * p_.matrix();
  return SymMatrix(r).matrix();
}

double OrbitGeometry::tangential_fraction(const Matrix& v) const {
  const double nv = std::sqrt(std::max(0.0, trace_metric(p_, v, v)));
  if (nv == 0.0) return 0.0;
  double tangential = 0.0;
  for (const Matrix& e : frame_) {
    const double a = trace_metric(p_, v, e);
    tangential += a * a;
  }
  return std::sqrt(tangential) / nv;
}

TangentVector OrbitGeometry::second_fundamental_form(int u, int v) const {
  const int d = g_.dim();
  if (u < 0 || u >= d || v < 0 || v >= d) {
    throw Error(ErrorCode::IndexOutOfRange, "second fundamental form index");
  }
  return TangentVector(p_, normal_projection(nabla_killing(g_.basis[v], fields_[u], p_)));
}

Matrix OrbitGeometry::frame_second_fundamental_form(int a, int b) const {
  return normal_projection(nabla_killing(generators_.at(b), frame_.at(a), p_));
}

TangentVector OrbitGeometry::mean_curvature() const {
  Matrix h = Matrix::Zero(p_.size(), p_.size());
  for (int a = 0; a < orbit_dim(); ++a) h += frame_second_fundamental_form(a, a);
  return TangentVector(p_, SymMatrix(h).matrix());
}

double OrbitGeometry::max_second_fundamental_form() const {
  double worst = 0.0;
  for (int a = 0; a < orbit_dim(); ++a) {
    for (int b = 0; b < orbit_dim(); ++b) {
      const Matrix ii = frame_second_fundamental_form(a, b);
      worst = std::max(worst, std::sqrt(std::max(0.0, trace_metric(p_, ii, ii))));
    }
  }
  return worst;
}

int normal_dim(const OrbitGeometry& orbit) {
  const int n = orbit.point().size();
  return sym_dim(n) - 1 - orbit.orbit_dim();
}

std::optional<TangentVector> random_normal_direction(const OrbitGeometry& orbit, Rng& rng) {
  if (normal_dim(orbit) <= 0) return std::nullopt;
  const SpdPoint& p = orbit.point();
  for (int attempt = 0; attempt < 16; ++attempt) {
    const Matrix raw = SymMatrix(rng.normal_matrix(p.size(), p.size())).matrix();
    // Draw in the identity-based frame so the distribution is equivariant.
    const Matrix v = orbit.normal_projection(p.sqrt() * raw * p.sqrt());
    const double nv = std::sqrt(std::max(0.0, trace_metric(p, v, v)));
    if (nv > 1e-8) return TangentVector(p, orbit.normal_projection(v / nv));
  }
  return std::nullopt;
}

TangentVector second_fundamental_form(const LieAlgebraPresentation& g, const SpdPoint& p,
                                      int u, int v) {
  return OrbitGeometry(g, p).second_fundamental_form(u, v);
}

TangentVector mean_curvature(const LieAlgebraPresentation& g, const SpdPoint& p) {
  return OrbitGeometry(g, p).mean_curvature();
}

namespace {

double f_value(const LieAlgebraPresentation& g, const Matrix& x, const GeodesicSegment& gamma,
               double t) {
  const TangentVector vel = gamma.velocity(t);
  const SpdPoint& q = vel.base();
  const OrbitGeometry orbit(g, q);
  const Matrix xq = killing_value(x, q.matrix());
  const Matrix ii = orbit.normal_projection(nabla_killing(x, xq, q));
  return -trace_metric(q, ii, vel.matrix());
}

}  // namespace

std::vector<VariationalSample> variational_f(const LieAlgebraPresentation& g, const Matrix& x,
                                             const GeodesicSegment& gamma,
                                             const std::vector<double>& t_samples, double h) {
  require_traceless(x);
  std::vector<VariationalSample> out;
  out.reserve(t_samples.size());
  for (double t : t_samples) {
    const TangentVector vel = gamma.velocity(t);
    const SpdPoint& q = vel.base();
    const OrbitGeometry orbit(g, q);
    const double frac = orbit.tangential_fraction(vel.matrix());
    if (frac > kNormalityTol) {
      throw Error(ErrorCode::NotNormal, "geodesic velocity has tangential fraction " +
                                            std::to_string(frac) + " at t = " +
                                            std::to_string(t));
    }
    const TangentVector xq(q, killing_value(x, q.matrix()));
    VariationalSample s;
    s.t = t;
    s.f = f_value(g, x, gamma, t);
    s.f_dot_fd = (f_value(g, x, gamma, t + h) - f_value(g, x, gamma, t - h)) / (2.0 * h);
    s.curvature_term = metric(curvature(vel, xq, vel), xq);
    const Matrix nab = nabla_killing(x, vel.matrix(), q);
    s.nabla_term = trace_metric(q, nab, nab);
    out.push_back(s);
  }
  return out;
}

}  // namespace mostow
