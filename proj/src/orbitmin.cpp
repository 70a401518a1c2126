#include "mostow/orbitmin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mostow/error.hpp"

namespace mostow {

namespace {

double trace_product(const Matrix& a, const Matrix& b) {
  return (a.transpose().array() * b.array()).sum();
}

Matrix normalize_det(const Matrix& s) {
  const Vector lam = sym_eig(SymMatrix(s)).eigenvalues;
  return s * std::exp(-lam.array().log().sum() / static_cast<double>(s.rows()));
}

}  // namespace

double fixed_set_residual(const CartanSplit& split, const Matrix& p) {
  double worst = 0.0;
  for (const Matrix& x : split.k_basis()) {
    const double scale = x.norm() * p.norm();
    if (scale > 0.0) worst = std::max(worst, (x * p + p * x.transpose()).norm() / scale);
  }
  return worst;
}

FixedSetChart fixed_set(const CartanSplit& split, Rng& rng) {
  const int n = split.g.n;
  const int cols = sym_dim(n);
  const std::vector<Matrix> k = split.k_basis();
  Matrix m(static_cast<Eigen::Index>(k.size()) * n * n, cols);
  for (int c = 0; c < cols; ++c) {
    const Matrix e = coords_to_sym(Vector::Unit(cols, c), n).matrix();
    for (std::size_t i = 0; i < k.size(); ++i) {
      m.col(c).segment(static_cast<Eigen::Index>(i) * n * n, n * n) =
          (k[i] * e + e * k[i].transpose()).reshaped();
    }
  }
  const Matrix ker = nullspace(m, 1e-9);
  std::vector<Matrix> dirs;
  for (Eigen::Index i = 0; i < ker.cols(); ++i) dirs.push_back(coords_to_sym(ker.col(i), n).matrix());

  auto diagnose = [&]() {
    std::ostringstream msg;
    msg << "no positive-definite point is fixed by K (constraint space dim " << dirs.size() << ")";
    try {
      const SymMatrix b = killing_matrix(structure_constants(split.g));
      if (!split.k_idx.empty()) {
        Matrix block(split.k_idx.size(), split.k_idx.size());
        for (std::size_t i = 0; i < split.k_idx.size(); ++i) {
          for (std::size_t j = 0; j < split.k_idx.size(); ++j) {
            block(i, j) = b(split.k_idx[i], split.k_idx[j]);
          }
        }
        msg << "; largest Killing eigenvalue on k is " << sym_eig(SymMatrix(block)).eigenvalues.maxCoeff()
            << " (k must be compact: Killing form negative definite)";
      }
    } catch (const Error& e) {
      msg << "; Killing form unavailable: " << e.what();
    }
    return msg.str();
  };
  if (dirs.empty()) throw Error(ErrorCode::EmptyFixedSet, diagnose());

  Matrix p0;
  bool found = false;
  if (dirs.size() == 1) {
    for (double sign : {1.0, -1.0}) {
      const Vector ev = sym_eig(SymMatrix(sign * dirs[0])).eigenvalues;
      if (ev(ev.size() - 1) > 0.0 && ev(0) > 1e-6 * ev(ev.size() - 1)) {
        p0 = sign * dirs[0];
        found = true;
        break;
      }
    }
  } else {
    const PdSearchResult res = find_positive_definite(dirs, rng);
    found = res.found;
    p0 = res.s;
  }
  if (!found) throw Error(ErrorCode::EmptyFixedSet, diagnose());
  return FixedSetChart{std::move(dirs), SpdPoint::normalized(SymMatrix(p0))};
}

std::vector<Matrix> chart_tangent_basis(const FixedSetChart& chart, const SpdPoint& p) {
  const double n = static_cast<double>(p.size());
  std::vector<Matrix> out;
  for (const Matrix& l : chart.directions) {
    Matrix r = l - (p.inverse() * l).trace() / n * p.matrix();
    for (int pass = 0; pass < 2; ++pass) {
      for (const Matrix& e : out) r -= trace_metric(p, r, e) * e;
    }
    const double nr = std::sqrt(std::max(0.0, trace_metric(p, r, r)));
    if (nr > 1e-10) out.push_back(SymMatrix(r / nr).matrix());
  }
  return out;
}

SpdPoint seeded_start(const FixedSetChart& chart, Rng& rng, double radius) {
  const std::vector<Matrix> basis = chart_tangent_basis(chart, chart.p0);
  if (basis.empty()) return chart.p0;
  Matrix v = Matrix::Zero(chart.p0.size(), chart.p0.size());
  for (const Matrix& e : basis) v += rng.normal() * e;
  const double nv = std::sqrt(trace_metric(chart.p0, v, v));
  if (nv == 0.0) return chart.p0;
  return geodesic(TangentVector(chart.p0, v * (radius / nv))).evaluate(1.0);
}

LambdaProfile lambda_value(const CartanSplit& split, const FixedSetChart& chart,
                           const SpdPoint& p, const SpdPoint& p_ref) {
  (void)chart;
  for (const SpdPoint* q : {&p, &p_ref}) {
    const double r = fixed_set_residual(split, q->matrix());
    if (r > 1e-9) {
      throw Error(ErrorCode::ConstraintViolated,
                  "point is not fixed by K (residual " + std::to_string(r) + ")");
    }
  }
  auto gram_at = [&](const SpdPoint& q) {
    const std::vector<Matrix> pb = split.p_basis();
    const int m = static_cast<int>(pb.size());
    std::vector<Matrix> fields;
    for (const Matrix& y : pb) fields.push_back(y * q.matrix() + q.matrix() * y.transpose());
    Matrix g(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) g(i, j) = g(j, i) = trace_metric(q, fields[i], fields[j]);
    }
    return g;
  };
  LambdaProfile out;
  out.gram = gram_at(p);
  if (out.gram.size() == 0) return out;
  const Matrix ref = gram_at(p_ref);
  out.lambda = out.gram.trace() / ref.trace();
  out.proportionality_residual = (out.gram - out.lambda * ref).norm() / ref.norm();
  return out;
}

OrbitVolume::OrbitVolume(const CartanSplit& split) {
  const std::vector<Matrix> raw = split.p_basis();
  if (raw.empty()) return;
  const SymMatrix b = killing_matrix(structure_constants(split.g));
  Matrix bp(split.p_idx.size(), split.p_idx.size());
  for (std::size_t i = 0; i < split.p_idx.size(); ++i) {
    for (std::size_t j = 0; j < split.p_idx.size(); ++j) bp(i, j) = b(split.p_idx[i], split.p_idx[j]);
  }
  const EigenDecomposition ed = sym_eig(SymMatrix(bp));
  if (!(ed.eigenvalues(0) > 0.0)) {
    throw Error(ErrorCode::ConstraintViolated, "Killing form is not positive definite on p");
  }
  const Matrix t = ed.eigenvectors * ed.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal();
  for (Eigen::Index a = 0; a < t.cols(); ++a) {
    Matrix z = Matrix::Zero(split.g.n, split.g.n);
    for (std::size_t i = 0; i < raw.size(); ++i) z += t(static_cast<Eigen::Index>(i), a) * raw[i];
    p_basis_.push_back(std::move(z));
  }
}

double OrbitVolume::value(const Matrix& p) const {
  if (p_basis_.empty()) return 0.0;
  const Eigen::LLT<Matrix> chol(p);
  if (chol.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const Matrix pinv = chol.solve(Matrix::Identity(p.rows(), p.cols()));
  const int m = static_cast<int>(p_basis_.size());
  std::vector<Matrix> a;
  for (const Matrix& z : p_basis_) a.push_back(pinv * (z * p + p * z.transpose()));
  Matrix g(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) g(i, j) = g(j, i) = trace_product(a[i], a[j]);
  }
  const Eigen::LLT<Matrix> gl(g);
  if (gl.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  return 2.0 * gl.matrixLLT().diagonal().array().log().sum();
}

double OrbitVolume::directional_derivative(const Matrix& p, const Matrix& u) const {
  if (p_basis_.empty()) return 0.0;
  const Matrix pinv = p.llt().solve(Matrix::Identity(p.rows(), p.cols()));
  const Matrix mu = pinv * u;
  const int m = static_cast<int>(p_basis_.size());
  std::vector<Matrix> a;
  std::vector<Matrix> da;
  for (const Matrix& z : p_basis_) {
    a.push_back(pinv * (z * p + p * z.transpose()));
    da.push_back(pinv * (z * u + u * z.transpose()));
  }
  Matrix g(m, m);
  Matrix dg(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      g(i, j) = g(j, i) = trace_product(a[i], a[j]);
      dg(i, j) = dg(j, i) = -trace_product(mu * a[i], a[j]) + trace_product(da[i], a[j]) -
                            trace_product(a[i] * mu, a[j]) + trace_product(a[i], da[j]);
    }
  }
  return g.llt().solve(dg).trace();
}

MinimizationResult minimize_volume(const CartanSplit& split, const FixedSetChart& chart,
                                   const SpdPoint& start, const MinimizeOptions& opts) {
  const OrbitVolume volume(split);
  MinimizationResult res{start, 0, 0.0, 0.0, false, false, {}};
  SpdPoint p = start;
  double f = volume.value(p.matrix());

  auto gradient = [&](const SpdPoint& q, double* gnorm) {
    Matrix g = Matrix::Zero(q.size(), q.size());
    double s = 0.0;
    for (const Matrix& e : chart_tangent_basis(chart, q)) {
      const double de = volume.directional_derivative(q.matrix(), e);
      g += de * e;
      s += de * de;
    }
    *gnorm = std::sqrt(s);
    return g;
  };

  for (int it = 0;; ++it) {
    const double h = norm(mean_curvature(split.g, p));
    double gnorm = 0.0;
    const Matrix grad = gradient(p, &gnorm);
    res.final_mean_curvature = h;
    res.final_gradient_norm = gnorm;
    if (h <= opts.mean_curvature_tol) {
      res.converged = true;
      break;
    }
    if (it >= opts.max_iter || gnorm == 0.0) break;

    double eta = opts.initial_step;
    bool accepted = false;
    SpdPoint next = p;
    double f_next = f;
    for (int bt = 0; bt < 60 && !accepted; ++bt, eta *= opts.backtrack) {
      next = geodesic(TangentVector(p, -eta * grad)).evaluate(1.0);
      f_next = volume.value(next.matrix());
      const double predicted = opts.armijo * eta * gnorm * gnorm;
      if (f_next <= f - predicted) {
        accepted = true;
      } else if (predicted < 1e-13 * std::max(1.0, std::abs(f)) && f_next <= f + 1e-13) {
        // Below the resolution of F: accept only if the gradient shrinks.
        double gnext = 0.0;
        gradient(next, &gnext);
        accepted = gnext < gnorm;
      }
      if (accepted) res.history.push_back({f_next, 0.0, 0.0, eta});
    }
    if (!accepted) break;
    p = next;
    f = f_next;
    res.iterations = it + 1;
    const double dist = distance(chart.p0, p);
    res.history.back().gradient_norm = gnorm;
    res.history.back().distance_from_p0 = dist;
    if (dist > opts.divergence_radius) {
      res.diverged = true;
      break;
    }
  }
  res.p_star = p;
  return res;
}

MinimalityCertificate certify_minimal(const CartanSplit& split, const SpdPoint& p_star) {
  MinimalityCertificate cert;
  const OrbitGeometry orbit(split.g, p_star);
  cert.mean_curvature_norm = norm(orbit.mean_curvature());
  cert.tg_residual = orbit.max_second_fundamental_form();
  const CompatibilityResiduals r = compatibility_residuals(split, normalize_det(p_star.inverse()));
  cert.k_residual = r.k_residual;
  cert.p_residual = r.p_residual;
  return cert;
}

}  // namespace mostow
