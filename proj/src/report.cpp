#include "mostow/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mostow/error.hpp"

namespace mostow {

using nlohmann::json;

namespace {

constexpr double kEigRatioTol = 1e-6;
constexpr double kTotallyGeodesicTol = 1e-6;
constexpr double kMeanCurvatureTol = 1e-8;
constexpr double kContainmentTol = 1e-8;
constexpr double kCrossPathResidualTol = 1e-6;
constexpr double kCrossPathDistanceTol = 1e-5;
constexpr double kIdentityTol = 1e-5;
constexpr double kF0Tol = 1e-9;
constexpr double kFDotTol = -1e-9;

json flat(const Matrix& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  }
  return a;
}

class Stopwatch {
 public:
  explicit Stopwatch(json* sink) : sink_(sink) {}
  void lap(const char* stage) {
    const auto now = std::chrono::steady_clock::now();
    if (sink_) {
      (*sink_)[stage] = std::chrono::duration<double, std::milli>(now - last_).count();
    }
    last_ = now;
  }

 private:
  json* sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

struct Pipeline {
  Pipeline(const PresentationDocument& doc, const RunOptions& opts, const char* command)
      : opts(opts), split(to_split(doc)), clock(opts.timings ? &timings : nullptr) {
    report["command"] = command;
    json input;
    input["digest"] = digest(emit_presentation(doc));
    input["name"] = doc.name ? json(*doc.name) : json(nullptr);
    input["n"] = doc.n;
    input["dim"] = static_cast<int>(doc.basis.size());
    report["input"] = input;
    report["options"] = {{"tol", opts.tol},
                         {"seed", opts.seed},
                         {"max_iter", opts.max_iter},
                         {"geodesics", opts.geodesics}};
  }

  void fail(int code, const std::string& reason) {
    exit_code = std::max(exit_code, code);
    report["failures"].push_back(reason);
  }

  bool validate() {
    const ValidationReport v = validate_presentation(split.g);
    json jv;
    jv["trace_max"] = v.trace_max;
    jv["independence"] = v.independence;
    jv["closure_residual"] = v.closure_residual ? json(*v.closure_residual) : json(nullptr);
    jv["traceless"] = v.traceless_ok;
    jv["independent"] = v.independent_ok;
    jv["closed"] = v.closed_ok;
    jv["pass"] = v.pass();
    report["validation"] = jv;
    if (!v.pass()) {
      fail(kExitCertifiedFailure, "presentation invalid");
      return false;
    }
    if (split.g.dim() == 0) {
      fail(kExitCertifiedFailure, "zero algebra");
      return false;
    }

    const StructureConstants sc = structure_constants(split.g);
    const SymMatrix b = killing_matrix(sc);
    const SemisimplicityVerdict ss = is_semisimple(b);
    report["structure"] = {{"jacobi_residual", sc.jacobi_residual()},
                           {"killing_matrix", flat(b.matrix())},
                           {"semisimple", ss.semisimple},
                           {"semisimplicity_ratio", ss.ratio}};
    if (!ss.semisimple) {
      fail(kExitCertifiedFailure, "not semisimple");
      return false;
    }

    const SplitReport sr = validate_cartan_split(split);
    report["split"] = {{"partition", sr.partition_ok},
                       {"kk_residual", sr.kk_residual},
                       {"kp_residual", sr.kp_residual},
                       {"pp_residual", sr.pp_residual},
                       {"killing_k_max", sr.killing_k_max},
                       {"killing_p_min", sr.killing_p_min},
                       {"pass", sr.pass()}};
    clock.lap("validate");
    if (!sr.pass()) {
      fail(kExitCertifiedFailure, "not a Cartan split: " + sr.weakest_clause());
      return false;
    }
    return true;
  }

  std::optional<CompatibilityCertificate> decompose() {
    Rng rng(opts.seed);
    std::optional<CompatibilityCertificate> cert;
    try {
      cert = compatible_metric(split, rng, opts.tol);
    } catch (const Error& e) {
      report["certificate"] = {{"error", e.what()}};
      fail(kExitNotCertified, std::string(to_string(e.code())));
      return std::nullopt;
    }
    const bool cert_ok = cert->pass() && cert->eig_ratio >= kEigRatioTol;
    report["certificate"] = {{"S", flat(cert->s.matrix())},
                             {"k_residual", cert->k_residual},
                             {"p_residual", cert->p_residual},
                             {"min_eig", cert->min_eig_s},
                             {"eig_ratio", cert->eig_ratio},
                             {"kernel_dim", cert->kernel_dim},
                             {"pass", cert_ok}};
    if (!cert_ok) fail(kExitNotCertified, "compatibility certificate");

    const SpdPoint p = base_point(cert->s);
    double isotropy = 0.0;
    for (const Matrix& x : split.k_basis()) {
      isotropy = std::max(isotropy, (x * p.matrix() + p.matrix() * x.transpose()).norm());
    }
    const OrbitGeometry orbit(split.g, p);
    const double h = norm(orbit.mean_curvature());
    const double ii = orbit.max_second_fundamental_form();
    const bool orbit_ok = h <= kMeanCurvatureTol && ii <= kTotallyGeodesicTol;
    report["base_point"] = {{"P", flat(p.matrix())}, {"isotropy_residual", isotropy}};
    report["orbit"] = {{"dim", orbit.orbit_dim()},
                       {"normal_dim", normal_dim(orbit)},
                       {"mean_curvature_norm", h},
                       {"max_second_fundamental_form", ii},
                       {"totally_geodesic", orbit_ok}};
    if (!orbit_ok) fail(kExitNotCertified, "orbit at base point is not totally geodesic");

    const AmbientSplit amb = ambient_split(cert->s);
    double k_in_a = 0.0;
    double p_in_s = 0.0;
    for (const Matrix& x : split.k_basis()) k_in_a = std::max(k_in_a, span_residual(amb.a_basis, x) / x.norm());
    for (const Matrix& y : split.p_basis()) p_in_s = std::max(p_in_s, span_residual(amb.s_basis, y) / y.norm());
    const bool contain_ok = k_in_a <= kContainmentTol && p_in_s <= kContainmentTol;
    report["ambient"] = {{"dim_a", static_cast<int>(amb.a_basis.size())},
                         {"dim_s", static_cast<int>(amb.s_basis.size())},
                         {"k_in_a_residual", k_in_a},
                         {"p_in_s_residual", p_in_s},
                         {"pass", contain_ok}};
    if (!contain_ok) fail(kExitNotCertified, "containment in ambient split");

    const TripleSystemBasis tri = normal_triple_system(split, amb, opts.tol);
    json basis = json::array();
    for (const Matrix& y : tri.basis) basis.push_back(flat(y));
    const bool tri_ok = tri.triple_residual <= kMembershipTol && tri.sum_triple_residual <= kMembershipTol;
    report["triple_system"] = {{"dim", tri.dim()},
                               {"basis", basis},
                               {"orthogonality_residual", tri.orthogonality_residual},
                               {"commutation_residual", tri.commutation_residual},
                               {"triple_residual", tri.triple_residual},
                               {"sum_triple_residual", tri.sum_triple_residual},
                               {"pass", tri_ok}};
    if (!tri_ok) fail(kExitNotCertified, "triple system laws");
    clock.lap("decompose");
    return cert;
  }

  std::optional<MinimizationResult> minimize() {
    Rng rng(opts.seed + 1);
    std::optional<FixedSetChart> chart;
    try {
      chart = fixed_set(split, rng);
    } catch (const Error& e) {
      report["fixed_set"] = {{"error", e.what()}};
      fail(kExitNotCertified, std::string(to_string(e.code())));
      return std::nullopt;
    }
    report["fixed_set"] = {{"dim", chart->dim()}, {"P0", flat(chart->p0.matrix())}};
    const SpdPoint start = seeded_start(*chart, rng);
    MinimizeOptions mo;
    mo.max_iter = opts.max_iter;
    MinimizationResult res = minimize_volume(split, *chart, start, mo);
    json escape = json::array();
    if (res.diverged) {
      for (const DescentRecord& r : res.history) escape.push_back(r.distance_from_p0);
    }
    report["minimizer"] = {{"start", flat(start.matrix())},
                           {"P_star", flat(res.p_star.matrix())},
                           {"iterations", res.iterations},
                           {"converged", res.converged},
                           {"diverged", res.diverged},
                           {"final_gradient_norm", res.final_gradient_norm},
                           {"final_mean_curvature", res.final_mean_curvature},
                           {"final_objective", res.history.empty() ? OrbitVolume(split).value(start.matrix())
                                                                   : res.history.back().objective},
                           {"escape_distances", escape}};
    if (res.diverged) fail(kExitNotCertified, "Diverged");
    else if (!res.converged) fail(kExitNotCertified, "minimizer did not reach the mean-curvature tolerance");

    const LambdaProfile lp = lambda_value(split, *chart, res.p_star, chart->p0);
    const MinimalityCertificate mc = certify_minimal(split, res.p_star);
    report["minimality"] = {{"mean_curvature_norm", mc.mean_curvature_norm},
                            {"k_residual", mc.k_residual},
                            {"p_residual", mc.p_residual},
                            {"tg_residual", mc.tg_residual},
                            {"lambda", lp.lambda},
                            {"proportionality_residual", lp.proportionality_residual},
                            {"pass", mc.pass()}};
    if (!mc.pass()) fail(kExitNotCertified, "minimality certificate");
    clock.lap("minimize");
    return res;
  }

  void cross_check(const CompatibilityCertificate& cert, const MinimizationResult& res) {
    const SpdPoint kernel_point = base_point(cert.s);
    json cc;
    const MinimalityCertificate mc = certify_minimal(split, res.p_star);
    const bool residual_ok = mc.k_residual <= kCrossPathResidualTol && mc.p_residual <= kCrossPathResidualTol;
    cc["minimizer_compat_residual"] = std::max(mc.k_residual, mc.p_residual);
    bool ok = residual_ok;
    if (cert.kernel_dim == 1) {
      const double dist = distance(kernel_point, res.p_star);
      cc["distance_to_kernel_point"] = dist;
      ok = ok && dist <= kCrossPathDistanceTol;
    } else {
      cc["distance_to_kernel_point"] = nullptr;
    }
    cc["pass"] = ok;
    report["cross_check"] = cc;
    if (!ok) fail(kExitNotCertified, "cross-path agreement");
  }

  void variational(const CompatibilityCertificate& cert) {
    Rng rng(opts.seed + 2);
    const VariationalSuite s = variational_suite(split.g, base_point(cert.s), rng, opts.geodesics);
    json table = json::array();
    for (const VariationalSample& v : s.table) {
      table.push_back({{"t", v.t},
                       {"f", v.f},
                       {"f_dot_fd", v.f_dot_fd},
                       {"curvature_term", v.curvature_term},
                       {"nabla_term", v.nabla_term}});
    }
    const bool ok = s.max_identity_residual <= kIdentityTol && s.max_abs_f0 <= kF0Tol &&
                    s.min_f_dot >= kFDotTol;
    report["variational"] = {{"geodesics", s.geodesics},
                             {"samples", s.samples},
                             {"max_identity_residual", s.max_identity_residual},
                             {"max_abs_f0", s.max_abs_f0},
                             {"min_f_dot", s.min_f_dot},
                             {"min_f", s.min_f},
                             {"max_normality_drift", s.max_normality_drift},
                             {"table", table},
                             {"pass", ok}};
    if (!ok) fail(kExitNotCertified, "variational identity");
    clock.lap("variational");
  }

  RunResult finish() {
    if (opts.timings) report["timings_ms"] = timings;
    report["exit_code"] = exit_code;
    report["pass"] = exit_code == kExitPass;
    return {exit_code, report};
  }

  RunOptions opts;
  CartanSplit split;
  json report = json::object();
  json timings = json::object();
  Stopwatch clock;
  int exit_code = kExitPass;
};

template <typename Body>
RunResult guarded(const PresentationDocument& doc, const RunOptions& opts, const char* command,
                  Body body) {
  Pipeline p(doc, opts, command);
  try {
    body(p);
  } catch (const Error& e) {
    p.report["error"] = e.what();
    p.fail(e.code() == ErrorCode::ParseError || e.code() == ErrorCode::SchemaError
               ? kExitInputError
               : kExitNotCertified,
           std::string(to_string(e.code())));
  }
  return p.finish();
}

}  // namespace

RunResult run_validate(const PresentationDocument& doc, const RunOptions& opts) {
  return guarded(doc, opts, "validate", [](Pipeline& p) { p.validate(); });
}

RunResult run_decompose(const PresentationDocument& doc, const RunOptions& opts) {
  return guarded(doc, opts, "decompose", [](Pipeline& p) {
    if (p.validate()) p.decompose();
  });
}

RunResult run_minimize(const PresentationDocument& doc, const RunOptions& opts) {
  return guarded(doc, opts, "minimize", [](Pipeline& p) {
    if (p.validate()) p.minimize();
  });
}

RunResult run_verify(const PresentationDocument& doc, const RunOptions& opts) {
  return guarded(doc, opts, "verify", [](Pipeline& p) {
    if (!p.validate()) return;
    const auto cert = p.decompose();
    const auto res = p.minimize();
    if (cert && res) p.cross_check(*cert, *res);
    if (cert) p.variational(*cert);
  });
}

VariationalSuite variational_suite(const LieAlgebraPresentation& g, const SpdPoint& foot,
                                   Rng& rng, int geodesics) {
  VariationalSuite s;
  s.min_f_dot = std::numeric_limits<double>::infinity();
  s.min_f = std::numeric_limits<double>::infinity();
  std::vector<double> ts;
  for (int i = 0; i <= 10; ++i) ts.push_back(0.1 * i);
  const OrbitGeometry orbit(g, foot);
  for (int k = 0; k < geodesics; ++k) {
    const std::optional<TangentVector> dir = random_normal_direction(orbit, rng);
    if (!dir) break;
    const GeodesicSegment gamma(*dir);
    ++s.geodesics;
    for (int i = 0; i < g.dim(); ++i) {
      const std::vector<VariationalSample> samples = variational_f(g, g.basis[i], gamma, ts);
      for (const VariationalSample& v : samples) {
        ++s.samples;
        s.max_identity_residual = std::max(s.max_identity_residual, v.identity_residual());
        s.min_f_dot = std::min(s.min_f_dot, v.f_dot_fd);
        s.min_f = std::min(s.min_f, v.f);
        if (v.t == 0.0) s.max_abs_f0 = std::max(s.max_abs_f0, std::abs(v.f));
      }
      if (k == 0 && i == 0) s.table = samples;
    }
    for (double t : ts) {
      const TangentVector vel = gamma.velocity(t);
      for (const Matrix& x : g.basis) {
        const Matrix xq = x * vel.base().matrix() + vel.base().matrix() * x.transpose();
        s.max_normality_drift =
            std::max(s.max_normality_drift, std::abs(trace_metric(vel.base(), xq, vel.matrix())));
      }
    }
  }
  if (s.samples == 0) {
    s.min_f_dot = 0.0;
    s.min_f = 0.0;
  }
  return s;
}

Matrix random_conjugator(int n, Rng& rng, double scale) {
  Matrix z = rng.normal_matrix(n, n);
  z -= z.trace() / n * Matrix::Identity(n, n);
  z *= scale / z.norm();
  return matrix_exp(z);
}

std::string render_json(const json& report) { return report.dump(2) + "\n"; }

namespace {

void pretty(std::ostringstream& out, const json& v, int indent, bool color) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  for (const auto& item : v.items()) {
    const json& x = item.value();
    out << pad << item.key() << ":";
    if (x.is_object()) {
      out << "\n";
      pretty(out, x, indent + 1, color);
    } else if (x.is_boolean()) {
      const bool b = x.get<bool>();
      if (color) out << (b ? " \033[32myes\033[0m" : " \033[31mno\033[0m") << "\n";
      else out << (b ? " yes" : " no") << "\n";
    } else if (x.is_array() && !x.empty() && x.front().is_structured()) {
      out << "\n";
      for (const json& e : x) out << pad << "  - " << e.dump() << "\n";
    } else {
      out << " " << x.dump() << "\n";
    }
  }
}

}  // namespace

std::string render_pretty(const json& report, bool color) {
  std::ostringstream out;
  pretty(out, report, 0, color);
  return out.str();
}

std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mostow
