#pragma once

// Command pipelines shared by the CLI and the acceptance suite. Each returns
// a JSON report and the process exit code it maps to.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mostow/io.hpp"
#include "mostow/orbitmin.hpp"
#include "mostow/spdspace.hpp"

namespace mostow {

enum ExitCode : int {
  kExitPass = 0,
  kExitCertifiedFailure = 1,
  kExitNotCertified = 2,
  kExitInputError = 3,
};

struct RunOptions {
  double tol = 1e-9;  // nullspace rank tolerance
  std::uint64_t seed = 1;
  int max_iter = 500;
  int geodesics = 10;  // normal geodesics in the f(t) suite
  bool timings = false;
};

struct RunResult {
  int exit_code = kExitPass;
  nlohmann::json report;
};

RunResult run_validate(const PresentationDocument& doc, const RunOptions& opts);
RunResult run_decompose(const PresentationDocument& doc, const RunOptions& opts);
RunResult run_minimize(const PresentationDocument& doc, const RunOptions& opts);
RunResult run_verify(const PresentationDocument& doc, const RunOptions& opts);

/// f(t) along seeded unit-speed normal geodesics from `foot`, for every basis
/// element of g, sampled at t = 0, 0.1, ..., 1.
struct VariationalSuite {
  int geodesics = 0;  // 0 when the orbit has no normal directions
  int samples = 0;
  double max_identity_residual = 0.0;
  double max_abs_f0 = 0.0;
  double min_f_dot = 0.0;
  double min_f = 0.0;
  double max_normality_drift = 0.0;  // max |<X_i.gamma, gamma'>| over samples
  std::vector<VariationalSample> table;  // first geodesic, first generator
};

VariationalSuite variational_suite(const LieAlgebraPresentation& g, const SpdPoint& foot,
                                   Rng& rng, int geodesics);

/// Portable seeded SL(n) element exp(Z), Z traceless with ||Z||_F = scale.
Matrix random_conjugator(int n, Rng& rng, double scale = 1.0);

std::string render_json(const nlohmann::json& report);
std::string render_pretty(const nlohmann::json& report, bool color);

/// FNV-1a 64-bit digest, lowercase hex.
std::string digest(std::string_view bytes);

}  // namespace mostow
