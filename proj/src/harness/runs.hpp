#pragma once

#include <optional>
#include <string>
#include <vector>

#include "harness/metrics.hpp"
#include "pkn/benchmark_runs.hpp"
#include "pkn/selfsimilar.hpp"

namespace pkn::harness {

enum class RunMode { SelfSimilar, Transient };

/// One fully-specified run; the JSON config file mirrors this struct and CLI
/// flags override individual fields.
struct RunConfig {
  RunMode mode = RunMode::Transient;
  int solver = 2;
  std::string benchmark = "s1";  // s1 | carter
  std::string family = "power";  // power | exponential
  Real gamma = 0.2;
  Real a = 1.0;
  Real u0 = 1.0;
  std::optional<Real> beta;  // self-similar beta override (s1 family)
  Index n = 40;
  Real rho = 3.0;
  Index k = 30;
  Real t_final = 100.0;
  std::optional<Real> dt0;  // default t_final/(10 (k-1))
  Real tol = 1e-10;
  int max_iter = 200;
  int max_inner = 100000;
  bool two_term_tip = false;
  std::string out;
};

void validate(const RunConfig& cfg);
BenchmarkSpec make_benchmark(const RunConfig& cfg);
Real config_dt0(const RunConfig& cfg);

struct SelfSimilarRun {
  Mesh mesh;
  SelfSimilarSolution solution;
  NodalArray u_exact;
  Real u0_exact = 1.0;
  Real delta_u = 0.0;
  Real delta_u0 = 0.0;
};

SelfSimilarRun run_selfsimilar_case(const RunConfig& cfg);

struct TransientRun {
  Mesh mesh;
  TimeGrid grid;
  Trajectory trajectory;
  ErrorReport report;
  Real fd2_error = 0.0;
  Real fd3_error = 0.0;
  std::vector<Real> balance;
  long total_inner = 0;
};

TransientRun run_transient_case(const RunConfig& cfg);

/// One sweep row; fields not meaningful for the mode are left at zero.
struct SweepRow {
  Real value = 0.0;
  bool converged = false;
  int iterations = 0;
  Real delta_u = 0.0;
  Real delta_u0 = 0.0;
  Real delta_w = 0.0;
  Real delta_L = 0.0;
  Real delta_V0 = 0.0;
  Real delta_wt = 0.0;
  std::string error;
};

/// Runs one case per value of the axis (n | k | beta | rho | dt); rows run
/// concurrently and are reported in input order. Individual failures are
/// recorded in the row, the sweep continues.
std::vector<SweepRow> sweep(const RunConfig& tmpl, const std::string& axis,
                            const std::vector<Real>& values);

}  // namespace pkn::harness
