#pragma once

#include <string>
#include <vector>

#include "pkn/benchmark_runs.hpp"
#include "pkn/transient.hpp"

namespace pkn::harness {

/// Per-time error rows against the exact benchmark fields. Relative errors
/// are taken at nodes x_j < 1; the derivative error switches to absolute when
/// the exact derivative vanishes identically (max |w_t| < 1e-12).
struct TimeErrors {
  Real t = 0;
  Real dw = 0;
  Real dL = 0;
  Real dw0 = 0;
  Real dV0 = 0;
  Real dwt = 0;
  int inner_iterations = 0;
};

struct ErrorReport {
  Real delta_w = 0;
  Real delta_L = 0;
  Real delta_u0 = 0;
  Real delta_V0 = 0;
  Real delta_wt = 0;
  bool wt_absolute = false;  // true when the exact derivative is identically zero
  std::vector<TimeErrors> per_time;
  // spatial profile: per_node[k][j] = relative w error at time k, node j
  std::vector<std::vector<Real>> per_node_w;
  std::vector<std::vector<Real>> per_node_wt;
};

ErrorReport error_metrics(const Trajectory& traj, const BenchmarkSpec& spec, const Mesh& mesh);

/// Backward finite-difference derivative series on the trajectory's own
/// (nonuniform) time grid; used to compare postprocessed derivatives with the
/// solver-native ones. scheme = 2 or 3 points; entry k is the derivative at
/// states[k], defined from k >= scheme-1.
std::vector<NodalArray> fd_postprocess_wt(const Trajectory& traj, int scheme);

/// Max pointwise relative error of an FD derivative series vs the benchmark
/// (tip node excluded), over the times where the series is defined.
Real fd_wt_error(const std::vector<NodalArray>& series, const Trajectory& traj,
                 const BenchmarkSpec& spec, const Mesh& mesh, int first_defined);

/// Normalized residual of the global fluid balance
///   L(t) int w(t) - L(0) int w(0) - int_0^t q0 + int_0^t L int q_l = 0
/// at every recorded time (quadrature in x, trapezoid in t).
std::vector<Real> global_balance_residual(const Trajectory& traj, const FluxFn& q0,
                                          const LeakoffFn& ql, const Mesh& mesh);

}  // namespace pkn::harness
