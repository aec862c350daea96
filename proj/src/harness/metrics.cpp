#include "harness/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace pkn::harness {

ErrorReport error_metrics(const Trajectory& traj, const BenchmarkSpec& spec, const Mesh& mesh) {
  if (traj.states.empty() || traj.states.front().w.size() != mesh.size())
    throw config_error("error_metrics: trajectory does not match the mesh");
  ErrorReport rep;

  Real wt_scale = 0.0;
  std::vector<BenchmarkFields> exact;
  exact.reserve(traj.states.size());
  for (const TransientState& st : traj.states) {
    exact.push_back(eval_benchmark(spec, st.t, mesh));
    wt_scale = std::max(wt_scale, exact.back().w_t.abs().maxCoeff());
  }
  rep.wt_absolute = wt_scale < 1e-12;

  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const TransientState& st = traj.states[k];
    const BenchmarkFields& ex = exact[k];
    TimeErrors row;
    row.t = st.t;
    std::vector<Real> prof_w(mesh.N), prof_wt(mesh.N);
    for (Index j = 0; j < mesh.N; ++j) {
      const Real ew = std::abs(st.w[j] - ex.w[j]) / std::abs(ex.w[j]);
      const Real ewt = rep.wt_absolute
                           ? std::abs(st.w_t[j] - ex.w_t[j])
                           : std::abs(st.w_t[j] - ex.w_t[j]) / std::abs(ex.w_t[j]);
      prof_w[j] = ew;
      prof_wt[j] = ewt;
      row.dw = std::max(row.dw, ew);
      row.dwt = std::max(row.dwt, ewt);
    }
    row.dL = std::abs(st.L - ex.L) / ex.L;
    row.dw0 = std::abs(st.w0 - ex.w0) / ex.w0;
    row.dV0 = std::abs(st.V0 - ex.V0) / ex.V0;
    if (k > 0 && k - 1 < traj.diagnostics.size())
      row.inner_iterations = traj.diagnostics[k - 1].iterations;
    if (k > 0) {  // the initial state is exact by construction
      rep.delta_w = std::max(rep.delta_w, row.dw);
      rep.delta_L = std::max(rep.delta_L, row.dL);
      rep.delta_u0 = std::max(rep.delta_u0, row.dw0);
      rep.delta_V0 = std::max(rep.delta_V0, row.dV0);
      rep.delta_wt = std::max(rep.delta_wt, row.dwt);
    }
    rep.per_time.push_back(row);
    rep.per_node_w.push_back(std::move(prof_w));
    rep.per_node_wt.push_back(std::move(prof_wt));
  }
  return rep;
}

std::vector<NodalArray> fd_postprocess_wt(const Trajectory& traj, int scheme) {
  if (scheme != 2 && scheme != 3) throw config_error("fd_postprocess_wt: scheme must be 2 or 3");
  const std::size_t n = traj.states.size();
  if (n < static_cast<std::size_t>(scheme))
    throw config_error("fd_postprocess_wt: not enough time points");
  std::vector<NodalArray> out(n);
  for (std::size_t k = static_cast<std::size_t>(scheme) - 1; k < n; ++k) {
    if (scheme == 2) {
      const Real h = traj.states[k].t - traj.states[k - 1].t;
      out[k] = (traj.states[k].w - traj.states[k - 1].w) / h;
    } else {
      const Real h1 = traj.states[k - 1].t - traj.states[k - 2].t;
      const Real h2 = traj.states[k].t - traj.states[k - 1].t;
      out[k] = traj.states[k - 2].w * (h2 / (h1 * (h1 + h2))) -
               traj.states[k - 1].w * ((h1 + h2) / (h1 * h2)) +
               traj.states[k].w * ((h1 + 2.0 * h2) / (h2 * (h1 + h2)));
    }
  }
  return out;
}

Real fd_wt_error(const std::vector<NodalArray>& series, const Trajectory& traj,
                 const BenchmarkSpec& spec, const Mesh& mesh, int first_defined) {
  std::vector<BenchmarkFields> exact;
  Real wt_scale = 0.0;
  for (std::size_t k = static_cast<std::size_t>(first_defined); k < traj.states.size(); ++k) {
    exact.push_back(eval_benchmark(spec, traj.states[k].t, mesh));
    wt_scale = std::max(wt_scale, exact.back().w_t.abs().maxCoeff());
  }
  const bool absolute = wt_scale < 1e-12;
  Real worst = 0.0;
  for (std::size_t k = static_cast<std::size_t>(first_defined); k < traj.states.size(); ++k) {
    const BenchmarkFields& ex = exact[k - first_defined];
    for (Index j = 0; j < mesh.N; ++j)
      worst = std::max(worst, absolute ? std::abs(series[k][j] - ex.w_t[j])
                                       : std::abs(series[k][j] - ex.w_t[j]) /
                                             std::abs(ex.w_t[j]));
  }
  return worst;
}

std::vector<Real> global_balance_residual(const Trajectory& traj, const FluxFn& q0,
                                          const LeakoffFn& ql, const Mesh& mesh) {
  TailQuadrature quad(mesh);
  const std::size_t n = traj.states.size();
  std::vector<Real> res(n, 0.0);
  if (n == 0) return res;
  const Real v0 = traj.states[0].L * quad.integrate(traj.states[0].w);
  Real acc_q0 = 0.0, acc_ql = 0.0;
  Real prev_q0 = q0(traj.states[0].t);
  Real prev_ql = traj.states[0].L * quad.integrate(ql.nodal(traj.states[0].t));
  for (std::size_t k = 1; k < n; ++k) {
    const Real dt = traj.states[k].t - traj.states[k - 1].t;
    const Real cur_q0 = q0(traj.states[k].t);
    const Real cur_ql = traj.states[k].L * quad.integrate(ql.nodal(traj.states[k].t));
    acc_q0 += 0.5 * dt * (prev_q0 + cur_q0);
    acc_ql += 0.5 * dt * (prev_ql + cur_ql);
    prev_q0 = cur_q0;
    prev_ql = cur_ql;
    const Real vol = traj.states[k].L * quad.integrate(traj.states[k].w);
    res[k] = (vol - v0 - acc_q0 + acc_ql) / vol;
  }
  return res;
}

}  // namespace pkn::harness
