#include "harness/runs.hpp"

#include <future>

namespace pkn::harness {

void validate(const RunConfig& cfg) {
  if (cfg.solver != 1 && cfg.solver != 2) throw config_error("config: solver must be 1 or 2");
  if (cfg.benchmark != "s1" && cfg.benchmark != "carter")
    throw config_error("config: benchmark must be s1 or carter");
  if (cfg.family != "power" && cfg.family != "exponential")
    throw config_error("config: family must be power or exponential");
  if (cfg.n < 2) throw config_error("config: n must be >= 2");
  if (!(cfg.rho >= 1.0)) throw config_error("config: rho must be >= 1");
  if (cfg.mode == RunMode::Transient) {
    if (cfg.k < 2) throw config_error("config: k must be >= 2");
    if (!(cfg.t_final > 0)) throw config_error("config: t_final must be positive");
    if (cfg.dt0 && !(*cfg.dt0 > 0 && *cfg.dt0 < cfg.t_final / static_cast<Real>(cfg.k - 1)))
      throw config_error("config: dt0 must lie in (0, t_final/(k-1))");
  }
  if (!(cfg.tol > 0)) throw config_error("config: tol must be positive");
  if (cfg.max_iter < 1 || cfg.max_inner < 1)
    throw config_error("config: iteration caps must be >= 1");
  if (cfg.beta && cfg.benchmark != "s1")
    throw config_error("config: beta override is only supported for the s1 benchmark");
}

BenchmarkSpec make_benchmark(const RunConfig& cfg) {
  BenchmarkSpec spec;
  spec.family = cfg.family == "power" ? TimeFamily::Power : TimeFamily::Exponential;
  spec.gamma = cfg.gamma;
  spec.a = cfg.a;
  spec.u0 = cfg.u0;
  if (cfg.benchmark == "carter")
    spec.shape = make_shape_carter();
  else if (spec.family == TimeFamily::Exponential)
    spec.shape = make_shape_s1_beta(2.0 / 3.0);
  else
    spec.shape = make_shape_s1(cfg.gamma);
  return spec;
}

Real config_dt0(const RunConfig& cfg) {
  return cfg.dt0 ? *cfg.dt0 : cfg.t_final / (10.0 * static_cast<Real>(cfg.k - 1));
}

SelfSimilarRun run_selfsimilar_case(const RunConfig& cfg) {
  validate(cfg);
  SelfSimilarRun run;
  run.mesh = build_mesh(cfg.n, cfg.rho);
  if (cfg.beta) {
    BetaBenchmark b = make_beta_benchmark(*cfg.beta, run.mesh, cfg.u0);
    run.u_exact = b.u_exact;
    run.u0_exact = b.u0_exact;
    run.solution = solve_self_similar(b.problem, cfg.tol, cfg.max_iter);
  } else {
    BenchmarkSpec spec = make_benchmark(cfg);
    SelfSimilarProblem p = selfsimilar_problem_from_benchmark(spec, run.mesh);
    run.u_exact.resize(run.mesh.size());
    for (Index j = 0; j < run.mesh.size(); ++j)
      run.u_exact[j] = spec.u0 * shape_h(spec.shape, run.mesh.one_minus_x[j]);
    run.u0_exact = spec.u0;
    run.solution = solve_self_similar(p, cfg.tol, cfg.max_iter);
  }
  if (run.solution.converged) {
    for (Index j = 0; j < run.mesh.N; ++j)
      run.delta_u = std::max(run.delta_u,
                             std::abs(run.solution.u[j] - run.u_exact[j]) / run.u_exact[j]);
    run.delta_u0 = std::abs(run.solution.u0 - run.u0_exact) / run.u0_exact;
  }
  return run;
}

TransientRun run_transient_case(const RunConfig& cfg) {
  validate(cfg);
  TransientRun run;
  run.mesh = build_mesh(cfg.n, cfg.rho);
  run.grid = build_time_grid(cfg.k, cfg.t_final, config_dt0(cfg));
  BenchmarkSpec spec = make_benchmark(cfg);
  FluxFn q0 = make_q0_function(spec);
  LeakoffFn ql = make_ql_function(spec, run.mesh);
  TransientState st = make_initial_state(spec, run.mesh);
  SolverConfig scfg;
  scfg.variant = cfg.solver;
  scfg.eps = cfg.tol;
  scfg.max_inner = cfg.max_inner;
  scfg.two_term_tip = cfg.two_term_tip;
  run.trajectory = run_transient(st, run.grid, q0, ql, scfg, run.mesh);
  run.report = error_metrics(run.trajectory, spec, run.mesh);
  if (run.trajectory.states.size() >= 3) {
    run.fd2_error = fd_wt_error(fd_postprocess_wt(run.trajectory, 2), run.trajectory, spec,
                                run.mesh, 1);
    run.fd3_error = fd_wt_error(fd_postprocess_wt(run.trajectory, 3), run.trajectory, spec,
                                run.mesh, 2);
  }
  run.balance = global_balance_residual(run.trajectory, q0, ql, run.mesh);
  for (const StepDiagnostics& d : run.trajectory.diagnostics) run.total_inner += d.iterations;
  return run;
}

namespace {

SweepRow run_row(RunConfig cfg, const std::string& axis, Real value) {
  SweepRow row;
  row.value = value;
  try {
    if (axis == "n")
      cfg.n = static_cast<Index>(value);
    else if (axis == "k")
      cfg.k = static_cast<Index>(value);
    else if (axis == "rho")
      cfg.rho = value;
    else if (axis == "beta") {
      cfg.mode = RunMode::SelfSimilar;
      cfg.beta = value;
    } else if (axis == "dt") {
      // single-step study: one interval of length dt
      cfg.mode = RunMode::Transient;
      cfg.k = 2;
      cfg.t_final = value;
      cfg.dt0 = {};
    } else {
      throw config_error("sweep: axis must be one of n|k|beta|rho|dt");
    }
    if (cfg.mode == RunMode::SelfSimilar) {
      SelfSimilarRun r = run_selfsimilar_case(cfg);
      row.converged = r.solution.converged;
      row.iterations = r.solution.iterations;
      row.delta_u = r.delta_u;
      row.delta_u0 = r.delta_u0;
      if (!r.solution.converged) row.error = r.solution.failure;
    } else {
      TransientRun r = run_transient_case(cfg);
      row.converged = true;
      row.iterations = static_cast<int>(r.total_inner);
      row.delta_w = r.report.delta_w;
      row.delta_L = r.report.delta_L;
      row.delta_V0 = r.report.delta_V0;
      row.delta_wt = r.report.delta_wt;
    }
  } catch (const std::exception& e) {
    row.converged = false;
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep(const RunConfig& tmpl, const std::string& axis,
                            const std::vector<Real>& values) {
  if (axis != "n" && axis != "k" && axis != "beta" && axis != "rho" && axis != "dt")
    throw config_error("sweep: axis must be one of n|k|beta|rho|dt");
  std::vector<std::future<SweepRow>> futures;
  futures.reserve(values.size());
  for (Real v : values)
    futures.push_back(std::async(std::launch::async, run_row, tmpl, axis, v));
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (auto& f : futures) rows.push_back(f.get());
  return rows;
}

}  // namespace pkn::harness
