#include "harness/emit.hpp"

#include <cstdio>
#include <fstream>

namespace pkn::harness {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw config_error("cannot open output file: " + path);
  return f;
}

std::string num(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j{{"mode", cfg.mode == RunMode::SelfSimilar ? "selfsimilar" : "transient"},
                   {"solver", cfg.solver},
                   {"benchmark", cfg.benchmark},
                   {"family", cfg.family},
                   {"gamma", cfg.gamma},
                   {"a", cfg.a},
                   {"u0", cfg.u0},
                   {"n", cfg.n},
                   {"rho", cfg.rho},
                   {"k", cfg.k},
                   {"t_final", cfg.t_final},
                   {"tol", cfg.tol},
                   {"max_iter", cfg.max_iter},
                   {"max_inner", cfg.max_inner},
                   {"two_term_tip", cfg.two_term_tip},
                   {"out", cfg.out}};
  if (cfg.beta) j["beta"] = *cfg.beta;
  if (cfg.dt0) j["dt0"] = *cfg.dt0;
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  if (j.contains("mode"))
    cfg.mode = j.at("mode") == "selfsimilar" ? RunMode::SelfSimilar : RunMode::Transient;
  cfg.solver = j.value("solver", cfg.solver);
  cfg.benchmark = j.value("benchmark", cfg.benchmark);
  cfg.family = j.value("family", cfg.family);
  cfg.gamma = j.value("gamma", cfg.gamma);
  cfg.a = j.value("a", cfg.a);
  cfg.u0 = j.value("u0", cfg.u0);
  cfg.n = j.value("n", cfg.n);
  cfg.rho = j.value("rho", cfg.rho);
  cfg.k = j.value("k", cfg.k);
  cfg.t_final = j.value("t_final", cfg.t_final);
  cfg.tol = j.value("tol", cfg.tol);
  cfg.max_iter = j.value("max_iter", cfg.max_iter);
  cfg.max_inner = j.value("max_inner", cfg.max_inner);
  cfg.two_term_tip = j.value("two_term_tip", cfg.two_term_tip);
  cfg.out = j.value("out", cfg.out);
  if (j.contains("beta")) cfg.beta = j.at("beta").get<Real>();
  if (j.contains("dt0")) cfg.dt0 = j.at("dt0").get<Real>();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("bad config file " + path + ": " + e.what());
  }
  return config_from_json(j);
}

void write_transient_csv(const std::string& path, const TransientRun& run) {
  std::ofstream f = open_out(path);
  f << "time,delta_w,delta_L,delta_w0,delta_V0,delta_wt,inner_iterations,balance_residual\n";
  for (std::size_t k = 0; k < run.report.per_time.size(); ++k) {
    const TimeErrors& r = run.report.per_time[k];
    f << num(r.t) << ',' << num(r.dw) << ',' << num(r.dL) << ',' << num(r.dw0) << ','
      << num(r.dV0) << ',' << num(r.dwt) << ',' << r.inner_iterations << ','
      << num(k < run.balance.size() ? run.balance[k] : 0.0) << '\n';
  }
  if (!f) throw config_error("failed writing " + path);
}

void write_profile_csv(const std::string& path, const TransientRun& run) {
  std::ofstream f = open_out(path);
  f << "time,x,rel_err_w,rel_err_wt\n";
  for (std::size_t k = 0; k < run.report.per_time.size(); ++k)
    for (Index j = 0; j < run.mesh.N; ++j)
      f << num(run.report.per_time[k].t) << ',' << num(run.mesh.nodes[j]) << ','
        << num(run.report.per_node_w[k][j]) << ',' << num(run.report.per_node_wt[k][j]) << '\n';
  if (!f) throw config_error("failed writing " + path);
}

void write_selfsimilar_csv(const std::string& path, const SelfSimilarRun& run) {
  std::ofstream f = open_out(path);
  f << "x,u,u_exact,abs_err,rel_err\n";
  for (Index j = 0; j < run.mesh.size(); ++j) {
    const Real u = run.solution.converged ? run.solution.u[j] : run.solution.delta_u[j];
    const Real err = std::abs(u - run.u_exact[j]);
    const Real rel = j < run.mesh.N ? err / std::abs(run.u_exact[j]) : 0.0;
    f << num(run.mesh.nodes[j]) << ',' << num(u) << ',' << num(run.u_exact[j]) << ',' << num(err)
      << ',' << num(rel) << '\n';
  }
  if (!f) throw config_error("failed writing " + path);
}

void write_sweep_csv(const std::string& path, const std::string& axis,
                     const std::vector<SweepRow>& rows) {
  std::ofstream f = open_out(path);
  f << "axis,value,converged,iterations,delta_u,delta_u0,delta_w,delta_L,delta_V0,delta_wt,"
       "error\n";
  for (const SweepRow& r : rows)
    f << axis << ',' << num(r.value) << ',' << (r.converged ? 1 : 0) << ',' << r.iterations << ','
      << num(r.delta_u) << ',' << num(r.delta_u0) << ',' << num(r.delta_w) << ',' << num(r.delta_L)
      << ',' << num(r.delta_V0) << ',' << num(r.delta_wt) << ',' << r.error << '\n';
  if (!f) throw config_error("failed writing " + path);
}

void write_transient_json(const std::string& path, const RunConfig& cfg, const TransientRun& run) {
  nlohmann::json j;
  j["config"] = to_json(cfg);
  j["summary"] = {{"delta_w", run.report.delta_w},
                  {"delta_L", run.report.delta_L},
                  {"delta_w0", run.report.delta_u0},
                  {"delta_V0", run.report.delta_V0},
                  {"delta_wt", run.report.delta_wt},
                  {"wt_absolute", run.report.wt_absolute},
                  {"fd2_wt_error", run.fd2_error},
                  {"fd3_wt_error", run.fd3_error},
                  {"total_inner_iterations", run.total_inner}};
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < run.report.per_time.size(); ++k) {
    const TimeErrors& r = run.report.per_time[k];
    rows.push_back({{"t", r.t},
                    {"delta_w", r.dw},
                    {"delta_L", r.dL},
                    {"delta_w0", r.dw0},
                    {"delta_V0", r.dV0},
                    {"delta_wt", r.dwt},
                    {"inner_iterations", r.inner_iterations},
                    {"balance_residual", k < run.balance.size() ? run.balance[k] : 0.0}});
  }
  j["per_time"] = std::move(rows);
  std::ofstream f = open_out(path);
  f << j.dump(2) << '\n';
  if (!f) throw config_error("failed writing " + path);
}

void write_selfsimilar_json(const std::string& path, const RunConfig& cfg,
                            const SelfSimilarRun& run) {
  nlohmann::json j;
  j["config"] = to_json(cfg);
  j["summary"] = {{"converged", run.solution.converged},
                  {"iterations", run.solution.iterations},
                  {"u0", run.solution.u0},
                  {"u0_exact", run.u0_exact},
                  {"delta_u", run.delta_u},
                  {"delta_u0", run.delta_u0},
                  {"failure", run.solution.failure}};
  std::ofstream f = open_out(path);
  f << j.dump(2) << '\n';
  if (!f) throw config_error("failed writing " + path);
}

}  // namespace pkn::harness
