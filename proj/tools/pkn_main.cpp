// Command-line harness for the PKN integral solvers: self-similar and
// transient runs, parameter sweeps, and the four-row solver comparison table.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harness/emit.hpp"
#include "harness/runs.hpp"

using namespace pkn;
using namespace pkn::harness;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

void add_common_flags(CLI::App* app, RunConfig& cfg, std::string& config_path) {
  app->add_option("--config", config_path, "JSON config file (flags override its values)");
  app->add_option("--benchmark", cfg.benchmark, "benchmark shape: s1 or carter");
  app->add_option("--family", cfg.family, "time family: power or exponential");
  app->add_option("--gamma", cfg.gamma, "time exponent of the benchmark");
  app->add_option("--a", cfg.a, "power-family time offset");
  app->add_option("--u0", cfg.u0, "benchmark amplitude");
  app->add_option("--n", cfg.n, "number of mesh subintervals");
  app->add_option("--rho", cfg.rho, "mesh grading exponent");
  app->add_option("--tol", cfg.tol, "iteration stopping tolerance");
  app->add_option("--out", cfg.out, "output path stem (.csv/.json suffixes added)");
}

void merge_config_file(const CLI::App* app, const std::string& config_path, RunConfig& cfg) {
  if (config_path.empty()) return;
  RunConfig file_cfg = load_config(config_path);
  // command-line flags win over file values
  auto keep = [&](const std::string& flag) {
    const CLI::Option* opt = app->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  RunConfig merged = file_cfg;
  if (keep("--benchmark")) merged.benchmark = cfg.benchmark;
  if (keep("--family")) merged.family = cfg.family;
  if (keep("--gamma")) merged.gamma = cfg.gamma;
  if (keep("--a")) merged.a = cfg.a;
  if (keep("--u0")) merged.u0 = cfg.u0;
  if (keep("--n")) merged.n = cfg.n;
  if (keep("--rho")) merged.rho = cfg.rho;
  if (keep("--tol")) merged.tol = cfg.tol;
  if (keep("--out")) merged.out = cfg.out;
  if (keep("--beta")) merged.beta = cfg.beta;
  if (keep("--max-iter")) merged.max_iter = cfg.max_iter;
  if (keep("--solver")) merged.solver = cfg.solver;
  if (keep("--k")) merged.k = cfg.k;
  if (keep("--t-final")) merged.t_final = cfg.t_final;
  if (keep("--dt0")) merged.dt0 = cfg.dt0;
  if (keep("--max-inner")) merged.max_inner = cfg.max_inner;
  if (keep("--two-term-tip")) merged.two_term_tip = cfg.two_term_tip;
  merged.mode = cfg.mode;
  cfg = merged;
}

int do_selfsimilar(RunConfig cfg) {
  cfg.mode = RunMode::SelfSimilar;
  SelfSimilarRun run = run_selfsimilar_case(cfg);
  std::printf("self-similar: converged=%d iterations=%d u0=%.12g\n", run.solution.converged,
              run.solution.iterations, run.solution.u0);
  if (run.solution.converged)
    std::printf("  delta_u=%.6g delta_u0=%.6g\n", run.delta_u, run.delta_u0);
  else
    std::printf("  failure: %s\n", run.solution.failure.c_str());
  if (!cfg.out.empty()) {
    write_selfsimilar_csv(cfg.out + ".csv", run);
    write_selfsimilar_json(cfg.out + ".json", cfg, run);
    std::printf("  wrote %s.csv, %s.json\n", cfg.out.c_str(), cfg.out.c_str());
  }
  return run.solution.converged ? 0 : kExitSolver;
}

int do_transient(RunConfig cfg) {
  cfg.mode = RunMode::Transient;
  TransientRun run = run_transient_case(cfg);
  std::printf(
      "transient solver %d: delta_L=%.4g delta_w=%.4g delta_V0=%.4g delta_wt=%.4g "
      "(fd2=%.4g fd3=%.4g)\n",
      cfg.solver, run.report.delta_L, run.report.delta_w, run.report.delta_V0,
      run.report.delta_wt, run.fd2_error, run.fd3_error);
  if (!cfg.out.empty()) {
    write_transient_csv(cfg.out + ".csv", run);
    write_profile_csv(cfg.out + "_profile.csv", run);
    write_transient_json(cfg.out + ".json", cfg, run);
    std::printf("  wrote %s.csv, %s_profile.csv, %s.json\n", cfg.out.c_str(), cfg.out.c_str(),
                cfg.out.c_str());
  }
  return 0;
}

int do_sweep(RunConfig cfg, const std::string& axis, const std::vector<Real>& values,
             const std::string& mode) {
  cfg.mode = mode == "selfsimilar" ? RunMode::SelfSimilar : RunMode::Transient;
  if (axis == "beta") cfg.mode = RunMode::SelfSimilar;
  std::vector<SweepRow> rows = sweep(cfg, axis, values);
  for (const SweepRow& r : rows) {
    if (cfg.mode == RunMode::SelfSimilar)
      std::printf("%s=%-10.6g converged=%d iters=%-5d delta_u=%.4g delta_u0=%.4g %s\n",
                  axis.c_str(), r.value, r.converged, r.iterations, r.delta_u, r.delta_u0,
                  r.error.c_str());
    else
      std::printf("%s=%-10.6g converged=%d delta_w=%.4g delta_L=%.4g delta_wt=%.4g %s\n",
                  axis.c_str(), r.value, r.converged, r.delta_w, r.delta_L, r.delta_wt,
                  r.error.c_str());
  }
  if (!cfg.out.empty()) {
    write_sweep_csv(cfg.out + ".csv", axis, rows);
    std::printf("wrote %s.csv\n", cfg.out.c_str());
  }
  for (const SweepRow& r : rows)
    if (!r.converged) return kExitSolver;
  return 0;
}

int do_table1(const std::string& out) {
  struct Row {
    const char* label;
    int solver;
    Index n;
  };
  const Row rows[] = {{"solver 1", 1, 40}, {"solver 2", 2, 40}, {"solver 1", 1, 5},
                      {"solver 2", 2, 5}};
  std::printf("%-10s %4s %4s %12s %12s %12s %12s %12s %12s\n", "run", "N", "K", "delta_L",
              "delta_w", "delta_V0", "delta_wt", "fd2_wt", "fd3_wt");
  std::printf("%-10s %4s %4s %12s %12s %12s %12s %12s %12s\n", "reference", "100", "242",
              "6.8e-03", "5.0e-03", "--", "--", "4.1e-01", "4.1e-01");
  std::FILE* csv = nullptr;
  if (!out.empty()) {
    csv = std::fopen((out + ".csv").c_str(), "w");
    if (!csv) throw config_error("cannot open output file: " + out + ".csv");
    std::fprintf(csv, "solver,n,k,delta_L,delta_w,delta_V0,delta_wt,fd2_wt,fd3_wt\n");
  }
  for (const Row& r : rows) {
    RunConfig cfg;
    cfg.mode = RunMode::Transient;
    cfg.solver = r.solver;
    cfg.n = r.n;
    cfg.k = 30;
    cfg.t_final = 100.0;
    cfg.gamma = 0.2;
    cfg.dt0 = 0.23;
    TransientRun run = run_transient_case(cfg);
    std::printf("%-10s %4lld %4d %12.4g %12.4g %12.4g %12.4g %12.4g %12.4g\n", r.label,
                static_cast<long long>(r.n), 30, run.report.delta_L, run.report.delta_w,
                run.report.delta_V0, run.report.delta_wt, run.fd2_error, run.fd3_error);
    if (csv)
      std::fprintf(csv, "%d,%lld,30,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.solver,
                   static_cast<long long>(r.n), run.report.delta_L, run.report.delta_w,
                   run.report.delta_V0, run.report.delta_wt, run.fd2_error, run.fd3_error);
  }
  if (csv) std::fclose(csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integral solvers for the normalized PKN hydraulic-fracture model"};
  app.require_subcommand(1);

  RunConfig ss_cfg, tr_cfg, sw_cfg;
  std::string ss_config, tr_config, sw_config;
  Real ss_beta = 0.0;

  CLI::App* ss = app.add_subcommand("selfsimilar", "solve the self-similar boundary-value problem");
  add_common_flags(ss, ss_cfg, ss_config);
  ss->add_option("--beta", ss_beta, "similarity parameter (s1 benchmark rebuilt for this beta)");
  ss->add_option("--max-iter", ss_cfg.max_iter, "outer iteration cap");

  CLI::App* tr = app.add_subcommand("transient", "march the transient problem");
  add_common_flags(tr, tr_cfg, tr_config);
  tr->add_option("--solver", tr_cfg.solver, "solver variant: 1 or 2");
  tr->add_option("--k", tr_cfg.k, "number of time points");
  tr->add_option("--t-final", tr_cfg.t_final, "final normalized time");
  tr->add_option("--dt0", tr_cfg.dt0, "first-step control of the time grid");
  tr->add_option("--max-inner", tr_cfg.max_inner, "inner iteration cap");
  tr->add_flag("--two-term-tip", tr_cfg.two_term_tip,
               "carry the second tip asymptotic term (Carter leak-off)");

  CLI::App* sw = app.add_subcommand("sweep", "run a parameter sweep");
  std::string axis, sweep_mode = "transient";
  std::vector<Real> values;
  add_common_flags(sw, sw_cfg, sw_config);
  sw->add_option("--axis", axis, "sweep axis: n|k|beta|rho|dt")->required();
  sw->add_option("--values", values, "axis values")->required()->expected(-1);
  sw->add_option("--mode", sweep_mode, "run mode for n/k/rho axes: transient or selfsimilar");
  sw->add_option("--solver", sw_cfg.solver, "solver variant: 1 or 2");
  sw->add_option("--k", sw_cfg.k, "number of time points");
  sw->add_option("--t-final", sw_cfg.t_final, "final normalized time");
  sw->add_option("--dt0", sw_cfg.dt0, "first-step control of the time grid");
  sw->add_option("--max-iter", sw_cfg.max_iter, "outer iteration cap");
  sw->add_option("--max-inner", sw_cfg.max_inner, "inner iteration cap");
  sw->add_flag("--two-term-tip", sw_cfg.two_term_tip, "second tip term (Carter leak-off)");

  CLI::App* tb = app.add_subcommand("table1", "run the four-row solver comparison");
  std::string tb_out;
  tb->add_option("--out", tb_out, "CSV output path stem");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (ss->parsed()) {
      merge_config_file(ss, ss_config, ss_cfg);
      if (ss->count("--beta")) ss_cfg.beta = ss_beta;
      return do_selfsimilar(ss_cfg);
    }
    if (tr->parsed()) {
      merge_config_file(tr, tr_config, tr_cfg);
      return do_transient(tr_cfg);
    }
    if (sw->parsed()) {
      merge_config_file(sw, sw_config, sw_cfg);
      return do_sweep(sw_cfg, axis, values, sweep_mode);
    }
    if (tb->parsed()) return do_table1(tb_out);
  } catch (const config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const solver_error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
  return 0;
}
