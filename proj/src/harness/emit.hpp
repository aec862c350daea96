#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "harness/runs.hpp"

namespace pkn::harness {

nlohmann::json to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Per-time CSV: time,delta_w,delta_L,delta_w0,delta_V0,delta_wt,
/// inner_iterations,balance_residual
void write_transient_csv(const std::string& path, const TransientRun& run);

/// Plot-ready long format: time,x,rel_err_w,rel_err_wt
void write_profile_csv(const std::string& path, const TransientRun& run);

/// Nodal CSV: x,u,u_exact,abs_err,rel_err
void write_selfsimilar_csv(const std::string& path, const SelfSimilarRun& run);

/// Sweep CSV: axis,value,converged,iterations,delta_u,delta_u0,delta_w,
/// delta_L,delta_V0,delta_wt,error
void write_sweep_csv(const std::string& path, const std::string& axis,
                     const std::vector<SweepRow>& rows);

void write_transient_json(const std::string& path, const RunConfig& cfg, const TransientRun& run);
void write_selfsimilar_json(const std::string& path, const RunConfig& cfg,
                            const SelfSimilarRun& run);

}  // namespace pkn::harness
