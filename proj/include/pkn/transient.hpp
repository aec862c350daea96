#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "pkn/mesh.hpp"
#include "pkn/quadrature.hpp"
#include "pkn/selfsimilar.hpp"
#include "pkn/types.hpp"

namespace pkn {

using FluxFn = std::function<Real(Real)>;  // normalized inlet flux q0(t)

/// Leak-off data for the transient solvers: nodal values at the mesh (tip
/// node stored as 0) plus, for Carter-type laws, the coefficient of
/// (1-x)^(-1/2) so the tip-singular part can be integrated analytically.
struct LeakoffFn {
  std::function<NodalArray(Real)> nodal;
  std::function<Real(Real)> tip_amp;  // may be empty; then no singular part

  Real amplitude(Real t) const { return tip_amp ? tip_amp(t) : 0.0; }
};

inline LeakoffFn zero_leakoff(Index n) {
  LeakoffFn f;
  f.nodal = [n](Real) { return NodalArray::Zero(n).eval(); };
  return f;
}

struct TransientState {
  Real t = 0.0;
  NodalArray w;
  NodalArray w_t;
  Real w0 = 0.0;
  Real L = 1.0;
  Real V0 = 0.0;
};

inline Real crack_speed(Real w0, Real L) {
  if (L <= 0) throw config_error("crack_speed: L must be positive");
  return w0 * w0 * w0 / (3.0 * L);
}

/// t_i = (i-1) dt0 + (t_K - (K-1) dt0)/(K-1)^3 (i-1)^3, i = 1..K.
struct TimeGrid {
  Index K = 2;
  Real t_final = 1.0;
  Real dt0 = 0.0;
  std::vector<Real> times;
};

inline TimeGrid build_time_grid(Index K, Real t_final, Real dt0) {
  if (K < 2) throw config_error("build_time_grid: K must be >= 2");
  if (!(t_final > 0)) throw config_error("build_time_grid: t_final must be positive");
  if (!(dt0 > 0) || !(dt0 < t_final / static_cast<Real>(K - 1)))
    throw config_error("build_time_grid: need 0 < dt0 < t_final/(K-1) for a monotone grid");
  TimeGrid g;
  g.K = K;
  g.t_final = t_final;
  g.dt0 = dt0;
  g.times.resize(K);
  const Real Km1 = static_cast<Real>(K - 1);
  const Real c = (t_final - Km1 * dt0) / (Km1 * Km1 * Km1);
  for (Index i = 0; i < K; ++i) {
    const Real j = static_cast<Real>(i);
    g.times[i] = j * dt0 + c * j * j * j;
  }
  g.times.front() = 0.0;
  g.times.back() = t_final;
  return g;
}

struct SolverConfig {
  int variant = 2;  // 1 -> sigma-blended scheme, 2 -> viscous-stabilized scheme
  Real eps = 1e-10;
  int max_inner = 100000;
  bool two_term_tip = false;
};

inline void validate(const SolverConfig& cfg) {
  if (cfg.variant != 1 && cfg.variant != 2) throw config_error("solver variant must be 1 or 2");
  if (!(cfg.eps > 0)) throw config_error("solver eps must be positive");
  if (cfg.max_inner < 1) throw config_error("max_inner must be >= 1");
}

struct InnerRecord {
  Real sigma = 0.0;
  Real L = 0.0;
  Real W0 = 0.0;
};

struct StepDiagnostics {
  int iterations = 0;
  bool halved = false;
  bool viscous_fallback = false;  // least-squares fit unusable; safe constants used
  Real u1 = 0.0;  // second tip-term coefficient at convergence (two-term mode)
  std::vector<InnerRecord> inner;
};

namespace detail {

inline NodalArray tip_term(const Mesh& mesh, Real exponent) {
  NodalArray v(mesh.size());
  for (Index j = 0; j < mesh.size(); ++j) v[j] = std::pow(mesh.one_minus_x[j], exponent);
  v[mesh.N] = 0.0;
  return v;
}

inline NodalArray delta_part(const TransientState& st, const Mesh& mesh) {
  NodalArray d(mesh.size());
  for (Index j = 0; j < mesh.size(); ++j)
    d[j] = st.w[j] - st.w0 * std::cbrt(mesh.one_minus_x[j]);
  d[mesh.N] = 0.0;
  return d;
}

inline Real rel_diff_guarded(const NodalArray& a_new, const NodalArray& a_old) {
  const Real nn = a_new.matrix().norm();
  const Real d = (a_new - a_old).matrix().norm();
  if (nn == 0.0) return d == 0.0 ? 0.0 : std::numeric_limits<Real>::infinity();
  return d / nn;
}

/// Least-squares fit of (1-x)(C0 + C1 (1-x)) du ~ I1[du] over interior
/// nodes. Returns false (degenerate fit) when the normal system is singular.
inline bool fit_viscous_constants(const Mesh& mesh, const NodalArray& du, const NodalArray& i1_du,
                                  Real& C0, Real& C1) {
  Real a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
  for (Index j = 1; j < mesh.N; ++j) {
    const Real tau = mesh.one_minus_x[j];
    const Real phi1 = tau * du[j];
    const Real phi2 = tau * phi1;
    a11 += phi1 * phi1;
    a12 += phi1 * phi2;
    a22 += phi2 * phi2;
    b1 += phi1 * i1_du[j];
    b2 += phi2 * i1_du[j];
  }
  const Real det = a11 * a22 - a12 * a12;
  if (!(std::abs(det) > 1e-14 * std::max(a11 * a22, Real(1e-300)))) {
    C0 = 0.5;
    C1 = 0.0;
    return false;
  }
  C0 = (b1 * a22 - b2 * a12) / det;
  C1 = (a11 * b2 - a12 * b1) / det;
  return true;
}

/// Coefficients of the per-step length update
///   L_new^2 = L^2(t_j) + c_prev w0^3(t_{j-1}) + c_cur w0^3(t_j) + c_new W0^3,
/// the trapezoidal increment (dt/3)(W0^3 + w0^3) in the standard case.
struct LengthRule {
  Real c_prev = 0.0;
  Real c_cur = 0.0;
  Real c_new = 0.0;
  Real w03_prev = 0.0;

  static LengthRule trapezoid(Real dt) { return {0.0, dt / 3.0, dt / 3.0, 0.0}; }
};

struct StepWorkspace {
  const Mesh& mesh;
  const TailQuadrature& quad;
  LengthRule lrule;
};

}  // namespace detail

/// Temporal derivative at an initial state straight from the governing
/// equation, w_t = [x w0^3 w_x + 3 (w^3 w_x)_x]/(3 L^2) - q_l, with the
/// spatial derivatives taken by centered differences in the transformed
/// coordinate. Benchmark-driven runs use the analytic derivative instead.
inline NodalArray initial_derivative(const NodalArray& w, Real w0, Real L, const NodalArray& ql,
                                     const Mesh& mesh) {
  if (L <= 0) throw config_error("initial_derivative: L must be positive");
  const Index N = mesh.N;
  const Real h = 1.0 / static_cast<Real>(N);
  auto d_ds = [&](const NodalArray& f, Index j) {
    if (j == 0) return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    if (j == N) return (3.0 * f[N] - 4.0 * f[N - 1] + f[N - 2]) / (2.0 * h);
    return (f[j + 1] - f[j - 1]) / (2.0 * h);
  };
  auto d2_ds2 = [&](const NodalArray& f, Index j) {
    if (j == 0) return (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
    if (j == N) return (2.0 * f[N] - 5.0 * f[N - 1] + 4.0 * f[N - 2] - f[N - 3]) / (h * h);
    return (f[j - 1] - 2.0 * f[j] + f[j + 1]) / (h * h);
  };

  const Real w03 = w0 * w0 * w0;
  NodalArray wt(N + 1);
  for (Index j = 0; j < N; ++j) {
    const Real oms = 1.0 - mesh.s[j];
    const Real xs = mesh.rho * std::pow(oms, mesh.rho - 1.0);
    const Real xss = -mesh.rho * (mesh.rho - 1.0) * std::pow(oms, mesh.rho - 2.0);
    const Real ws = d_ds(w, j);
    const Real wss = d2_ds2(w, j);
    const Real wx = ws / xs;
    const Real wxx = (wss * xs - ws * xss) / (xs * xs * xs);
    const Real wj = w[j];
    const Real flux_x = 3.0 * wj * wj * wx * wx + wj * wj * wj * wxx;  // (w^3 w_x)_x
    wt[j] = (mesh.nodes[j] * w03 * wx + 3.0 * flux_x) / (3.0 * L * L) - ql[j];
  }
  wt[N] = 0.0;
  return wt;
}

namespace detail {

// The twice-integrated update is evaluated with the beta-scaled integral
// grouped as beta I1[u + q_l*] over the combined nodal function: the tip
// (1-x)^(1/3) parts of u and q_l* cancel pointwise before quadrature, which
// keeps the per-row quadrature noise from being amplified by beta ~ 1/dt.
// Algebraically identical to G1 + G2.
inline std::pair<TransientState, StepDiagnostics> step_impl(const TransientState& state, Real dt,
                                                            const FluxFn& q0, const LeakoffFn& ql,
                                                            const SolverConfig& cfg,
                                                            const StepWorkspace& ws) {
  const Mesh& mesh = ws.mesh;
  const TailQuadrature& quad = ws.quad;
  const Index n = mesh.size();
  const Real t_new = state.t + dt;
  const Real L_old = state.L;
  const Real w0_old = state.w0;
  const Real w03_old = w0_old * w0_old * w0_old;

  const NodalArray ql_new = ql.nodal(t_new);
  const Real q0_new = q0(t_new);
  const Real qc = ql.amplitude(t_new);
  const bool split_tip = cfg.two_term_tip && qc != 0.0;

  const NodalArray cbrt_tau = tip_term(mesh, 1.0 / 3.0);
  const NodalArray tau73 = tip_term(mesh, 7.0 / 3.0);
  NodalArray inv_sqrt_tau = NodalArray::Zero(n);
  if (split_tip)
    for (Index j = 0; j < mesh.N; ++j) inv_sqrt_tau[j] = 1.0 / std::sqrt(mesh.one_minus_x[j]);

  const NodalArray dw_old = delta_part(state, mesh);

  // predictor (55): W = w + dt w_t with the old tip coefficient
  Real W0 = w0_old;
  Real L_cur = L_old;
  NodalArray dW = dw_old + dt * state.w_t;
  NodalArray Wt = state.w_t;

  StepDiagnostics diag;

  // update of the correction from the combined right-hand side
  auto grouped_update = [&](Real beta, Real u0, const NodalArray& du, const NodalArray& i0_du,
                            const NodalArray& i1_du, const NodalArray& i1_v) {
    const Real u03 = u0 * u0 * u0;
    NodalArray out(n);
    for (Index j = 0; j < mesh.N; ++j) {
      const Real tau = mesh.one_minus_x[j];
      const Real t13 = cbrt_tau[j];
      const Real d = du[j];
      const Real d2 = d * d;
      const Real quart =
          -0.75 * (6.0 * u0 * u0 * t13 * t13 * d2 + 4.0 * u0 * t13 * d2 * d + d2 * d2);
      const Real num = quart + 2.0 * u03 * i1_du[j] + mesh.nodes[j] * u03 * i0_du[j] -
                       3.0 / 28.0 * u03 * u0 * tau73[j] + beta * u03 * i1_v[j];
      out[j] = num / (3.0 * u03 * tau);
    }
    out[mesh.N] = 0.0;
    return out;
  };

  // solver 2 data is fixed for the whole step; the (1-x)^(-1/2) part of a
  // Carter-type leak-off is split off and integrated in closed form when the
  // two-term tip treatment is on
  NodalArray ql_hat_reg;
  Real A2 = 0.0;
  if (cfg.variant == 2) {
    A2 = split_tip ? 0.5 * dt * qc : 0.0;
    ql_hat_reg = -state.w - 0.5 * dt * (state.w_t - ql_new) - A2 * inv_sqrt_tau;
    ql_hat_reg[mesh.N] = 0.0;
  }
  Real sigma = dt * w03_old / (9.0 * L_old * L_old);
  NodalArray ql_star_reg;  // solver 1 iterated data
  Real A1 = 0.0;
  if (cfg.variant == 1) {
    A1 = split_tip ? dt / sigma * qc : 0.0;
    ql_star_reg = -state.w + (dt / sigma) * ((1.0 - sigma) * Wt + ql_new) - A1 * inv_sqrt_tau;
    ql_star_reg[mesh.N] = 0.0;
  }

  // restart data in case a fitted viscous operator fails to contract
  const NodalArray dW_pred = dW;
  const NodalArray Wt_pred = Wt;
  bool force_fallback = false;
  Real best_diff = std::numeric_limits<Real>::infinity();
  int rising = 0;

  for (int it = 1; it <= cfg.max_inner; ++it) {
    diag.iterations = it;
    const Real int_du = quad.integrate(dW);
    const Real A_cur = cfg.variant == 1 ? A1 : A2;
    const NodalArray& qls_reg = cfg.variant == 1 ? ql_star_reg : ql_hat_reg;

    // G3's B = (beta+1) int du + beta int ql* regrouped as
    // B = int du + beta int(du + ql*), the combined integral in one pass
    Real W0_new, L_new, beta_eff;
    const Real q0_star = 3.0 * q0_new * std::pow(W0, -1.5) * L_cur;
    const Real S = quad.integrate((dW + qls_reg).eval()) + 2.0 * A_cur;
    if (cfg.variant == 1) {
      beta_eff = 1.0 / 3.0;
      W0_new = solve_u0_core(beta_eff, int_du, S - int_du, q0_star);
      L_new = std::sqrt(L_old * L_old + ws.lrule.c_prev * ws.lrule.w03_prev +
                        ws.lrule.c_cur * w03_old + ws.lrule.c_new * W0_new * W0_new * W0_new);
      sigma = dt * W0_new * W0_new * W0_new / (9.0 * L_new * L_new);
      A1 = split_tip ? dt / sigma * qc : 0.0;
      ql_star_reg = -state.w + (dt / sigma) * ((1.0 - sigma) * Wt + ql_new) - A1 * inv_sqrt_tau;
      ql_star_reg[mesh.N] = 0.0;
    } else {
      const Real beta_lag = 6.0 * L_cur * L_cur / (dt * W0 * W0 * W0);
      W0_new = solve_u0_core(beta_lag, int_du, S - int_du, q0_star);
      L_new = std::sqrt(L_old * L_old + ws.lrule.c_prev * ws.lrule.w03_prev +
                        ws.lrule.c_cur * w03_old + ws.lrule.c_new * W0_new * W0_new * W0_new);
      beta_eff = 6.0 * L_new * L_new / (dt * W0_new * W0_new * W0_new);
    }

    const NodalArray i1_du = quad.i1(dW);
    const NodalArray i0_du = quad.i0(dW);
    // combined v = u + q_l* evaluated nodally with the latest tip coefficient
    const NodalArray& qls_new_reg = cfg.variant == 1 ? ql_star_reg : ql_hat_reg;
    const Real A_new = cfg.variant == 1 ? A1 : A2;
    NodalArray v_reg = W0_new * cbrt_tau + dW + qls_new_reg;
    v_reg[mesh.N] = 0.0;
    const NodalArray i1_v = tail_i1_with(quad, mesh, v_reg, {A_new, -0.5});

    NodalArray dW_new(n);
    if (cfg.variant == 1) {
      dW_new = grouped_update(beta_eff, W0_new, dW, i0_du, i1_du, i1_v);
    } else {
      // viscous relaxation [3 + beta C(x)] dW_new = 3 rhs + beta C(x) dW,
      // with (1-x) C(x) dW ~ I1[dW] by least squares; the safe constants
      // (1/2, 0) are used when the fit is degenerate or fails to contract
      const NodalArray raw = grouped_update(beta_eff, W0_new, dW, i0_du, i1_du, i1_v);
      Real C0 = 0.5, C1 = 0.0;
      if (!force_fallback && !fit_viscous_constants(mesh, dW, i1_du, C0, C1))
        diag.viscous_fallback = true;
      if (force_fallback) {
        C0 = 0.5;
        C1 = 0.0;
      }
      for (Index j = 0; j < mesh.N; ++j) {
        const Real c = C0 + C1 * mesh.one_minus_x[j];
        if (3.0 + beta_eff * c < 0.5) {  // unusable fit
          C0 = 0.5;
          C1 = 0.0;
          diag.viscous_fallback = true;
          break;
        }
      }
      for (Index j = 0; j < mesh.N; ++j) {
        const Real c = C0 + C1 * mesh.one_minus_x[j];
        dW_new[j] = (3.0 * raw[j] + beta_eff * c * dW[j]) / (3.0 + beta_eff * c);
      }
      dW_new[mesh.N] = 0.0;
    }

    const NodalArray W_new = W0_new * cbrt_tau + dW_new;
    NodalArray Wt_new;
    if (cfg.variant == 1)
      Wt_new = sigma * (W_new - state.w) / dt + (1.0 - sigma) * Wt;
    else
      Wt_new = 2.0 * (W_new - state.w) / dt - state.w_t;

    const bool finite = dW_new.allFinite() && std::isfinite(W0_new) && W0_new > 0.0;
    Real diff = std::numeric_limits<Real>::infinity();
    if (finite) {
      diff = rel_diff_guarded(dW_new, dW);
      if (cfg.variant == 1) {
        // derivative diffs measured against the larger of the derivative norm
        // and the natural scale |W|/dt (the latter matters when w_t ~ 0)
        const Real dscale = std::max(Wt_new.matrix().norm(), W_new.matrix().norm() / dt);
        const Real wt_diff =
            dscale > 0.0 ? (Wt_new - Wt).matrix().norm() / dscale : 0.0;
        diff = std::max(diff, wt_diff);
      }
    }

    // a non-contracting fitted operator: restart the sweep with safe constants
    if (cfg.variant == 2 && !force_fallback) {
      rising = (finite && diff < 1.5 * best_diff) ? 0 : rising + 1;
      best_diff = std::min(best_diff, diff);
      if (rising >= 4 || !finite || diff > 1e6) {
        force_fallback = true;
        diag.viscous_fallback = true;
        W0 = w0_old;
        L_cur = L_old;
        dW = dW_pred;
        Wt = Wt_pred;
        best_diff = std::numeric_limits<Real>::infinity();
        rising = 0;
        continue;
      }
    } else if (!finite) {
      throw solver_error("transient step: iterates lost finiteness");
    }

    diag.inner.push_back({sigma, L_new, W0_new});
    W0 = W0_new;
    L_cur = L_new;
    dW = dW_new;
    Wt = Wt_new;

    if (diff <= cfg.eps) {
      TransientState out;
      out.t = t_new;
      out.w = W0 * cbrt_tau + dW;
      out.w_t = Wt;
      out.w0 = W0;
      out.L = L_cur;
      out.V0 = crack_speed(W0, L_cur);
      if (split_tip) {
        const Real beta_fin =
            cfg.variant == 1 ? 1.0 / 3.0 : 6.0 * L_cur * L_cur / (dt * W0 * W0 * W0);
        diag.u1 = 4.0 * beta_fin * (cfg.variant == 1 ? A1 : A2) / 9.0;
      }
      return {out, diag};
    }
  }
  throw solver_error("transient step: inner iteration exceeded max_inner");
}

}  // namespace detail

inline std::pair<TransientState, StepDiagnostics> step_solver1(const TransientState& state, Real dt,
                                                               const FluxFn& q0, const LeakoffFn& ql,
                                                               SolverConfig cfg, const Mesh& mesh) {
  cfg.variant = 1;
  validate(cfg);
  if (!(dt > 0)) throw config_error("step: dt must be positive");
  TailQuadrature quad(mesh);
  return detail::step_impl(state, dt, q0, ql, cfg, {mesh, quad, detail::LengthRule::trapezoid(dt)});
}

inline std::pair<TransientState, StepDiagnostics> step_solver2(const TransientState& state, Real dt,
                                                               const FluxFn& q0, const LeakoffFn& ql,
                                                               SolverConfig cfg, const Mesh& mesh) {
  cfg.variant = 2;
  validate(cfg);
  if (!(dt > 0)) throw config_error("step: dt must be positive");
  TailQuadrature quad(mesh);
  return detail::step_impl(state, dt, q0, ql, cfg, {mesh, quad, detail::LengthRule::trapezoid(dt)});
}

struct Trajectory {
  std::vector<TransientState> states;
  std::vector<StepDiagnostics> diagnostics;  // one entry per completed step
};

/// March the transient problem over the whole grid. The crack-length history
/// integral uses the quadratic rule through the previous tip coefficient once
/// one step of history exists. A failing step is retried once as two half
/// steps; a second failure aborts with the step index.
inline Trajectory run_transient(const TransientState& initial, const TimeGrid& grid,
                                const FluxFn& q0, const LeakoffFn& ql, const SolverConfig& cfg,
                                const Mesh& mesh) {
  validate(cfg);
  if (initial.w.size() != mesh.size())
    throw config_error("run_transient: initial state does not match the mesh");
  TailQuadrature quad(mesh);

  Trajectory traj;
  traj.states.reserve(grid.K);
  TransientState cur = initial;
  cur.V0 = crack_speed(cur.w0, cur.L);
  traj.states.push_back(cur);

  for (Index j = 0; j + 1 < grid.K; ++j) {
    const Real dt = grid.times[j + 1] - grid.times[j];
    detail::StepWorkspace ws{mesh, quad, detail::LengthRule::trapezoid(dt)};
    try {
      auto [next, diag] = detail::step_impl(cur, dt, q0, ql, cfg, ws);
      cur = next;
      traj.states.push_back(cur);
      traj.diagnostics.push_back(std::move(diag));
    } catch (const solver_error&) {
      try {
        detail::StepWorkspace wsh{mesh, quad, detail::LengthRule::trapezoid(0.5 * dt)};
        auto [mid, diag_a] = detail::step_impl(cur, 0.5 * dt, q0, ql, cfg, wsh);
        auto [next, diag_b] = detail::step_impl(mid, 0.5 * dt, q0, ql, cfg, wsh);
        cur = next;
        traj.states.push_back(cur);
        diag_b.halved = true;
        diag_b.iterations += diag_a.iterations;
        traj.diagnostics.push_back(std::move(diag_b));
      } catch (const solver_error& e2) {
        throw solver_error(std::string("run_transient: step failed twice at index ") +
                               std::to_string(j) + ": " + e2.what(),
                           j);
      }
    }
  }
  return traj;
}

}  // namespace pkn
