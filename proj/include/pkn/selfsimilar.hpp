#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "pkn/mesh.hpp"
#include "pkn/numeric.hpp"
#include "pkn/quadrature.hpp"
#include "pkn/types.hpp"

namespace pkn {

/// Degenerate BVP  beta u0^3 (u + q_l*) = x u0^3 u' + 3 (u^3 u')'  on [0,1]
/// with u(1) = 0 and the inlet flux condition -3 u0^(-3/2) [u^3 u']_0 = q0*.
/// q_l* is stored nodally; for Carter-type problems ql_star_tip_amp carries
/// the coefficient of (1-x)^(-1/2) so integrals of the singular part can be
/// taken in closed form when a solver chooses to.
struct SelfSimilarProblem {
  Real beta = 1.0 / 3.0;
  Real q0_star = 1.0;
  NodalArray ql_star;
  Mesh mesh;
  Real ql_star_tip_amp = 0.0;
};

/// u(x) = u0 (1-x)^(1/3) + delta_u(x)
struct SelfSimilarSolution {
  Real u0 = 0.0;
  NodalArray delta_u;
  NodalArray u;
  int iterations = 0;
  bool converged = false;
  std::string failure;  // empty when converged
};

/// amp * (1-x)^exponent component whose tail integrals are taken analytically
struct SingularPart {
  Real amp = 0.0;
  Real exponent = 0.0;
};

inline NodalArray tail_i0_with(const TailQuadrature& quad, const Mesh& mesh, const NodalArray& reg,
                               SingularPart sing = {}) {
  NodalArray r = quad.i0(reg);
  if (sing.amp != 0.0)
    for (Index j = 0; j < mesh.size(); ++j)
      r[j] += sing.amp * power_tail_i0(sing.exponent, mesh.one_minus_x[j]);
  return r;
}

inline NodalArray tail_i1_with(const TailQuadrature& quad, const Mesh& mesh, const NodalArray& reg,
                               SingularPart sing = {}) {
  NodalArray r = quad.i1(reg);
  if (sing.amp != 0.0)
    for (Index j = 0; j < mesh.size(); ++j)
      r[j] += sing.amp * power_tail_i1(sing.exponent, mesh.one_minus_x[j]);
  return r;
}

/// G1 from its defining relation
///   3 u0^3 (1-x) G1 = -(3/4)[6 u0^2 (1-x)^(2/3) du^2 + 4 u0 (1-x)^(1/3) du^3
///                     + du^4] + (2+beta) u0^3 I1[du],
/// with the removable tip value set to zero.
inline NodalArray eval_G1(Real beta, Real u0, const NodalArray& du, const NodalArray& i1_du,
                          const Mesh& mesh) {
  if (u0 <= 0) throw config_error("G1: u0 must be positive");
  const Real u03 = u0 * u0 * u0;
  NodalArray g(mesh.size());
  for (Index j = 0; j < mesh.N; ++j) {
    const Real tau = mesh.one_minus_x[j];
    const Real t13 = std::cbrt(tau);
    const Real d = du[j];
    const Real d2 = d * d;
    const Real quart =
        -0.75 * (6.0 * u0 * u0 * t13 * t13 * d2 + 4.0 * u0 * t13 * d2 * d + d2 * d2);
    g[j] = (quart + (2.0 + beta) * u03 * i1_du[j]) / (3.0 * u03 * tau);
  }
  g[mesh.N] = 0.0;
  return g;
}

/// G2 from
///   3 (1-x) G2 = x I0[du] + (3/28)(3 beta - 1) u0 (1-x)^(7/3) + beta I1[ql*],
/// tip value zero.
inline NodalArray eval_G2(Real beta, Real u0, const NodalArray& i0_du, const NodalArray& i1_ql,
                          const Mesh& mesh) {
  if (u0 <= 0) throw config_error("G2: u0 must be positive");
  NodalArray g(mesh.size());
  const Real c = 3.0 / 28.0 * (3.0 * beta - 1.0) * u0;
  for (Index j = 0; j < mesh.N; ++j) {
    const Real tau = mesh.one_minus_x[j];
    g[j] = (mesh.nodes[j] * i0_du[j] + c * std::pow(tau, 7.0 / 3.0) + beta * i1_ql[j]) /
           (3.0 * tau);
  }
  g[mesh.N] = 0.0;
  return g;
}

inline NodalArray apply_G1(Real beta, Real u0, const NodalArray& delta_u, const Mesh& mesh) {
  TailQuadrature quad(mesh);
  return eval_G1(beta, u0, delta_u, quad.i1(delta_u), mesh);
}

inline NodalArray apply_G2(Real beta, Real u0, const NodalArray& delta_u, const NodalArray& ql_star,
                           const Mesh& mesh) {
  TailQuadrature quad(mesh);
  return eval_G2(beta, u0, quad.i0(delta_u), quad.i1(ql_star), mesh);
}

/// Root of G3(u0) = (3/4)(beta+1) u0^(5/2) + u0^(3/2) B - q0* with
/// B = (beta+1) int du + beta int ql*. For beta > -1 the positive root is
/// unique; for beta <= -1 solutions may still exist (the iteration is run
/// there too) and the smallest positive root is returned.
inline Real solve_u0_core(Real beta, Real int_du, Real int_ql, Real q0_star) {
  if (q0_star <= 0) throw config_error("solve_u0: q0* must be positive");
  const Real A = 0.75 * (beta + 1.0);
  const Real B = (beta + 1.0) * int_du + beta * int_ql;
  auto g3 = [&](Real u) { return A * std::pow(u, 2.5) + B * std::pow(u, 1.5) - q0_star; };
  auto dg3 = [&](Real u) { return 2.5 * A * std::pow(u, 1.5) + 1.5 * B * std::sqrt(u); };

  Real lo = 0.0, hi = 0.0;
  if (A > 0.0) {
    lo = (B >= 0.0) ? 0.0 : -3.0 * B / (5.0 * A);  // stationary point when B < 0
    hi = std::max({std::pow(q0_star / A, 0.4), 2.0 * lo, 1e-8});
    int guard = 0;
    while (g3(hi) <= 0.0) {
      hi *= 2.0;
      if (++guard > 200) throw solver_error("solve_u0: failed to bracket the root");
    }
  } else if (A == 0.0) {
    if (B <= 0.0) throw solver_error("solve_u0: no positive root at beta = -1");
    return std::pow(q0_star / B, 2.0 / 3.0);
  } else {
    if (B <= 0.0) throw solver_error("solve_u0: no positive root for beta < -1");
    const Real u_max = -3.0 * B / (5.0 * A);
    if (g3(u_max) <= 0.0) throw solver_error("solve_u0: no positive root for beta < -1");
    lo = 0.0;
    hi = u_max;
  }
  RootResult r = newton_bisect(g3, dg3, lo, hi, 1e-13, 200);
  if (!r.converged) throw solver_error("solve_u0: root iteration did not converge");
  return r.root;
}

inline Real solve_u0(Real beta, const NodalArray& delta_u, const NodalArray& ql_star, Real q0_star,
                     const Mesh& mesh) {
  TailQuadrature quad(mesh);
  return solve_u0_core(beta, quad.integrate(delta_u), quad.integrate(ql_star), q0_star);
}

inline NodalArray reconstruct_u(Real u0, const NodalArray& delta_u, const Mesh& mesh) {
  if (u0 <= 0) throw config_error("reconstruct_u: u0 must be positive");
  NodalArray u(mesh.size());
  for (Index j = 0; j < mesh.size(); ++j) u[j] = u0 * std::cbrt(mesh.one_minus_x[j]) + delta_u[j];
  return u;
}

/// Fixed-point iteration (G3 for u0, then delta_u <- G1 + G2), stopping when
/// the L2 relative difference of consecutive delta_u iterates drops below
/// eps. Non-convergence is reported in the result with the last iterate kept.
inline SelfSimilarSolution solve_self_similar(const SelfSimilarProblem& problem, Real eps = 1e-10,
                                              int max_iter = 200,
                                              const std::optional<NodalArray>& warm_start = {}) {
  if (problem.q0_star <= 0) throw config_error("solve_self_similar: q0* must be positive");
  if (problem.ql_star.size() != problem.mesh.size())
    throw config_error("solve_self_similar: ql* must be given at all mesh nodes");
  if (!(eps > 0)) throw config_error("solve_self_similar: eps must be positive");
  for (Index j = 0; j < problem.mesh.N; ++j)
    if (!std::isfinite(problem.ql_star[j]))
      throw config_error("solve_self_similar: ql* must be finite at interior nodes");

  const Mesh& mesh = problem.mesh;
  TailQuadrature quad(mesh);
  const NodalArray i1_ql = quad.i1(problem.ql_star);
  const Real int_ql = quad.integrate(problem.ql_star);

  SelfSimilarSolution sol;
  NodalArray du = warm_start ? *warm_start : NodalArray::Zero(mesh.size());
  Real u0 = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    sol.iterations = it;
    try {
      u0 = solve_u0_core(problem.beta, quad.integrate(du), int_ql, problem.q0_star);
    } catch (const solver_error& e) {
      sol.u0 = u0;
      sol.delta_u = du;
      sol.failure = e.what();
      return sol;
    }
    NodalArray du_new = eval_G1(problem.beta, u0, du, quad.i1(du), mesh) +
                        eval_G2(problem.beta, u0, quad.i0(du), i1_ql, mesh);
    if (!du_new.allFinite()) {
      sol.u0 = u0;
      sol.delta_u = du;
      sol.failure = "iterates lost finiteness";
      return sol;
    }
    const Real nn = du_new.matrix().norm();
    const Real diff = (du_new - du).matrix().norm();
    du = du_new;
    if (diff <= eps * nn || (nn == 0.0 && diff == 0.0)) {
      u0 = solve_u0_core(problem.beta, quad.integrate(du), int_ql, problem.q0_star);
      sol.u0 = u0;
      sol.delta_u = du;
      sol.u = reconstruct_u(u0, du, mesh);
      sol.converged = true;
      return sol;
    }
  }
  sol.u0 = u0;
  sol.delta_u = du;
  sol.failure = "max_iter reached";
  return sol;
}

/// Nodal residual of the twice-integrated equation for a candidate (u0, du):
///   R = 3 u0^3 (1-x) du - { -(3/4)[...] + u0^3 I0[du] + 2 u0^3 I1[u]
///       - (1-x) u0^3 I0[u] + beta u0^3 I1[u + ql*] }.
inline NodalArray twice_integrated_residual(const SelfSimilarProblem& problem, Real u0,
                                            const NodalArray& du) {
  const Mesh& mesh = problem.mesh;
  TailQuadrature quad(mesh);
  const NodalArray u = reconstruct_u(u0, du, mesh);
  const NodalArray i0_du = quad.i0(du);
  const NodalArray i1_u = quad.i1(u);
  const NodalArray i0_u = quad.i0(u);
  const NodalArray i1_uq = quad.i1((u + problem.ql_star).eval());
  const Real u03 = u0 * u0 * u0;
  NodalArray r(mesh.size());
  for (Index j = 0; j < mesh.size(); ++j) {
    const Real tau = mesh.one_minus_x[j];
    const Real t13 = std::cbrt(tau);
    const Real d = du[j];
    const Real d2 = d * d;
    const Real quart =
        -0.75 * (6.0 * u0 * u0 * t13 * t13 * d2 + 4.0 * u0 * t13 * d2 * d + d2 * d2);
    const Real rhs = quart + u03 * i0_du[j] + 2.0 * u03 * i1_u[j] - tau * u03 * i0_u[j] +
                     problem.beta * u03 * i1_uq[j];
    r[j] = 3.0 * u03 * tau * d - rhs;
  }
  return r;
}

}  // namespace pkn
