#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pkn/mesh.hpp"
#include "pkn/numeric.hpp"
#include "pkn/quadrature.hpp"
#include "pkn/selfsimilar.hpp"
#include "pkn/types.hpp"

namespace pkn {

/// Tip-anchored opening profile h(x) = (1-x)^(1/3) (1 + s(x)), described by
/// s and its first two derivatives in tau = 1-x. `tip_singular_amp` is the
/// coefficient of tau^(-1/2) in x h' + 3 (h^3 h')', nonzero only for shapes
/// with reduced smoothness at the tip (Carter-type leak-off).
struct Shape {
  std::string name;
  std::function<Real(Real)> s;
  std::function<Real(Real)> ds;
  std::function<Real(Real)> d2s;
  Real tip_singular_amp = 0.0;
};

inline Real shape_h(const Shape& sh, Real tau) {
  return std::cbrt(tau) * (1.0 + sh.s(tau));
}

/// dh/dx (unbounded at tau = 0; callers stay off the tip node)
inline Real shape_dh_dx(const Shape& sh, Real tau) {
  const Real t13 = std::cbrt(tau);
  return -((1.0 + sh.s(tau)) / (3.0 * t13 * t13) + t13 * sh.ds(tau));
}

/// d2h/dx2
inline Real shape_d2h_dx2(const Shape& sh, Real tau) {
  const Real t13 = std::cbrt(tau);
  const Real t23 = t13 * t13;
  return -(2.0 / 9.0) * (1.0 + sh.s(tau)) / (t23 * tau) + (2.0 / 3.0) * sh.ds(tau) / t23 +
         t13 * sh.d2s(tau);
}

/// g = -h^2 dh/dx, the shape factor of the fluid velocity V = q/w. Written in
/// a form with the tau^(-2/3) cancellation done analytically; g(0) = 1/3.
inline Real shape_g(const Shape& sh, Real tau) {
  if (tau <= 0.0) return 1.0 / 3.0;
  const Real sp = 1.0 + sh.s(tau);
  return sp * sp * sp / 3.0 + tau * sp * sp * sh.ds(tau);
}

/// S(x) = x h' + 3 (h^3 h')', the stationary part of the governing operator
/// applied to h. The individually singular tau^(-2/3) pieces cancel; this
/// form evaluates the cancelled combination directly.
inline Real shape_S(const Shape& sh, Real tau) {
  if (tau <= 0.0) return 0.0;
  const Real s = sh.s(tau);
  const Real ds = sh.ds(tau);
  const Real d2s = sh.d2s(tau);
  const Real sp = 1.0 + s;
  const Real t13 = std::cbrt(tau);
  const Real t23 = t13 * t13;
  const Real t43 = tau * t13;
  // (1+s)^3 - (1-tau) expanded so no near-equal subtraction occurs
  const Real bracket = tau + s * (3.0 + s * (3.0 + s));
  return sp * bracket / (3.0 * t23) - (1.0 - tau) * t13 * ds + 8.0 * t13 * sp * sp * sp * ds +
         9.0 * t43 * sp * sp * ds * ds + 3.0 * t43 * sp * sp * sp * d2s;
}

/// Smooth benchmark shape: s(x) = -1/(8e) (1/3 - beta)(1-x) + 0.05 (1-x)^2
/// with beta the similarity parameter the shape is built for.
inline Shape make_shape_s1_beta(Real beta) {
  const Real a = (1.0 / (8.0 * M_E)) * (1.0 / 3.0 - beta);
  const Real b = 0.05;
  Shape sh;
  sh.name = "s1";
  sh.s = [a, b](Real tau) { return -a * tau + b * tau * tau; };
  sh.ds = [a, b](Real tau) { return -a + 2.0 * b * tau; };
  sh.d2s = [b](Real) { return 2.0 * b; };
  return sh;
}

inline Real power_family_beta(Real gamma) { return 2.0 * gamma / (3.0 * gamma + 1.0); }

inline Shape make_shape_s1(Real gamma) { return make_shape_s1_beta(power_family_beta(gamma)); }

/// Carter-type shape s(x) = c (1-x)^(1/6); the induced leak-off behaves like
/// (1-x)^(-1/2) at the tip. Closed form of gamma_v for this family:
///   gamma_v(c) = 1 + (c/2)/(1+c) - (1+c)^(-3).
inline Real carter_gamma_v(Real c) {
  const Real p = 1.0 + c;
  return 1.0 + 0.5 * c / p - 1.0 / (p * p * p);
}

inline Shape make_shape_carter(Real amplitude) {
  const Real c = amplitude;
  Shape sh;
  sh.name = "carter";
  sh.s = [c](Real tau) { return c * std::pow(tau, 1.0 / 6.0); };
  sh.ds = [c](Real tau) { return c / 6.0 * std::pow(tau, -5.0 / 6.0); };
  sh.d2s = [c](Real tau) { return -5.0 * c / 36.0 * std::pow(tau, -11.0 / 6.0); };
  sh.tip_singular_amp = 7.0 * c / 4.0;
  return sh;
}

/// Amplitude for which gamma_v matches the target average-velocity spread.
inline Real carter_amplitude_for_gamma_v(Real target) {
  auto f = [target](Real c) { return carter_gamma_v(c) - target; };
  auto df = [](Real c) {
    const Real p = 1.0 + c;
    return 0.5 / (p * p) + 3.0 / (p * p * p * p);
  };
  RootResult r = newton_bisect(f, df, 0.0, 2.0, 1e-14, 200);
  if (!r.converged) throw solver_error("carter_amplitude_for_gamma_v: no root");
  return r.root;
}

inline Shape make_shape_carter() { return make_shape_carter(carter_amplitude_for_gamma_v(0.411)); }

/// Custom polynomial profile s(x) = sum_k c_k (1-x)^k, k >= 1.
inline Shape make_shape_poly(std::vector<Real> coeffs) {
  Shape sh;
  sh.name = "poly";
  sh.s = [coeffs](Real tau) {
    Real acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = (acc + *it) * tau;
    return acc;
  };
  sh.ds = [coeffs](Real tau) {
    Real acc = 0.0, p = 1.0;
    for (std::size_t k = 1; k <= coeffs.size(); ++k) {
      acc += static_cast<Real>(k) * coeffs[k - 1] * p;
      p *= tau;
    }
    return acc;
  };
  sh.d2s = [coeffs](Real tau) {
    Real acc = 0.0, p = 1.0;
    for (std::size_t k = 2; k <= coeffs.size(); ++k) {
      acc += static_cast<Real>(k) * static_cast<Real>(k - 1) * coeffs[k - 1] * p;
      p *= tau;
    }
    return acc;
  };
  return sh;
}

enum class TimeFamily { Exponential, Power };

/// Manufactured solution w = u0 psi(t) h(x) with psi = e^(gamma t) or
/// (a+t)^gamma. Leak-off and inlet flux are reverse-engineered so the
/// normalized governing equation holds exactly.
struct BenchmarkSpec {
  TimeFamily family = TimeFamily::Power;
  Real gamma = 0.2;
  Real a = 1.0;  // power-family time offset
  Real u0 = 1.0;
  Shape shape = make_shape_s1(0.2);
};

inline void validate(const BenchmarkSpec& spec) {
  if (spec.u0 <= 0) throw config_error("benchmark: u0 must be positive");
  if (spec.family == TimeFamily::Exponential) {
    if (spec.gamma <= 0) throw config_error("benchmark: exponential family requires gamma > 0");
  } else {
    if (spec.gamma <= -1.0 / 3.0) throw config_error("benchmark: power family requires gamma > -1/3");
    if (spec.a < 0) throw config_error("benchmark: power family requires a >= 0");
  }
}

inline Real benchmark_beta(const BenchmarkSpec& spec) {
  return spec.family == TimeFamily::Exponential ? 2.0 / 3.0 : power_family_beta(spec.gamma);
}

inline Real benchmark_psi(const BenchmarkSpec& spec, Real t) {
  return spec.family == TimeFamily::Exponential ? std::exp(spec.gamma * t)
                                                : std::pow(spec.a + t, spec.gamma);
}

inline Real benchmark_dpsi(const BenchmarkSpec& spec, Real t) {
  return spec.family == TimeFamily::Exponential
             ? spec.gamma * std::exp(spec.gamma * t)
             : spec.gamma * std::pow(spec.a + t, spec.gamma - 1.0);
}

inline Real benchmark_length(const BenchmarkSpec& spec, Real t) {
  const Real u03 = spec.u0 * spec.u0 * spec.u0;
  if (spec.family == TimeFamily::Exponential)
    return std::sqrt(2.0 * u03 / (9.0 * spec.gamma)) * std::exp(1.5 * spec.gamma * t);
  return std::sqrt(2.0 * u03 / (3.0 * (3.0 * spec.gamma + 1.0))) *
         std::pow(spec.a + t, 0.5 * (3.0 * spec.gamma + 1.0));
}

/// Time factor of the leak-off, q_l = u0 T(t) [ (gamma/beta) S - gamma h ].
inline Real benchmark_ql_timefactor(const BenchmarkSpec& spec, Real t) {
  return spec.family == TimeFamily::Exponential ? std::exp(spec.gamma * t)
                                                : std::pow(spec.a + t, spec.gamma - 1.0);
}

/// gamma/beta, finite for every admissible gamma (including gamma = 0).
inline Real benchmark_gamma_over_beta(const BenchmarkSpec& spec) {
  return spec.family == TimeFamily::Exponential ? 1.5 * spec.gamma
                                                : 0.5 * (3.0 * spec.gamma + 1.0);
}

inline Real benchmark_ql_at(const BenchmarkSpec& spec, Real t, Real tau) {
  const Real gob = benchmark_gamma_over_beta(spec);
  return spec.u0 * benchmark_ql_timefactor(spec, t) *
         (gob * shape_S(spec.shape, tau) - spec.gamma * shape_h(spec.shape, tau));
}

/// Coefficient of (1-x)^(-1/2) in q_l(t, .), nonzero for Carter-type shapes.
inline Real benchmark_ql_tip_amplitude(const BenchmarkSpec& spec, Real t) {
  if (spec.shape.tip_singular_amp == 0.0) return 0.0;
  return spec.u0 * benchmark_ql_timefactor(spec, t) * benchmark_gamma_over_beta(spec) *
         spec.shape.tip_singular_amp;
}

inline Real benchmark_q0(const BenchmarkSpec& spec, Real t) {
  const Real psi = benchmark_psi(spec, t);
  const Real u0psi = spec.u0 * psi;
  const Real h0 = shape_h(spec.shape, 1.0);
  const Real dh0 = shape_dh_dx(spec.shape, 1.0);
  return -u0psi * u0psi * u0psi * u0psi * h0 * h0 * h0 * dh0 / benchmark_length(spec, t);
}

struct BenchmarkFields {
  NodalArray w;
  NodalArray w_t;
  NodalArray ql;  // tip node stored as 0 (limit for smooth shapes; Carter is singular there)
  Real w0 = 0;
  Real L = 0;
  Real V0 = 0;
  Real q0 = 0;
  Real beta = 0;
  Real alpha_exp = 1;  // exponent of psi in the leak-off time factor
};

inline BenchmarkFields eval_benchmark(const BenchmarkSpec& spec, Real t, const Mesh& mesh) {
  validate(spec);
  if (t < 0) throw config_error("eval_benchmark: t must be >= 0");
  if (spec.family == TimeFamily::Power && spec.a + t <= 0)
    throw config_error("eval_benchmark: a + t must be positive");
  const Index n = mesh.size();
  BenchmarkFields f;
  f.w.resize(n);
  f.w_t.resize(n);
  f.ql.resize(n);
  const Real psi = benchmark_psi(spec, t);
  const Real dpsi = benchmark_dpsi(spec, t);
  for (Index j = 0; j < n; ++j) {
    const Real tau = mesh.one_minus_x[j];
    const Real h = shape_h(spec.shape, tau);
    f.w[j] = spec.u0 * psi * h;
    f.w_t[j] = spec.u0 * dpsi * h;
    f.ql[j] = (j == mesh.N) ? 0.0 : benchmark_ql_at(spec, t, tau);
  }
  f.w0 = spec.u0 * psi;
  f.L = benchmark_length(spec, t);
  f.V0 = f.w0 * f.w0 * f.w0 / (3.0 * f.L);
  f.q0 = benchmark_q0(spec, t);
  f.beta = benchmark_beta(spec);
  if (spec.family == TimeFamily::Exponential)
    f.alpha_exp = 1.0;
  else
    f.alpha_exp = spec.gamma != 0.0 ? (spec.gamma - 1.0) / spec.gamma
                                    : std::numeric_limits<Real>::quiet_NaN();
  return f;
}

/// Normalized spread of the fluid velocity V = q/w along the crack,
///   gamma_v = [max_x V - min_x V] / int_0^1 V dx,
/// with extrema over mesh nodes and the integral by tail quadrature.
inline Real gamma_v(const BenchmarkSpec& spec, Real t, const Mesh& mesh) {
  validate(spec);
  const Real psi = benchmark_psi(spec, t);
  const Real u0psi = spec.u0 * psi;
  const Real scale = u0psi * u0psi * u0psi / benchmark_length(spec, t);
  NodalArray V(mesh.size());
  for (Index j = 0; j < mesh.size(); ++j) {
    const Real tau = mesh.one_minus_x[j];
    if (j < mesh.N && 1.0 + spec.shape.s(tau) <= 0.0)
      throw solver_error("gamma_v: nonpositive opening in the interior");
    V[j] = scale * shape_g(spec.shape, tau);
  }
  TailQuadrature q(mesh);
  return (V.maxCoeff() - V.minCoeff()) / q.integrate(V);
}

/// Self-similar BVP induced by the benchmark: beta from the family, the
/// time-stripped leak-off shape, and the (time-independent) inlet parameter
/// q0* = -3 u0^(5/2) h^3(0) h'(0). Requires gamma != 0 for the power family
/// (at gamma = 0 the stripped q_l* is not finite).
inline SelfSimilarProblem selfsimilar_problem_from_benchmark(const BenchmarkSpec& spec,
                                                             const Mesh& mesh) {
  validate(spec);
  const Real beta = benchmark_beta(spec);
  if (beta == 0.0)
    throw config_error("selfsimilar_problem_from_benchmark: beta = 0 has no finite q_l*");
  SelfSimilarProblem p;
  p.beta = beta;
  p.mesh = mesh;
  p.ql_star.resize(mesh.size());
  for (Index j = 0; j < mesh.size(); ++j) {
    const Real tau = mesh.one_minus_x[j];
    p.ql_star[j] = (j == mesh.N)
                       ? 0.0
                       : spec.u0 * (shape_S(spec.shape, tau) / beta - shape_h(spec.shape, tau));
  }
  const Real h0 = shape_h(spec.shape, 1.0);
  p.q0_star = -3.0 * std::pow(spec.u0, 2.5) * h0 * h0 * h0 * shape_dh_dx(spec.shape, 1.0);
  p.ql_star_tip_amp = spec.u0 * spec.shape.tip_singular_amp / beta;
  return p;
}

/// Manufactured BVP with a freely chosen beta (the section-2 sweep object):
/// the s1 shape is rebuilt with the given beta and q_l* manufactured so that
/// u(x) = u0 h(x) solves the problem exactly. beta = 0 is admitted because
/// the iteration only ever consumes beta * q_l* (stored premultiplied is not
/// needed; q_l* is simply unused there and set to zero).
struct BetaBenchmark {
  SelfSimilarProblem problem;
  NodalArray u_exact;
  Real u0_exact = 1.0;
};

inline BetaBenchmark make_beta_benchmark(Real beta, const Mesh& mesh, Real u0 = 1.0) {
  Shape sh = make_shape_s1_beta(beta);
  BetaBenchmark b;
  b.problem.beta = beta;
  b.problem.mesh = mesh;
  b.problem.ql_star.resize(mesh.size());
  b.u_exact.resize(mesh.size());
  for (Index j = 0; j < mesh.size(); ++j) {
    const Real tau = mesh.one_minus_x[j];
    b.u_exact[j] = u0 * shape_h(sh, tau);
    if (j == mesh.N || beta == 0.0)
      b.problem.ql_star[j] = 0.0;
    else
      b.problem.ql_star[j] = u0 * (shape_S(sh, tau) / beta - shape_h(sh, tau));
  }
  const Real h0 = shape_h(sh, 1.0);
  b.problem.q0_star = -3.0 * std::pow(u0, 2.5) * h0 * h0 * h0 * shape_dh_dx(sh, 1.0);
  b.u0_exact = u0;
  return b;
}

}  // namespace pkn
