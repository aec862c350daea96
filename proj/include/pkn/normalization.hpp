#pragma once

#include <algorithm>
#include <cmath>

#include "pkn/types.hpp"

namespace pkn {

/// Scales between the physical PKN formulation and the normalized one.
/// M = 12 mu (channel flow constant), k = 2E/(pi h (1-nu^2)) (local
/// elasticity), l_star = initial half-length, t_n = M/(k l_star).
struct NormalizationMap {
  Real M = 1.0;
  Real k = 1.0;
  Real l_star = 1.0;

  Real time_scale() const { return M / (k * l_star); }
};

inline NormalizationMap make_normalization(Real mu, Real E, Real nu, Real height, Real l_star) {
  if (mu <= 0 || E <= 0 || height <= 0 || l_star <= 0 || !(nu > -1.0 && nu < 0.5))
    throw config_error("make_normalization: nonpositive or out-of-range physical constants");
  NormalizationMap m;
  m.M = 12.0 * mu;
  m.k = 2.0 * E / (M_PI * height * (1.0 - nu * nu));
  m.l_star = l_star;
  return m;
}

/// Point sample of the physical fields; x is the lab coordinate, l the
/// current half-length (needed for x -> x/l).
struct PhysicalSample {
  Real t = 0, x = 0, w = 0, w0 = 0, l = 1, q0 = 0, ql = 0;
};

struct NormalizedSample {
  Real t = 0, x = 0, w = 0, w0 = 0, L = 1, q0 = 0, ql = 0;
};

inline void validate(const NormalizationMap& map) {
  if (map.M <= 0 || map.k <= 0 || map.l_star <= 0)
    throw config_error("normalization: scales must be strictly positive");
}

inline NormalizedSample normalize(const NormalizationMap& map, const PhysicalSample& p) {
  validate(map);
  if (p.l <= 0) throw config_error("normalize: crack length must be positive");
  const Real tn = map.time_scale();
  NormalizedSample n;
  n.t = p.t / tn;
  n.x = p.x / p.l;
  n.w = p.w / map.l_star;
  n.L = p.l / map.l_star;
  n.q0 = tn * p.q0 / (map.l_star * map.l_star);
  n.ql = tn * p.ql / map.l_star;
  n.w0 = p.w0 * std::cbrt(n.L) / std::pow(map.l_star, 2.0 / 3.0);
  return n;
}

inline PhysicalSample denormalize(const NormalizationMap& map, const NormalizedSample& n) {
  validate(map);
  if (n.L <= 0) throw config_error("denormalize: crack length must be positive");
  const Real tn = map.time_scale();
  PhysicalSample p;
  p.t = n.t * tn;
  p.l = n.L * map.l_star;
  p.x = n.x * p.l;
  p.w = n.w * map.l_star;
  p.q0 = n.q0 * map.l_star * map.l_star / tn;
  p.ql = n.ql * map.l_star / tn;
  p.w0 = n.w0 * std::pow(map.l_star, 2.0 / 3.0) / std::cbrt(n.L);
  return p;
}

/// Tip behaviour of the solution: w ~ w0 (1-x)^alpha with alpha = 1/3, plus a
/// correction O((1-x)^zeta) whose exponent follows from the leak-off tip
/// exponent eta via zeta = min(4/3, 1 + eta).
struct TipAsymptotics {
  static constexpr Real alpha = 1.0 / 3.0;
  Real eta = 4.0 / 3.0;
  Real zeta = 4.0 / 3.0;
};

inline TipAsymptotics make_tip_asymptotics(Real eta) {
  if (eta < -0.5) throw config_error("tip asymptotics: eta must be >= -1/2");
  TipAsymptotics t;
  t.eta = eta;
  t.zeta = std::min(4.0 / 3.0, 1.0 + eta);
  return t;
}

}  // namespace pkn
