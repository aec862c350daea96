#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "pkn/types.hpp"

namespace pkn {

/// ||u_new - u_old||_2 / ||u_new||_2
inline Real l2_relative_diff(const NodalArray& u_new, const NodalArray& u_old) {
  if (u_new.size() != u_old.size())
    throw config_error("l2_relative_diff: size mismatch");
  const Real denom = u_new.matrix().norm();
  if (denom == 0.0) throw config_error("l2_relative_diff: zero reference norm");
  return (u_new - u_old).matrix().norm() / denom;
}

struct RootResult {
  Real root = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Newton-Raphson on [lo, hi] with a bisection safeguard. Requires
/// f(lo) <= 0 <= f(hi); keeps the bracket valid at every step.
inline RootResult newton_bisect(const std::function<Real(Real)>& f,
                                const std::function<Real(Real)>& df, Real lo, Real hi,
                                Real rel_tol = 1e-13, int max_iter = 100) {
  RootResult res;
  Real flo = f(lo);
  Real fhi = f(hi);
  if (flo > 0.0 || fhi < 0.0) return res;  // not bracketed
  Real x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    const Real fx = f(x);
    if (fx == 0.0) {
      res.root = x;
      res.converged = true;
      return res;
    }
    if (fx < 0.0)
      lo = x;
    else
      hi = x;
    const Real dfx = df(x);
    Real xn = (dfx != 0.0) ? x - fx / dfx : std::numeric_limits<Real>::quiet_NaN();
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);  // safeguard
    if (std::abs(xn - x) <= rel_tol * std::abs(xn)) {
      res.root = xn;
      res.converged = true;
      return res;
    }
    x = xn;
  }
  res.root = x;
  return res;
}

}  // namespace pkn
