#pragma once

#include <cmath>

#include "pkn/types.hpp"

namespace pkn {

/// Graded spatial mesh on [0,1], x_j = 1 - (1 - j/N)^rho.
/// rho = 1 is uniform; rho > 1 concentrates nodes at the tip x = 1.
struct Mesh {
  Index N = 0;          // number of subintervals; N+1 nodes
  Real rho = 3.0;       // grading exponent
  NodalArray nodes;     // x_0 = 0 < ... < x_N = 1
  NodalArray s;         // uniform transformed coordinate s_j = j/N
  NodalArray one_minus_x;  // 1 - x_j, computed as (1-s_j)^rho (exact at ends)

  Index size() const { return N + 1; }
};

inline Mesh build_mesh(Index N, Real rho = 3.0) {
  if (N < 2) throw config_error("build_mesh: N must be >= 2");
  if (!(rho >= 1.0)) throw config_error("build_mesh: rho must be >= 1");
  Mesh m;
  m.N = N;
  m.rho = rho;
  m.nodes.resize(N + 1);
  m.s.resize(N + 1);
  m.one_minus_x.resize(N + 1);
  for (Index j = 0; j <= N; ++j) {
    const Real sj = static_cast<Real>(j) / static_cast<Real>(N);
    const Real tail = std::pow(1.0 - sj, rho);
    m.s[j] = sj;
    m.one_minus_x[j] = tail;
    m.nodes[j] = 1.0 - tail;
  }
  m.nodes[0] = 0.0;
  m.one_minus_x[0] = 1.0;
  m.nodes[N] = 1.0;
  m.one_minus_x[N] = 0.0;
  return m;
}

}  // namespace pkn
