#pragma once

#include <Eigen/Dense>

#include "pkn/mesh.hpp"
#include "pkn/types.hpp"

namespace pkn {

/// Tail integrals on the graded mesh,
///   I0_j = int_{x_j}^{1} f(xi) dxi,
///   I1_j = int_{x_j}^{1} (xi - x_j) f(xi) dxi,
/// evaluated in the transformed coordinate s (x = 1-(1-s)^rho, Jacobian
/// rho(1-s)^(rho-1)) with composite Simpson on the uniform s-grid. Tails with
/// an odd panel count get one cubic-interpolatory end panel so that every row
/// stays exact for integrands that are polynomials of degree <= 3 in s. The
/// single-panel row at the tip uses a product rule: the nodal function is
/// interpolated and the Jacobian is integrated by exact moments, which keeps
/// cubic exactness and avoids a large self-weight at the near-tip node.
class TailQuadrature {
 public:
  explicit TailQuadrature(const Mesh& mesh) : N_(mesh.N) {
    const Index n = mesh.size();
    const Real h = 1.0 / static_cast<Real>(N_);
    Eigen::MatrixXd ws = Eigen::MatrixXd::Zero(n, n);

    for (Index j = 0; j + 1 < N_; ++j) {
      const Index m = N_ - j;
      if (m % 2 == 0) {
        addSimpson(ws, j, j, N_, h);
      } else {
        // cubic rule on the first panel [s_j, s_{j+1}] from nodes j..j+3
        ws(j, j) += h * 9.0 / 24.0;
        ws(j, j + 1) += h * 19.0 / 24.0;
        ws(j, j + 2) += h * -5.0 / 24.0;
        ws(j, j + 3) += h * 1.0 / 24.0;
        addSimpson(ws, j, j + 1, N_, h);
      }
    }

    // fold in the Jacobian
    NodalArray xprime(n);
    for (Index k = 0; k <= N_; ++k)
      xprime[k] = mesh.rho * std::pow(1.0 - mesh.s[k], mesh.rho - 1.0);
    w0_ = ws;
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k) w0_(j, k) *= xprime[k];

    // product rule for the last interior row: weights on the trailing nodes
    // matching the moments int_{s_{N-1}}^{1} u^k rho (1-s)^(rho-1) ds exactly
    {
      const Index j = N_ - 1;
      const Index npts = std::min<Index>(4, N_ + 1);
      const Index first = N_ + 1 - npts;  // nodes first..N
      Eigen::MatrixXd V(npts, npts);
      Eigen::VectorXd mom(npts);
      for (Index k = 0; k < npts; ++k) {
        // moment of (s - s_{N-1})^k over the last panel, closed form
        Real mk = 0.0;
        for (Index i = 0; i <= k; ++i)
          mk += binom(k, i) * ((i % 2) ? -1.0 : 1.0) * mesh.rho / (mesh.rho + i);
        mom[k] = mk * std::pow(h, static_cast<Real>(k) + mesh.rho);
        for (Index c = 0; c < npts; ++c)
          V(k, c) = std::pow(mesh.s[first + c] - mesh.s[j], static_cast<Real>(k));
      }
      Eigen::VectorXd wts = V.partialPivLu().solve(mom);
      for (Index c = 0; c < npts; ++c) w0_(j, first + c) = wts[c];
    }

    // (x_k - x_j) factor for I1
    w1_ = w0_;
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k) w1_(j, k) = w0_(j, k) * (mesh.nodes[k] - mesh.nodes[j]);
  }

  /// I0 at every node; I0_N = 0.
  NodalArray i0(const NodalArray& f) const { return w0_ * f.matrix(); }
  /// I1 at every node; I1_N = 0.
  NodalArray i1(const NodalArray& f) const { return w1_ * f.matrix(); }
  /// int_0^1 f dx
  Real integrate(const NodalArray& f) const { return w0_.row(0).dot(f.matrix()); }
  /// nodal weight matrices (row j applied to f gives I0_j resp. I1_j)
  const Eigen::MatrixXd& i0_matrix() const { return w0_; }
  const Eigen::MatrixXd& i1_matrix() const { return w1_; }

  Index gridSize() const { return N_ + 1; }

 private:
  static void addSimpson(Eigen::MatrixXd& ws, Index row, Index first, Index last, Real h) {
    if (last <= first) return;
    for (Index k = first; k + 2 <= last; k += 2) {
      ws(row, k) += h / 3.0;
      ws(row, k + 1) += 4.0 * h / 3.0;
      ws(row, k + 2) += h / 3.0;
    }
  }

  static Real binom(Index k, Index i) {
    Real r = 1.0;
    for (Index t = 0; t < i; ++t) r = r * static_cast<Real>(k - t) / static_cast<Real>(t + 1);
    return r;
  }

  Index N_;
  Eigen::MatrixXd w0_;
  Eigen::MatrixXd w1_;
};

/// Analytic tails of the pure power (1-xi)^p: used when a singular component
/// is split off and integrated in closed form.
inline Real power_tail_i0(Real p, Real one_minus_x) {
  return std::pow(one_minus_x, p + 1.0) / (p + 1.0);
}
inline Real power_tail_i1(Real p, Real one_minus_x) {
  return std::pow(one_minus_x, p + 2.0) / ((p + 1.0) * (p + 2.0));
}

inline std::pair<NodalArray, NodalArray> tail_integrals(const Mesh& mesh, const NodalArray& f) {
  if (f.size() != mesh.size())
    throw config_error("tail_integrals: f must be given at all mesh nodes");
  TailQuadrature q(mesh);
  return {q.i0(f), q.i1(f)};
}

}  // namespace pkn
