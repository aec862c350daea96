#pragma once

#include "pkn/benchmarks.hpp"
#include "pkn/transient.hpp"

namespace pkn {

inline FluxFn make_q0_function(const BenchmarkSpec& spec) {
  return [spec](Real t) { return benchmark_q0(spec, t); };
}

inline LeakoffFn make_ql_function(const BenchmarkSpec& spec, const Mesh& mesh) {
  LeakoffFn f;
  f.nodal = [spec, mesh](Real t) {
    NodalArray v(mesh.size());
    for (Index j = 0; j < mesh.size(); ++j)
      v[j] = (j == mesh.N) ? 0.0 : benchmark_ql_at(spec, t, mesh.one_minus_x[j]);
    return v;
  };
  if (spec.shape.tip_singular_amp != 0.0)
    f.tip_amp = [spec](Real t) { return benchmark_ql_tip_amplitude(spec, t); };
  return f;
}

inline TransientState make_initial_state(const BenchmarkSpec& spec, const Mesh& mesh) {
  BenchmarkFields f = eval_benchmark(spec, 0.0, mesh);
  TransientState st;
  st.t = 0.0;
  st.w = f.w;
  st.w_t = f.w_t;
  st.w0 = f.w0;
  st.L = f.L;
  st.V0 = f.V0;
  return st;
}

}  // namespace pkn
