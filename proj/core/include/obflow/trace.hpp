#ifndef OBFLOW_TRACE_HPP
#define OBFLOW_TRACE_HPP

#include <iosfwd>

#include "obflow/stepper.hpp"

namespace obflow {

/// CSV trace with the fixed column set
///   n, t, F, kinetic, entropy, visc_dissipation, stress_dissipation,
///   diffusion_dissipation, forcing_pairing, slack, picard_iters,
///   min_eig_stress
/// The header is always emitted; row n = 0 reports the initial state with
/// zero step columns. Floats carry 17 significant digits so traces are
/// bit-stable across reruns.
template <class State>
void write_trace_csv(std::ostream& os, const RunResult<State>& run);

}  // namespace obflow

#endif
