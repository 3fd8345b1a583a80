#include "obflow/trace.hpp"

#include <ostream>

#include "obflow/certificate.hpp"

namespace obflow {

template <class State>
void write_trace_csv(std::ostream& os, const RunResult<State>& run) {
  os << "n,t,F,kinetic,entropy,visc_dissipation,stress_dissipation,diffusion_dissipation,"
        "forcing_pairing,slack,picard_iters,min_eig_stress\n";
  os << "0,0," << format_g17(run.initial_record.energy) << ','
     << format_g17(run.initial_record.kinetic) << ',' << format_g17(run.initial_record.entropy)
     << ",0,0,0,0,0,0," << format_g17(run.initial_record.min_eig_stress) << '\n';
  for (const StepRecord& rec : run.steps) {
    if (!rec.converged) break;
    os << rec.n << ',' << format_g17(rec.t) << ',' << format_g17(rec.audit.total) << ','
       << format_g17(rec.audit.kinetic) << ',' << format_g17(rec.audit.entropy) << ','
       << format_g17(rec.audit.viscous_dissipation) << ','
       << format_g17(rec.audit.stress_dissipation) << ','
       << format_g17(rec.audit.diffusion_dissipation) << ','
       << format_g17(rec.audit.forcing_pairing) << ',' << format_g17(rec.audit.slack) << ','
       << rec.picard_iterations << ',' << format_g17(rec.min_eig_stress) << '\n';
  }
}

template void write_trace_csv<DiscreteStateDG0>(std::ostream&, const RunResult<DiscreteStateDG0>&);
template void write_trace_csv<DiscreteStateFEM1>(std::ostream&,
                                                 const RunResult<DiscreteStateFEM1>&);

}  // namespace obflow
