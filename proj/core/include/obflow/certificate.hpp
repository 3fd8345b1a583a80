#ifndef OBFLOW_CERTIFICATE_HPP
#define OBFLOW_CERTIFICATE_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "obflow/stepper.hpp"

namespace obflow {

/// Machine-readable stability certificate for one run. Serialized as flat
/// `key = value` lines with floats at 17 significant digits; recomputation
/// from the same trajectory is bit-identical.
struct RunCertificate {
  std::string scheme;
  std::string config_hash;
  int steps = 0;
  bool complete = false;
  bool all_converged = false;
  double audit_tol = 0.0;
  std::vector<double> slacks;
  double min_slack = 0.0;
  /// sum_m dt_m slack_m: the gap in the cumulative telescoped bound when the
  /// forcing pairing is kept exact (no Poincare constant involved).
  double cumulative_residual = 0.0;
  std::vector<double> min_eig;  // SPD timeline, one entry per step
  double min_eig_overall = 0.0;
  bool pass = false;
  std::string regime_note;            // empty when inside the analyzed regime
  bool timestep_restriction = false;  // informational predicate, never enforced
};

template <class State>
RunCertificate certify(const std::string& scheme_id, const std::string& config_hash,
                       const RunResult<State>& run, const TimeGrid& grid, double audit_tol);

void write_certificate(std::ostream& os, const RunCertificate& cert);
std::string format_g17(double v);

}  // namespace obflow

#endif
