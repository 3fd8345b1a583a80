#include "obflow/certificate.hpp"

#include <cstdio>
#include <limits>
#include <ostream>

namespace obflow {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <class State>
RunCertificate certify(const std::string& scheme_id, const std::string& config_hash,
                       const RunResult<State>& run, const TimeGrid& grid, double audit_tol) {
  RunCertificate cert;
  cert.scheme = scheme_id;
  cert.config_hash = config_hash;
  cert.steps = static_cast<int>(run.steps.size());
  cert.complete = run.completed;
  cert.audit_tol = audit_tol;
  cert.all_converged = true;
  cert.min_slack = std::numeric_limits<double>::infinity();
  cert.min_eig_overall = run.initial_record.min_eig_stress;
  double cum = 0.0;
  for (std::size_t i = 0; i < run.steps.size(); ++i) {
    const StepRecord& rec = run.steps[i];
    if (!rec.converged) {
      cert.all_converged = false;
      continue;
    }
    cert.slacks.push_back(rec.audit.slack);
    cert.min_slack = std::min(cert.min_slack, rec.audit.slack);
    cum += grid.dts[i] * rec.audit.slack;
    cert.min_eig.push_back(rec.min_eig_stress);
    cert.min_eig_overall = std::min(cert.min_eig_overall, rec.min_eig_stress);
  }
  if (cert.slacks.empty()) cert.min_slack = 0.0;
  cert.cumulative_residual = cum;
  cert.pass = cert.complete && cert.all_converged && cert.min_slack >= -audit_tol;
  return cert;
}

template RunCertificate certify<DiscreteStateDG0>(const std::string&, const std::string&,
                                                  const RunResult<DiscreteStateDG0>&,
                                                  const TimeGrid&, double);
template RunCertificate certify<DiscreteStateFEM1>(const std::string&, const std::string&,
                                                   const RunResult<DiscreteStateFEM1>&,
                                                   const TimeGrid&, double);

void write_certificate(std::ostream& os, const RunCertificate& cert) {
  os << "scheme = " << cert.scheme << '\n';
  os << "config_hash = " << cert.config_hash << '\n';
  os << "steps = " << cert.steps << '\n';
  os << "complete = " << (cert.complete ? "true" : "false") << '\n';
  os << "all_converged = " << (cert.all_converged ? "true" : "false") << '\n';
  os << "audit_tol = " << format_g17(cert.audit_tol) << '\n';
  os << "min_slack = " << format_g17(cert.min_slack) << '\n';
  os << "cumulative_residual = " << format_g17(cert.cumulative_residual) << '\n';
  os << "min_eig_overall = " << format_g17(cert.min_eig_overall) << '\n';
  os << "timestep_restriction_satisfied = " << (cert.timestep_restriction ? "true" : "false")
     << '\n';
  if (!cert.regime_note.empty()) os << "regime_note = " << cert.regime_note << '\n';
  for (std::size_t i = 0; i < cert.slacks.size(); ++i)
    os << "step_" << (i + 1) << ".slack = " << format_g17(cert.slacks[i]) << '\n';
  for (std::size_t i = 0; i < cert.min_eig.size(); ++i)
    os << "step_" << (i + 1) << ".min_eig = " << format_g17(cert.min_eig[i]) << '\n';
  os << "verdict = " << (cert.pass ? "pass" : "fail") << '\n';
}

}  // namespace obflow
