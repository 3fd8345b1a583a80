#include "obflow/stepper.hpp"

#include <cmath>
#include <stdexcept>

namespace obflow {

TimeGrid TimeGrid::uniform(double t_end, int steps, double ratio_limit) {
  if (!(t_end > 0.0) || steps < 1)
    throw std::invalid_argument("TimeGrid::uniform: need t_end > 0 and steps >= 1");
  return from_steps(std::vector<double>(steps, t_end / steps), ratio_limit);
}

TimeGrid TimeGrid::from_steps(std::vector<double> steps, double ratio_limit,
                              std::optional<double> dt0) {
  if (steps.empty()) throw std::invalid_argument("TimeGrid: empty partition");
  if (!(ratio_limit >= 1.0)) throw std::invalid_argument("TimeGrid: ratio limit must be >= 1");
  for (double dt : steps)
    if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: steps must be positive");
  for (std::size_t n = 1; n < steps.size(); ++n)
    if (steps[n] > ratio_limit * steps[n - 1] * (1.0 + 1e-14))
      throw std::invalid_argument("TimeGrid: dt_" + std::to_string(n + 1) + " exceeds C*dt_" +
                                  std::to_string(n) + " (C = " + std::to_string(ratio_limit) +
                                  ")");
  TimeGrid g;
  g.dts = std::move(steps);
  g.ratio_limit = ratio_limit;
  g.dt0 = dt0.value_or(g.dts.front());  // dt_1 <= C dt_0 holds with C = 1
  if (!(g.dt0 > 0.0)) throw std::invalid_argument("TimeGrid: dt0 must be positive");
  return g;
}

double TimeGrid::total() const {
  double t = 0.0;
  for (double dt : dts) t += dt;
  return t;
}

LoadVector time_average_forcing(const VelocitySpace& space, const Forcing& f, double t_a,
                                double t_b) {
  if (!(t_b > t_a)) throw std::invalid_argument("time_average_forcing: t_b must exceed t_a");
  if (f.is_zero()) return LoadVector(space.ndof(), 0.0);
  const double mid = 0.5 * (t_a + t_b), half = 0.5 * (t_b - t_a);
  const double node = half / std::sqrt(3.0);
  const double t1 = mid - node, t2 = mid + node;
  LoadVector l1 = assemble_load(space, [&](Point x) { return f.f(t1, x); });
  const LoadVector l2 = assemble_load(space, [&](Point x) { return f.f(t2, x); });
  for (std::size_t i = 0; i < l1.size(); ++i) l1[i] = 0.5 * (l1[i] + l2[i]);
  return l1;
}

double negative_part_integral(const SimplicialMesh& mesh, const StressFieldP0& s) {
  double sum = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k)
    sum += mesh.element_area(k) * negative_part(s.value[k]).norm();
  return sum;
}

double negative_part_integral(const SimplicialMesh& mesh, const StressFieldP1& s) {
  const std::vector<double> w = lumped_vertex_weights(mesh);
  double sum = 0.0;
  for (int v = 0; v < mesh.num_vertices(); ++v) sum += w[v] * negative_part(s.value[v]).norm();
  return sum;
}

const char* scheme_kind_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::DG0: return "dg0";
    case SchemeKind::FEM1: return "fem1";
    case SchemeKind::FEM1_UNREG: return "fem1-unreg";
  }
  return "?";
}

namespace {

template <class Scheme, class State, class StepFn, class MinEigFn>
RunResult<State> run_generic(const Scheme& scheme, const State& initial, const TimeGrid& grid,
                             const Forcing& forcing, const std::vector<State>* warm_states,
                             StepFn do_step, MinEigFn min_eig) {
  RunResult<State> run;
  run.initial = initial;
  run.initial_record.energy = scheme.energy(initial);
  run.initial_record.min_eig_stress = min_eig(initial);
  {
    State zero_vel = initial;
    for (double& c : zero_vel.velocity.coeff) c = 0.0;
    run.initial_record.entropy = scheme.energy(zero_vel);
    run.initial_record.kinetic = run.initial_record.energy - run.initial_record.entropy;
  }

  PressureField pressure;
  pressure.space = scheme.pressure_tag();
  pressure.coeff.assign(pressure_dof_count(scheme.mesh(), scheme.pressure_tag()), 0.0);

  State current = initial;
  double t = 0.0;
  for (int n = 1; n <= grid.size(); ++n) {
    const double dt = grid.dts[n - 1];
    const LoadVector f = time_average_forcing(scheme.velocity_space(), forcing, t, t + dt);
    const State* warm =
        (warm_states && static_cast<int>(warm_states->size()) >= n) ? &(*warm_states)[n - 1]
                                                                    : nullptr;
    auto result = do_step(current, pressure, f, dt, warm);
    StepRecord rec;
    rec.n = n;
    rec.t = t + dt;
    rec.picard_iterations = result.picard.iterations;
    rec.residual_norm = result.picard.residual_norm;
    rec.residual_history = result.picard.residual_history;
    rec.converged = result.picard.converged;
    if (!result.picard.converged) {
      run.failure = "step " + std::to_string(n) + " failed to converge after " +
                    std::to_string(result.picard.iterations) +
                    " iterations, residual = " + std::to_string(result.picard.residual_norm);
      rec.min_eig_stress = min_eig(result.state);
      run.steps.push_back(rec);
      return run;
    }
    rec.audit = scheme.energy_audit(current, result.state, f, dt);
    rec.min_eig_stress = min_eig(result.state);
    run.steps.push_back(rec);
    run.states.push_back(result.state);
    run.pressures.push_back(result.pressure);
    current = result.state;
    pressure = result.pressure;
    t += dt;
  }
  run.completed = true;
  return run;
}

}  // namespace

Dg0Run run_dg0(const Dg0Scheme& scheme, const DiscreteStateDG0& initial, const TimeGrid& grid,
               const Forcing& forcing, const SolverOpts& opts,
               const std::vector<DiscreteStateDG0>* warm_states) {
  return run_generic(
      scheme, initial, grid, forcing, warm_states,
      [&](const DiscreteStateDG0& prev, const PressureField& p, const LoadVector& f, double dt,
          const DiscreteStateDG0* warm) { return scheme.step(prev, p, f, dt, opts, warm); },
      [&](const DiscreteStateDG0& s) { return min_element_eigenvalue(s.stress); });
}

Fem1Run run_fem1(const Fem1Scheme& scheme, const DiscreteStateFEM1& initial, const TimeGrid& grid,
                 const Forcing& forcing, const SolverOpts& opts,
                 const std::vector<DiscreteStateFEM1>* warm_states) {
  return run_generic(
      scheme, initial, grid, forcing, warm_states,
      [&](const DiscreteStateFEM1& prev, const PressureField& p, const LoadVector& f, double dt,
          const DiscreteStateFEM1* warm) { return scheme.step(prev, p, f, dt, opts, warm); },
      [&](const DiscreteStateFEM1& s) { return min_vertex_eigenvalue(s.stress); });
}

namespace {

void validate_schedule(const std::vector<double>& schedule) {
  if (schedule.empty()) throw std::invalid_argument("delta_continuation: empty schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0) || schedule[i] > 0.5)
      throw std::invalid_argument("delta_continuation: every delta must lie in (0, 1/2]");
    if (i > 0 && !(schedule[i] < schedule[i - 1]))
      throw std::invalid_argument("delta_continuation: schedule must be strictly decreasing");
  }
}

double state_inf_diff(const DiscreteStateDG0& a, const DiscreteStateDG0& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.velocity.coeff.size(); ++i)
    m = std::max(m, std::abs(a.velocity.coeff[i] - b.velocity.coeff[i]));
  for (std::size_t k = 0; k < a.stress.value.size(); ++k)
    for (int c = 0; c < 3; ++c)
      m = std::max(m, std::abs(a.stress.value[k].packed(c) - b.stress.value[k].packed(c)));
  return m;
}

double state_inf_diff(const DiscreteStateFEM1& a, const DiscreteStateFEM1& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.velocity.coeff.size(); ++i)
    m = std::max(m, std::abs(a.velocity.coeff[i] - b.velocity.coeff[i]));
  for (std::size_t k = 0; k < a.stress.value.size(); ++k)
    for (int c = 0; c < 3; ++c)
      m = std::max(m, std::abs(a.stress.value[k].packed(c) - b.stress.value[k].packed(c)));
  return m;
}

}  // namespace

ContinuationReport delta_continuation_dg0(const ContinuationSetup& setup,
                                          const std::vector<double>& schedule,
                                          const DiscreteStateDG0& initial) {
  validate_schedule(schedule);
  ContinuationReport report;
  report.schedule = schedule;
  report.all_completed = true;
  std::vector<DiscreteStateDG0> prev_traj;
  DiscreteStateDG0 prev_final;
  bool have_prev = false;

  for (std::size_t leg_idx = 0; leg_idx < schedule.size(); ++leg_idx) {
    RegParams reg{schedule[leg_idx], setup.cutoff};
    Dg0Scheme scheme(*setup.mesh, setup.velocity_tag, setup.fluid, reg);
    const Dg0Run run = run_dg0(scheme, initial, setup.grid, setup.forcing, setup.opts,
                               prev_traj.empty() ? nullptr : &prev_traj);
    ContinuationLeg leg;
    leg.delta = schedule[leg_idx];
    leg.completed = run.completed;
    if (!run.completed) report.all_completed = false;
    double npmax = negative_part_integral(*setup.mesh, initial.stress);
    for (const auto& s : run.states)
      npmax = std::max(npmax, negative_part_integral(*setup.mesh, s.stress));
    leg.negative_part_max = npmax;
    if (!run.states.empty()) {
      leg.negative_part_final = negative_part_integral(*setup.mesh, run.states.back().stress);
      leg.min_eig_final = min_element_eigenvalue(run.states.back().stress);
      if (have_prev) leg.state_diff_prev = state_inf_diff(run.states.back(), prev_final);
      prev_final = run.states.back();
      have_prev = true;
    }
    // unregularized residual of the smallest-delta final state
    if (leg_idx + 1 == schedule.size() && run.completed && run.states.size() >= 1) {
      const DiscreteStateDG0& last = run.states.back();
      const DiscreteStateDG0& before =
          run.states.size() >= 2 ? run.states[run.states.size() - 2] : run.initial;
      const double dt = setup.grid.dts.back();
      const LoadVector f = time_average_forcing(
          scheme.velocity_space(), setup.forcing, setup.grid.total() - dt, setup.grid.total());
      const auto r = scheme.unregularized_residual(before, last, run.pressures.back(), f, dt);
      double norm = 0.0;
      for (double v : r) norm = std::max(norm, std::abs(v));
      leg.unreg_residual = norm;
      leg.unreg_residual_valid = true;
    }
    report.legs.push_back(leg);
    prev_traj = run.states;
  }
  return report;
}

ContinuationReport delta_continuation_fem1(const ContinuationSetup& setup,
                                           const std::vector<double>& schedule,
                                           const DiscreteStateFEM1& initial) {
  validate_schedule(schedule);
  ContinuationReport report;
  report.schedule = schedule;
  report.all_completed = true;
  std::vector<DiscreteStateFEM1> prev_traj;
  DiscreteStateFEM1 prev_final;
  bool have_prev = false;

  for (std::size_t leg_idx = 0; leg_idx < schedule.size(); ++leg_idx) {
    RegParams reg{schedule[leg_idx], setup.cutoff};
    Fem1Scheme scheme(*setup.mesh, setup.velocity_tag, setup.fluid, reg);
    const Fem1Run run = run_fem1(scheme, initial, setup.grid, setup.forcing, setup.opts,
                                 prev_traj.empty() ? nullptr : &prev_traj);
    ContinuationLeg leg;
    leg.delta = schedule[leg_idx];
    leg.completed = run.completed;
    if (!run.completed) report.all_completed = false;
    double npmax = negative_part_integral(*setup.mesh, initial.stress);
    for (const auto& s : run.states)
      npmax = std::max(npmax, negative_part_integral(*setup.mesh, s.stress));
    leg.negative_part_max = npmax;
    if (!run.states.empty()) {
      leg.negative_part_final = negative_part_integral(*setup.mesh, run.states.back().stress);
      leg.min_eig_final = min_vertex_eigenvalue(run.states.back().stress);
      if (have_prev) leg.state_diff_prev = state_inf_diff(run.states.back(), prev_final);
      prev_final = run.states.back();
      have_prev = true;
    }
    if (leg_idx + 1 == schedule.size() && run.completed && run.states.size() >= 1) {
      const DiscreteStateFEM1& last = run.states.back();
      const DiscreteStateFEM1& before =
          run.states.size() >= 2 ? run.states[run.states.size() - 2] : run.initial;
      const double dt = setup.grid.dts.back();
      const LoadVector f = time_average_forcing(
          scheme.velocity_space(), setup.forcing, setup.grid.total() - dt, setup.grid.total());
      if (spd_at_vertices(last.stress)) {
        Fem1Scheme unreg(*setup.mesh, setup.velocity_tag, setup.fluid, setup.cutoff, true);
        const auto r = unreg.residual(before, last, run.pressures.back(), f, dt);
        double norm = 0.0;
        for (double v : r) norm = std::max(norm, std::abs(v));
        leg.unreg_residual = norm;
        leg.unreg_residual_valid = true;
      }
    }
    report.legs.push_back(leg);
    prev_traj = run.states;
  }
  return report;
}

bool timestep_restriction_satisfied(const TimeGrid& grid, double alpha, double h) {
  double dtmax = 0.0;
  for (double dt : grid.dts) dtmax = std::max(dtmax, dt);
  return dtmax <= alpha * h * h;
}

}  // namespace obflow
