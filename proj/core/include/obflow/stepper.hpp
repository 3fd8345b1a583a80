#ifndef OBFLOW_STEPPER_HPP
#define OBFLOW_STEPPER_HPP

#include <optional>
#include <string>

#include "obflow/scheme_dg0.hpp"
#include "obflow/scheme_fem1.hpp"

namespace obflow {

/// Partition of [0, T]; construction enforces the quasi-uniformity-in-time
/// condition dt_n <= C dt_{n-1} (default C = 2).
struct TimeGrid {
  std::vector<double> dts;
  double dt0 = 0.0;  // smoothing step of the initial projections
  double ratio_limit = 2.0;

  static TimeGrid uniform(double t_end, int steps, double ratio_limit = 2.0);
  static TimeGrid from_steps(std::vector<double> steps, double ratio_limit = 2.0,
                             std::optional<double> dt0 = {});
  double total() const;
  int size() const { return static_cast<int>(dts.size()); }
};

/// Space-time body force; an empty function is the zero forcing.
struct Forcing {
  std::function<Vec2(double, Point)> f;
  bool is_zero() const { return !f; }
};

/// f^n = (1/(t_b - t_a)) int_{t_a}^{t_b} f dt as a load vector, realized by
/// a 2-point Gauss rule in time (exact for f affine in t).
LoadVector time_average_forcing(const VelocitySpace& space, const Forcing& f, double t_a,
                                double t_b);

struct StepRecord {
  int n = 0;
  double t = 0.0;
  EnergyBreakdown audit;
  int picard_iterations = 0;
  double residual_norm = 0.0;
  std::vector<double> residual_history;  // accepted iterates' norms
  bool converged = false;
  double min_eig_stress = 0.0;
};

struct InitialRecord {
  double energy = 0.0;
  double kinetic = 0.0;
  double entropy = 0.0;
  double min_eig_stress = 0.0;
};

template <class State>
struct RunResult {
  State initial;
  InitialRecord initial_record;
  std::vector<State> states;            // one per completed step
  std::vector<PressureField> pressures;
  std::vector<StepRecord> steps;
  bool completed = false;
  std::string failure;
  const State& final_state() const { return states.empty() ? initial : states.back(); }
};

using Dg0Run = RunResult<DiscreteStateDG0>;
using Fem1Run = RunResult<DiscreteStateFEM1>;

/// Runs the time loop; every accepted step is audited. A step failure halts
/// the run with the partial trajectory and a failure report.
/// `warm_states`, when given, seeds each level's Picard iteration with the
/// same level of a previous run (used by the delta-continuation).
Dg0Run run_dg0(const Dg0Scheme& scheme, const DiscreteStateDG0& initial, const TimeGrid& grid,
               const Forcing& forcing, const SolverOpts& opts,
               const std::vector<DiscreteStateDG0>* warm_states = nullptr);
Fem1Run run_fem1(const Fem1Scheme& scheme, const DiscreteStateFEM1& initial, const TimeGrid& grid,
                 const Forcing& forcing, const SolverOpts& opts,
                 const std::vector<DiscreteStateFEM1>* warm_states = nullptr);

/// Elementwise int ||[sigma]_-|| for the P0 stress; lumped analogue for P1.
double negative_part_integral(const SimplicialMesh& mesh, const StressFieldP0& s);
double negative_part_integral(const SimplicialMesh& mesh, const StressFieldP1& s);

enum class SchemeKind { DG0, FEM1, FEM1_UNREG };
const char* scheme_kind_name(SchemeKind kind);

struct ContinuationLeg {
  double delta = 0.0;
  bool completed = false;
  double negative_part_max = 0.0;    // max over time levels
  double negative_part_final = 0.0;
  double min_eig_final = 0.0;        // min stress eigenvalue at final time
  double state_diff_prev = 0.0;      // inf-diff of final states vs previous leg
  double unreg_residual = 0.0;       // final-step residual of the unregularized scheme
  bool unreg_residual_valid = false;
};

struct ContinuationReport {
  std::vector<double> schedule;
  std::vector<ContinuationLeg> legs;
  bool all_completed = false;
};

struct ContinuationSetup {
  const SimplicialMesh* mesh = nullptr;
  SpaceTag velocity_tag = SpaceTag::VEL_P2;
  FluidParams fluid;
  std::optional<double> cutoff;
  TimeGrid grid;
  Forcing forcing;
  SolverOpts opts;
};

/// Runs the full trajectory per delta (strictly decreasing schedule, all
/// <= 1/2), warm-starting each leg from the previous one, and evaluates the
/// unregularized residual of the smallest-delta final state.
ContinuationReport delta_continuation_dg0(const ContinuationSetup& setup,
                                          const std::vector<double>& schedule,
                                          const DiscreteStateDG0& initial);
ContinuationReport delta_continuation_fem1(const ContinuationSetup& setup,
                                           const std::vector<double>& schedule,
                                           const DiscreteStateFEM1& initial);

/// Time-step restriction of the d = 2 no-cut-off convergence theory,
/// dt <= C alpha^{1+zeta} h^2 evaluated with C = 1, zeta = 0. A warning
/// predicate only, never enforced.
bool timestep_restriction_satisfied(const TimeGrid& grid, double alpha, double h);

}  // namespace obflow

#endif
