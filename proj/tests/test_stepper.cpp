#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "obflow/certificate.hpp"
#include "obflow/props.hpp"
#include "obflow/scenarios.hpp"
#include "obflow/stepper.hpp"
#include "obflow/trace.hpp"

using namespace obflow;

namespace {
const FluidParams kFluidDg0{1.0, 1.0, 0.5, 0.0};
const FluidParams kFluidFem1{1.0, 1.0, 0.5, 0.01};
}  // namespace

TEST_CASE("time grid guards the quasi-uniformity condition") {
  CHECK_NOTHROW(TimeGrid::from_steps({0.1, 0.2, 0.4, 0.2}));
  CHECK_THROWS_AS(TimeGrid::from_steps({0.1, 0.25}), std::invalid_argument);
  CHECK_NOTHROW(TimeGrid::from_steps({0.1, 0.25}, 2.5));
  CHECK_THROWS_AS(TimeGrid::from_steps({0.1, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid::uniform(0.0, 4), std::invalid_argument);
  const TimeGrid g = TimeGrid::uniform(1.0, 10);
  CHECK(g.total() == doctest::Approx(1.0));
  CHECK(g.dt0 == doctest::Approx(0.1));  // dt0 defaults to dt_1
}

TEST_CASE("forcing averages: constant, ramp and zero") {
  const SimplicialMesh mesh = build_structured_mesh(3, 3);
  const VelocitySpace vs(mesh, SpaceTag::VEL_P2);

  Forcing zero;
  const LoadVector z = time_average_forcing(vs, zero, 0.0, 0.5);
  for (double v : z) CHECK(v == 0.0);

  Forcing constant;
  constant.f = [](double, Point) { return Vec2{1.5, -0.5}; };
  const LoadVector c1 = time_average_forcing(vs, constant, 0.0, 0.4);
  const LoadVector c2 = time_average_forcing(vs, constant, 3.0, 17.0);
  for (std::size_t i = 0; i < c1.size(); ++i)
    CHECK(c1[i] == doctest::Approx(c2[i]).epsilon(1e-13));

  // f(t) = t g(x) on [0,1] averages to g/2, exactly for the Gauss-2 rule
  Forcing ramp;
  ramp.f = [](double t, Point x) { return Vec2{t * x[0], t * x[1]}; };
  Forcing half;
  half.f = [](double, Point x) { return Vec2{0.5 * x[0], 0.5 * x[1]}; };
  const LoadVector r = time_average_forcing(vs, ramp, 0.0, 1.0);
  const LoadVector h = time_average_forcing(vs, half, 0.0, 1.0);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == doctest::Approx(h[i]).epsilon(1e-13));
  CHECK_THROWS_AS(time_average_forcing(vs, ramp, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("equilibrium run: constant trajectory, zero slacks") {
  const SimplicialMesh mesh = build_structured_mesh(4, 4);
  const Dg0Scheme scheme(mesh, SpaceTag::VEL_P2, kFluidDg0, RegParams{0.1, {}});
  const DiscreteStateDG0 init = make_initial_dg0(scheme, Scenario{}, Rect{});
  const Dg0Run run = run_dg0(scheme, init, TimeGrid::uniform(10.0, 10), Forcing{}, SolverOpts{});
  REQUIRE(run.completed);
  for (const StepRecord& s : run.steps) {
    CHECK(s.audit.slack == 0.0);
    CHECK(s.picard_iterations == 0);
  }
  for (const auto& s : run.states)
    for (double c : s.velocity.coeff) CHECK(c == 0.0);
}

TEST_CASE("f = 0 runs dissipate the free energy monotonically") {
  const SimplicialMesh mesh = build_structured_mesh(4, 4);
  Scenario sc;
  sc.kind = Scenario::Kind::RandomSpd;
  sc.seed = 21;
  const Dg0Scheme dg0(mesh, SpaceTag::VEL_P2, kFluidDg0, RegParams{0.1, {}});
  const Dg0Run r0 = run_dg0(dg0, make_initial_dg0(dg0, sc, Rect{}), TimeGrid::uniform(0.6, 6),
                            Forcing{}, SolverOpts{});
  REQUIRE(r0.completed);
  double prev = r0.initial_record.energy;
  for (const StepRecord& s : r0.steps) {
    CHECK(s.audit.slack >= -tolerances().audit);
    CHECK(s.audit.total <= prev + tolerances().audit);
    prev = s.audit.total;
  }

  const Fem1Scheme fem1(mesh, SpaceTag::VEL_P2, kFluidFem1, RegParams{0.1, {}});
  const Fem1Run r1 = run_fem1(fem1, make_initial_fem1(fem1, sc, Rect{}, 0.1),
                              TimeGrid::uniform(0.6, 6), Forcing{}, SolverOpts{});
  REQUIRE(r1.completed);
  prev = r1.initial_record.energy;
  for (const StepRecord& s : r1.steps) {
    CHECK(s.audit.slack >= -tolerances().audit);
    CHECK(s.audit.diffusion_dissipation >= 0.0);
    CHECK(std::abs(s.audit.edge_telescoping) <= tolerances().telescoping);
    CHECK(s.audit.total <= prev + tolerances().audit);
    prev = s.audit.total;
  }
}

TEST_CASE("identical configs produce bit-identical traces") {
  const SimplicialMesh mesh = build_structured_mesh(4, 4);
  Scenario sc;
  sc.kind = Scenario::Kind::RandomSpd;
  sc.seed = 5;
  const Fem1Scheme fem1(mesh, SpaceTag::VEL_P2, kFluidFem1, RegParams{0.1, {}});
  auto run_once = [&] {
    const Fem1Run run = run_fem1(fem1, make_initial_fem1(fem1, sc, Rect{}, 0.1),
                                 TimeGrid::uniform(0.4, 4), Forcing{}, SolverOpts{});
    std::ostringstream os;
    write_trace_csv(os, run);
    return os.str();
  };
  const std::string a = run_once();
  const std::string b = run_once();
  CHECK(a == b);
  CHECK(a.substr(0, a.find('\n')) ==
        "n,t,F,kinetic,entropy,visc_dissipation,stress_dissipation,diffusion_dissipation,"
        "forcing_pairing,slack,picard_iters,min_eig_stress");
}

TEST_CASE("delta continuation on an equilibrium-regular scenario is delta-independent") {
  const SimplicialMesh mesh = build_structured_mesh(3, 3);
  ContinuationSetup setup{&mesh,    SpaceTag::VEL_P2, kFluidDg0, {},
                          TimeGrid::uniform(0.3, 3), Forcing{}, SolverOpts{}};
  const Dg0Scheme scheme(mesh, SpaceTag::VEL_P2, kFluidDg0, RegParams{0.5, {}});
  const DiscreteStateDG0 init = make_initial_dg0(scheme, Scenario{}, Rect{});
  const ContinuationReport rep = delta_continuation_dg0(setup, {0.5, 0.25, 0.125}, init);
  REQUIRE(rep.all_completed);
  for (const ContinuationLeg& leg : rep.legs) {
    CHECK(leg.negative_part_max == 0.0);
    CHECK(leg.min_eig_final == doctest::Approx(1.0));
    CHECK(leg.state_diff_prev <= 1e-12);
  }
  CHECK(rep.legs.back().unreg_residual_valid);
  CHECK(rep.legs.back().unreg_residual <= 1e-10);

  CHECK_THROWS_AS(delta_continuation_dg0(setup, {0.25, 0.5}, init), std::invalid_argument);
  CHECK_THROWS_AS(delta_continuation_dg0(setup, {0.7, 0.5}, init), std::invalid_argument);
}

TEST_CASE("cumulative ledger equals the sum of per-step terms") {
  const SimplicialMesh mesh = build_structured_mesh(4, 4);
  Scenario sc;
  sc.kind = Scenario::Kind::RandomSpd;
  sc.seed = 3;
  const TimeGrid grid = TimeGrid::uniform(0.5, 5);
  const Dg0Scheme dg0(mesh, SpaceTag::VEL_P2, kFluidDg0, RegParams{0.1, {}});
  const Dg0Run run =
      run_dg0(dg0, make_initial_dg0(dg0, sc, Rect{}), grid, Forcing{}, SolverOpts{});
  REQUIRE(run.completed);
  const RunCertificate cert = certify("dg0", "x", run, grid, 1e-9);
  double sum = 0.0;
  for (std::size_t i = 0; i < run.steps.size(); ++i)
    sum += grid.dts[i] * run.steps[i].audit.slack;
  CHECK(std::abs(cert.cumulative_residual - sum) <= 1e-12 * (1.0 + std::abs(sum)));
  CHECK(cert.pass);
}

TEST_CASE("timestep restriction predicate") {
  CHECK(timestep_restriction_satisfied(TimeGrid::uniform(0.0005 * 0.01, 1), 0.05, 0.1));
  CHECK_FALSE(timestep_restriction_satisfied(TimeGrid::uniform(1.0, 1), 0.05, 0.1));
}

TEST_CASE("cavity scenario produces a nontrivial divergence-free start") {
  const SimplicialMesh mesh = build_structured_mesh(6, 6);
  Scenario cav;
  cav.kind = Scenario::Kind::LidDrivenCavity;
  const Dg0Scheme dg0(mesh, SpaceTag::VEL_P2, kFluidDg0, RegParams{0.1, {}});
  const DiscreteStateDG0 init = make_initial_dg0(dg0, cav, Rect{});
  double umax = 0.0;
  for (double c : init.velocity.coeff) umax = std::max(umax, std::abs(c));
  CHECK(umax > 0.05);
  CHECK(noflow_satisfied(dg0.velocity_space(), init.velocity, 1e-12));
  const auto div =
      discrete_divfree_residual(dg0.velocity_space(), init.velocity, SpaceTag::PRES_P0);
  double dmax = 0.0;
  for (double v : div) dmax = std::max(dmax, std::abs(v));
  CHECK(dmax <= tolerances().divfree);
  for (const SymMat& m : init.stress.value)
    CHECK((m - SymMat::identity(2)).norm() <= 1e-12);
}
