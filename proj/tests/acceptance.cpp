// Acceptance gate: runs the project's stability and identity criteria at
// their pinned tolerances and prints one pass/fail line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "obflow/props.hpp"
#include "obflow/scenarios.hpp"
#include "obflow/stepper.hpp"

using namespace obflow;

namespace {

struct Criterion {
  int id;
  std::string name;
  std::function<bool(std::string&)> run;
};

const FluidParams kFluidDg0{1.0, 1.0, 0.5, 0.0};
const FluidParams kFluidFem1{1.0, 1.0, 0.5, 0.01};
constexpr std::uint64_t kSeed = 2026;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

bool check_suite(const std::vector<PropertyResult>& results, std::string& detail) {
  bool ok = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::string worst_name;
  for (const PropertyResult& r : results) {
    if (!r.pass) {
      ok = false;
      detail += r.name + " worst=" + fmt(r.worst) + " tol=" + fmt(r.tolerance) + "; ";
    }
  }
  if (ok && !results.empty()) detail = "all " + std::to_string(results.size()) + " checks hold";
  return ok;
}

// criterion 1: the spectral-calculus inequality sweep
bool criterion_lemma21(std::string& detail) {
  return check_suite(lemma21_suite(1000, kSeed), detail);
}

// criterion 2: the discrete gradient inequality on the non-obtuse mesh
bool criterion_gradient(std::string& detail) {
  return check_suite(nonobtuse_gradient_suite(8, 200, kSeed), detail);
}

// criterion 3: the transport-tensor chain identity with and without cut-off
bool criterion_chain(std::string& detail) {
  return check_suite(lambda_chain_suite(8, 200, kSeed), detail);
}

// criterion 4: consistency gap decays with observed order >= 0.9
bool criterion_slope(std::string& detail) {
  const SlopeResult s = lambda_consistency_slope({4, 8, 16, 32});
  std::ostringstream os;
  os << "order = " << s.order << ", gaps";
  for (double g : s.gaps) os << ' ' << fmt(g);
  detail = os.str();
  return s.order >= 0.9;
}

template <class Run>
bool stability_checks(const Run& run, double dt, std::string& detail, bool fem1_extras) {
  if (!run.completed) {
    detail += "dt=" + fmt(dt) + " failed: " + run.failure + "; ";
    return false;
  }
  bool ok = true;
  double prev_f = run.initial_record.energy;
  for (const StepRecord& s : run.steps) {
    if (!s.converged || s.residual_norm > 1e-10) {
      detail += "dt=" + fmt(dt) + " step " + std::to_string(s.n) + " residual " +
                fmt(s.residual_norm) + "; ";
      ok = false;
    }
    if (s.audit.slack < -1e-9) {
      detail += "dt=" + fmt(dt) + " step " + std::to_string(s.n) + " slack " +
                fmt(s.audit.slack) + "; ";
      ok = false;
    }
    if (s.audit.total > prev_f + 1e-9) {
      detail += "dt=" + fmt(dt) + " step " + std::to_string(s.n) + " energy increased; ";
      ok = false;
    }
    if (fem1_extras) {
      if (s.audit.diffusion_dissipation < 0.0) {
        detail += "dt=" + fmt(dt) + " negative diffusion dissipation; ";
        ok = false;
      }
      if (std::abs(s.audit.edge_telescoping) > 1e-10) {
        detail += "dt=" + fmt(dt) + " transport telescoping " +
                  fmt(s.audit.edge_telescoping) + "; ";
        ok = false;
      }
    }
    prev_f = s.audit.total;
  }
  return ok;
}

// criterion 5: unconditional stability of the P0 scheme over four decades of dt
bool criterion_stability_dg0(std::string& detail) {
  const SimplicialMesh mesh = build_structured_mesh(8, 8);
  Scenario sc;
  sc.kind = Scenario::Kind::RandomSpd;
  sc.lambda_min = 0.5;
  sc.lambda_max = 2.0;
  sc.seed = kSeed;
  const Dg0Scheme scheme(mesh, SpaceTag::VEL_P2, kFluidDg0, RegParams{0.1, {}});
  const DiscreteStateDG0 init = make_initial_dg0(scheme, sc, Rect{});
  SolverOpts opts;
  opts.max_iter = 400;  // dt = 10 contracts slowly; the tolerance stays 1e-10
  bool ok = true;
  double worst_slack = 0.0;
  for (double dt : {0.01, 0.1, 1.0, 10.0}) {
    const Dg0Run run =
        run_dg0(scheme, init, TimeGrid::uniform(20.0 * dt, 20), Forcing{}, opts);
    ok = stability_checks(run, dt, detail, false) && ok;
    for (const StepRecord& s : run.steps) worst_slack = std::min(worst_slack, s.audit.slack);
  }
  if (ok) detail = "4 x 20 steps converged, worst slack " + fmt(worst_slack);
  return ok;
}

// criterion 6: unconditional stability of the P1 scheme, with and without cut-off
bool criterion_stability_fem1(std::string& detail) {
  const SimplicialMesh mesh = build_structured_mesh(8, 8);
  Scenario sc;
  sc.kind = Scenario::Kind::RandomSpd;
  sc.lambda_min = 0.5;
  sc.lambda_max = 2.0;
  sc.seed = kSeed;
  SolverOpts opts;
  opts.max_iter = 400;
  bool ok = true;
  double worst_slack = 0.0;
  for (const std::optional<double> cutoff :
       {std::optional<double>{}, std::optional<double>{10.0}}) {
    const Fem1Scheme scheme(mesh, SpaceTag::VEL_P2, kFluidFem1, RegParams{0.1, cutoff});
    const DiscreteStateFEM1 init = make_initial_fem1(scheme, sc, Rect{}, 0.01);
    for (double dt : {0.01, 0.1, 1.0, 10.0}) {
      const Fem1Run run =
          run_fem1(scheme, init, TimeGrid::uniform(20.0 * dt, 20), Forcing{}, opts);
      ok = stability_checks(run, dt, detail, true) && ok;
      for (const StepRecord& s : run.steps) worst_slack = std::min(worst_slack, s.audit.slack);
    }
  }
  if (ok) detail = "2 x 4 x 20 steps converged, worst slack " + fmt(worst_slack);
  return ok;
}

// criterion 7: the smoothed initial projection preserves SPD vertex bounds
bool criterion_projection(std::string& detail) {
  const SimplicialMesh mesh = build_structured_mesh(8, 8);
  const Fem1Scheme scheme(mesh, SpaceTag::VEL_P2, kFluidFem1, RegParams{0.1, {}});
  std::uint64_t state = kSeed;
  bool ok = true;
  double worst_low = 0.0, worst_high = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double smin = 0.2 + 0.5 * (trial % 7) / 7.0;
    const double smax = smin + 0.5 + 2.0 * (trial % 5) / 5.0;
    const std::uint64_t seed = state + trial;
    const InitialFields f = scheme.project_initial_fields(
        [](Point) { return Vec2{0.0, 0.0}; },
        [&](Point x) { return smooth_spd_field(smin, smax, seed, x); }, 0.1);
    for (const SymMat& m : f.stress.value) {
      const SpectralPair p = spectral_decompose(m);
      worst_low = std::min(worst_low, p.eigenvalues[0] - smin);
      worst_high = std::max(worst_high, p.eigenvalues[1] - smax);
      if (p.eigenvalues[0] < smin - 1e-12 || p.eigenvalues[1] > smax + 1e-12) ok = false;
    }
  }
  // sigma0 = I reproduced exactly
  const InitialFields id = scheme.project_initial_fields(
      [](Point) { return Vec2{0.0, 0.0}; }, [](Point) { return SymMat::identity(2); }, 0.1);
  for (const SymMat& m : id.stress.value)
    if ((m - SymMat::identity(2)).norm() > 1e-12) {
      ok = false;
      detail += "identity not reproduced; ";
    }
  if (ok)
    detail = "50 fields in bounds (low margin " + fmt(worst_low) + ", high margin " +
             fmt(worst_high) + "), identity exact";
  return ok;
}

// criterion 8: delta-continuation towards the unregularized schemes
bool criterion_continuation(std::string& detail) {
  const SimplicialMesh mesh = build_structured_mesh(8, 8);
  std::vector<double> schedule;
  for (int k = 1; k <= 8; ++k) schedule.push_back(std::pow(2.0, -k));
  const TimeGrid grid = TimeGrid::uniform(1.0, 10);
  Scenario cav;
  cav.kind = Scenario::Kind::LidDrivenCavity;
  bool ok = true;

  auto check_report = [&](const ContinuationReport& rep, const char* tag) {
    if (!rep.all_completed) {
      detail += std::string(tag) + ": a leg failed; ";
      ok = false;
      return;
    }
    for (std::size_t i = 1; i < rep.legs.size(); ++i)
      if (rep.legs[i].negative_part_max > rep.legs[i - 1].negative_part_max + 1e-12) {
        detail += std::string(tag) + ": negative part not non-increasing; ";
        ok = false;
      }
    if (rep.legs.back().negative_part_max > 1e-8) {
      detail += std::string(tag) + ": negative part " +
                fmt(rep.legs.back().negative_part_max) + " at k=8; ";
      ok = false;
    }
    const std::size_t n = rep.legs.size();
    double floor = std::numeric_limits<double>::infinity(), spread = 0.0;
    for (std::size_t i = n - 3; i < n; ++i) {
      floor = std::min(floor, rep.legs[i].min_eig_final);
      spread = std::max(spread, std::abs(rep.legs[i].min_eig_final -
                                         rep.legs[n - 1].min_eig_final));
    }
    if (!(floor > 0.0)) {
      detail += std::string(tag) + ": no positive eigenvalue floor; ";
      ok = false;
    }
    if (spread > 1e-6 * (1.0 + std::abs(rep.legs[n - 1].min_eig_final))) {
      detail += std::string(tag) + ": eigenvalue floor not stable (" + fmt(spread) + "); ";
      ok = false;
    }
    if (!rep.legs.back().unreg_residual_valid || rep.legs.back().unreg_residual > 1e-8) {
      detail += std::string(tag) + ": unregularized residual " +
                fmt(rep.legs.back().unreg_residual) + "; ";
      ok = false;
    }
  };

  {
    ContinuationSetup setup{&mesh, SpaceTag::VEL_P2, kFluidDg0, {},
                            grid,  Forcing{},        SolverOpts{}};
    const Dg0Scheme scheme(mesh, SpaceTag::VEL_P2, kFluidDg0, RegParams{0.5, {}});
    const ContinuationReport rep =
        delta_continuation_dg0(setup, schedule, make_initial_dg0(scheme, cav, Rect{}));
    check_report(rep, "dg0");
  }
  {
    ContinuationSetup setup{&mesh, SpaceTag::VEL_P2, kFluidFem1, {},
                            grid,  Forcing{},        SolverOpts{}};
    const Fem1Scheme scheme(mesh, SpaceTag::VEL_P2, kFluidFem1, RegParams{0.5, {}});
    const ContinuationReport rep = delta_continuation_fem1(
        setup, schedule, make_initial_fem1(scheme, cav, Rect{}, grid.dt0));
    check_report(rep, "fem1");
  }
  if (ok) detail = "both schemes: negative parts vanish, floors stable, limits consistent";
  return ok;
}

// criterion 9: exact preservation of the equilibrium over 50 steps
bool criterion_equilibrium(std::string& detail) {
  const SimplicialMesh mesh = build_structured_mesh(8, 8);
  bool ok = true;
  double worst = 0.0;
  for (double dt : {0.01, 1.0, 10.0}) {
    {
      const Dg0Scheme scheme(mesh, SpaceTag::VEL_P2, kFluidDg0, RegParams{0.1, {}});
      const Dg0Run run = run_dg0(scheme, make_initial_dg0(scheme, Scenario{}, Rect{}),
                                 TimeGrid::uniform(50.0 * dt, 50), Forcing{}, SolverOpts{});
      if (!run.completed) {
        ok = false;
        detail += "dg0 dt=" + fmt(dt) + " failed; ";
        continue;
      }
      for (const auto& s : run.states) {
        for (double c : s.velocity.coeff) worst = std::max(worst, std::abs(c));
        for (const SymMat& m : s.stress.value)
          worst = std::max(worst, (m - SymMat::identity(2)).norm());
      }
    }
    {
      const Fem1Scheme scheme(mesh, SpaceTag::VEL_P2, kFluidFem1, RegParams{0.1, {}});
      const Fem1Run run =
          run_fem1(scheme, make_initial_fem1(scheme, Scenario{}, Rect{}, dt),
                   TimeGrid::uniform(50.0 * dt, 50), Forcing{}, SolverOpts{});
      if (!run.completed) {
        ok = false;
        detail += "fem1 dt=" + fmt(dt) + " failed; ";
        continue;
      }
      for (const auto& s : run.states) {
        for (double c : s.velocity.coeff) worst = std::max(worst, std::abs(c));
        for (const SymMat& m : s.stress.value)
          worst = std::max(worst, (m - SymMat::identity(2)).norm());
      }
    }
  }
  if (worst > 1e-12) {
    detail += "equilibrium deviation " + fmt(worst) + "; ";
    ok = false;
  }
  if (ok) detail = "both schemes, 3 step sizes, deviation " + fmt(worst);
  return ok;
}

// criterion 10: vertex-rule facts and the hand-computed values
bool criterion_lumping(std::string& detail) {
  return check_suite(lumping_suite(8, 200, kSeed), detail);
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

  std::vector<Criterion> criteria = {
      {1, "spectral calculus inequality sweep", criterion_lemma21},
      {2, "non-obtuse discrete gradient inequality", criterion_gradient},
      {3, "transport tensor chain identity", criterion_chain},
      {4, "transport tensor consistency order", criterion_slope},
      {5, "unconditional energy stability, P0 stress scheme", criterion_stability_dg0},
      {6, "unconditional energy stability, P1 stress scheme", criterion_stability_fem1},
      {7, "initial projection SPD bounds", criterion_projection},
      {8, "delta-continuation to the unregularized schemes", criterion_continuation},
      {9, "equilibrium exactness over 50 steps", criterion_equilibrium},
      {10, "vertex-rule lumping facts", criterion_lumping},
  };

  bool all_ok = true;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %2d: %s (%s; %.1fs)\n", ok ? "PASS" : "FAIL", c.id,
                c.name.c_str(), detail.c_str(), secs);
    std::fflush(stdout);
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
