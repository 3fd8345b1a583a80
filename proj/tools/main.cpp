#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "obflow/certificate.hpp"
#include "obflow/config.hpp"
#include "obflow/props.hpp"
#include "obflow/trace.hpp"
#include "obflow/vtk.hpp"

namespace fs = std::filesystem;
using namespace obflow;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitStepFailure = 3;

SimplicialMesh load_mesh(const RunConfig& cfg) {
  if (!cfg.mesh_file.empty()) return read_mesh_file(cfg.mesh_file);
  return build_structured_mesh(cfg.nx, cfg.ny, cfg.domain);
}

void print_property_results(const std::vector<PropertyResult>& results, bool& ok) {
  for (const PropertyResult& r : results) {
    std::printf("%-32s worst = % .3e  tol = %.3e  [%s]\n", r.name.c_str(), r.worst, r.tolerance,
                r.pass ? "pass" : "FAIL");
    if (!r.pass) ok = false;
  }
}

template <class State>
int finish_run(const RunConfig& cfg, const RunResult<State>& run, const TimeGrid& grid,
               const std::string& outdir, const std::string& regime_note,
               bool timestep_restriction) {
  fs::create_directories(outdir);
  {
    std::ofstream trace(outdir + "/trace.csv");
    write_trace_csv(trace, run);
  }
  RunCertificate cert =
      certify(scheme_kind_name(cfg.scheme), cfg.hash(), run, grid, cfg.solver.audit_tol);
  cert.regime_note = regime_note;
  cert.timestep_restriction = timestep_restriction;
  {
    std::ofstream os(outdir + "/certificate.txt");
    write_certificate(os, cert);
  }
  write_certificate(std::cout, cert);
  if (!run.completed) {
    std::ofstream fail(outdir + "/failure.txt");
    fail << run.failure << '\n';
    for (const StepRecord& rec : run.steps)
      if (!rec.converged)
        fail << "step " << rec.n << ": iterations = " << rec.picard_iterations
             << ", residual = " << format_g17(rec.residual_norm) << '\n';
    std::cerr << "step failure; report written to " << outdir << "/failure.txt\n";
    return kExitStepFailure;
  }
  return cert.pass ? 0 : 1;
}

template <class State>
void write_snapshots(const std::string& outdir, const VelocitySpace& space,
                     const RunResult<State>& run, int count) {
  if (count <= 0 || run.states.empty()) return;
  fs::create_directories(outdir);
  const int n = static_cast<int>(run.states.size());
  for (int s = 0; s < count; ++s) {
    const int idx = (s == count - 1) ? n - 1 : s * n / count;
    char name[64];
    std::snprintf(name, sizeof(name), "/snapshot_%04d.vtk", idx + 1);
    std::ofstream os(outdir + name);
    write_vtk(os, space, run.states[idx], run.pressures[idx]);
  }
}

void print_continuation(const ContinuationReport& rep) {
  std::printf("%-10s %-10s %-14s %-14s %-14s %-14s\n", "delta", "completed", "neg_part_max",
              "min_eig_final", "diff_prev", "unreg_resid");
  for (const ContinuationLeg& leg : rep.legs) {
    std::printf("%-10.4g %-10s %-14.4e %-14.6g %-14.4e ", leg.delta,
                leg.completed ? "yes" : "no", leg.negative_part_max, leg.min_eig_final,
                leg.state_diff_prev);
    if (leg.unreg_residual_valid)
      std::printf("%-14.4e\n", leg.unreg_residual);
    else
      std::printf("%-14s\n", "-");
  }
}

int cmd_run(const std::string& config_path, const std::string& outdir, bool parallel,
            int snapshots) {
  RunConfig cfg;
  try {
    cfg = RunConfig::load(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << config_path << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  set_parallel_assembly(parallel);

  SimplicialMesh mesh;
  try {
    mesh = load_mesh(cfg);
  } catch (const std::exception& e) {
    std::cerr << "mesh error: " << e.what() << '\n';
    return kExitConfig;
  }
  const MeshAudit audit = audit_mesh(mesh);
  if (!audit.non_obtuse)
    std::cerr << "warning: mesh is not non-obtuse (" << audit.obtuse_violations.size()
              << " elements); the discrete gradient inequality may fail\n";
  if (!audit.all_elements_have_interior_vertex)
    std::cerr << "warning: " << audit.elements_without_interior_vertex.size()
              << " elements have no interior vertex (Taylor-Hood hypothesis)\n";

  const TimeGrid grid = cfg.time_grid();
  const Forcing forcing = cfg.make_forcing();

  try {
    if (cfg.scheme == SchemeKind::DG0) {
      const RegParams reg{*cfg.delta, cfg.cutoff};
      Dg0Scheme scheme(mesh, cfg.velocity, cfg.fluid, reg);
      const DiscreteStateDG0 initial = make_initial_dg0(scheme, cfg.scenario, cfg.domain);
      if (!cfg.continuation.empty()) {
        ContinuationSetup setup{&mesh,  cfg.velocity, cfg.fluid, cfg.cutoff,
                                grid,   forcing,      cfg.solver};
        print_continuation(delta_continuation_dg0(setup, cfg.continuation, initial));
        return 0;
      }
      const Dg0Run run = run_dg0(scheme, initial, grid, forcing, cfg.solver);
      write_snapshots(outdir, scheme.velocity_space(), run, snapshots);
      return finish_run(cfg, run, grid, outdir, "", false);
    }
    const bool unreg = cfg.scheme == SchemeKind::FEM1_UNREG;
    Fem1Scheme scheme = unreg ? Fem1Scheme(mesh, cfg.velocity, cfg.fluid, cfg.cutoff, true)
                              : Fem1Scheme(mesh, cfg.velocity, cfg.fluid,
                                           RegParams{*cfg.delta, cfg.cutoff});
    const DiscreteStateFEM1 initial =
        make_initial_fem1(scheme, cfg.scenario, cfg.domain, grid.dt0);
    if (!cfg.continuation.empty()) {
      ContinuationSetup setup{&mesh,  cfg.velocity, cfg.fluid, cfg.cutoff,
                              grid,   forcing,      cfg.solver};
      print_continuation(delta_continuation_fem1(setup, cfg.continuation, initial));
      return 0;
    }
    const Fem1Run run = run_fem1(scheme, initial, grid, forcing, cfg.solver);
    write_snapshots(outdir, scheme.velocity_space(), run, snapshots);
    std::string note;
    if (!scheme.analyzed_regime())
      note = unreg ? "unregularized scheme (SPD precondition enforced per iterate)"
                   : "alpha = 0: outside the analyzed regime";
    return finish_run(cfg, run, grid, outdir, note,
                      timestep_restriction_satisfied(grid, cfg.fluid.diffusion, audit.h));
  } catch (const std::exception& e) {
    std::cerr << "run error: " << e.what() << '\n';
    return kExitStepFailure;
  }
}

int cmd_mesh_audit(const std::string& path) {
  SimplicialMesh mesh;
  try {
    mesh = read_mesh_file(path);
  } catch (const std::exception& e) {
    std::cerr << "mesh error: " << e.what() << '\n';
    return kExitConfig;
  }
  const MeshAudit a = audit_mesh(mesh);
  std::printf("vertices = %d\n", mesh.num_vertices());
  std::printf("elements = %d\n", mesh.num_elements());
  std::printf("internal_facets = %zu\n", mesh.internal_facets.size());
  std::printf("h = %s\n", format_g17(a.h).c_str());
  std::printf("max_shape_ratio = %s\n", format_g17(a.max_shape_ratio).c_str());
  std::printf("quasi_uniformity = %s\n", format_g17(a.quasi_uniformity).c_str());
  std::printf("max_angle = %s\n", format_g17(a.max_angle).c_str());
  std::printf("non_obtuse = %s\n", a.non_obtuse ? "true" : "false");
  for (const auto& [k, ang] : a.obtuse_violations)
    std::printf("obtuse_element = %d angle = %s\n", k, format_g17(ang).c_str());
  std::printf("all_elements_have_interior_vertex = %s\n",
              a.all_elements_have_interior_vertex ? "true" : "false");
  for (int k : a.elements_without_interior_vertex)
    std::printf("element_without_interior_vertex = %d\n", k);
  return a.non_obtuse ? 0 : 1;
}

int cmd_props(const std::string& suite) {
  bool ok = true;
  if (suite == "lemma21") {
    print_property_results(lemma21_suite(200, 1), ok);
  } else if (suite == "nonobtuse-gradient") {
    print_property_results(nonobtuse_gradient_suite(8, 100, 1), ok);
  } else if (suite == "lambda-chain") {
    print_property_results(lambda_chain_suite(8, 50, 1), ok);
  } else if (suite == "lambda-slope") {
    const SlopeResult s = lambda_consistency_slope({4, 8, 16, 32});
    for (std::size_t i = 0; i < s.mesh_sizes.size(); ++i)
      std::printf("n = %-4d gap = %.6e\n", s.mesh_sizes[i], s.gaps[i]);
    std::printf("observed_order = %.4f  [%s]\n", s.order, s.order >= 0.9 ? "pass" : "FAIL");
    ok = s.order >= 0.9;
  } else if (suite == "lumping") {
    print_property_results(lumping_suite(8, 100, 1), ok);
  } else {
    std::cerr << "unknown suite '" << suite
              << "'; available: lemma21, nonobtuse-gradient, lambda-chain, lambda-slope, "
                 "lumping\n";
    return kExitConfig;
  }
  std::printf("suite = %s\nverdict = %s\n", suite.c_str(), ok ? "pass" : "fail");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free-energy-stable finite element schemes for the regularized Oldroyd-B model"};
  app.require_subcommand(1);

  std::string config_path, outdir = "out", mesh_path, suite;
  bool parallel = false;
  int snapshots = 0;

  CLI::App* run = app.add_subcommand("run", "run a configured simulation or continuation");
  run->add_option("--config", config_path, "flat key-value config file")->required();
  run->add_option("--out", outdir, "output directory (trace, certificate, snapshots)");
  run->add_flag("--parallel-assembly", parallel, "element-parallel assembly");
  run->add_option("--snapshots", snapshots, "number of VTK snapshots to write");

  CLI::App* maudit = app.add_subcommand("mesh-audit", "audit a mesh file");
  maudit->add_option("--mesh", mesh_path, "mesh file")->required();

  CLI::App* props = app.add_subcommand("props", "run a named property suite");
  props->add_option("--suite", suite, "lemma21 | nonobtuse-gradient | lambda-chain | "
                                      "lambda-slope | lumping")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, outdir, parallel, snapshots);
  if (maudit->parsed()) return cmd_mesh_audit(mesh_path);
  return cmd_props(suite);
}
