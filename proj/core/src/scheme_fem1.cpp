#include "obflow/scheme_fem1.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "assembly_detail.hpp"
#include "picard_detail.hpp"

namespace obflow {

using detail::kVolumeDegree;

namespace {

double contract_ec(const SymMat& m, int c) {
  switch (c) {
    case 0: return m(0, 0);
    case 1: return 2.0 * m(0, 1);
    default: return m(1, 1);
  }
}

constexpr double kPackedIdentity[3] = {1.0, 0.0, 1.0};

// E_c * beta as a plain matrix (phi(P_q) beta(sigma(P_q)) with phi = eta_q E_c)
Mat ec_times(const SymMat& beta, int c) {
  SymMat e(2);
  if (c == 0) e.at(0, 0) = 1.0;
  if (c == 1) e.at(0, 1) = 1.0;
  if (c == 2) e.at(1, 1) = 1.0;
  return multiply(e, beta);
}

double grad_dot(const Grad2& g, const Mat& m) {
  return g.a[0][0] * m(0, 0) + g.a[0][1] * m(0, 1) + g.a[1][0] * m(1, 0) + g.a[1][1] * m(1, 1);
}

}  // namespace

Fem1Scheme::Fem1Scheme(const SimplicialMesh& mesh, SpaceTag velocity_tag,
                       const FluidParams& fluid, const RegParams& reg)
    : mesh_(&mesh),
      vspace_(mesh, velocity_tag),
      fluid_(fluid),
      calc_(StressCalculus::regularized(reg)) {
  fluid.validate();
  if (!lbb_whitelisted(velocity_tag, SpaceTag::PRES_P1))
    throw std::invalid_argument("Fem1Scheme: velocity/P1 pair is not LBB-whitelisted");
  vmap_ = detail::make_vel_layout(vspace_).map;
  nu_ = detail::make_vel_layout(vspace_).nu;
  np_ = mesh.num_vertices();
  ns_ = 3 * mesh.num_vertices();
  lumped_ = lumped_vertex_weights(mesh);
}

Fem1Scheme::Fem1Scheme(const SimplicialMesh& mesh, SpaceTag velocity_tag,
                       const FluidParams& fluid, std::optional<double> cutoff, bool unregularized)
    : mesh_(&mesh),
      vspace_(mesh, velocity_tag),
      fluid_(fluid),
      calc_(unregularized ? StressCalculus::unregularized(cutoff)
                          : StressCalculus::regularized(RegParams{0.5, cutoff})) {
  fluid.validate();
  if (!lbb_whitelisted(velocity_tag, SpaceTag::PRES_P1))
    throw std::invalid_argument("Fem1Scheme: velocity/P1 pair is not LBB-whitelisted");
  vmap_ = detail::make_vel_layout(vspace_).map;
  nu_ = detail::make_vel_layout(vspace_).nu;
  np_ = mesh.num_vertices();
  ns_ = 3 * mesh.num_vertices();
  lumped_ = lumped_vertex_weights(mesh);
}

bool Fem1Scheme::analyzed_regime() const {
  return calc_.is_regularized() && fluid_.diffusion > 0.0;
}

int Fem1Scheme::residual_size() const { return nu_ + np_ + ns_; }

std::vector<double> Fem1Scheme::residual(const DiscreteStateFEM1& prev,
                                         const DiscreteStateFEM1& cand,
                                         const PressureField& pressure, const LoadVector& f,
                                         double dt) const {
  const SimplicialMesh& mesh = *mesh_;
  const int nv = mesh.num_vertices();
  if (static_cast<int>(cand.stress.value.size()) != nv ||
      prev.stress.value.size() != cand.stress.value.size())
    throw std::invalid_argument("fem1_residual: stress field does not match the mesh");
  if (static_cast<int>(cand.velocity.coeff.size()) != vspace_.ndof())
    throw std::invalid_argument("fem1_residual: velocity field does not match the space");
  if (!(dt > 0.0)) throw std::invalid_argument("fem1_residual: dt must be positive");
  if (unregularized() && !spd_at_vertices(cand.stress))
    throw std::domain_error("fem1_residual: unregularized scheme requires SPD vertex stress");

  detail::VelLayout lay;
  lay.map = vmap_;
  lay.nu = nu_;
  std::vector<double> out(residual_size(), 0.0);

  std::vector<SymMat> beta_v(nv, SymMat(2));
  for (int v = 0; v < nv; ++v) beta_v[v] = calc_.beta(cand.stress.value[v]);

  const double eps = fluid_.viscosity_fraction, wi = fluid_.weissenberg;
  const double alpha = fluid_.diffusion;
  detail::momentum_residual_rows(
      vspace_, SpaceTag::PRES_P1, lay, fluid_, prev.velocity, cand.velocity, pressure, f,
      [&](int k, const std::array<double, 3>& bary) {
        SymMat b(2);
        for (int i = 0; i < 3; ++i) b += beta_v[mesh.elements[k][i]] * bary[i];
        return b;
      },
      eps / wi, dt, out);

  const int off = nu_ + np_;
  const SymMat id = SymMat::identity(2);

  // lumped time-derivative and relaxation rows
  for (int v = 0; v < nv; ++v) {
    const SymMat m =
        (cand.stress.value[v] - prev.stress.value[v]) * (1.0 / dt) +
        (cand.stress.value[v] - id) * (1.0 / wi);
    for (int c = 0; c < 3; ++c) out[off + 3 * v + c] += lumped_[v] * contract_ec(m, c);
  }

  const TriangleRule& rule = triangle_rule(kVolumeDegree);
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& el = mesh.elements[k];
    const std::array<Vec2, 3> gh = hat_gradients(mesh, k);
    const double area = mesh.element_area(k);

    // diffusion: alpha grad sigma :: grad phi
    if (alpha != 0.0) {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const double kij = area * (gh[i][0] * gh[j][0] + gh[i][1] * gh[j][1]);
          for (int c = 0; c < 3; ++c) {
            const double mc = (c == 1) ? 2.0 : 1.0;
            out[off + 3 * el[i] + c] +=
                alpha * kij * mc * cand.stress.value[el[j]].packed(c);
          }
        }
    }

    // production: -2 grad u : pi_h[phi beta(sigma)]
    Mat eb[3][3];  // [local vertex][component]
    for (int i = 0; i < 3; ++i)
      for (int c = 0; c < 3; ++c) eb[i][c] = ec_times(beta_v[el[i]], c);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = area * rule.weights[q];
      const Grad2 gu = velocity_gradient(vspace_, cand.velocity, k, rule.points[q]);
      for (int i = 0; i < 3; ++i) {
        const double hat = rule.points[q][i];
        for (int c = 0; c < 3; ++c)
          out[off + 3 * el[i] + c] -= 2.0 * w * hat * grad_dot(gu, eb[i][c]);
      }
    }

    // Lambda transport: -int sum_{m,p} u^{n-1}_m Lambda_{m,p} : d phi / d x_p
    const LambdaTensor lt = lambda_tensor(mesh, k, cand.stress, calc_);
    const Vec2 uel = detail::element_velocity_integral(vspace_, prev.velocity, k);
    for (int i = 0; i < 3; ++i)
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int m = 0; m < 2; ++m)
          for (int p = 0; p < 2; ++p)
            s += uel[m] * contract_ec(lt.block[m][p], c) * gh[i][p];
        out[off + 3 * el[i] + c] -= s;
      }
  }
  return out;
}

Fem1StepResult Fem1Scheme::step(const DiscreteStateFEM1& prev, const PressureField& pressure_prev,
                                const LoadVector& f, double dt, const SolverOpts& opts,
                                const DiscreteStateFEM1* iterate_seed) const {
  if (!(dt > 0.0)) throw std::invalid_argument("fem1_step: dt must be positive");
  const SimplicialMesh& mesh = *mesh_;
  const int nv = mesh.num_vertices();
  const detail::VelLayout lay = detail::make_vel_layout(vspace_);
  const double eps = fluid_.viscosity_fraction, wi = fluid_.weissenberg;
  const double alpha = fluid_.diffusion;

  Fem1StepResult result;
  if (unregularized() && !spd_at_vertices(prev.stress)) {
    result.state = prev;
    result.pressure = pressure_prev;
    result.picard.converged = false;
    result.picard.residual_norm = std::numeric_limits<double>::infinity();
    return result;
  }

  detail::MomentumMatrixOpts mopts;
  mopts.mass_coeff = fluid_.reynolds / dt;
  mopts.convection_coeff = 0.5 * fluid_.reynolds;
  mopts.viscous_coeff = 1.0 - eps;
  SparseMatrix msys =
      detail::assemble_momentum_matrix(vspace_, SpaceTag::PRES_P1, lay, mopts, &prev.velocity);
  LuSolver msolve(msys);

  SparseMatrix ssys(nv, nv);
  for (int v = 0; v < nv; ++v) ssys.add(v, v, lumped_[v] * (1.0 / dt + 1.0 / wi));
  if (alpha != 0.0) detail::add_p1_stiffness(ssys, mesh, alpha, 0, 0);
  LuSolver ssolve(ssys);

  const int total = residual_size();
  auto pack = [&](const VelocityField& u, const PressureField& p, const StressFieldP1& s) {
    std::vector<double> x(total, 0.0);
    for (int g = 0; g < vspace_.ndof(); ++g)
      if (vmap_[g] >= 0) x[vmap_[g]] = u.coeff[g];
    for (int q = 0; q < np_; ++q) x[nu_ + q] = p.coeff[q];
    for (int v = 0; v < nv; ++v)
      for (int c = 0; c < 3; ++c) x[nu_ + np_ + 3 * v + c] = s.value[v].packed(c);
    return x;
  };
  auto unpack = [&](const std::vector<double>& x, VelocityField& u, PressureField& p,
                    StressFieldP1& s) {
    u = zero_velocity(vspace_);
    for (int g = 0; g < vspace_.ndof(); ++g)
      if (vmap_[g] >= 0) u.coeff[g] = x[vmap_[g]];
    p.space = SpaceTag::PRES_P1;
    p.coeff.assign(np_, 0.0);
    for (int q = 0; q < np_; ++q) p.coeff[q] = x[nu_ + q];
    s.value.assign(nv, SymMat(2));
    for (int v = 0; v < nv; ++v)
      for (int c = 0; c < 3; ++c) s.value[v].packed(c) = x[nu_ + np_ + 3 * v + c];
  };

  detail::PicardCallbacks cb;
  cb.residual = [&](const std::vector<double>& x) {
    VelocityField u;
    PressureField p;
    StressFieldP1 s;
    unpack(x, u, p, s);
    if (unregularized() && !spd_at_vertices(s)) return std::vector<double>();
    DiscreteStateFEM1 cand{u, s, prev.time + dt};
    return residual(prev, cand, p, f, dt);
  };
  {
    const std::vector<double> mdiag = msys.diagonal();
    const std::vector<double> sdiag = ssys.diagonal();
    const int total_rows = residual_size();
    cb.row_scale.assign(total_rows, 1.0);
    for (int i = 0; i < nu_; ++i) cb.row_scale[i] = std::abs(mdiag[i]);
    for (int q = 0; q < np_; ++q) cb.row_scale[nu_ + q] = lumped_[q];
    for (int v = 0; v < nv; ++v)
      for (int c = 0; c < 3; ++c)
        cb.row_scale[nu_ + np_ + 3 * v + c] = (c == 1 ? 2.0 : 1.0) * sdiag[v];
  }
  cb.sweep = [&](const std::vector<double>& x) {
    VelocityField u;
    PressureField p;
    StressFieldP1 s;
    unpack(x, u, p, s);
    std::vector<SymMat> beta_v(nv, SymMat(2));
    for (int v = 0; v < nv; ++v) beta_v[v] = calc_.beta(s.value[v]);

    std::vector<double> rhs = detail::momentum_rhs(
        vspace_, SpaceTag::PRES_P1, lay, fluid_.reynolds / dt, &prev.velocity, &f,
        [&](int k, const std::array<double, 3>& bary) {
          SymMat b(2);
          for (int i = 0; i < 3; ++i) b += beta_v[mesh.elements[k][i]] * bary[i];
          return b;
        },
        eps / wi);
    const std::vector<double> upsol = msolve.solve(rhs);
    VelocityField unew = zero_velocity(vspace_);
    for (int g = 0; g < vspace_.ndof(); ++g)
      if (vmap_[g] >= 0) unew.coeff[g] = upsol[vmap_[g]];

    // stress right-hand sides (packed components, rows divided by the
    // off-diagonal multiplicity)
    std::vector<std::array<double, 3>> rhs_s(nv, {0.0, 0.0, 0.0});
    for (int v = 0; v < nv; ++v)
      for (int c = 0; c < 3; ++c)
        rhs_s[v][c] = lumped_[v] * (prev.stress.value[v].packed(c) / dt + kPackedIdentity[c] / wi);
    const TriangleRule& rule = triangle_rule(kVolumeDegree);
    for (int k = 0; k < mesh.num_elements(); ++k) {
      const auto& el = mesh.elements[k];
      const std::array<Vec2, 3> gh = hat_gradients(mesh, k);
      const double area = mesh.element_area(k);
      Mat eb[3][3];
      for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 3; ++c) eb[i][c] = ec_times(beta_v[el[i]], c);
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const double w = area * rule.weights[q];
        const Grad2 gu = velocity_gradient(vspace_, unew, k, rule.points[q]);
        for (int i = 0; i < 3; ++i) {
          const double hat = rule.points[q][i];
          for (int c = 0; c < 3; ++c) {
            const double mc = (c == 1) ? 2.0 : 1.0;
            rhs_s[el[i]][c] += 2.0 * w * hat * grad_dot(gu, eb[i][c]) / mc;
          }
        }
      }
      const LambdaTensor lt = lambda_tensor(mesh, k, s, calc_);
      const Vec2 uel = detail::element_velocity_integral(vspace_, prev.velocity, k);
      for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 3; ++c) {
          double acc = 0.0;
          for (int m = 0; m < 2; ++m)
            for (int p = 0; p < 2; ++p) acc += uel[m] * lt.block[m][p].packed(c) * gh[i][p];
          rhs_s[el[i]][c] += acc;
        }
    }

    std::vector<double> xnew(total, 0.0);
    for (int i = 0; i < nu_ + np_; ++i) xnew[i] = upsol[i];
    for (int c = 0; c < 3; ++c) {
      std::vector<double> b(nv);
      for (int v = 0; v < nv; ++v) b[v] = rhs_s[v][c];
      const std::vector<double> sc = ssolve.solve(b);
      for (int v = 0; v < nv; ++v) xnew[nu_ + np_ + 3 * v + c] = sc[v];
    }
    return xnew;
  };

  std::vector<double> x = iterate_seed
                              ? pack(iterate_seed->velocity, pressure_prev, iterate_seed->stress)
                              : pack(prev.velocity, pressure_prev, prev.stress);
  if (unregularized() && iterate_seed && !spd_at_vertices(iterate_seed->stress))
    x = pack(prev.velocity, pressure_prev, prev.stress);
  result.picard = detail::run_damped_picard(x, cb, opts);
  unpack(x, result.state.velocity, result.pressure, result.state.stress);
  result.state.time = prev.time + dt;
  return result;
}

double Fem1Scheme::energy(const DiscreteStateFEM1& state) const {
  const double kinetic = 0.5 * fluid_.reynolds * detail::kinetic_integral(vspace_, state.velocity);
  double ent = 0.0;
  for (int v = 0; v < mesh_->num_vertices(); ++v)
    ent += lumped_[v] * calc_.entropy(state.stress.value[v]);
  return kinetic + fluid_.viscosity_fraction / (2.0 * fluid_.weissenberg) * ent;
}

EnergyBreakdown Fem1Scheme::energy_audit(const DiscreteStateFEM1& prev,
                                         const DiscreteStateFEM1& next, const LoadVector& f,
                                         double dt) const {
  const SimplicialMesh& mesh = *mesh_;
  const int nv = mesh.num_vertices();
  const double eps = fluid_.viscosity_fraction, wi = fluid_.weissenberg;
  EnergyBreakdown e;
  e.dt = dt;
  e.kinetic = 0.5 * fluid_.reynolds * detail::kinetic_integral(vspace_, next.velocity);
  double ent = 0.0, diss = 0.0;
  for (int v = 0; v < nv; ++v) {
    ent += lumped_[v] * calc_.entropy(next.stress.value[v]);
    diss += lumped_[v] * calc_.dissipation(next.stress.value[v]);
  }
  e.entropy = eps / (2.0 * wi) * ent;
  e.total = e.kinetic + e.entropy;
  e.prev_total = energy(prev);

  VelocityField du = next.velocity;
  for (std::size_t i = 0; i < du.coeff.size(); ++i) du.coeff[i] -= prev.velocity.coeff[i];
  e.velocity_increment = fluid_.reynolds / (2.0 * dt) * detail::kinetic_integral(vspace_, du);
  e.viscous_dissipation = (1.0 - eps) * detail::grad_norm2_integral(vspace_, next.velocity);
  e.stress_dissipation = eps / (2.0 * wi * wi) * diss;

  // regularized diffusion dissipation (alpha eps delta^2 / 2Wi) ||grad pi_h G'||^2;
  // the unregularized limit carries no such term
  e.diffusion_dissipation = 0.0;
  std::vector<SymMat> gp(nv, SymMat(2));
  std::vector<double> trh(nv, 0.0);
  for (int v = 0; v < nv; ++v) {
    gp[v] = calc_.g_prime(next.stress.value[v]);
    trh[v] = calc_.trace_h_of_gprime(next.stress.value[v]);
  }
  if (calc_.is_regularized() && fluid_.diffusion != 0.0) {
    const double delta = *calc_.delta();
    double g2 = 0.0;
    for (int k = 0; k < mesh.num_elements(); ++k) {
      const auto& el = mesh.elements[k];
      const std::array<Vec2, 3> gh = hat_gradients(mesh, k);
      for (int p = 0; p < 2; ++p) {
        SymMat d(2);
        for (int i = 0; i < 3; ++i) d += gp[el[i]] * gh[i][p];
        g2 += mesh.element_area(k) * d.dot(d);
      }
    }
    e.diffusion_dissipation = fluid_.diffusion * eps * delta * delta / (2.0 * wi) * g2;
  }

  e.forcing_pairing = detail::dot(f, next.velocity.coeff);
  e.slack = e.forcing_pairing - ((e.total - e.prev_total) / dt + e.velocity_increment +
                                 e.viscous_dissipation + e.stress_dissipation +
                                 e.diffusion_dissipation);

  // discrete transport pairing int u^{n-1} . grad pi_h[tr H(G'(sigma^n))]
  double tele = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& el = mesh.elements[k];
    const std::array<Vec2, 3> gh = hat_gradients(mesh, k);
    Vec2 grad{0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
      grad[0] += trh[el[i]] * gh[i][0];
      grad[1] += trh[el[i]] * gh[i][1];
    }
    const Vec2 uel = detail::element_velocity_integral(vspace_, prev.velocity, k);
    tele += uel[0] * grad[0] + uel[1] * grad[1];
  }
  e.edge_telescoping = tele;
  e.convection_skew = detail::convection_skew_value(vspace_, fluid_, prev.velocity, next.velocity);
  return e;
}

InitialFields Fem1Scheme::project_initial_fields(const std::function<Vec2(Point)>& u0,
                                                 const std::function<SymMat(Point)>& sigma0,
                                                 double dt0) const {
  if (!(dt0 > 0.0)) throw std::invalid_argument("project_initial_fields: dt0 must be positive");
  const SimplicialMesh& mesh = *mesh_;
  const int nv = mesh.num_vertices();
  const detail::VelLayout lay = detail::make_vel_layout(vspace_);

  InitialFields out;

  // velocity: int [u_h . v + dt0 grad u_h : grad v] = int u0 . v over the
  // discretely divergence-free subspace
  detail::MomentumMatrixOpts mopts;
  mopts.mass_coeff = 1.0;
  mopts.viscous_coeff = dt0;
  SparseMatrix sys =
      detail::assemble_momentum_matrix(vspace_, SpaceTag::PRES_P1, lay, mopts, nullptr);
  const LoadVector load = assemble_load(vspace_, u0, detail::kDataDegree);
  std::vector<double> rhs(lay.nu + np_ + 1, 0.0);
  for (int g = 0; g < vspace_.ndof(); ++g)
    if (lay.map[g] >= 0) rhs[lay.map[g]] = load[g];
  const std::vector<double> sol = solve(sys, rhs);
  out.velocity = zero_velocity(vspace_);
  for (int g = 0; g < vspace_.ndof(); ++g)
    if (lay.map[g] >= 0) out.velocity.coeff[g] = sol[lay.map[g]];
  out.pressure.space = SpaceTag::PRES_P1;
  out.pressure.coeff.assign(np_, 0.0);
  for (int q = 0; q < np_; ++q) out.pressure.coeff[q] = sol[lay.nu + q];

  // stress: lumped mass + dt0 stiffness, the three packed components share
  // one factorization
  SparseMatrix ssys(nv, nv);
  for (int v = 0; v < nv; ++v) ssys.add(v, v, lumped_[v]);
  detail::add_p1_stiffness(ssys, mesh, dt0, 0, 0);
  LuSolver ssolve(ssys);
  const TriangleRule& rule = triangle_rule(detail::kDataDegree);
  std::vector<std::array<double, 3>> rhs_s(nv, {0.0, 0.0, 0.0});
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const double area = mesh.element_area(k);
    const auto& el = mesh.elements[k];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = area * rule.weights[q];
      const SymMat s0 = sigma0(mesh.from_barycentric(k, rule.points[q]));
      for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 3; ++c) rhs_s[el[i]][c] += w * rule.points[q][i] * s0.packed(c);
    }
  }
  out.stress.value.assign(nv, SymMat(2));
  for (int c = 0; c < 3; ++c) {
    std::vector<double> b(nv);
    for (int v = 0; v < nv; ++v) b[v] = rhs_s[v][c];
    const std::vector<double> sc = ssolve.solve(b);
    for (int v = 0; v < nv; ++v) out.stress.value[v].packed(c) = sc[v];
  }

  out.l2_velocity = detail::kinetic_integral(vspace_, out.velocity);
  out.h1_velocity_dt0 = dt0 * detail::grad_norm2_integral(vspace_, out.velocity);
  out.l2_stress = p1_mass_integral(mesh, out.stress, out.stress);
  double g2 = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& el = mesh.elements[k];
    const std::array<Vec2, 3> gh = hat_gradients(mesh, k);
    for (int p = 0; p < 2; ++p) {
      SymMat d(2);
      for (int i = 0; i < 3; ++i) d += out.stress.value[el[i]] * gh[i][p];
      g2 += mesh.element_area(k) * d.dot(d);
    }
  }
  out.h1_stress_dt0 = dt0 * g2;
  return out;
}

}  // namespace obflow
