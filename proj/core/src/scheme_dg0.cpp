#include "obflow/scheme_dg0.hpp"

#include <cmath>
#include <stdexcept>

#include "assembly_detail.hpp"
#include "picard_detail.hpp"

namespace obflow {

using detail::contract;
using detail::kVolumeDegree;

void FluidParams::validate() const {
  if (!(reynolds > 0.0)) throw std::invalid_argument("FluidParams: Re must be positive");
  if (!(weissenberg > 0.0)) throw std::invalid_argument("FluidParams: Wi must be positive");
  if (!(viscosity_fraction > 0.0) || !(viscosity_fraction < 1.0))
    throw std::invalid_argument("FluidParams: eps must lie in (0,1)");
  if (!(diffusion >= 0.0)) throw std::invalid_argument("FluidParams: alpha must be >= 0");
}

namespace {

// contraction with the packed test tensors E_xx, E_xy (both unit
// off-diagonal entries), E_yy
double contract_ec(const SymMat& m, int c) {
  switch (c) {
    case 0: return m(0, 0);
    case 1: return 2.0 * m(0, 1);
    default: return m(1, 1);
  }
}

double contract_ec(const Mat& m, int c) {
  switch (c) {
    case 0: return m(0, 0);
    case 1: return m(0, 1) + m(1, 0);
    default: return m(1, 1);
  }
}

// packed identity entries (I : E_c with the off-diagonal multiplicity divided out)
constexpr double kPackedIdentity[3] = {1.0, 0.0, 1.0};

struct FacetPoint {
  int facet;
  Point x;
  double weight;  // facet length * gauss weight
};

std::vector<FacetPoint> facet_points(const SimplicialMesh& mesh) {
  std::vector<FacetPoint> pts;
  const FacetRule& rule = facet_rule();
  for (std::size_t f = 0; f < mesh.internal_facets.size(); ++f) {
    const InternalFacet& fac = mesh.internal_facets[f];
    const Point a = mesh.vertices[fac.v0], b = mesh.vertices[fac.v1];
    for (int q = 0; q < 2; ++q) {
      const double t = rule.points[q];
      pts.push_back({static_cast<int>(f),
                     {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])},
                     fac.length * rule.weights[q]});
    }
  }
  return pts;
}

double upwind_speed(const SimplicialMesh& mesh, const VelocitySpace& vs, const VelocityField& u,
                    const FacetPoint& fp, int& downstream, int& upstream) {
  const InternalFacet& fac = mesh.internal_facets[fp.facet];
  const Vec2 vel = velocity_value(vs, u, fac.left, mesh.barycentric(fac.left, fp.x));
  const double un = vel[0] * fac.normal[0] + vel[1] * fac.normal[1];
  if (un > 0.0) {
    downstream = fac.right;
    upstream = fac.left;
  } else if (un < 0.0) {
    downstream = fac.left;
    upstream = fac.right;
  } else {
    downstream = upstream = -1;
  }
  return std::abs(un);
}

}  // namespace

Dg0Scheme::Dg0Scheme(const SimplicialMesh& mesh, SpaceTag velocity_tag, const FluidParams& fluid,
                     const RegParams& reg)
    : mesh_(&mesh),
      vspace_(mesh, velocity_tag),
      fluid_(fluid),
      reg_(reg),
      calc_(StressCalculus::regularized(reg)) {
  fluid.validate();
  if (fluid.diffusion != 0.0)
    throw std::invalid_argument("Dg0Scheme: the P0 scheme carries no stress diffusion (alpha = 0)");
  if (!lbb_whitelisted(velocity_tag, SpaceTag::PRES_P0))
    throw std::invalid_argument("Dg0Scheme: velocity/P0 pair is not LBB-whitelisted");
  const detail::VelLayout lay = detail::make_vel_layout(vspace_);
  vmap_ = lay.map;
  nu_ = lay.nu;
  np_ = mesh.num_elements();
  ns_ = 3 * mesh.num_elements();
}

int Dg0Scheme::residual_size() const { return nu_ + np_ + ns_; }

namespace {

// Shared body for the regularized and unregularized residuals.
std::vector<double> dg0_residual_impl(const SimplicialMesh& mesh, const VelocitySpace& vs,
                                      const std::vector<int>& vmap, int nu, int np,
                                      const FluidParams& fp, const DiscreteStateDG0& prev,
                                      const DiscreteStateDG0& cand, const PressureField& pressure,
                                      const LoadVector& f, double dt,
                                      const std::function<SymMat(const SymMat&)>& beta_of) {
  if (cand.stress.value.size() != static_cast<std::size_t>(mesh.num_elements()) ||
      prev.stress.value.size() != cand.stress.value.size())
    throw std::invalid_argument("dg0_residual: stress field does not match the mesh");
  if (static_cast<int>(cand.velocity.coeff.size()) != vs.ndof())
    throw std::invalid_argument("dg0_residual: velocity field does not match the space");
  if (!(dt > 0.0)) throw std::invalid_argument("dg0_residual: dt must be positive");

  detail::VelLayout lay;
  lay.map = vmap;
  lay.nu = nu;
  std::vector<double> out(nu + np + 3 * mesh.num_elements(), 0.0);

  std::vector<SymMat> beta_star(mesh.num_elements(), SymMat(2));
  for (int k = 0; k < mesh.num_elements(); ++k) beta_star[k] = beta_of(cand.stress.value[k]);

  const double eps = fp.viscosity_fraction, wi = fp.weissenberg;
  detail::momentum_residual_rows(
      vs, SpaceTag::PRES_P0, lay, fp, prev.velocity, cand.velocity, pressure, f,
      [&](int k, const std::array<double, 3>&) { return beta_star[k]; }, eps / wi, dt, out);

  // stress rows: volume part
  const TriangleRule& rule = triangle_rule(kVolumeDegree);
  const int off = nu + np;
  const SymMat id = SymMat::identity(2);
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const double area = mesh.element_area(k);
    const SymMat& sig = cand.stress.value[k];
    const SymMat dtm = (sig - prev.stress.value[k]) * (1.0 / dt) + (sig - id) * (1.0 / wi);
    // production: -2 (grad u) beta(sigma) : phi, grad u integrated exactly
    Grad2 gint;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Grad2 g = velocity_gradient(vs, cand.velocity, k, rule.points[q]);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) gint.a[i][j] += area * rule.weights[q] * g.a[i][j];
    }
    Mat gb;  // (int grad u) * beta
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (int l = 0; l < 2; ++l) s += gint.a[i][l] * beta_star[k](l, j);
        gb.at(i, j) = s;
      }
    for (int c = 0; c < 3; ++c)
      out[off + 3 * k + c] += area * contract_ec(dtm, c) - 2.0 * contract_ec(gb, c);
  }

  // stress rows: DG facet sum with pointwise upwinding
  for (const FacetPoint& fp2 : facet_points(mesh)) {
    int down, up;
    const double speed = upwind_speed(mesh, vs, prev.velocity, fp2, down, up);
    if (down < 0) continue;
    const SymMat jump = cand.stress.value[down] - cand.stress.value[up];
    for (int c = 0; c < 3; ++c)
      out[off + 3 * down + c] += fp2.weight * speed * contract_ec(jump, c);
  }
  return out;
}

}  // namespace

std::vector<double> Dg0Scheme::residual(const DiscreteStateDG0& prev,
                                        const DiscreteStateDG0& cand,
                                        const PressureField& pressure, const LoadVector& f,
                                        double dt) const {
  return dg0_residual_impl(*mesh_, vspace_, vmap_, nu_, np_, fluid_, prev, cand, pressure, f, dt,
                           [this](const SymMat& s) { return calc_.beta(s); });
}

std::vector<double> Dg0Scheme::unregularized_residual(const DiscreteStateDG0& prev,
                                                      const DiscreteStateDG0& cand,
                                                      const PressureField& pressure,
                                                      const LoadVector& f, double dt) const {
  return dg0_residual_impl(*mesh_, vspace_, vmap_, nu_, np_, fluid_, prev, cand, pressure, f, dt,
                           [](const SymMat& s) { return s; });
}

Dg0StepResult Dg0Scheme::step(const DiscreteStateDG0& prev, const PressureField& pressure_prev,
                              const LoadVector& f, double dt, const SolverOpts& opts,
                              const DiscreteStateDG0* iterate_seed) const {
  if (!(dt > 0.0)) throw std::invalid_argument("dg0_step: dt must be positive");
  const SimplicialMesh& mesh = *mesh_;
  const detail::VelLayout lay = detail::make_vel_layout(vspace_);

  const double eps = fluid_.viscosity_fraction, wi = fluid_.weissenberg;

  // momentum saddle factorization, fixed across Picard sweeps
  detail::MomentumMatrixOpts mopts;
  mopts.mass_coeff = fluid_.reynolds / dt;
  mopts.convection_coeff = 0.5 * fluid_.reynolds;
  mopts.viscous_coeff = 1.0 - eps;
  SparseMatrix msys =
      detail::assemble_momentum_matrix(vspace_, SpaceTag::PRES_P0, lay, mopts, &prev.velocity);
  LuSolver msolve(msys);

  // stress scalar system (identical for the three packed components)
  SparseMatrix ssys(mesh.num_elements(), mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k)
    ssys.add(k, k, mesh.element_area(k) * (1.0 / dt + 1.0 / wi));
  for (const FacetPoint& fp2 : facet_points(mesh)) {
    int down, up;
    const double speed = upwind_speed(mesh, vspace_, prev.velocity, fp2, down, up);
    if (down < 0) continue;
    ssys.add(down, down, fp2.weight * speed);
    ssys.add(down, up, -fp2.weight * speed);
  }
  LuSolver ssolve(ssys);

  const int npres = np_;
  const int nk = mesh.num_elements();
  const int total = nu_ + npres + 3 * nk;

  auto pack = [&](const VelocityField& u, const PressureField& p, const StressFieldP0& s) {
    std::vector<double> x(total, 0.0);
    for (int g = 0; g < vspace_.ndof(); ++g)
      if (vmap_[g] >= 0) x[vmap_[g]] = u.coeff[g];
    for (int q = 0; q < npres; ++q) x[nu_ + q] = p.coeff[q];
    for (int k = 0; k < nk; ++k)
      for (int c = 0; c < 3; ++c) x[nu_ + npres + 3 * k + c] = s.value[k].packed(c);
    return x;
  };
  auto unpack = [&](const std::vector<double>& x, VelocityField& u, PressureField& p,
                    StressFieldP0& s) {
    u = zero_velocity(vspace_);
    for (int g = 0; g < vspace_.ndof(); ++g)
      if (vmap_[g] >= 0) u.coeff[g] = x[vmap_[g]];
    p.space = SpaceTag::PRES_P0;
    p.coeff.assign(npres, 0.0);
    for (int q = 0; q < npres; ++q) p.coeff[q] = x[nu_ + q];
    s.value.assign(nk, SymMat(2));
    for (int k = 0; k < nk; ++k)
      for (int c = 0; c < 3; ++c) s.value[k].packed(c) = x[nu_ + npres + 3 * k + c];
  };

  detail::PicardCallbacks cb;
  cb.residual = [&](const std::vector<double>& x) {
    VelocityField u;
    PressureField p;
    StressFieldP0 s;
    unpack(x, u, p, s);
    DiscreteStateDG0 cand{u, s, prev.time + dt};
    return residual(prev, cand, p, f, dt);
  };
  {
    const std::vector<double> mdiag = msys.diagonal();
    const std::vector<double> sdiag = ssys.diagonal();
    cb.row_scale.assign(total, 1.0);
    for (int i = 0; i < nu_; ++i) cb.row_scale[i] = std::abs(mdiag[i]);
    for (int k = 0; k < npres; ++k) cb.row_scale[nu_ + k] = mesh.element_area(k);
    for (int k = 0; k < nk; ++k)
      for (int c = 0; c < 3; ++c)
        cb.row_scale[nu_ + npres + 3 * k + c] = (c == 1 ? 2.0 : 1.0) * sdiag[k];
  }
  cb.sweep = [&](const std::vector<double>& x) {
    VelocityField u;
    PressureField p;
    StressFieldP0 s;
    unpack(x, u, p, s);
    std::vector<SymMat> beta_star(nk, SymMat(2));
    for (int k = 0; k < nk; ++k) beta_star[k] = calc_.beta(s.value[k]);

    // momentum sweep
    std::vector<double> rhs = detail::momentum_rhs(
        vspace_, SpaceTag::PRES_P0, lay, fluid_.reynolds / dt, &prev.velocity, &f,
        [&](int k, const std::array<double, 3>&) { return beta_star[k]; }, eps / wi);
    const std::vector<double> upsol = msolve.solve(rhs);
    VelocityField unew = zero_velocity(vspace_);
    for (int g = 0; g < vspace_.ndof(); ++g)
      if (vmap_[g] >= 0) unew.coeff[g] = upsol[vmap_[g]];

    // stress sweep, componentwise
    std::vector<double> xnew(total, 0.0);
    for (int i = 0; i < nu_ + npres; ++i) xnew[i] = upsol[i];
    const TriangleRule& rule = triangle_rule(kVolumeDegree);
    std::vector<std::array<double, 3>> rhs_s(nk);
    for (int k = 0; k < nk; ++k) {
      const double area = mesh.element_area(k);
      Grad2 gint;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Grad2 g = velocity_gradient(vspace_, unew, k, rule.points[q]);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) gint.a[i][j] += area * rule.weights[q] * g.a[i][j];
      }
      Mat gb;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double ssum = 0.0;
          for (int l = 0; l < 2; ++l) ssum += gint.a[i][l] * beta_star[k](l, j);
          gb.at(i, j) = ssum;
        }
      for (int c = 0; c < 3; ++c) {
        const double mc = (c == 1) ? 2.0 : 1.0;
        rhs_s[k][c] = area * (prev.stress.value[k].packed(c) / dt + kPackedIdentity[c] / wi) +
                      2.0 * contract_ec(gb, c) / mc;
      }
    }
    for (int c = 0; c < 3; ++c) {
      std::vector<double> b(nk);
      for (int k = 0; k < nk; ++k) b[k] = rhs_s[k][c];
      const std::vector<double> sc = ssolve.solve(b);
      for (int k = 0; k < nk; ++k) xnew[nu_ + npres + 3 * k + c] = sc[k];
    }
    return xnew;
  };

  std::vector<double> x = iterate_seed
                              ? pack(iterate_seed->velocity, pressure_prev, iterate_seed->stress)
                              : pack(prev.velocity, pressure_prev, prev.stress);
  Dg0StepResult result;
  result.picard = detail::run_damped_picard(x, cb, opts);
  unpack(x, result.state.velocity, result.pressure, result.state.stress);
  result.state.time = prev.time + dt;
  return result;
}

double Dg0Scheme::energy(const DiscreteStateDG0& state) const {
  const double kinetic = 0.5 * fluid_.reynolds * detail::kinetic_integral(vspace_, state.velocity);
  double ent = 0.0;
  for (int k = 0; k < mesh_->num_elements(); ++k)
    ent += mesh_->element_area(k) * calc_.entropy(state.stress.value[k]);
  return kinetic + fluid_.viscosity_fraction / (2.0 * fluid_.weissenberg) * ent;
}

EnergyBreakdown Dg0Scheme::energy_audit(const DiscreteStateDG0& prev,
                                        const DiscreteStateDG0& next, const LoadVector& f,
                                        double dt) const {
  const SimplicialMesh& mesh = *mesh_;
  const double eps = fluid_.viscosity_fraction, wi = fluid_.weissenberg;
  EnergyBreakdown e;
  e.dt = dt;
  e.kinetic = 0.5 * fluid_.reynolds * detail::kinetic_integral(vspace_, next.velocity);
  double ent = 0.0, diss = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    ent += mesh.element_area(k) * calc_.entropy(next.stress.value[k]);
    diss += mesh.element_area(k) * calc_.dissipation(next.stress.value[k]);
  }
  e.entropy = eps / (2.0 * wi) * ent;
  e.total = e.kinetic + e.entropy;
  e.prev_total = energy(prev);

  VelocityField du = next.velocity;
  for (std::size_t i = 0; i < du.coeff.size(); ++i) du.coeff[i] -= prev.velocity.coeff[i];
  e.velocity_increment =
      fluid_.reynolds / (2.0 * dt) * detail::kinetic_integral(vspace_, du);
  e.viscous_dissipation = (1.0 - eps) * detail::grad_norm2_integral(vspace_, next.velocity);
  e.stress_dissipation = eps / (2.0 * wi * wi) * diss;
  e.diffusion_dissipation = 0.0;
  e.forcing_pairing = detail::dot(f, next.velocity.coeff);
  e.slack = e.forcing_pairing - ((e.total - e.prev_total) / dt + e.velocity_increment +
                                 e.viscous_dissipation + e.stress_dissipation +
                                 e.diffusion_dissipation);

  // telescoped facet identity on tr(sigma - G(sigma)); equals
  // -int tr(sigma - G(sigma)) div u^{n-1} elementwise, i.e. zero
  std::vector<double> q1(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k) q1[k] = calc_.entropy(next.stress.value[k]);
  double tele = 0.0;
  for (const FacetPoint& fp2 : facet_points(mesh)) {
    int down, up;
    const double speed = upwind_speed(mesh, vspace_, prev.velocity, fp2, down, up);
    if (down < 0) continue;
    tele += fp2.weight * speed * (q1[down] - q1[up]);
  }
  e.edge_telescoping = tele;
  e.convection_skew = detail::convection_skew_value(vspace_, fluid_, prev.velocity, next.velocity);
  return e;
}

DiscreteStateDG0 Dg0Scheme::project_initial(const std::function<Vec2(Point)>& u0,
                                            const std::function<SymMat(Point)>& sigma0) const {
  const SimplicialMesh& mesh = *mesh_;
  detail::VelLayout lay = detail::make_vel_layout(vspace_);

  detail::MomentumMatrixOpts mopts;  // plain L2 projection into the div-free subspace
  mopts.mass_coeff = 1.0;
  SparseMatrix sys = detail::assemble_momentum_matrix(vspace_, SpaceTag::PRES_P0, lay, mopts,
                                                      nullptr);
  const LoadVector load = assemble_load(vspace_, u0, detail::kDataDegree);
  std::vector<double> rhs(lay.nu + np_ + 1, 0.0);
  for (int g = 0; g < vspace_.ndof(); ++g)
    if (lay.map[g] >= 0) rhs[lay.map[g]] = load[g];
  const std::vector<double> sol = solve(sys, rhs);

  DiscreteStateDG0 state;
  state.velocity = zero_velocity(vspace_);
  for (int g = 0; g < vspace_.ndof(); ++g)
    if (lay.map[g] >= 0) state.velocity.coeff[g] = sol[lay.map[g]];
  state.stress.value.assign(mesh.num_elements(), SymMat(2));
  const TriangleRule& rule = triangle_rule(detail::kDataDegree);
  for (int k = 0; k < mesh.num_elements(); ++k) {
    SymMat avg(2);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const SymMat v = sigma0(mesh.from_barycentric(k, rule.points[q]));
      avg += v * rule.weights[q];
    }
    state.stress.value[k] = avg;
  }
  state.time = 0.0;
  return state;
}

}  // namespace obflow
