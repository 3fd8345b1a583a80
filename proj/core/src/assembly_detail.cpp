#include "assembly_detail.hpp"

#include <atomic>
#include <cmath>
#include <future>
#include <thread>

namespace obflow {

namespace {
std::atomic<bool> g_parallel{false};
}

void set_parallel_assembly(bool on) { g_parallel.store(on); }
bool parallel_assembly_enabled() { return g_parallel.load(); }

std::vector<double> assemble_load(const VelocitySpace& space,
                                  const std::function<Vec2(Point)>& f, int degree) {
  const SimplicialMesh& mesh = space.mesh();
  std::vector<double> load(space.ndof(), 0.0);
  const TriangleRule& rule = triangle_rule(degree);
  Vec2 vals[12];
  Grad2 grads[12];
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const double area = mesh.element_area(k);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = area * rule.weights[q];
      const Point x = mesh.from_barycentric(k, rule.points[q]);
      const Vec2 fx = f(x);
      space.eval(k, rule.points[q], vals, grads);
      for (int l = 0; l < space.local_count(); ++l)
        load[space.global_dof(k, l)] += w * (fx[0] * vals[l][0] + fx[1] * vals[l][1]);
    }
  }
  return load;
}

namespace detail {

VelLayout make_vel_layout(const VelocitySpace& vs) {
  VelLayout lay;
  lay.map.assign(vs.ndof(), -1);
  for (int g = 0; g < vs.ndof(); ++g) {
    if (!vs.pinned(g)) {
      lay.map[g] = lay.nu++;
      lay.free_list.push_back(g);
    }
  }
  return lay;
}

void for_each_element(int n, const std::function<void(int)>& fn) {
  if (!parallel_assembly_enabled() || n < 64) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  const int nthreads = std::max(2u, std::thread::hardware_concurrency());
  const int chunk = (n + nthreads - 1) / nthreads;
  std::vector<std::future<void>> futs;
  for (int t = 0; t < nthreads; ++t) {
    const int lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    futs.push_back(std::async(std::launch::async, [lo, hi, &fn] {
      for (int k = lo; k < hi; ++k) fn(k);
    }));
  }
  for (auto& f : futs) f.get();
}

SparseMatrix assemble_momentum_matrix(const VelocitySpace& vs, SpaceTag pres,
                                      const VelLayout& lay, const MomentumMatrixOpts& opts,
                                      const VelocityField* u_prev) {
  const SimplicialMesh& mesh = vs.mesh();
  const int np = pressure_dof_count(mesh, pres);
  const int n = lay.nu + np + 1;
  SparseMatrix a(n, n);
  const TriangleRule& rule = triangle_rule(kVolumeDegree);
  const int nl = vs.local_count();
  const int npl = pressure_local_count(pres);

  std::vector<std::vector<Triplet>> parts(mesh.num_elements());
  for_each_element(mesh.num_elements(), [&](int k) {
    Vec2 vals[12];
    Grad2 grads[12];
    std::vector<Triplet>& out = parts[k];
    int gdof[12];
    int eq[12];
    for (int l = 0; l < nl; ++l) {
      gdof[l] = vs.global_dof(k, l);
      eq[l] = lay.map[gdof[l]];
    }
    const double area = mesh.element_area(k);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = area * rule.weights[q];
      vs.eval(k, rule.points[q], vals, grads);
      Vec2 up{0.0, 0.0};
      if (u_prev && opts.convection_coeff != 0.0) {
        for (int l = 0; l < nl; ++l) {
          const double c = u_prev->coeff[gdof[l]];
          up[0] += c * vals[l][0];
          up[1] += c * vals[l][1];
        }
      }
      for (int i = 0; i < nl; ++i) {
        if (eq[i] < 0) continue;
        for (int j = 0; j < nl; ++j) {
          if (eq[j] < 0) continue;
          double m = opts.mass_coeff *
                     (vals[i][0] * vals[j][0] + vals[i][1] * vals[j][1]);
          if (opts.viscous_coeff != 0.0)
            m += opts.viscous_coeff * grad_inner(grads[i], grads[j]);
          if (u_prev && opts.convection_coeff != 0.0) {
            // (u_prev . grad) v_j . v_i  -  v_j . (u_prev . grad) v_i
            const double c1 = (grads[j].a[0][0] * up[0] + grads[j].a[0][1] * up[1]) * vals[i][0] +
                              (grads[j].a[1][0] * up[0] + grads[j].a[1][1] * up[1]) * vals[i][1];
            const double c2 = (grads[i].a[0][0] * up[0] + grads[i].a[0][1] * up[1]) * vals[j][0] +
                              (grads[i].a[1][0] * up[0] + grads[i].a[1][1] * up[1]) * vals[j][1];
            m += opts.convection_coeff * (c1 - c2);
          }
          out.push_back({eq[i], eq[j], w * m});
        }
        // pressure coupling: -int p div v_i   and continuity rows
        const double divi = grads[i].divergence();
        for (int pl = 0; pl < npl; ++pl) {
          const int pg = lay.nu + pressure_global(mesh, pres, k, pl);
          const double pb = pressure_basis(pres, rule.points[q], pl);
          out.push_back({eq[i], pg, -w * divi * pb});
          out.push_back({pg, eq[i], w * divi * pb});
        }
      }
    }
  });
  for (auto& part : parts) a.add(part);

  // mean-zero pressure gauge
  const int mult = lay.nu + np;
  std::vector<double> pmass(np, 0.0);
  for (int k = 0; k < mesh.num_elements(); ++k) {
    if (pres == SpaceTag::PRES_P0) {
      pmass[k] += mesh.element_area(k);
    } else {
      for (int i = 0; i < 3; ++i) pmass[mesh.elements[k][i]] += mesh.element_area(k) / 3.0;
    }
  }
  for (int p = 0; p < np; ++p) {
    a.add(lay.nu + p, mult, pmass[p]);
    a.add(mult, lay.nu + p, pmass[p]);
  }
  return a;
}

std::vector<double> momentum_rhs(const VelocitySpace& vs, SpaceTag pres, const VelLayout& lay,
                                 double mass_coeff, const VelocityField* u_prev,
                                 const LoadVector* load, const BetaField& beta_at,
                                 double coupling_coeff) {
  const SimplicialMesh& mesh = vs.mesh();
  const int np = pressure_dof_count(mesh, pres);
  std::vector<double> rhs(lay.nu + np + 1, 0.0);
  if (load) {
    for (int g = 0; g < vs.ndof(); ++g)
      if (lay.map[g] >= 0) rhs[lay.map[g]] += (*load)[g];
  }
  const TriangleRule& rule = triangle_rule(kVolumeDegree);
  const int nl = vs.local_count();
  std::vector<std::vector<double>> parts(mesh.num_elements());
  for_each_element(mesh.num_elements(), [&](int k) {
    Vec2 vals[12];
    Grad2 grads[12];
    std::vector<double>& out = parts[k];
    out.assign(nl, 0.0);
    int gdof[12];
    for (int l = 0; l < nl; ++l) gdof[l] = vs.global_dof(k, l);
    const double area = mesh.element_area(k);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = area * rule.weights[q];
      vs.eval(k, rule.points[q], vals, grads);
      Vec2 up{0.0, 0.0};
      if (u_prev) {
        for (int l = 0; l < nl; ++l) {
          const double c = u_prev->coeff[gdof[l]];
          up[0] += c * vals[l][0];
          up[1] += c * vals[l][1];
        }
      }
      SymMat b(2);
      if (beta_at) b = beta_at(k, rule.points[q]);
      for (int i = 0; i < nl; ++i) {
        double r = 0.0;
        if (u_prev) r += mass_coeff * (up[0] * vals[i][0] + up[1] * vals[i][1]);
        if (beta_at) r -= coupling_coeff * contract(b, grads[i]);
        out[i] += w * r;
      }
    }
  });
  for (int k = 0; k < mesh.num_elements(); ++k)
    for (int l = 0; l < nl; ++l) {
      const int eq = lay.map[vs.global_dof(k, l)];
      if (eq >= 0) rhs[eq] += parts[k][l];
    }
  return rhs;
}

void momentum_residual_rows(const VelocitySpace& vs, SpaceTag pres, const VelLayout& lay,
                            const FluidParams& fp, const VelocityField& u_prev,
                            const VelocityField& u_cand, const PressureField& p_cand,
                            const LoadVector& load, const BetaField& beta_at,
                            double coupling_coeff, double dt, std::vector<double>& out) {
  const SimplicialMesh& mesh = vs.mesh();
  const int np = pressure_dof_count(mesh, pres);
  const TriangleRule& rule = triangle_rule(kVolumeDegree);
  const int nl = vs.local_count();
  const int npl = pressure_local_count(pres);

  for (int g = 0; g < vs.ndof(); ++g)
    if (lay.map[g] >= 0) out[lay.map[g]] = -load[g];
  for (int p = 0; p < np; ++p) out[lay.nu + p] = 0.0;

  std::vector<std::array<double, 15>> vel_parts(mesh.num_elements());
  std::vector<std::array<double, 3>> pres_parts(mesh.num_elements());
  for_each_element(mesh.num_elements(), [&](int k) {
    Vec2 vals[12];
    Grad2 grads[12];
    auto& vout = vel_parts[k];
    auto& pout = pres_parts[k];
    vout.fill(0.0);
    pout.fill(0.0);
    int gdof[12];
    for (int l = 0; l < nl; ++l) gdof[l] = vs.global_dof(k, l);
    const double area = mesh.element_area(k);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = area * rule.weights[q];
      vs.eval(k, rule.points[q], vals, grads);
      Vec2 up{0.0, 0.0}, uc{0.0, 0.0};
      Grad2 gc;
      for (int l = 0; l < nl; ++l) {
        const double cp = u_prev.coeff[gdof[l]];
        const double cc = u_cand.coeff[gdof[l]];
        up[0] += cp * vals[l][0];
        up[1] += cp * vals[l][1];
        uc[0] += cc * vals[l][0];
        uc[1] += cc * vals[l][1];
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) gc.a[i][j] += cc * grads[l].a[i][j];
      }
      const Vec2 conv{gc.a[0][0] * up[0] + gc.a[0][1] * up[1],
                      gc.a[1][0] * up[0] + gc.a[1][1] * up[1]};
      double pval = 0.0;
      for (int pl = 0; pl < npl; ++pl)
        pval += p_cand.coeff[pressure_global(mesh, pres, k, pl)] *
                pressure_basis(pres, rule.points[q], pl);
      const SymMat b = beta_at(k, rule.points[q]);
      const double re = fp.reynolds;
      for (int i = 0; i < nl; ++i) {
        double r = re / dt * ((uc[0] - up[0]) * vals[i][0] + (uc[1] - up[1]) * vals[i][1]);
        r += 0.5 * re *
             (conv[0] * vals[i][0] + conv[1] * vals[i][1] -
              uc[0] * (grads[i].a[0][0] * up[0] + grads[i].a[0][1] * up[1]) -
              uc[1] * (grads[i].a[1][0] * up[0] + grads[i].a[1][1] * up[1]));
        r += (1.0 - fp.viscosity_fraction) * grad_inner(gc, grads[i]);
        r += coupling_coeff * contract(b, grads[i]);
        r -= pval * grads[i].divergence();
        vout[i] += w * r;
      }
      const double divc = gc.divergence();
      for (int pl = 0; pl < npl; ++pl)
        pout[pl] += w * divc * pressure_basis(pres, rule.points[q], pl);
    }
  });
  for (int k = 0; k < mesh.num_elements(); ++k) {
    for (int l = 0; l < nl; ++l) {
      const int eq = lay.map[vs.global_dof(k, l)];
      if (eq >= 0) out[eq] += vel_parts[k][l];
    }
    for (int pl = 0; pl < pressure_local_count(pres); ++pl)
      out[lay.nu + pressure_global(mesh, pres, k, pl)] += pres_parts[k][pl];
  }
}

double kinetic_integral(const VelocitySpace& vs, const VelocityField& u) {
  const SimplicialMesh& mesh = vs.mesh();
  const TriangleRule& rule = triangle_rule(kVolumeDegree);
  double s = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const double area = mesh.element_area(k);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 v = velocity_value(vs, u, k, rule.points[q]);
      s += area * rule.weights[q] * (v[0] * v[0] + v[1] * v[1]);
    }
  }
  return s;
}

double grad_norm2_integral(const VelocitySpace& vs, const VelocityField& u) {
  const SimplicialMesh& mesh = vs.mesh();
  const TriangleRule& rule = triangle_rule(kVolumeDegree);
  double s = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const double area = mesh.element_area(k);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Grad2 g = velocity_gradient(vs, u, k, rule.points[q]);
      s += area * rule.weights[q] * g.norm2();
    }
  }
  return s;
}

double convection_skew_value(const VelocitySpace& vs, const FluidParams& fp,
                             const VelocityField& u_prev, const VelocityField& u) {
  const SimplicialMesh& mesh = vs.mesh();
  const TriangleRule& rule = triangle_rule(kVolumeDegree);
  const int nl = vs.local_count();
  double s = 0.0;
  Vec2 vals[12];
  Grad2 grads[12];
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const double area = mesh.element_area(k);
    int gdof[12];
    for (int l = 0; l < nl; ++l) gdof[l] = vs.global_dof(k, l);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = area * rule.weights[q];
      vs.eval(k, rule.points[q], vals, grads);
      Vec2 up{0.0, 0.0}, uc{0.0, 0.0};
      Grad2 gc;
      for (int l = 0; l < nl; ++l) {
        const double cp = u_prev.coeff[gdof[l]];
        const double cc = u.coeff[gdof[l]];
        up[0] += cp * vals[l][0];
        up[1] += cp * vals[l][1];
        uc[0] += cc * vals[l][0];
        uc[1] += cc * vals[l][1];
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) gc.a[i][j] += cc * grads[l].a[i][j];
      }
      const Vec2 conv{gc.a[0][0] * up[0] + gc.a[0][1] * up[1],
                      gc.a[1][0] * up[0] + gc.a[1][1] * up[1]};
      // test with the basis expansion of u itself
      for (int i = 0; i < nl; ++i) {
        const double ci = u.coeff[gdof[i]];
        if (ci == 0.0) continue;
        const double t1 = conv[0] * vals[i][0] + conv[1] * vals[i][1];
        const double t2 = uc[0] * (grads[i].a[0][0] * up[0] + grads[i].a[0][1] * up[1]) +
                          uc[1] * (grads[i].a[1][0] * up[0] + grads[i].a[1][1] * up[1]);
        s += 0.5 * fp.reynolds * w * ci * (t1 - t2);
      }
    }
  }
  return s;
}

Vec2 element_velocity_integral(const VelocitySpace& vs, const VelocityField& u, int element) {
  const SimplicialMesh& mesh = vs.mesh();
  const TriangleRule& rule = triangle_rule(kVolumeDegree);
  const double area = mesh.element_area(element);
  Vec2 s{0.0, 0.0};
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const Vec2 v = velocity_value(vs, u, element, rule.points[q]);
    s[0] += area * rule.weights[q] * v[0];
    s[1] += area * rule.weights[q] * v[1];
  }
  return s;
}

void add_p1_stiffness(SparseMatrix& a, const SimplicialMesh& mesh, double coeff, int row_offset,
                      int col_offset) {
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const std::array<Vec2, 3> gh = hat_gradients(mesh, k);
    const double area = mesh.element_area(k);
    const auto& el = mesh.elements[k];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        a.add(row_offset + el[i], col_offset + el[j],
              coeff * area * (gh[i][0] * gh[j][0] + gh[i][1] * gh[j][1]));
  }
}

std::vector<double> reduce_load(const VelLayout& lay, const LoadVector& load) {
  std::vector<double> r(lay.nu, 0.0);
  for (std::size_t g = 0; g < load.size(); ++g)
    if (lay.map[g] >= 0) r[lay.map[g]] = load[g];
  return r;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail
}  // namespace obflow
