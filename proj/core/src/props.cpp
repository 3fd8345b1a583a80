#include "obflow/props.hpp"

#include <cmath>
#include <optional>

#include "obflow/femspace.hpp"
#include "obflow/lambda.hpp"
#include "obflow/mesh.hpp"
#include "obflow/quadrature.hpp"
#include "obflow/scenarios.hpp"

namespace obflow {

const TestTolerances& tolerances() {
  static const TestTolerances t;
  return t;
}

namespace {

// xorshift64* keeps the sweeps fast and deterministic across platforms
double next_uniform(std::uint64_t& state) {
  state ^= state >> 12;
  state ^= state << 25;
  state ^= state >> 27;
  const std::uint64_t z = state * 0x2545F4914F6CDD1Dull;
  return static_cast<double>(z >> 11) * (1.0 / 9007199254740992.0);
}

double uniform(std::uint64_t& state, double lo, double hi) {
  return lo + (hi - lo) * next_uniform(state);
}

struct Worst {
  double value = std::numeric_limits<double>::infinity();
  void track_min(double v) { value = std::min(value, v); }
};

PropertyResult make_result(const std::string& name, double worst_slack, double tol,
                           bool is_identity = false) {
  PropertyResult r;
  r.name = name;
  r.worst = worst_slack;
  r.tolerance = tol;
  r.pass = is_identity ? (worst_slack <= tol) : (worst_slack >= -tol);
  return r;
}

}  // namespace

SymMat random_symmetric(int dim, std::uint64_t& state, double scale) {
  SymMat m(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) m.at(i, j) = uniform(state, -scale, scale);
  return m;
}

SymMat random_spd(int dim, std::uint64_t& state, double lmin, double lmax) {
  // random rotation applied to a uniform spectrum
  SymMat g = random_symmetric(dim, state);
  SpectralPair p = spectral_decompose(g);
  for (int i = 0; i < dim; ++i) p.eigenvalues[i] = uniform(state, lmin, lmax);
  return p.reconstruct();
}

std::vector<PropertyResult> lemma21_suite(int samples, std::uint64_t seed) {
  const TestTolerances& tol = tolerances();
  const double deltas[] = {0.5, 0.1, 0.01};
  const std::optional<double> cutoffs[] = {std::optional<double>{2.0},
                                           std::optional<double>{10.0}, std::nullopt};

  double worst_inverse = 0.0;          // identity error, smaller is better
  Worst dissipation, entropy, expositive, concavity, monotonicity;
  Worst sharp_norm, sharp_neg, sharp_pair;
  Worst lipschitz, sandwich_lo, sandwich_hi;
  double worst_const_identity = 0.0;

  std::uint64_t state = seed ? seed : 0x9E3779B97F4A7C15ull;
  for (int dim : {2, 3}) {
    for (double delta : deltas) {
      for (const auto& cutoff : cutoffs) {
        const RegParams p{delta, cutoff};
        const StressCalculus calc = StressCalculus::regularized(p);
        for (int s = 0; s < samples; ++s) {
          const SymMat phi = random_symmetric(dim, state);
          const SymMat psi = random_symmetric(dim, state);

          // beta(phi) G'(phi) = I, both orders
          const SymMat beta = calc.beta(phi);
          const SymMat gp = calc.g_prime(phi);
          {
            Mat prod = multiply(beta, gp);
            Mat prod2 = multiply(gp, beta);
            for (int i = 0; i < dim; ++i) {
              prod.at(i, i) -= 1.0;
              prod2.at(i, i) -= 1.0;
            }
            worst_inverse = std::max({worst_inverse, frobenius(prod), frobenius(prod2)});
          }
          // tr(beta + beta^{-1} - 2I) >= 0
          dissipation.track_min(calc.dissipation(phi));
          // tr(phi - G(phi) - I) >= 0
          entropy.track_min(calc.entropy(phi));
          // (phi - beta(phi)) : (I - G'(phi)) >= 0
          {
            SymMat imgp = SymMat::identity(dim) - gp;
            expositive.track_min((phi - beta).dot(imgp));
          }
          // concavity, normalized by 1 + ||phi|| + ||psi||
          {
            double lhs = (phi - psi).dot(calc.g_prime(psi));
            double rhs = 0.0;
            SpectralPair dp = spectral_decompose(phi);
            SpectralPair dq = spectral_decompose(psi);
            for (int i = 0; i < dim; ++i)
              rhs += calc.g_s(dp.eigenvalues[i]) - calc.g_s(dq.eigenvalues[i]);
            concavity.track_min((lhs - rhs) / (1.0 + phi.norm() + psi.norm()));
          }
          // strong monotonicity with the delta^2 Lipschitz constant
          {
            const SymMat dgp = calc.g_prime(phi) - calc.g_prime(psi);
            const double lhs = -(phi - psi).dot(dgp);
            monotonicity.track_min(lhs - delta * delta * dgp.dot(dgp));
          }
          // sharpened entropy bounds, valid since delta <= 1/2 and L >= 2
          {
            double trg = 0.0;
            SpectralPair dp = spectral_decompose(phi);
            for (int i = 0; i < dim; ++i)
              trg += dp.eigenvalues[i] - calc.g_s(dp.eigenvalues[i]);
            sharp_norm.track_min(trg - 0.5 * phi.norm());
            sharp_neg.track_min(trg - 0.5 / delta * negative_part(phi).norm());
            const SymMat imgp = SymMat::identity(dim) - calc.g_prime(phi);
            sharp_pair.track_min(phi.dot(imgp) - 0.5 * phi.norm() + dim);
          }
          // Lipschitz transfer for beta_delta, beta_delta^L and the negative part
          {
            const SymMat d = phi - psi;
            const double dn = d.norm();
            lipschitz.track_min(dn - (calc.beta(phi) - calc.beta(psi)).norm());
            const StressCalculus nocut = StressCalculus::regularized(RegParams{delta, {}});
            lipschitz.track_min(dn - (nocut.beta(phi) - nocut.beta(psi)).norm());
            lipschitz.track_min(dn - (negative_part(phi) - negative_part(psi)).norm());
          }
          // norm sandwich via |phi|
          {
            const SymMat ab = matrix_fn(phi, [](double t) { return std::abs(t); });
            const double tr2 = ab.trace() * ab.trace();
            const double n2 = phi.dot(phi);
            sandwich_lo.track_min(n2 - tr2 / dim);
            sandwich_hi.track_min(tr2 - n2);
          }
          // decomposition invariance: c I maps to g(c) I exactly
          {
            const double c = uniform(state, -2.0, 2.0);
            SymMat ci = SymMat::identity(dim) * c;
            const SymMat r = calc.beta(ci);
            const double bc = calc.beta_s(c);
            for (int i = 0; i < dim; ++i)
              for (int j = 0; j < dim; ++j)
                worst_const_identity =
                    std::max(worst_const_identity, std::abs(r(i, j) - (i == j ? bc : 0.0)));
          }
        }
      }
    }
  }

  std::vector<PropertyResult> out;
  out.push_back(make_result("inverse_identity", worst_inverse, tol.inverse_identity, true));
  out.push_back(make_result("dissipation_positivity", dissipation.value, tol.positivity));
  out.push_back(make_result("entropy_positivity", entropy.value, tol.positivity));
  out.push_back(make_result("excess_positivity", expositive.value, tol.inequality_slack));
  out.push_back(make_result("concavity", concavity.value, tol.inequality_slack));
  out.push_back(make_result("strong_monotonicity", monotonicity.value,
                            tol.inequality_slack));
  out.push_back(make_result("lipschitz_transfer", lipschitz.value, tol.inequality_slack));
  out.push_back(make_result("sharp_norm_bound", sharp_norm.value, tol.inequality_slack));
  out.push_back(
      make_result("sharp_negative_part", sharp_neg.value, tol.inequality_slack));
  out.push_back(make_result("sharp_pairing", sharp_pair.value, tol.inequality_slack));
  out.push_back(make_result("norm_sandwich_lower", sandwich_lo.value, tol.inequality_slack));
  out.push_back(make_result("norm_sandwich_upper", sandwich_hi.value, tol.inequality_slack));
  out.push_back(
      make_result("constant_matrix_exactness", worst_const_identity, 0.0, true));
  return out;
}

std::vector<PropertyResult> nonobtuse_gradient_suite(int mesh_n, int fields,
                                                     std::uint64_t seed) {
  const TestTolerances& tol = tolerances();
  const SimplicialMesh mesh = build_structured_mesh(mesh_n, mesh_n);
  const RegParams reg{0.1, {}};
  const StressCalculus calc = StressCalculus::regularized(reg);
  std::uint64_t state = seed ? seed : 17;

  Worst scalar_neg, scalar_gp, tensor_neg, tensor_gp;
  const int nv = mesh.num_vertices();
  for (int f = 0; f < fields; ++f) {
    std::vector<double> q(nv);
    std::vector<SymMat> sig(nv, SymMat(2));
    for (int v = 0; v < nv; ++v) {
      q[v] = uniform(state, -2.0, 4.0);
      sig[v] = random_symmetric(2, state, 2.0);
    }
    // scalar g-images at vertices
    std::vector<double> gneg(nv), ggp(nv);
    std::vector<SymMat> tneg(nv, SymMat(2)), tgp(nv, SymMat(2));
    for (int v = 0; v < nv; ++v) {
      gneg[v] = std::min(q[v], 0.0);
      ggp[v] = -calc.g_prime_s(q[v]);
      tneg[v] = negative_part(sig[v]);
      tgp[v] = calc.g_prime(sig[v]) * -1.0;
    }
    const double lip_neg = 1.0;
    const double lip_gp = 1.0 / (0.1 * 0.1);
    // the slack is a difference of two large aggregates; long double
    // accumulation keeps the check's own roundoff below the tolerance
    for (int k = 0; k < mesh.num_elements(); ++k) {
      const auto& el = mesh.elements[k];
      const std::array<Vec2, 3> gh = hat_gradients(mesh, k);
      auto scalar_slack = [&](const std::vector<double>& a, const std::vector<double>& b,
                              double lip) {
        long double gq0 = 0, gq1 = 0, gb0 = 0, gb1 = 0;
        for (int i = 0; i < 3; ++i) {
          gq0 += static_cast<long double>(a[el[i]]) * gh[i][0];
          gq1 += static_cast<long double>(a[el[i]]) * gh[i][1];
          gb0 += static_cast<long double>(b[el[i]]) * gh[i][0];
          gb1 += static_cast<long double>(b[el[i]]) * gh[i][1];
        }
        return static_cast<double>(lip * (gb0 * gq0 + gb1 * gq1) - (gb0 * gb0 + gb1 * gb1));
      };
      auto tensor_slack = [&](const std::vector<SymMat>& a, const std::vector<SymMat>& b,
                              double lip) {
        long double pair = 0, norm = 0;
        for (int p = 0; p < 2; ++p) {
          long double gs[3] = {0, 0, 0}, gb[3] = {0, 0, 0};
          for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 3; ++c) {
              gs[c] += static_cast<long double>(a[el[i]].packed(c)) * gh[i][p];
              gb[c] += static_cast<long double>(b[el[i]].packed(c)) * gh[i][p];
            }
          pair += gb[0] * gs[0] + 2.0L * gb[1] * gs[1] + gb[2] * gs[2];
          norm += gb[0] * gb[0] + 2.0L * gb[1] * gb[1] + gb[2] * gb[2];
        }
        return static_cast<double>(lip * pair - norm);
      };
      scalar_neg.track_min(scalar_slack(q, gneg, lip_neg));
      scalar_gp.track_min(scalar_slack(q, ggp, lip_gp));
      tensor_neg.track_min(tensor_slack(sig, tneg, lip_neg));
      tensor_gp.track_min(tensor_slack(sig, tgp, lip_gp));
    }
  }
  std::vector<PropertyResult> out;
  out.push_back(
      make_result("scalar_negative_part", scalar_neg.value, tol.inequality_slack));
  out.push_back(make_result("scalar_minus_gprime", scalar_gp.value, tol.inequality_slack));
  out.push_back(
      make_result("tensor_negative_part", tensor_neg.value, tol.inequality_slack));
  out.push_back(make_result("tensor_minus_gprime", tensor_gp.value, tol.inequality_slack));
  return out;
}

std::vector<PropertyResult> lambda_chain_suite(int mesh_n, int fields, std::uint64_t seed) {
  const TestTolerances& tol = tolerances();
  const SimplicialMesh mesh = build_structured_mesh(mesh_n, mesh_n);
  std::uint64_t state = seed ? seed : 29;
  const int nv = mesh.num_vertices();

  double worst_plain = 0.0, worst_cut = 0.0, worst_lambda = 0.0, linf_over_l = 0.0;
  const StressCalculus plain = StressCalculus::regularized(RegParams{0.1, {}});
  const StressCalculus cut = StressCalculus::regularized(RegParams{0.1, 10.0});
  for (int f = 0; f < fields; ++f) {
    StressFieldP1 sig;
    sig.value.assign(nv, SymMat(2));
    for (int v = 0; v < nv; ++v) sig.value[v] = random_spd(2, state, 0.05, 4.0);
    for (int k = 0; k < mesh.num_elements(); ++k) {
      worst_plain = std::max(worst_plain, lambda_chain_residual(mesh, k, sig, plain));
      worst_cut = std::max(worst_cut, lambda_chain_residual(mesh, k, sig, cut));
      const LambdaTensor lt = lambda_tensor(mesh, k, sig, cut);
      for (int m = 0; m < 2; ++m)
        for (int p = 0; p < 2; ++p)
          linf_over_l = std::max(linf_over_l, lt.block[m][p].norm() / 10.0);
      const auto& el = mesh.elements[k];
      for (int j = 1; j < 3; ++j) {
        const LambdaHat lh = lambda_hat_full(sig.value[el[j]], sig.value[el[0]], cut);
        if (!lh.endpoint_case)
          worst_lambda =
              std::max({worst_lambda, -lh.lambda, lh.lambda - 1.0});
      }
    }
  }
  std::vector<PropertyResult> out;
  out.push_back(make_result("chain_identity", worst_plain, tol.chain_identity, true));
  out.push_back(make_result("chain_identity_cutoff", worst_cut, tol.chain_identity, true));
  out.push_back(make_result("lambda_in_unit_interval", worst_lambda, 1e-12, true));
  PropertyResult bound;
  bound.name = "cutoff_linf_bound";
  bound.worst = linf_over_l;  // measured ||Lambda|| / L
  bound.tolerance = 10.0;     // the constant C of the L-infinity bound, measured
  bound.pass = linf_over_l <= bound.tolerance;
  out.push_back(bound);
  return out;
}

SlopeResult lambda_consistency_slope(const std::vector<int>& mesh_sizes) {
  SlopeResult out;
  out.mesh_sizes = mesh_sizes;
  const StressCalculus calc = StressCalculus::unregularized();
  for (int n : mesh_sizes) {
    const SimplicialMesh mesh = build_structured_mesh(n, n);
    StressFieldP1 sig;
    sig.value.reserve(mesh.num_vertices());
    for (const Point& x : mesh.vertices) sig.value.push_back(smooth_spd_field(0.5, 3.0, 7, x));
    // max_{m,p} sqrt( sum_K int_K || Lambda_mp - beta(sigma) delta_mp ||^2 )
    double gap[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    const TriangleRule& rule = triangle_rule(4);
    for (int k = 0; k < mesh.num_elements(); ++k) {
      const LambdaTensor lt = lambda_tensor(mesh, k, sig, calc);
      const double area = mesh.element_area(k);
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const SymMat s = stress_value(mesh, sig, k, rule.points[q]);
        const SymMat b = calc.beta(s);
        for (int m = 0; m < 2; ++m)
          for (int p = 0; p < 2; ++p) {
            const SymMat diff = lt.block[m][p] - (m == p ? b : SymMat(2));
            gap[m][p] += area * rule.weights[q] * diff.dot(diff);
          }
      }
    }
    double worst = 0.0;
    for (int m = 0; m < 2; ++m)
      for (int p = 0; p < 2; ++p) worst = std::max(worst, std::sqrt(gap[m][p]));
    out.gaps.push_back(worst);
  }
  // least-squares slope of log(gap) against log(h), h ~ 1/n
  const int m = static_cast<int>(mesh_sizes.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x = std::log(1.0 / mesh_sizes[i]);
    const double y = std::log(out.gaps[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return out;
}

std::vector<PropertyResult> lumping_suite(int mesh_n, int fields, std::uint64_t seed) {
  std::vector<PropertyResult> out;
  // hand-computed unit-triangle values: vertex rule vs consistent mass
  {
    SimplicialMesh tri;
    tri.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    tri.elements = {{0, 1, 2}};
    build_topology(tri);
    const std::vector<double> q = {1.0, 2.0, 3.0};
    const double lumped = lumped_integral_scalar(tri, q, q);
    const double exact = p1_mass_integral(tri, q, q);
    PropertyResult hand;
    hand.name = "unit_triangle_hand_values";
    hand.worst = std::max(std::abs(lumped - 7.0 / 3.0), std::abs(exact - 25.0 / 12.0));
    hand.tolerance = 1e-12;
    hand.pass = hand.worst <= hand.tolerance && lumped >= exact;
    out.push_back(hand);
  }
  const SimplicialMesh mesh = build_structured_mesh(mesh_n, mesh_n);
  std::uint64_t state = seed ? seed : 37;
  const int nv = mesh.num_vertices();
  double min_gap = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
  double domination = std::numeric_limits<double>::infinity();
  const TriangleRule& rule = triangle_rule(4);
  for (int f = 0; f < fields; ++f) {
    StressFieldP1 chi;
    chi.value.assign(nv, SymMat(2));
    for (int v = 0; v < nv; ++v) chi.value[v] = random_symmetric(2, state, 2.0);
    const double lumped = lumped_integral(mesh, chi, chi);
    const double exact = p1_mass_integral(mesh, chi, chi);
    min_gap = std::min(min_gap, lumped - exact);
    if (exact > 0.0) max_ratio = std::max(max_ratio, lumped / exact);
    // pointwise vertex-sampling domination at quadrature points
    std::vector<double> norm2(nv);
    for (int v = 0; v < nv; ++v) norm2[v] = chi.value[v].dot(chi.value[v]);
    for (int k = 0; k < mesh.num_elements() && f == 0; ++k) {
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const SymMat val = stress_value(mesh, chi, k, rule.points[q]);
        double interp = 0.0;
        for (int i = 0; i < 3; ++i) interp += rule.points[q][i] * norm2[mesh.elements[k][i]];
        domination = std::min(domination, interp - val.dot(val));
      }
    }
  }
  out.push_back(make_result("lumping_sandwich_lower", min_gap, tolerances().inequality_slack));
  PropertyResult ratio;
  ratio.name = "lumping_sandwich_constant";
  ratio.worst = max_ratio;
  ratio.tolerance = 4.0;  // d + 2 on the structured meshes
  ratio.pass = max_ratio <= ratio.tolerance;
  out.push_back(ratio);
  out.push_back(
      make_result("vertex_sampling_domination", domination, tolerances().inequality_slack));
  return out;
}

}  // namespace obflow
