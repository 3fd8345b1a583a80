#include "obflow/scenarios.hpp"

#include <cmath>
#include <random>

namespace obflow {

namespace {

SymMat rotated_spd(double theta, double l1, double l2) {
  const double c = std::cos(theta), s = std::sin(theta);
  SymMat m(2);
  m.at(0, 0) = c * c * l1 + s * s * l2;
  m.at(0, 1) = c * s * (l1 - l2);
  m.at(1, 1) = s * s * l1 + c * c * l2;
  return m;
}

std::vector<SymMat> sample_spd(int count, double lmin, double lmax, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::acos(-1.0));
  std::uniform_real_distribution<double> eig(lmin, lmax);
  std::vector<SymMat> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double th = angle(rng);
    const double l1 = eig(rng), l2 = eig(rng);
    out.push_back(rotated_spd(th, l1, l2));
  }
  return out;
}

}  // namespace

Vec2 cavity_velocity(const Rect& domain, Point x) {
  const double lx = domain.x1 - domain.x0, ly = domain.y1 - domain.y0;
  const double u = (x[0] - domain.x0) / lx, v = (x[1] - domain.y0) / ly;
  const double gu = u * (1.0 - u), gv = v * (1.0 - v);
  const double du = 1.0 - 2.0 * u, dv = 1.0 - 2.0 * v;
  // psi = 16 (gu gv)^2; velocity = (psi_y, -psi_x) in unit coordinates
  const double psi_u = 32.0 * gu * gv * gv * du;
  const double psi_v = 32.0 * gu * gu * gv * dv;
  return {psi_v / ly, -psi_u / lx};
}

DiscreteStateDG0 make_initial_dg0(const Dg0Scheme& scheme, const Scenario& scenario,
                                  const Rect& domain) {
  switch (scenario.kind) {
    case Scenario::Kind::Equilibrium: {
      DiscreteStateDG0 s;
      s.velocity = zero_velocity(scheme.velocity_space());
      s.stress = constant_stress_p0(scheme.mesh(), SymMat::identity(2));
      return s;
    }
    case Scenario::Kind::RandomSpd: {
      DiscreteStateDG0 s;
      s.velocity = zero_velocity(scheme.velocity_space());
      s.stress.value = sample_spd(scheme.mesh().num_elements(), scenario.lambda_min,
                                  scenario.lambda_max, scenario.seed);
      return s;
    }
    case Scenario::Kind::LidDrivenCavity:
      return scheme.project_initial([&](Point x) { return cavity_velocity(domain, x); },
                                    [](Point) { return SymMat::identity(2); });
  }
  throw std::logic_error("make_initial_dg0: unknown scenario");
}

DiscreteStateFEM1 make_initial_fem1(const Fem1Scheme& scheme, const Scenario& scenario,
                                    const Rect& domain, double dt0) {
  switch (scenario.kind) {
    case Scenario::Kind::Equilibrium: {
      DiscreteStateFEM1 s;
      s.velocity = zero_velocity(scheme.velocity_space());
      s.stress = constant_stress_p1(scheme.mesh(), SymMat::identity(2));
      return s;
    }
    case Scenario::Kind::RandomSpd: {
      DiscreteStateFEM1 s;
      s.velocity = zero_velocity(scheme.velocity_space());
      s.stress.value = sample_spd(scheme.mesh().num_vertices(), scenario.lambda_min,
                                  scenario.lambda_max, scenario.seed);
      return s;
    }
    case Scenario::Kind::LidDrivenCavity: {
      const InitialFields fields = scheme.project_initial_fields(
          [&](Point x) { return cavity_velocity(domain, x); },
          [](Point) { return SymMat::identity(2); }, dt0);
      DiscreteStateFEM1 s;
      s.velocity = fields.velocity;
      s.stress = fields.stress;
      return s;
    }
  }
  throw std::logic_error("make_initial_fem1: unknown scenario");
}

SymMat smooth_spd_field(double lambda_min, double lambda_max, std::uint64_t seed, Point x) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const double a1 = coef(rng), b1 = coef(rng), c1 = coef(rng);
  const double a2 = coef(rng), b2 = coef(rng), c2 = coef(rng);
  const double a3 = coef(rng), b3 = coef(rng);
  const double pi = std::acos(-1.0);
  // gentle phases; 0.5 (1 + sin(.)) maps into [0, 1]
  const double s1 = 0.5 * (1.0 + std::sin(pi * (a1 * x[0] + b1 * x[1]) + c1));
  const double s2 = 0.5 * (1.0 + std::sin(pi * (a2 * x[0] + b2 * x[1]) + c2));
  const double theta = 0.25 * pi * std::sin(pi * (a3 * x[0] + b3 * x[1]));
  const double l1 = lambda_min + (lambda_max - lambda_min) * s1;
  const double l2 = lambda_min + (lambda_max - lambda_min) * s2;
  return rotated_spd(theta, l1, l2);
}

}  // namespace obflow
