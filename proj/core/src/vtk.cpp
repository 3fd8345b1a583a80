#include "obflow/vtk.hpp"

#include <ostream>

#include "obflow/certificate.hpp"

namespace obflow {

namespace {

void write_grid(std::ostream& os, const SimplicialMesh& mesh) {
  os << "# vtk DataFile Version 3.0\n";
  os << "obflow snapshot\n";
  os << "ASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Point& p : mesh.vertices)
    os << format_g17(p[0]) << ' ' << format_g17(p[1]) << " 0\n";
  os << "CELLS " << mesh.num_elements() << ' ' << 4 * mesh.num_elements() << '\n';
  for (const auto& el : mesh.elements) os << "3 " << el[0] << ' ' << el[1] << ' ' << el[2] << '\n';
  os << "CELL_TYPES " << mesh.num_elements() << '\n';
  for (int k = 0; k < mesh.num_elements(); ++k) os << "5\n";
}

void write_velocity_points(std::ostream& os, const VelocitySpace& space,
                           const VelocityField& u) {
  const SimplicialMesh& mesh = space.mesh();
  os << "POINT_DATA " << mesh.num_vertices() << '\n';
  os << "VECTORS velocity double\n";
  for (int v = 0; v < mesh.num_vertices(); ++v)
    os << format_g17(u.coeff[2 * v]) << ' ' << format_g17(u.coeff[2 * v + 1]) << " 0\n";
}

void write_stress_components(std::ostream& os, const std::vector<SymMat>& values,
                             const char* names[3]) {
  for (int c = 0; c < 3; ++c) {
    os << "SCALARS " << names[c] << " double 1\n";
    os << "LOOKUP_TABLE default\n";
    for (const SymMat& m : values) os << format_g17(m.packed(c)) << '\n';
  }
  os << "SCALARS stress_min_eig double 1\n";
  os << "LOOKUP_TABLE default\n";
  for (const SymMat& m : values) os << format_g17(min_eigenvalue(m)) << '\n';
}

const char* kStressNames[3] = {"sigma_xx", "sigma_xy", "sigma_yy"};

}  // namespace

void write_vtk(std::ostream& os, const VelocitySpace& space, const DiscreteStateDG0& state,
               const PressureField& pressure) {
  const SimplicialMesh& mesh = space.mesh();
  write_grid(os, mesh);
  write_velocity_points(os, space, state.velocity);
  os << "CELL_DATA " << mesh.num_elements() << '\n';
  os << "SCALARS pressure double 1\n";
  os << "LOOKUP_TABLE default\n";
  for (int k = 0; k < mesh.num_elements(); ++k) os << format_g17(pressure.coeff[k]) << '\n';
  write_stress_components(os, state.stress.value, kStressNames);
}

void write_vtk(std::ostream& os, const VelocitySpace& space, const DiscreteStateFEM1& state,
               const PressureField& pressure) {
  const SimplicialMesh& mesh = space.mesh();
  write_grid(os, mesh);
  write_velocity_points(os, space, state.velocity);
  os << "SCALARS pressure double 1\n";
  os << "LOOKUP_TABLE default\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) os << format_g17(pressure.coeff[v]) << '\n';
  write_stress_components(os, state.stress.value, kStressNames);
}

}  // namespace obflow
