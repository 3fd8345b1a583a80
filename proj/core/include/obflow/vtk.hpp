#ifndef OBFLOW_VTK_HPP
#define OBFLOW_VTK_HPP

#include <iosfwd>

#include "obflow/scheme_dg0.hpp"
#include "obflow/scheme_fem1.hpp"

namespace obflow {

/// Legacy-ASCII VTK unstructured-grid snapshots: velocity vectors at the
/// vertices; stress components and pressure as cell data (P0 scheme) or
/// point data (P1 scheme).
void write_vtk(std::ostream& os, const VelocitySpace& space, const DiscreteStateDG0& state,
               const PressureField& pressure);
void write_vtk(std::ostream& os, const VelocitySpace& space, const DiscreteStateFEM1& state,
               const PressureField& pressure);

}  // namespace obflow

#endif
