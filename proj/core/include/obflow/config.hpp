#ifndef OBFLOW_CONFIG_HPP
#define OBFLOW_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "obflow/femspace.hpp"
#include "obflow/scenarios.hpp"
#include "obflow/scheme_common.hpp"
#include "obflow/stepper.hpp"

namespace obflow {

class ConfigError : public std::runtime_error {
public:
  ConfigError(int line, int col, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(col) +
                           ": " + what),
        line(line),
        col(col) {}
  int line;
  int col;
};

/// Flat typed key-value text:  `key = value`, one per line, '#' comments,
/// no sections or includes. Duplicate keys are an error.
struct FlatConfig {
  std::map<std::string, std::string> values;
  std::map<std::string, int> lines;
  bool has(const std::string& key) const { return values.count(key) != 0; }
};

FlatConfig parse_flat_config(std::istream& is);

/// Everything one simulation needs; all ranges validated at parse time.
struct RunConfig {
  SchemeKind scheme = SchemeKind::DG0;
  // mesh: either structured nx-by-ny on `domain`, or an imported file
  int nx = 8, ny = 8;
  std::string mesh_file;  // empty = structured
  Rect domain;
  SpaceTag velocity = SpaceTag::VEL_P2;
  FluidParams fluid;
  std::optional<double> delta;  // absent only for fem1-unreg
  std::optional<double> cutoff;
  double t_end = 1.0;
  int steps = 10;
  std::vector<double> explicit_dts;  // overrides t_end/steps when nonempty
  double time_ratio = 2.0;
  // forcing: none | "constant fx fy" | "ramp fx fy" (f = t * (fx, fy))
  std::string forcing_kind = "none";
  double forcing_x = 0.0, forcing_y = 0.0;
  Scenario scenario;
  SolverOpts solver;
  std::vector<double> continuation;  // optional strictly decreasing deltas

  TimeGrid time_grid() const;
  Forcing make_forcing() const;
  /// Canonical key-value serialization (sorted keys, 17-digit floats).
  std::string canonical() const;
  /// FNV-1a hash of the canonical serialization, in hex.
  std::string hash() const;

  static RunConfig from_flat(const FlatConfig& cfg);
  static RunConfig load(const std::string& path);
};

}  // namespace obflow

#endif
