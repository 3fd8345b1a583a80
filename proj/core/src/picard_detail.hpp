// Damped-Picard driver shared by the scheme steppers. Not installed.
#ifndef OBFLOW_PICARD_DETAIL_HPP
#define OBFLOW_PICARD_DETAIL_HPP

#include <functional>
#include <vector>

#include "obflow/scheme_common.hpp"

namespace obflow::detail {

struct PicardCallbacks {
  /// Residual vector at a packed iterate; an empty vector marks an
  /// inadmissible candidate (e.g. the unregularized scheme losing SPD).
  std::function<std::vector<double>(const std::vector<double>&)> residual;
  /// One linearized sweep from the packed iterate (frozen coefficients).
  std::function<std::vector<double>(const std::vector<double>&)> sweep;
  /// Row scales (system diagonal) for the damping merit; the raw residual
  /// infinity norm mixes test functions of unrelated magnitudes, so trial
  /// acceptance compares the diagonally scaled norm instead. Convergence is
  /// still declared on the unscaled norm. Empty = unscaled.
  std::vector<double> row_scale;
};

/// Damping rule: start at theta = 1, halve whenever a trial increases the
/// (scaled) residual, reset to 1 after two consecutive undamped decreases.
/// Fails at max_iter or at the damping floor.
PicardReport run_damped_picard(std::vector<double>& x, const PicardCallbacks& cb,
                               const SolverOpts& opts);

}  // namespace obflow::detail

#endif
