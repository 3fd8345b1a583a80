#include "picard_detail.hpp"

#include <cmath>
#include <limits>

#include "assembly_detail.hpp"

namespace obflow::detail {

namespace {

double scaled_norm(const std::vector<double>& r, const std::vector<double>& scale) {
  if (r.empty()) return std::numeric_limits<double>::infinity();
  if (scale.empty()) return inf_norm(r);
  double m = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) m = std::max(m, std::abs(r[i]) / scale[i]);
  return m;
}

}  // namespace

PicardReport run_damped_picard(std::vector<double>& x, const PicardCallbacks& cb,
                               const SolverOpts& opts) {
  PicardReport rep;
  std::vector<double> r_vec = cb.residual(x);
  double r_cur = r_vec.empty() ? std::numeric_limits<double>::infinity() : inf_norm(r_vec);
  double merit_cur = scaled_norm(r_vec, cb.row_scale);
  rep.residual_history.push_back(r_cur);
  rep.residual_norm = r_cur;
  if (r_cur <= opts.tol) {
    rep.converged = true;
    return rep;
  }
  double theta = 1.0;
  int streak = 0;
  const std::size_t n = x.size();
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    const std::vector<double> xhat = cb.sweep(x);
    bool halved = false;
    std::vector<double> cand(n);
    double r_cand, merit_cand;
    while (true) {
      for (std::size_t i = 0; i < n; ++i) cand[i] = x[i] + theta * (xhat[i] - x[i]);
      r_vec = cb.residual(cand);
      r_cand = r_vec.empty() ? std::numeric_limits<double>::infinity() : inf_norm(r_vec);
      merit_cand = scaled_norm(r_vec, cb.row_scale);
      if (merit_cand <= merit_cur) break;
      theta *= 0.5;
      halved = true;
      streak = 0;
      if (theta < opts.theta_min) {
        rep.iterations = iter;
        rep.residual_norm = r_cur;
        return rep;  // converged stays false; x holds the last accepted iterate
      }
    }
    x.swap(cand);
    r_cur = r_cand;
    merit_cur = merit_cand;
    rep.residual_history.push_back(r_cur);
    rep.iterations = iter;
    rep.residual_norm = r_cur;
    streak = halved ? 0 : streak + 1;
    if (streak >= 2) theta = 1.0;
    if (r_cur <= opts.tol) {
      rep.converged = true;
      return rep;
    }
  }
  return rep;
}

}  // namespace obflow::detail
