#ifndef BARGAIN_PARETO_HPP
#define BARGAIN_PARETO_HPP

#include <vector>

#include "bargain/core.hpp"
#include "bargain/dibs.hpp"

namespace bargain {

// Witness for the first-order Pareto stationarity test: the minimum over the
// probability simplex of || sum_i beta_i * g_i ||, together with the
// minimizing weights.
struct StationarityCertificate {
  double residual = 0.0;
  Vec beta;
  bool is_stationary = false;
};

// Minimum-norm point in the convex hull of the given gradients. Exact closed
// form for one or two gradients; Frank-Wolfe with away steps and exact line
// search otherwise.
struct SimplexMinNorm {
  Vec beta;
  Vec combination;  // sum_i beta_i * g_i
  double residual = 0.0;
};
SimplexMinNorm simplex_min_norm(const std::vector<Vec>& grads, int max_iters = 500,
                                double tol = 1e-9);

StationarityCertificate stationarity_residual(const std::vector<Objective>& objectives,
                                              const Vec& x, double tol,
                                              int max_fw_iters = 500,
                                              double fw_tol = 1e-9);
StationarityCertificate stationarity_residual(const BargainingGame& game, const Vec& x,
                                              double tol, int max_fw_iters = 500,
                                              double fw_tol = 1e-9);

// Grid sample of the Pareto front of a two-objective problem over a
// rectangular window. Exact objective-space duplicates are collapsed to the
// first pre-image in grid order.
struct FrontSample {
  struct Entry {
    Vec point;
    double f1 = 0.0;
    double f2 = 0.0;
  };
  std::vector<Entry> entries;
  double resolution = 0.0;  // largest per-axis grid spacing
};

FrontSample sample_front_2d(const std::vector<Objective>& objectives, const Vec& lo,
                            const Vec& hi, int steps_per_axis);
FrontSample sample_front_2d(const BargainingGame& game, const Vec& lo, const Vec& hi,
                            int steps_per_axis);

}  // namespace bargain

#endif  // BARGAIN_PARETO_HPP
