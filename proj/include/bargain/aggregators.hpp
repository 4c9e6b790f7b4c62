#ifndef BARGAIN_AGGREGATORS_HPP
#define BARGAIN_AGGREGATORS_HPP

#include <string>
#include <vector>

#include "bargain/core.hpp"

namespace bargain {

// Per-task gradients at the current shared parameters, the input to every
// aggregation rule. All gradients share one dimension.
struct GradientBundle {
  std::vector<Vec> grads;
  std::vector<std::string> labels;

  int num_tasks() const { return static_cast<int>(grads.size()); }
  Eigen::Index dim() const { return grads.empty() ? 0 : grads.front().size(); }
};

void validate_bundle(const GradientBundle& b);

struct AggregatorSpec {
  enum class Kind { DibsSingle, DibsMulti, Ls, MinNorm, PcGrad, ImtlG };

  Kind kind = Kind::DibsSingle;
  double epsilon = 1.0;                                  // dibs trust-region radius
  int inner_steps = 10;                                  // dibs_multi
  StepSchedule inner_schedule = StepSchedule::constant(0.1);  // dibs_multi
  int max_fw_iters = 500;                                // min_norm
  double fw_tol = 1e-9;                                  // min_norm
  unsigned long seed = 0;                                // pcgrad task order

  std::string name() const;
};

// Single-step update: -epsilon * sum_i g_i / ||g_i||. Tasks whose gradient
// norm is below the floor are skipped; if all are, the zero vector comes back
// (every task already stationary).
Vec aggregate_dibs_single(const GradientBundle& b, double epsilon);

// Runs the bargaining recursion on the linearized subgame for inner_steps
// steps from delta = 0, over fixed unit gradients with preferred states
// -epsilon * u_i. With inner_steps = 1 and alpha_1 = 1 this reproduces
// aggregate_dibs_single exactly. For longer runs the final vector is radially
// projected onto the epsilon-ball, which the recursion itself does not
// enforce.
Vec aggregate_dibs_multi(const GradientBundle& b, double epsilon, int inner_steps,
                         const StepSchedule& sched);

// Linear scalarization: -sum_i g_i.
Vec aggregate_ls(const GradientBundle& b);

// Minimum-norm convex combination of the task gradients.
Vec aggregate_min_norm(const GradientBundle& b, int max_fw_iters = 500,
                       double fw_tol = 1e-9);

// Gradient surgery: project each task gradient off every conflicting one, in
// an order shuffled deterministically from the seed, then average.
Vec aggregate_pcgrad(const GradientBundle& b, unsigned long seed);

// Direction with equal projection on every unit task gradient, weights on the
// simplex. Falls back to min_norm when the constraint system is singular;
// used_fallback reports that when non-null.
Vec aggregate_imtl_g(const GradientBundle& b, bool* used_fallback = nullptr);

Vec aggregate(const AggregatorSpec& spec, const GradientBundle& b);

}  // namespace bargain

#endif  // BARGAIN_AGGREGATORS_HPP
