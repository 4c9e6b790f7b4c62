#ifndef BARGAIN_DIBS_HPP
#define BARGAIN_DIBS_HPP

#include <optional>
#include <utility>
#include <vector>

#include "bargain/core.hpp"

namespace bargain {

// N agents with differentiable costs over a shared state, each with a fixed
// preferred state (a local minimizer of its own cost). Preferred states are
// data of the game: computed once, frozen for the whole run.
struct BargainingGame {
  std::vector<Objective> objectives;
  std::vector<Vec> preferred_states;
  std::optional<double> feasible_radius;  // ball ||x|| <= radius; nullopt = unbounded

  int num_agents() const { return static_cast<int>(objectives.size()); }
  Eigen::Index dim() const {
    return preferred_states.empty() ? 0 : preferred_states.front().size();
  }
};

// Checks shape invariants and the first-order condition at every preferred
// state. Throws std::invalid_argument on violation.
void validate_game(const BargainingGame& game, double first_order_tol = 1e-6);

struct DibsConfig {
  StepSchedule schedule = StepSchedule::constant(1e-2);
  long max_iters = 100000;
  double stationarity_tol = 1e-6;
  double grad_floor = 1e-12;  // agents with smaller gradient norm exert no pull
};

struct TrajectoryRecord {
  long iter = 0;
  Vec point;
  std::vector<double> values;  // one per agent
  double residual = 0.0;       // Pareto stationarity residual at point
};

enum class Termination { MaxIters, ResidualBelowTol };

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  Termination terminated_by = Termination::MaxIters;

  const TrajectoryRecord& back() const { return records.back(); }
};

// The bargaining pull at x: sum over agents of
//   ||x - x_pref_i|| * grad_i(x) / ||grad_i(x)||.
// Agents whose gradient norm is below grad_floor contribute the zero vector.
// The step size is not folded in; the iterate applies it separately.
Vec dibs_direction(const BargainingGame& game, const Vec& x,
                   double grad_floor = 1e-12);

// Iterates x <- x - alpha_k * dibs_direction(x) until the stationarity
// residual drops to cfg.stationarity_tol or the iteration budget runs out.
// Records every iterate, x0 included.
Trajectory dibs_run(const BargainingGame& game, const Vec& x0, const DibsConfig& cfg);

// Plain gradient descent to a (local) minimizer, used to seed preferred
// states. Errors out if the iterate norm exceeds 1e12.
Vec find_preferred_state(const Objective& o, const Vec& x_start, double lr,
                         long max_iters, double tol);

// Switched dynamics that keep iterates bounded without moving fixed points:
// standard step in the inner ball, a radially attractive step outside the
// outer ball, and a smooth blend plus a clocked perturbation in the annulus
// between them.
struct BoundedDynamicsConfig {
  double inner_radius = 0.0;   // R
  double annulus_width = 0.0;  // r
  double radial_step = 0.0;    // step length of the attractive branch
  Vec perturbation_dir;        // constant vector a scaled to unit norm
  long annulus_clock = 0;      // count of iterates seen strictly inside the annulus
};

// Validates inner_radius > max_i ||x_pref_i|| and fills perturbation_dir with
// the unit-norm all-ones default.
BoundedDynamicsConfig make_bounded_config(const BargainingGame& game,
                                          double inner_radius, double annulus_width,
                                          double radial_step);

// Blend weight g(norm): 0 at the inner boundary, 1 at the outer one, smooth
// in between.
double annulus_blend(double norm, double inner_radius, double annulus_width);

// Clocked perturbation z; vanishes exactly at both annulus boundaries.
Vec annulus_perturbation(double norm, long clock, const BoundedDynamicsConfig& cfg);

// One step of the switched dynamics at outer iteration k (1-based, used for
// the schedule). Returns the next point and the config with an updated clock.
std::pair<Vec, BoundedDynamicsConfig> bounded_step(const BargainingGame& game,
                                                   const Vec& x, const DibsConfig& cfg,
                                                   const BoundedDynamicsConfig& bounds,
                                                   long k);

// dibs_run with the bounded switched dynamics in place of the plain iterate.
Trajectory dibs_run_bounded(const BargainingGame& game, const Vec& x0,
                            const DibsConfig& cfg, BoundedDynamicsConfig bounds);

}  // namespace bargain

#endif  // BARGAIN_DIBS_HPP
