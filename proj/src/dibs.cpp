#include "bargain/dibs.hpp"

#include <cmath>

#include "bargain/pareto.hpp"

namespace bargain {

void validate_game(const BargainingGame& game, double first_order_tol) {
  if (game.objectives.empty())
    throw std::invalid_argument("game needs at least one objective");
  if (game.preferred_states.size() != game.objectives.size())
    throw std::invalid_argument("game needs one preferred state per objective");
  const Eigen::Index dim = game.preferred_states.front().size();
  if (dim < 1) throw std::invalid_argument("game dimension must be >= 1");
  for (size_t i = 0; i < game.preferred_states.size(); ++i) {
    const Vec& xs = game.preferred_states[i];
    if (xs.size() != dim)
      throw std::invalid_argument("preferred states disagree on dimension");
    if (!is_finite(xs))
      throw std::invalid_argument("preferred state has non-finite coordinates");
    const double gnorm = game.objectives[i].grad(xs).norm();
    if (gnorm > first_order_tol)
      throw std::invalid_argument("preferred state of '" + game.objectives[i].label +
                                  "' fails the first-order check, |grad| = " +
                                  std::to_string(gnorm));
  }
}

Vec dibs_direction(const BargainingGame& game, const Vec& x, double grad_floor) {
  if (x.size() != game.dim())
    throw std::invalid_argument("dibs_direction: point dimension mismatch");
  Vec dir = Vec::Zero(x.size());
  for (size_t i = 0; i < game.objectives.size(); ++i) {
    const Vec g = game.objectives[i].grad(x);
    const double gnorm = g.norm();
    if (gnorm < grad_floor) continue;  // satisfied agent exerts no pull
    const double dist = (x - game.preferred_states[i]).norm();
    dir += (dist / gnorm) * g;
  }
  return dir;
}

namespace {

TrajectoryRecord make_record(const BargainingGame& game, const Vec& x, long iter,
                             double tol) {
  TrajectoryRecord rec;
  rec.iter = iter;
  rec.point = x;
  rec.values.reserve(game.objectives.size());
  for (const Objective& o : game.objectives) {
    const double v = o.value(x);
    if (!std::isfinite(v))
      throw NumericError("objective '" + o.label + "' returned a non-finite value",
                         iter);
    rec.values.push_back(v);
  }
  const StationarityCertificate cert = stationarity_residual(game, x, tol);
  rec.residual = cert.residual;
  return rec;
}

template <typename StepFn>
Trajectory run_loop(const BargainingGame& game, const Vec& x0, const DibsConfig& cfg,
                    StepFn&& step) {
  if (x0.size() != game.dim())
    throw std::invalid_argument("dibs_run: initial point dimension mismatch");
  if (!(cfg.stationarity_tol > 0.0))
    throw std::invalid_argument("dibs_run: stationarity_tol must be > 0");
  if (!(cfg.grad_floor > 0.0) || cfg.grad_floor > 1e-8)
    throw std::invalid_argument("dibs_run: grad_floor must be in (0, 1e-8]");
  if (game.feasible_radius && x0.norm() > *game.feasible_radius)
    throw std::invalid_argument("dibs_run: initial point outside the feasible ball");
  Trajectory traj;
  Vec x = x0;
  for (long k = 0;; ++k) {
    if (!is_finite(x)) throw NumericError("iterate has non-finite coordinates", k);
    TrajectoryRecord rec = make_record(game, x, k, cfg.stationarity_tol);
    const double residual = rec.residual;
    traj.records.push_back(std::move(rec));
    if (residual <= cfg.stationarity_tol) {
      traj.terminated_by = Termination::ResidualBelowTol;
      break;
    }
    if (k >= cfg.max_iters) {
      traj.terminated_by = Termination::MaxIters;
      break;
    }
    x = step(x, k + 1);
  }
  return traj;
}

}  // namespace

Trajectory dibs_run(const BargainingGame& game, const Vec& x0, const DibsConfig& cfg) {
  return run_loop(game, x0, cfg, [&](const Vec& x, long k) -> Vec {
    return x - cfg.schedule.at(k) * dibs_direction(game, x, cfg.grad_floor);
  });
}

Vec find_preferred_state(const Objective& o, const Vec& x_start, double lr,
                         long max_iters, double tol) {
  if (!(lr > 0.0)) throw std::invalid_argument("find_preferred_state: lr must be > 0");
  Vec x = x_start;
  for (long k = 0; k < max_iters; ++k) {
    const Vec g = o.grad(x);
    if (!is_finite(g))
      throw NumericError("gradient of '" + o.label + "' is non-finite", k);
    if (g.norm() <= tol) return x;
    x -= lr * g;
    if (x.norm() > 1e12)
      throw NumericError("descent on '" + o.label + "' diverged", k + 1);
  }
  return x;
}

BoundedDynamicsConfig make_bounded_config(const BargainingGame& game,
                                          double inner_radius, double annulus_width,
                                          double radial_step) {
  if (!(inner_radius > 0.0) || !(annulus_width > 0.0) || !(radial_step > 0.0))
    throw std::invalid_argument("bounded dynamics needs positive radii and step");
  double max_pref = 0.0;
  for (const Vec& xs : game.preferred_states)
    max_pref = std::max(max_pref, xs.norm());
  if (!(inner_radius > max_pref))
    throw std::invalid_argument(
        "inner radius must exceed the largest preferred-state norm " +
        std::to_string(max_pref));
  BoundedDynamicsConfig cfg;
  cfg.inner_radius = inner_radius;
  cfg.annulus_width = annulus_width;
  cfg.radial_step = radial_step;
  cfg.perturbation_dir = Vec::Ones(game.dim()) / std::sqrt(double(game.dim()));
  return cfg;
}

double annulus_blend(double norm, double inner_radius, double annulus_width) {
  const double s = (norm - inner_radius) / annulus_width;  // in (0,1) on the annulus
  const double inner = std::exp(-annulus_width / (norm - inner_radius));
  const double outer = std::exp(-1.0 / (1.0 - s));
  return inner / (inner + outer);
}

Vec annulus_perturbation(double norm, long clock, const BoundedDynamicsConfig& cfg) {
  const double s = (norm - cfg.inner_radius) / cfg.annulus_width;
  return s * (1.0 - s) * std::sin(static_cast<double>(clock)) * cfg.perturbation_dir;
}

std::pair<Vec, BoundedDynamicsConfig> bounded_step(const BargainingGame& game,
                                                   const Vec& x, const DibsConfig& cfg,
                                                   const BoundedDynamicsConfig& bounds,
                                                   long k) {
  const double norm = x.norm();
  const double outer_radius = bounds.inner_radius + bounds.annulus_width;
  BoundedDynamicsConfig next = bounds;

  const auto dibs_branch = [&]() -> Vec {
    return x - cfg.schedule.at(k) * dibs_direction(game, x, cfg.grad_floor);
  };
  const auto radial_branch = [&]() -> Vec {
    if (norm == 0.0)
      throw NumericError("radial branch undefined at the origin", k);
    return x - bounds.radial_step * (x / norm);
  };

  if (norm <= bounds.inner_radius) return {dibs_branch(), next};
  if (norm >= outer_radius) return {radial_branch(), next};

  // Strictly inside the annulus: advance the clock first, it counts this point.
  next.annulus_clock = bounds.annulus_clock + 1;
  const double blend = annulus_blend(norm, bounds.inner_radius, bounds.annulus_width);
  const Vec z = annulus_perturbation(norm, next.annulus_clock, next);
  return {(1.0 - blend) * dibs_branch() + blend * radial_branch() + z, next};
}

Trajectory dibs_run_bounded(const BargainingGame& game, const Vec& x0,
                            const DibsConfig& cfg, BoundedDynamicsConfig bounds) {
  return run_loop(game, x0, cfg, [&, bounds](const Vec& x, long k) mutable -> Vec {
    auto [next, updated] = bounded_step(game, x, cfg, bounds, k);
    bounds = std::move(updated);
    return next;
  });
}

}  // namespace bargain
