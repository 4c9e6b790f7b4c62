#include "bargain/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bargain {

namespace {

// Exact minimizer of ||gamma*a + (1-gamma)*b|| over gamma in [0,1].
double segment_min_norm_coeff(const Vec& a, const Vec& b) {
  const double denom = (a - b).squaredNorm();
  if (denom <= 0.0) return 0.5;  // identical endpoints, any weight works
  const double gamma = (b - a).dot(b) / denom;
  return std::clamp(gamma, 0.0, 1.0);
}

void clean_simplex(Vec& beta) {
  for (Eigen::Index i = 0; i < beta.size(); ++i)
    if (beta(i) < 0.0) beta(i) = 0.0;
  const double total = beta.sum();
  if (total > 0.0) beta /= total;
}

}  // namespace

SimplexMinNorm simplex_min_norm(const std::vector<Vec>& grads, int max_iters,
                                double tol) {
  const int n = static_cast<int>(grads.size());
  if (n == 0) throw std::invalid_argument("simplex_min_norm: empty gradient set");

  SimplexMinNorm out;
  if (n == 1) {
    out.beta = Vec::Ones(1);
    out.combination = grads[0];
    out.residual = grads[0].norm();
    return out;
  }
  if (n == 2) {
    const double gamma = segment_min_norm_coeff(grads[0], grads[1]);
    out.beta = Vec(2);
    out.beta << gamma, 1.0 - gamma;
    out.combination = gamma * grads[0] + (1.0 - gamma) * grads[1];
    out.residual = out.combination.norm();
    return out;
  }

  // Away-step Frank-Wolfe on f(beta) = ||G beta||^2 over the simplex. The
  // away direction avoids the zigzag stall when the optimum sits on a face.
  Vec beta = Vec::Constant(n, 1.0 / n);
  Vec d = Vec::Zero(grads[0].size());
  for (int i = 0; i < n; ++i) d += beta(i) * grads[i];

  for (int iter = 0; iter < max_iters; ++iter) {
    int fw = 0, away = -1;
    double fw_score = grads[0].dot(d);
    double away_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double s = grads[i].dot(d);
      if (s < fw_score) {
        fw_score = s;
        fw = i;
      }
      if (beta(i) > 0.0 && s > away_score) {
        away_score = s;
        away = i;
      }
    }
    const double gap = d.squaredNorm() - fw_score;
    if (gap <= tol * tol) break;

    const bool take_away =
        away >= 0 && (away_score - d.squaredNorm()) > gap && beta(away) < 1.0;
    if (take_away) {
      // Move mass away from the worst vertex: d + gamma * (d - g_away).
      const Vec dir = d - grads[away];
      const double denom = dir.squaredNorm();
      if (denom <= 0.0) break;
      const double gamma_max = beta(away) / (1.0 - beta(away));
      const double gamma = std::clamp(-d.dot(dir) / denom, 0.0, gamma_max);
      if (gamma <= 0.0) break;
      beta *= (1.0 + gamma);
      beta(away) -= gamma;
    } else {
      const double gamma = segment_min_norm_coeff(grads[fw], d);
      beta *= (1.0 - gamma);
      beta(fw) += gamma;
    }
    clean_simplex(beta);
    d.setZero();
    for (int i = 0; i < n; ++i) d += beta(i) * grads[i];
  }

  out.beta = beta;
  out.combination = d;
  out.residual = d.norm();
  return out;
}

StationarityCertificate stationarity_residual(const std::vector<Objective>& objectives,
                                              const Vec& x, double tol,
                                              int max_fw_iters, double fw_tol) {
  std::vector<Vec> grads;
  grads.reserve(objectives.size());
  for (const Objective& o : objectives) grads.push_back(o.grad(x));
  const SimplexMinNorm mn = simplex_min_norm(grads, max_fw_iters, fw_tol);
  StationarityCertificate cert;
  cert.residual = mn.residual;
  cert.beta = mn.beta;
  cert.is_stationary = mn.residual <= tol;
  return cert;
}

StationarityCertificate stationarity_residual(const BargainingGame& game, const Vec& x,
                                              double tol, int max_fw_iters,
                                              double fw_tol) {
  return stationarity_residual(game.objectives, x, tol, max_fw_iters, fw_tol);
}

FrontSample sample_front_2d(const std::vector<Objective>& objectives, const Vec& lo,
                            const Vec& hi, int steps_per_axis) {
  if (objectives.size() != 2)
    throw std::invalid_argument("sample_front_2d needs exactly 2 objectives");
  if (lo.size() != 2 || hi.size() != 2)
    throw std::invalid_argument("sample_front_2d needs a 2-D window");
  if (steps_per_axis < 2)
    throw std::invalid_argument("sample_front_2d needs steps_per_axis >= 2");

  const double dx = (hi(0) - lo(0)) / (steps_per_axis - 1);
  const double dy = (hi(1) - lo(1)) / (steps_per_axis - 1);

  std::vector<FrontSample::Entry> all;
  all.reserve(static_cast<size_t>(steps_per_axis) * steps_per_axis);
  Vec p(2);
  for (int i = 0; i < steps_per_axis; ++i) {
    p(0) = lo(0) + i * dx;
    for (int j = 0; j < steps_per_axis; ++j) {
      p(1) = lo(1) + j * dy;
      FrontSample::Entry e;
      e.point = p;
      e.f1 = objectives[0].value(p);
      e.f2 = objectives[1].value(p);
      all.push_back(std::move(e));
    }
  }

  // 2-D sweep: sort by (f1, f2) and keep strict improvements in f2. Kept
  // entries are strictly increasing in f1 and strictly decreasing in f2,
  // hence pairwise non-dominated.
  std::stable_sort(all.begin(), all.end(),
                   [](const FrontSample::Entry& a, const FrontSample::Entry& b) {
                     if (a.f1 != b.f1) return a.f1 < b.f1;
                     return a.f2 < b.f2;
                   });
  FrontSample out;
  out.resolution = std::max(std::abs(dx), std::abs(dy));
  double best_f2 = std::numeric_limits<double>::infinity();
  for (FrontSample::Entry& e : all) {
    if (e.f2 < best_f2) {
      best_f2 = e.f2;
      out.entries.push_back(std::move(e));
    }
  }
  return out;
}

FrontSample sample_front_2d(const BargainingGame& game, const Vec& lo, const Vec& hi,
                            int steps_per_axis) {
  return sample_front_2d(game.objectives, lo, hi, steps_per_axis);
}

}  // namespace bargain
