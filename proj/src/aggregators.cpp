#include "bargain/aggregators.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "bargain/pareto.hpp"

namespace bargain {

void validate_bundle(const GradientBundle& b) {
  if (b.grads.empty()) throw std::invalid_argument("gradient bundle is empty");
  const Eigen::Index dim = b.grads.front().size();
  for (const Vec& g : b.grads) {
    if (g.size() != dim)
      throw std::invalid_argument("gradient bundle mixes dimensions");
    if (!is_finite(g))
      throw std::invalid_argument("gradient bundle has non-finite entries");
  }
}

std::string AggregatorSpec::name() const {
  switch (kind) {
    case Kind::DibsSingle: return "dibs_single";
    case Kind::DibsMulti: return "dibs_multi";
    case Kind::Ls: return "ls";
    case Kind::MinNorm: return "min_norm";
    case Kind::PcGrad: return "pcgrad";
    case Kind::ImtlG: return "imtl_g";
  }
  return "unknown";
}

namespace {

// Unit gradients of the tasks above the floor; order preserved.
std::vector<Vec> unit_gradients(const GradientBundle& b) {
  std::vector<Vec> units;
  units.reserve(b.grads.size());
  for (const Vec& g : b.grads) {
    const double n = g.norm();
    if (n < kGradFloor) continue;
    units.push_back(g / n);
  }
  return units;
}

Vec sum_of(const std::vector<Vec>& vs, Eigen::Index dim) {
  Vec s = Vec::Zero(dim);
  for (const Vec& v : vs) s += v;
  return s;
}

// Deterministic Fisher-Yates; std::shuffle is not pinned down by the
// standard, and pcgrad trajectories feed golden-file tests.
std::vector<int> shuffled_order(int n, unsigned long seed) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng() % static_cast<unsigned long>(i + 1));
    std::swap(order[i], order[j]);
  }
  return order;
}

}  // namespace

Vec aggregate_dibs_single(const GradientBundle& b, double epsilon) {
  validate_bundle(b);
  if (!(epsilon > 0.0)) throw std::invalid_argument("dibs epsilon must be > 0");
  return -(epsilon * sum_of(unit_gradients(b), b.dim()));
}

Vec aggregate_dibs_multi(const GradientBundle& b, double epsilon, int inner_steps,
                         const StepSchedule& sched) {
  validate_bundle(b);
  if (!(epsilon > 0.0)) throw std::invalid_argument("dibs epsilon must be > 0");
  if (inner_steps < 1) throw std::invalid_argument("dibs_multi needs inner_steps >= 1");

  const std::vector<Vec> units = unit_gradients(b);
  Vec delta = Vec::Zero(b.dim());
  if (units.empty()) return delta;

  for (int k = 1; k <= inner_steps; ++k) {
    Vec pull;
    if (delta.isZero(0.0)) {
      // ||0 + epsilon*u_i|| is exactly epsilon, so the pull collapses to
      // epsilon * sum u_i; evaluating it that way keeps the single-step
      // reduction bit-exact.
      pull = epsilon * sum_of(units, b.dim());
    } else {
      pull = Vec::Zero(b.dim());
      for (const Vec& u : units) pull += (delta + epsilon * u).norm() * u;
    }
    delta -= sched.at(k) * pull;
  }

  if (inner_steps > 1) {
    const double n = delta.norm();
    if (n > epsilon) delta *= epsilon / n;
  }
  return delta;
}

Vec aggregate_ls(const GradientBundle& b) {
  validate_bundle(b);
  return -sum_of(b.grads, b.dim());
}

Vec aggregate_min_norm(const GradientBundle& b, int max_fw_iters, double fw_tol) {
  validate_bundle(b);
  return -simplex_min_norm(b.grads, max_fw_iters, fw_tol).combination;
}

Vec aggregate_pcgrad(const GradientBundle& b, unsigned long seed) {
  validate_bundle(b);
  const int n = b.num_tasks();
  const std::vector<int> order = shuffled_order(n, seed);

  Vec total = Vec::Zero(b.dim());
  for (const int i : order) {
    Vec gi = b.grads[i];
    for (const int j : order) {
      if (j == i) continue;
      const Vec& gj = b.grads[j];
      const double nj2 = gj.squaredNorm();
      if (nj2 <= 0.0) continue;
      const double conflict = gi.dot(gj);
      if (conflict < 0.0) gi -= (conflict / nj2) * gj;
    }
    total += gi;
  }
  return -total / static_cast<double>(n);
}

Vec aggregate_imtl_g(const GradientBundle& b, bool* used_fallback) {
  validate_bundle(b);
  if (used_fallback) *used_fallback = false;
  const int n = b.num_tasks();
  if (n < 2) throw std::invalid_argument("imtl_g needs at least 2 tasks");

  bool degenerate = false;
  std::vector<Vec> units;
  units.reserve(n);
  for (const Vec& g : b.grads) {
    const double gn = g.norm();
    if (gn < kGradFloor) {
      degenerate = true;
      break;
    }
    units.push_back(g / gn);
  }

  Vec alpha;
  if (!degenerate) {
    // Row i (i >= 1): sum_j alpha_j * g_j . (u_0 - u_i) = 0; last row: sum = 1.
    Eigen::MatrixXd A(n, n);
    Vec rhs = Vec::Zero(n);
    for (int i = 1; i < n; ++i) {
      const Vec diff = units[0] - units[i];
      for (int j = 0; j < n; ++j) A(i - 1, j) = b.grads[j].dot(diff);
    }
    A.row(n - 1).setOnes();
    rhs(n - 1) = 1.0;

    const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (lu.isInvertible()) {
      alpha = lu.solve(rhs);
      for (int j = 0; j < n; ++j)
        if (!(alpha(j) >= 0.0)) degenerate = true;  // also catches NaN
    } else {
      degenerate = true;
    }
  }

  if (degenerate) {
    if (used_fallback) *used_fallback = true;
    return aggregate_min_norm(b);
  }

  Vec d = Vec::Zero(b.dim());
  for (int j = 0; j < n; ++j) d += alpha(j) * b.grads[j];
  return -d;
}

Vec aggregate(const AggregatorSpec& spec, const GradientBundle& b) {
  switch (spec.kind) {
    case AggregatorSpec::Kind::DibsSingle:
      return aggregate_dibs_single(b, spec.epsilon);
    case AggregatorSpec::Kind::DibsMulti:
      return aggregate_dibs_multi(b, spec.epsilon, spec.inner_steps,
                                  spec.inner_schedule);
    case AggregatorSpec::Kind::Ls:
      return aggregate_ls(b);
    case AggregatorSpec::Kind::MinNorm:
      return aggregate_min_norm(b, spec.max_fw_iters, spec.fw_tol);
    case AggregatorSpec::Kind::PcGrad:
      return aggregate_pcgrad(b, spec.seed);
    case AggregatorSpec::Kind::ImtlG:
      return aggregate_imtl_g(b);
  }
  throw std::invalid_argument("unknown aggregator kind");
}

}  // namespace bargain
