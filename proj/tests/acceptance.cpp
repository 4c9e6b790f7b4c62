// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bargain/aggregators.hpp"
#include "bargain/dibs.hpp"
#include "bargain/harness.hpp"
#include "bargain/pareto.hpp"
#include "bargain/problems.hpp"

using bargain::AggregatorSpec;
using bargain::BargainingGame;
using bargain::DibsConfig;
using bargain::GradientBundle;
using bargain::Objective;
using bargain::StepSchedule;
using bargain::Trajectory;
using bargain::Vec;

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", index, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void run_criterion(int index, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
  const auto start = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    std::tie(ok, detail) = body();
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char timing[64];
  std::snprintf(timing, sizeof timing, "%s(%.2fs)", detail.empty() ? "" : " ", secs);
  report(index, name, ok, detail + timing);
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---- criterion 1: invariance of dibs_single on the toy problem ------------

std::pair<bool, std::string> criterion_invariance() {
  const auto [l1, l2] = bargain::toy_losses();
  const Objective tl1 =
      transform_objective(l1, bargain::MonotoneTransform::signed_power(4.0));
  AggregatorSpec agg;
  agg.kind = AggregatorSpec::Kind::DibsSingle;
  agg.epsilon = 1.0;
  const StepSchedule sched = StepSchedule::constant(5e-3);
  const long iters = 40000;

  double worst = 0.0;
  const std::vector<Vec> inits = bargain::toy_initializations();
  if (inits.size() < 5) return {false, "fewer than 5 builtin initializations"};
  for (const Vec& x0 : inits) {
    const Trajectory nominal =
        bargain::run_single({l1, l2}, x0, agg, sched, iters, -1.0);
    const Trajectory transformed =
        bargain::run_single({tl1, l2}, x0, agg, sched, iters, -1.0);
    if (nominal.records.size() != transformed.records.size())
      return {false, "trajectory lengths diverged"};
    for (size_t i = 0; i < nominal.records.size(); ++i) {
      worst = std::max(worst, (nominal.records[i].point - transformed.records[i].point)
                                  .lpNorm<Eigen::Infinity>());
    }
  }
  char detail[96];
  std::snprintf(detail, sizeof detail, "max pointwise gap %.3e over %ld iters x %zu inits",
                worst, iters, inits.size());
  return {worst <= 1e-6, detail};
}

// ---- criterion 2: the quadratic-pair counterexample ------------------------

std::pair<bool, std::string> criterion_counterexample() {
  const BargainingGame game = bargain::quad_pair();

  // imtl_g sits still at the biased point
  AggregatorSpec imtl;
  imtl.kind = AggregatorSpec::Kind::ImtlG;
  const Trajectory stuck = bargain::run_single(game.objectives, v2(0.0, 0.9), imtl,
                                               StepSchedule::constant(5e-3), 1000, -1.0);
  double worst = 0.0;
  for (const bargain::TrajectoryRecord& rec : stuck.records)
    worst = std::max(worst, (rec.point - v2(0.0, 0.9)).lpNorm<Eigen::Infinity>());
  if (worst > 1e-6) {
    char detail[64];
    std::snprintf(detail, sizeof detail, "imtl_g drifted %.3e from (0,0.9)", worst);
    return {false, detail};
  }

  // dibs walks from the same neighborhood to the balanced point; the start
  // is nudged off the stationary segment x = 0, where the residual-based
  // stop would otherwise fire immediately
  DibsConfig cfg;
  cfg.schedule = StepSchedule::constant(0.01);
  cfg.max_iters = 100000;
  cfg.stationarity_tol = 1e-9;
  const Trajectory traj = bargain::dibs_run(game, v2(0.5, 0.9), cfg);
  const double dist = traj.back().point.norm();
  char detail[96];
  std::snprintf(detail, sizeof detail,
                "imtl_g gap %.2e, dibs final distance to origin %.2e", worst, dist);
  return {dist <= 1e-2, detail};
}

// ---- criterion 3: stationarity at convergence ------------------------------

double grid_min_norm_2(const Vec& g0, const Vec& g1, double resolution) {
  double best = std::numeric_limits<double>::infinity();
  for (double b = 0.0; b <= 1.0 + 1e-12; b += resolution)
    best = std::min(best, (b * g0 + (1.0 - b) * g1).norm());
  return best;
}

std::pair<bool, std::string> criterion_stationarity() {
  struct Run {
    std::string name;
    std::vector<Objective> objectives;
    Trajectory traj;
  };
  std::vector<Run> runs;

  const auto [l1, l2] = bargain::toy_losses();
  AggregatorSpec dibs;
  dibs.kind = AggregatorSpec::Kind::DibsSingle;
  for (const Vec& x0 : bargain::toy_initializations()) {
    Run r;
    r.name = "toy";
    r.objectives = {l1, l2};
    r.traj = bargain::run_single(r.objectives, x0, dibs, StepSchedule::constant(5e-3),
                                 40000, 1e-3);
    runs.push_back(std::move(r));
  }
  {
    const BargainingGame quad = bargain::quad_pair();
    DibsConfig cfg;
    cfg.schedule = StepSchedule::constant(0.01);
    cfg.max_iters = 100000;
    // run well past 1e-3: near the balanced point the optimal weight sits on
    // the 1e-3 grid, so the brute-force cross-check resolves cleanly
    cfg.stationarity_tol = 1e-6;
    for (const Vec& x0 : bargain::quad_pair_initializations()) {
      Run r;
      r.name = "quad_pair";
      r.objectives = quad.objectives;
      r.traj = bargain::dibs_run(quad, x0, cfg);
      runs.push_back(std::move(r));
    }
  }

  double worst_residual = 0.0;
  for (const Run& r : runs) {
    if (r.traj.terminated_by != bargain::Termination::ResidualBelowTol)
      return {false, r.name + " run did not converge within its budget"};
    const Vec x = r.traj.back().point;
    const bargain::StationarityCertificate cert =
        bargain::stationarity_residual(r.objectives, x, 1e-3);
    worst_residual = std::max(worst_residual, cert.residual);
    if (cert.residual > 1e-3) return {false, r.name + " residual above 1e-3"};
    if (std::abs(cert.beta.sum() - 1.0) > 1e-9)
      return {false, r.name + " beta leaves the simplex"};
    for (Eigen::Index i = 0; i < cert.beta.size(); ++i)
      if (cert.beta(i) < -1e-12) return {false, r.name + " beta has a negative weight"};
    const double grid = grid_min_norm_2(r.objectives[0].grad(x),
                                        r.objectives[1].grad(x), 1e-3);
    if (std::abs(cert.residual - grid) > 1e-3)
      return {false, r.name + " residual disagrees with the simplex grid"};
  }
  char detail[96];
  std::snprintf(detail, sizeof detail, "%zu runs converged, worst residual %.3e",
                runs.size(), worst_residual);
  return {true, detail};
}

// ---- criterion 4: single-step / multi-step consistency ---------------------

std::pair<bool, std::string> criterion_consistency() {
  std::mt19937_64 rng(20240917);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> dim_dist(2, 64);
  std::uniform_int_distribution<int> task_dist(2, 10);
  std::uniform_real_distribution<double> eps_dist(0.1, 2.0);

  for (int rep = 0; rep < 1000; ++rep) {
    const int dim = dim_dist(rng);
    const int tasks = task_dist(rng);
    GradientBundle b;
    for (int i = 0; i < tasks; ++i) {
      Vec g(dim);
      for (int j = 0; j < dim; ++j) g(j) = normal(rng);
      b.grads.push_back(std::move(g));
      b.labels.push_back("t" + std::to_string(i));
    }
    const double eps = eps_dist(rng);
    const Vec single = bargain::aggregate_dibs_single(b, eps);
    const Vec multi =
        bargain::aggregate_dibs_multi(b, eps, 1, StepSchedule::constant(1.0));
    if (single.size() != multi.size() ||
        std::memcmp(single.data(), multi.data(),
                    sizeof(double) * static_cast<size_t>(single.size())) != 0) {
      char detail[64];
      std::snprintf(detail, sizeof detail, "bundle %d (dim %d, tasks %d) differs", rep,
                    dim, tasks);
      return {false, detail};
    }
  }
  return {true, "1000 random bundles bit-identical"};
}

// ---- criterion 5: bounded switched dynamics --------------------------------

std::pair<bool, std::string> criterion_boundedness() {
  const BargainingGame game = bargain::quad_pair();
  DibsConfig cfg;
  cfg.schedule = StepSchedule::constant(0.01);
  cfg.max_iters = 100000;
  cfg.stationarity_tol = 1e-3;
  const bargain::BoundedDynamicsConfig bounds =
      bargain::make_bounded_config(game, 10.0, 1.0, 1.0);

  const Vec x0 = v2(30.0, 40.0);  // norm exactly 50
  const Trajectory traj = bargain::dibs_run_bounded(game, x0, cfg, bounds);
  const double cap = std::max(x0.norm(), 11.0) + bounds.radial_step;
  double sup = 0.0;
  for (const bargain::TrajectoryRecord& rec : traj.records)
    sup = std::max(sup, rec.point.norm());
  char detail[96];
  std::snprintf(detail, sizeof detail, "sup ||x_k|| = %.4f (cap %.1f), final residual %.2e",
                sup, cap, traj.back().residual);
  const bool ok = sup <= cap &&
                  traj.terminated_by == bargain::Termination::ResidualBelowTol &&
                  traj.back().residual <= 1e-3;
  return {ok, detail};
}

// ---- criterion 6: gradient correctness --------------------------------------

std::pair<bool, std::string> criterion_gradients() {
  struct Case {
    Objective objective;
    Vec lo, hi;
    bool toy_kinks;
  };
  const auto [l1, l2] = bargain::toy_losses();
  const BargainingGame quad = bargain::quad_pair();
  std::vector<Case> cases;
  cases.push_back({l1, Vec::Constant(2, -10.0), Vec::Constant(2, 10.0), true});
  cases.push_back({l2, Vec::Constant(2, -10.0), Vec::Constant(2, 10.0), true});
  cases.push_back({quad.objectives[0], Vec::Constant(2, -1.0), Vec::Constant(2, 1.0), false});
  cases.push_back({quad.objectives[1], Vec::Constant(2, -1.0), Vec::Constant(2, 1.0), false});

  std::mt19937_64 rng(8675309);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double margin = 1e-3;
  double worst = 0.0;

  for (const Case& c : cases) {
    int accepted = 0;
    while (accepted < 100) {
      Vec p(2);
      for (int i = 0; i < 2; ++i)
        p(i) = c.lo(i) + unit(rng) * (c.hi(i) - c.lo(i));
      if (c.toy_kinks) {
        const double u1 = 0.5 * (-p(0) - 7.0) + std::tanh(p(1));
        const double u2 = 0.5 * (-p(0) + 3.0) + std::tanh(p(1)) + 2.0;
        if (std::abs(p(1)) < margin || std::abs(u1) < margin + 1e-6 ||
            std::abs(u2) < margin + 1e-6)
          continue;
      }
      ++accepted;
      const Vec analytic = c.objective.grad(p);
      const Vec fd = bargain::fd_gradient(c.objective, p, 1e-6);
      const double rel = (analytic - fd).norm() / std::max(1.0, analytic.norm());
      worst = std::max(worst, rel);
      if (rel > 1e-5) {
        char detail[96];
        std::snprintf(detail, sizeof detail, "%s at (%.4f, %.4f): rel err %.2e",
                      c.objective.label.c_str(), p(0), p(1), rel);
        return {false, detail};
      }
    }
  }
  char detail[64];
  std::snprintf(detail, sizeof detail, "100 pts x 4 objectives, worst rel err %.2e",
                worst);
  return {true, detail};
}

// ---- criterion 7: scale-invariance contrast ---------------------------------

std::pair<bool, std::string> criterion_contrast() {
  GradientBundle b;
  b.grads = {v2(100.0, 0.0), v2(0.0, 1.0)};
  b.labels = {"dominant", "weak"};
  const Vec dibs = bargain::aggregate_dibs_single(b, 1.0);
  const Vec ls = bargain::aggregate_ls(b);
  const bool ok = dibs(0) == -1.0 && dibs(1) == -1.0 && ls(0) == -100.0 && ls(1) == -1.0;
  char detail[96];
  std::snprintf(detail, sizeof detail, "dibs (%g, %g), ls (%g, %g)", dibs(0), dibs(1),
                ls(0), ls(1));
  return {ok, detail};
}

// ---- criterion 8: byte determinism ------------------------------------------

std::pair<bool, std::string> criterion_determinism() {
  const std::string config_text =
      "problem = toy\n"
      "aggregator.kind = dibs_single\n"
      "schedule.kind = constant\n"
      "schedule.alpha = 0.005\n"
      "max_iters = 3000\n"
      "stationarity_tol = 1e-4\n"
      "initializations = builtin\n"
      "seed = 12345\n"
      "front_steps = 150\n";
  bargain::RunConfig cfg = bargain::parse_config_text(config_text, "acceptance");

  const fs::path base = fs::temp_directory_path() / "bargain_acceptance";
  fs::remove_all(base);
  const fs::path dir1 = base / "run1", dir2 = base / "run2";

  cfg.output_dir = dir1.string();
  bargain::run_experiment(cfg);
  cfg.output_dir = dir2.string();
  bargain::run_experiment(cfg);

  std::vector<std::string> files = {"report.json", "plot.svg"};
  for (int i = 0; i < 5; ++i)
    files.push_back("trajectory_" + std::to_string(i) + ".csv");
  for (const std::string& f : files) {
    if (slurp((dir1 / f).string()) != slurp((dir2 / f).string()))
      return {false, f + " differs between identical runs"};
  }
  char detail[64];
  std::snprintf(detail, sizeof detail, "%zu output files byte-identical", files.size());
  return {true, detail};
}

}  // namespace

int main() {
  run_criterion(1, "invariance of dibs_single under sign(L1)*L1^4", criterion_invariance);
  run_criterion(2, "quadratic-pair counterexample (imtl_g stalls, dibs balances)",
                criterion_counterexample);
  run_criterion(3, "Pareto stationarity at convergence", criterion_stationarity);
  run_criterion(4, "single-step equals one multi-step iteration bit-for-bit",
                criterion_consistency);
  run_criterion(5, "bounded dynamics keep iterates bounded and converge",
                criterion_boundedness);
  run_criterion(6, "analytic gradients match central differences", criterion_gradients);
  run_criterion(7, "scale-invariance contrast against linear scalarization",
                criterion_contrast);
  run_criterion(8, "byte-identical outputs for identical config and seed",
                criterion_determinism);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
