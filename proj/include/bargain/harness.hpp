#ifndef BARGAIN_HARNESS_HPP
#define BARGAIN_HARNESS_HPP

#include <optional>
#include <string>
#include <vector>

#include "bargain/aggregators.hpp"
#include "bargain/core.hpp"
#include "bargain/dibs.hpp"
#include "bargain/pareto.hpp"

namespace bargain {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Experiment description, read from a flat key-value file with one dotted key
// per line ("aggregator.kind = dibs_single"). See docs in the README.
struct RunConfig {
  std::string problem = "toy";  // toy | quad_pair | custom
  std::string problem_file;     // custom problems only
  AggregatorSpec aggregator;
  std::optional<int> transform_task;  // task index the transform applies to
  MonotoneTransform transform = MonotoneTransform::identity();
  StepSchedule schedule = StepSchedule::constant(5e-3);
  long max_iters = 40000;
  double stationarity_tol = 1e-3;
  std::vector<Vec> initializations;  // empty = problem builtins
  unsigned long seed = 0;
  std::string output_dir = "out";
  int front_steps = 400;  // grid resolution for the plotted front
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// A problem instance the runner can drive: objectives, a plotting window and
// builtin starting points.
struct ProblemInstance {
  std::string name;
  std::vector<Objective> objectives;
  Vec window_lo;
  Vec window_hi;
  std::vector<Vec> builtin_inits;
};

ProblemInstance load_problem(const RunConfig& cfg);
ProblemInstance load_custom_problem(const std::string& path);

// Outer-loop optimizer: theta <- theta + alpha_k * aggregate(grads(theta)).
// Plain application of the aggregated direction, no momentum, so the
// aggregator alone shapes the trajectory. Records every iterate; stops when
// the stationarity residual reaches tol (never, if tol < 0) or after
// max_iters steps.
Trajectory run_single(const std::vector<Objective>& objectives, const Vec& x0,
                      const AggregatorSpec& agg, const StepSchedule& sched,
                      long max_iters, double stationarity_tol);

struct InitResult {
  int index = 0;
  Vec initialization;
  Trajectory trajectory;
  StationarityCertificate certificate;
  long iterations = 0;  // steps actually taken
  Termination terminated_by = Termination::MaxIters;
  double wall_seconds = 0.0;  // console reporting only, never serialized
};

struct RunReport {
  std::vector<InitResult> inits;
  std::vector<std::string> objective_labels;
  double stationary_fraction = 0.0;
};

// Runs every initialization (in parallel up to BARGAIN_OPT_THREADS), writes
// trajectory_<i>.csv, report.json and plot.svg under cfg.output_dir, and
// returns the merged report, ordered by initialization index.
RunReport run_experiment(const RunConfig& cfg);

// CSV schema: header "iter,x0,...,x{n-1},loss_0,...,loss_{N-1},residual",
// one row per record, 17-significant-digit decimals (round-trip safe). An
// empty trajectory writes the minimal header "iter,residual". The
// termination reason is carried by the JSON report, not the CSV.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

void write_report_json(const RunReport& report, const RunConfig& cfg,
                       const std::string& path);

// Standalone SVG in objective space: sampled front as a grey polyline,
// per-initialization trajectories, filled circles at the starts and cross
// markers at the final points. Two-objective problems only.
void render_plot_svg(const RunReport& report, const FrontSample& front,
                     const std::string& path);

// Parallelism cap from BARGAIN_OPT_THREADS; falls back to `fallback` when the
// variable is unset or unparseable.
int thread_cap(int fallback);

// Fixed "%.17g" formatting used for every decimal the harness emits.
std::string format_double(double v);

}  // namespace bargain

#endif  // BARGAIN_HARNESS_HPP
