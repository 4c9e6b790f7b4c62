#include "bargain/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bargain/problems.hpp"

namespace bargain {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, const std::string& key) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (trim(value.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
}

long parse_long(const std::string& value, const std::string& key) {
  try {
    size_t used = 0;
    const long v = std::stol(value, &used);
    if (trim(value.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
}

// "a b; c d" -> two points; coordinates split on spaces or commas.
std::vector<Vec> parse_points(const std::string& value, const std::string& key) {
  std::vector<Vec> points;
  std::stringstream groups(value);
  std::string group;
  while (std::getline(groups, group, ';')) {
    for (char& c : group)
      if (c == ',') c = ' ';
    std::stringstream coords(group);
    std::vector<double> vals;
    double v = 0.0;
    while (coords >> v) vals.push_back(v);
    if (vals.empty()) continue;
    Vec p(static_cast<Eigen::Index>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) p(static_cast<Eigen::Index>(i)) = vals[i];
    points.push_back(std::move(p));
  }
  if (points.empty())
    throw ConfigError("key '" + key + "': no points in '" + value + "'");
  return points;
}

struct ScheduleKeys {
  std::string kind = "constant";
  double alpha = 5e-3;
  double c = 1.0;
  long offset = 0;
  bool alpha_set = false;
};

struct TransformKeys {
  bool any = false;
  int task = 0;
  std::string kind = "identity";
  double exponent = 4.0;
  double shift = 5.0;
};

MonotoneTransform build_transform(const TransformKeys& t) {
  if (t.kind == "identity") return MonotoneTransform::identity();
  if (t.kind == "signed_power") return MonotoneTransform::signed_power(t.exponent);
  if (t.kind == "shifted_power")
    return MonotoneTransform::shifted_power(t.shift, t.exponent);
  if (t.kind == "exponential") return MonotoneTransform::exponential();
  throw ConfigError("transform.kind '" + t.kind + "' is not one of identity, "
                    "signed_power, shifted_power, exponential");
}

AggregatorSpec::Kind parse_aggregator_kind(const std::string& value) {
  if (value == "dibs_single") return AggregatorSpec::Kind::DibsSingle;
  if (value == "dibs_multi") return AggregatorSpec::Kind::DibsMulti;
  if (value == "ls") return AggregatorSpec::Kind::Ls;
  if (value == "min_norm") return AggregatorSpec::Kind::MinNorm;
  if (value == "pcgrad") return AggregatorSpec::Kind::PcGrad;
  if (value == "imtl_g") return AggregatorSpec::Kind::ImtlG;
  throw ConfigError("aggregator.kind '" + value + "' is not one of dibs_single, "
                    "dibs_multi, ls, min_norm, pcgrad, imtl_g");
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  ScheduleKeys sched;
  TransformKeys trans;
  double inner_alpha = 0.1;
  bool builtin_inits = true;

  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));

    if (key == "problem") cfg.problem = value;
    else if (key == "problem.file") cfg.problem_file = value;
    else if (key == "aggregator.kind") cfg.aggregator.kind = parse_aggregator_kind(value);
    else if (key == "aggregator.epsilon") cfg.aggregator.epsilon = parse_double(value, key);
    else if (key == "aggregator.inner_steps")
      cfg.aggregator.inner_steps = static_cast<int>(parse_long(value, key));
    else if (key == "aggregator.inner_alpha") inner_alpha = parse_double(value, key);
    else if (key == "aggregator.max_fw_iters")
      cfg.aggregator.max_fw_iters = static_cast<int>(parse_long(value, key));
    else if (key == "aggregator.fw_tol") cfg.aggregator.fw_tol = parse_double(value, key);
    else if (key == "transform.task") { trans.any = true; trans.task = static_cast<int>(parse_long(value, key)); }
    else if (key == "transform.kind") { trans.any = true; trans.kind = value; }
    else if (key == "transform.exponent") { trans.any = true; trans.exponent = parse_double(value, key); }
    else if (key == "transform.shift") { trans.any = true; trans.shift = parse_double(value, key); }
    else if (key == "schedule.kind") sched.kind = value;
    else if (key == "schedule.alpha") { sched.alpha = parse_double(value, key); sched.alpha_set = true; }
    else if (key == "schedule.c") sched.c = parse_double(value, key);
    else if (key == "schedule.offset") sched.offset = parse_long(value, key);
    else if (key == "max_iters") cfg.max_iters = parse_long(value, key);
    else if (key == "stationarity_tol") cfg.stationarity_tol = parse_double(value, key);
    else if (key == "initializations") {
      if (value == "builtin") builtin_inits = true;
      else { builtin_inits = false; cfg.initializations = parse_points(value, key); }
    }
    else if (key == "seed") cfg.seed = static_cast<unsigned long>(parse_long(value, key));
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "front_steps") cfg.front_steps = static_cast<int>(parse_long(value, key));
    else throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
  }

  try {
    if (sched.kind == "constant") {
      cfg.schedule = StepSchedule::constant(sched.alpha);
    } else if (sched.kind == "robbins_monro") {
      cfg.schedule = StepSchedule::robbins_monro(sched.alpha_set ? sched.alpha : sched.c,
                                                 sched.offset);
    } else {
      throw ConfigError("schedule.kind '" + sched.kind +
                        "' is not one of constant, robbins_monro");
    }
    cfg.aggregator.inner_schedule = StepSchedule::constant(inner_alpha);
    if (trans.any) {
      cfg.transform_task = trans.task;
      cfg.transform = build_transform(trans);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(origin + ": " + e.what());
  }

  if (builtin_inits) cfg.initializations.clear();
  if (cfg.max_iters < 0) throw ConfigError("max_iters must be >= 0");
  if (cfg.front_steps < 2) throw ConfigError("front_steps must be >= 2");
  cfg.aggregator.seed = cfg.seed;
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

ProblemInstance load_custom_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem file '" + path + "'");
  ordered_json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ConfigError("problem file '" + path + "': " + e.what());
  }

  ProblemInstance prob;
  prob.name = doc.value("name", std::string("custom"));
  if (!doc.contains("objectives") || !doc["objectives"].is_array() ||
      doc["objectives"].empty())
    throw ConfigError("problem file '" + path + "' needs a non-empty objectives array");

  Eigen::Index dim = -1;
  for (const auto& obj : doc["objectives"]) {
    const auto center = obj.at("center").get<std::vector<double>>();
    const auto weights = obj.at("weights").get<std::vector<double>>();
    if (center.size() != weights.size() || center.empty())
      throw ConfigError("objective center/weights size mismatch in '" + path + "'");
    if (dim < 0) dim = static_cast<Eigen::Index>(center.size());
    if (dim != static_cast<Eigen::Index>(center.size()))
      throw ConfigError("objectives mix dimensions in '" + path + "'");

    Vec c(dim), w(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      c(i) = center[static_cast<size_t>(i)];
      w(i) = weights[static_cast<size_t>(i)];
      if (!(w(i) > 0.0))
        throw ConfigError("objective weights must be positive in '" + path + "'");
    }
    Objective o;
    o.label = obj.value("label", "task" + std::to_string(prob.objectives.size()));
    o.value = [c, w](const Vec& x) {
      return (w.array() * (x - c).array().square()).sum();
    };
    o.grad = [c, w](const Vec& x) -> Vec { return 2.0 * w.array() * (x - c).array(); };
    prob.objectives.push_back(std::move(o));
  }

  if (doc.contains("window")) {
    const auto lo = doc["window"].at("lo").get<std::vector<double>>();
    const auto hi = doc["window"].at("hi").get<std::vector<double>>();
    prob.window_lo = Eigen::Map<const Vec>(lo.data(), static_cast<Eigen::Index>(lo.size()));
    prob.window_hi = Eigen::Map<const Vec>(hi.data(), static_cast<Eigen::Index>(hi.size()));
  } else {
    prob.window_lo = Vec::Constant(dim, -2.0);
    prob.window_hi = Vec::Constant(dim, 2.0);
  }

  if (doc.contains("initializations")) {
    for (const auto& p : doc["initializations"]) {
      const auto coords = p.get<std::vector<double>>();
      prob.builtin_inits.push_back(
          Eigen::Map<const Vec>(coords.data(), static_cast<Eigen::Index>(coords.size())));
    }
  }
  if (prob.builtin_inits.empty())
    prob.builtin_inits.push_back(Vec::Zero(dim));
  return prob;
}

ProblemInstance load_problem(const RunConfig& cfg) {
  ProblemInstance prob;
  if (cfg.problem == "toy") {
    ToyProblem toy = toy_problem();
    prob.name = "toy";
    prob.objectives = {std::move(toy.loss1), std::move(toy.loss2)};
    prob.window_lo = toy.window_lo;
    prob.window_hi = toy.window_hi;
    prob.builtin_inits = toy_initializations();
  } else if (cfg.problem == "quad_pair") {
    QuadPairProblem quad = quad_pair_problem();
    prob.name = "quad_pair";
    prob.objectives = quad.game.objectives;
    prob.window_lo = quad.window_lo;
    prob.window_hi = quad.window_hi;
    prob.builtin_inits = quad_pair_initializations();
  } else if (cfg.problem == "custom") {
    if (cfg.problem_file.empty())
      throw ConfigError("problem = custom requires problem.file");
    prob = load_custom_problem(cfg.problem_file);
  } else {
    throw ConfigError("problem '" + cfg.problem +
                      "' is not one of toy, quad_pair, custom");
  }

  if (cfg.transform_task) {
    const int task = *cfg.transform_task;
    if (task < 0 || task >= static_cast<int>(prob.objectives.size()))
      throw ConfigError("transform.task " + std::to_string(task) +
                        " out of range for " + std::to_string(prob.objectives.size()) +
                        " objectives");
    prob.objectives[static_cast<size_t>(task)] =
        transform_objective(prob.objectives[static_cast<size_t>(task)], cfg.transform);
  }
  return prob;
}

Trajectory run_single(const std::vector<Objective>& objectives, const Vec& x0,
                      const AggregatorSpec& agg, const StepSchedule& sched,
                      long max_iters, double stationarity_tol) {
  Trajectory traj;
  Vec x = x0;
  GradientBundle bundle;
  bundle.labels.reserve(objectives.size());
  for (const Objective& o : objectives) bundle.labels.push_back(o.label);

  for (long k = 0;; ++k) {
    if (!is_finite(x)) throw NumericError("iterate has non-finite coordinates", k);

    TrajectoryRecord rec;
    rec.iter = k;
    rec.point = x;
    bundle.grads.clear();
    for (const Objective& o : objectives) {
      const double v = o.value(x);
      if (!std::isfinite(v))
        throw NumericError("objective '" + o.label + "' returned a non-finite value", k);
      rec.values.push_back(v);
      bundle.grads.push_back(o.grad(x));
      if (!is_finite(bundle.grads.back()))
        throw NumericError("gradient of '" + o.label + "' is non-finite", k);
    }
    const SimplexMinNorm mn = simplex_min_norm(bundle.grads);
    rec.residual = mn.residual;
    traj.records.push_back(std::move(rec));

    if (mn.residual <= stationarity_tol) {
      traj.terminated_by = Termination::ResidualBelowTol;
      break;
    }
    if (k >= max_iters) {
      traj.terminated_by = Termination::MaxIters;
      break;
    }
    x += sched.at(k + 1) * aggregate(agg, bundle);
  }
  return traj;
}

int thread_cap(int fallback) {
  const char* raw = std::getenv("BARGAIN_OPT_THREADS");
  if (raw == nullptr) return fallback;
  int parsed = 0;
  const auto [end, ec] = std::from_chars(raw, raw + std::strlen(raw), parsed);
  if (ec != std::errc() || *end != '\0' || parsed < 1) return fallback;
  return parsed;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");

  if (traj.records.empty()) {
    out << "iter,residual\n";
    return;
  }
  const Eigen::Index dim = traj.records.front().point.size();
  const size_t ntasks = traj.records.front().values.size();
  out << "iter";
  for (Eigen::Index i = 0; i < dim; ++i) out << ",x" << i;
  for (size_t i = 0; i < ntasks; ++i) out << ",loss_" << i;
  out << ",residual\n";
  for (const TrajectoryRecord& rec : traj.records) {
    out << rec.iter;
    for (Eigen::Index i = 0; i < dim; ++i) out << ',' << format_double(rec.point(i));
    for (const double v : rec.values) out << ',' << format_double(v);
    out << ',' << format_double(rec.residual) << '\n';
  }
  if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error("'" + path + "' is empty, expected a CSV header");

  int dim = 0, ntasks = 0;
  {
    std::stringstream hs(header);
    std::string col;
    while (std::getline(hs, col, ',')) {
      if (col.rfind("x", 0) == 0 && col.size() > 1) ++dim;
      if (col.rfind("loss_", 0) == 0) ++ntasks;
    }
  }

  Trajectory traj;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != 2 + dim + ntasks)
      throw std::runtime_error("'" + path + "': malformed row '" + line + "'");
    TrajectoryRecord rec;
    rec.iter = std::stol(cells[0]);
    rec.point = Vec(dim);
    for (int i = 0; i < dim; ++i) rec.point(i) = std::stod(cells[1 + i]);
    for (int i = 0; i < ntasks; ++i) rec.values.push_back(std::stod(cells[1 + dim + i]));
    rec.residual = std::stod(cells.back());
    traj.records.push_back(std::move(rec));
  }
  return traj;
}

namespace {

ordered_json vec_to_json(const Vec& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

const char* termination_name(Termination t) {
  return t == Termination::ResidualBelowTol ? "residual_below_tol" : "max_iters";
}

}  // namespace

void write_report_json(const RunReport& report, const RunConfig& cfg,
                       const std::string& path) {
  ordered_json doc;
  doc["problem"] = cfg.problem;
  doc["aggregator"] = cfg.aggregator.name();
  doc["schedule"] = cfg.schedule.describe();
  doc["transform"] =
      cfg.transform_task ? cfg.transform.describe() + " on task " +
                               std::to_string(*cfg.transform_task)
                         : "none";
  doc["seed"] = cfg.seed;
  doc["stationarity_tol"] = cfg.stationarity_tol;
  doc["stationary_fraction"] = report.stationary_fraction;

  ordered_json inits = ordered_json::array();
  for (const InitResult& r : report.inits) {
    ordered_json entry;
    entry["index"] = r.index;
    entry["initialization"] = vec_to_json(r.initialization);
    entry["final_point"] = vec_to_json(r.trajectory.back().point);
    entry["final_values"] = r.trajectory.back().values;
    entry["residual"] = r.certificate.residual;
    entry["beta"] = vec_to_json(r.certificate.beta);
    entry["is_stationary"] = r.certificate.is_stationary;
    entry["iterations"] = r.iterations;
    entry["terminated_by"] = termination_name(r.terminated_by);
    inits.push_back(std::move(entry));
  }
  doc["initializations"] = std::move(inits);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
}

RunReport run_experiment(const RunConfig& cfg) {
  const ProblemInstance prob = load_problem(cfg);
  const std::vector<Vec>& inits =
      cfg.initializations.empty() ? prob.builtin_inits : cfg.initializations;
  if (inits.empty()) throw ConfigError("no initializations to run");
  for (const Vec& x0 : inits)
    if (x0.size() != prob.window_lo.size())
      throw ConfigError("initialization dimension does not match the problem");

  std::filesystem::create_directories(cfg.output_dir);

  RunReport report;
  report.inits.resize(inits.size());
  for (const Objective& o : prob.objectives) report.objective_labels.push_back(o.label);

  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  size_t failed_index = 0;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= inits.size() || failed.load()) return;
      try {
        const auto start = std::chrono::steady_clock::now();
        InitResult r;
        r.index = static_cast<int>(i);
        r.initialization = inits[i];
        r.trajectory = run_single(prob.objectives, inits[i], cfg.aggregator,
                                  cfg.schedule, cfg.max_iters, cfg.stationarity_tol);
        r.iterations = r.trajectory.back().iter;
        r.terminated_by = r.trajectory.terminated_by;
        r.certificate = stationarity_residual(prob.objectives,
                                              r.trajectory.back().point,
                                              cfg.stationarity_tol);
        r.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        write_trajectory_csv(r.trajectory, cfg.output_dir + "/trajectory_" +
                                               std::to_string(i) + ".csv");
        report.inits[i] = std::move(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) {
          first_error = std::current_exception();
          failed_index = i;
        }
        return;
      }
    }
  };

  const int nthreads =
      std::min<int>(thread_cap(static_cast<int>(inits.size())),
                    static_cast<int>(inits.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failed.load()) {
    // report the failing initialization without flattening the error category
    const std::string prefix = "initialization " + std::to_string(failed_index) + ": ";
    try {
      std::rethrow_exception(first_error);
    } catch (const NumericError& e) {
      throw NumericError::prefixed(prefix, e);
    } catch (const std::domain_error& e) {
      throw std::domain_error(prefix + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error(prefix + e.what());
    }
  }

  int stationary = 0;
  for (const InitResult& r : report.inits)
    if (r.certificate.is_stationary) ++stationary;
  report.stationary_fraction =
      static_cast<double>(stationary) / static_cast<double>(report.inits.size());

  write_report_json(report, cfg, cfg.output_dir + "/report.json");
  if (prob.objectives.size() == 2) {
    const FrontSample front =
        sample_front_2d(prob.objectives, prob.window_lo, prob.window_hi, cfg.front_steps);
    render_plot_svg(report, front, cfg.output_dir + "/plot.svg");
  }
  return report;
}

}  // namespace bargain
