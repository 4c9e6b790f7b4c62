#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bargain/harness.hpp"
#include "bargain/problems.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitConfigError = 1;
constexpr int kExitNumericError = 2;

const char* termination_name(bargain::Termination t) {
  return t == bargain::Termination::ResidualBelowTol ? "residual_below_tol"
                                                     : "max_iters";
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            long seed_override, bool has_seed) {
  bargain::RunConfig cfg = bargain::parse_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (has_seed) {
    cfg.seed = static_cast<unsigned long>(seed_override);
    cfg.aggregator.seed = cfg.seed;
  }

  const bargain::RunReport report = bargain::run_experiment(cfg);
  for (const bargain::InitResult& r : report.inits) {
    std::printf("init %d: iters=%ld residual=%s stationary=%s terminated_by=%s "
                "wall=%.3fs\n",
                r.index, r.iterations,
                bargain::format_double(r.certificate.residual).c_str(),
                r.certificate.is_stationary ? "yes" : "no",
                termination_name(r.terminated_by), r.wall_seconds);
  }
  std::printf("stationary fraction: %g\n", report.stationary_fraction);
  std::printf("outputs written to %s\n", cfg.output_dir.c_str());
  return 0;
}

int cmd_front(const std::string& problem, int steps, const std::string& out_path) {
  bargain::RunConfig cfg;
  cfg.problem = problem;
  const bargain::ProblemInstance prob = bargain::load_problem(cfg);
  if (prob.objectives.size() != 2)
    throw bargain::ConfigError("front sampling needs a 2-objective problem");
  const bargain::FrontSample front = bargain::sample_front_2d(
      prob.objectives, prob.window_lo, prob.window_hi, steps);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
  out << "x0,x1,loss_0,loss_1\n";
  for (const bargain::FrontSample::Entry& e : front.entries) {
    out << bargain::format_double(e.point(0)) << ','
        << bargain::format_double(e.point(1)) << ',' << bargain::format_double(e.f1)
        << ',' << bargain::format_double(e.f2) << '\n';
  }
  std::printf("front: %zu non-dominated samples (grid %dx%d) -> %s\n",
              front.entries.size(), steps, steps, out_path.c_str());
  return 0;
}

int cmd_check_gradients(const std::string& problem) {
  bargain::RunConfig cfg;
  cfg.problem = problem;
  const bargain::ProblemInstance prob = bargain::load_problem(cfg);

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double margin = 1e-3;
  bool all_ok = true;

  for (const bargain::Objective& o : prob.objectives) {
    double worst = 0.0;
    int accepted = 0;
    while (accepted < 100) {
      bargain::Vec p(prob.window_lo.size());
      for (Eigen::Index i = 0; i < p.size(); ++i)
        p(i) = prob.window_lo(i) +
               unit(rng) * (prob.window_hi(i) - prob.window_lo(i));
      // keep clear of the gate and log-clamp kinks of the toy losses
      if (problem == "toy") {
        const double u1 = 0.5 * (-p(0) - 7.0) + std::tanh(p(1));
        const double u2 = 0.5 * (-p(0) + 3.0) + std::tanh(p(1)) + 2.0;
        if (std::abs(p(1)) < margin || std::abs(u1) < margin + 1e-6 ||
            std::abs(u2) < margin + 1e-6)
          continue;
      }
      ++accepted;
      const bargain::Vec analytic = o.grad(p);
      const bargain::Vec fd = bargain::fd_gradient(o, p, 1e-6);
      const double rel =
          (analytic - fd).norm() / std::max(1.0, analytic.norm());
      worst = std::max(worst, rel);
    }
    const bool ok = worst <= 1e-5;
    all_ok = all_ok && ok;
    std::printf("%-24s max relative error %.3e  [%s]\n", o.label.c_str(), worst,
                ok ? "ok" : "FAIL");
  }
  return all_ok ? 0 : kExitNumericError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective bargaining optimizer"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  long seed_override = 0;
  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("--config", config_path, "Path to the run config")->required();
  run->add_option("--out", out_override, "Override output_dir from the config");
  auto* seed_opt = run->add_option("--seed", seed_override, "Override the config seed");

  std::string front_problem = "toy", front_out = "front.csv";
  int front_steps = 400;
  auto* front = app.add_subcommand("front", "Sample the Pareto front of a problem");
  front->add_option("--problem", front_problem, "toy or quad_pair");
  front->add_option("--steps", front_steps, "Grid steps per axis")
      ->check(CLI::Range(2, 100000));
  front->add_option("--out", front_out, "Output CSV path");

  std::string check_problem = "toy";
  auto* check = app.add_subcommand("check-gradients",
                                   "Compare analytic gradients to central differences");
  check->add_option("--problem", check_problem, "toy or quad_pair");

  auto* version = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message or help text
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (run->parsed())
      return cmd_run(config_path, out_override, seed_override, seed_opt->count() > 0);
    if (front->parsed()) return cmd_front(front_problem, front_steps, front_out);
    if (check->parsed()) return cmd_check_gradients(check_problem);
    if (version->parsed()) {
      std::printf("bargain_opt %s\n", kVersion);
      return 0;
    }
  } catch (const bargain::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const bargain::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumericError;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumericError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfigError;
  }
  return 0;
}
