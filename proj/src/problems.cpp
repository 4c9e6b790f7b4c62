#include "bargain/problems.hpp"

#include <cmath>

namespace bargain {

namespace {

constexpr double kLogClamp = 1e-6;

// Shared pieces of the toy losses at one point. The losses are
//   L1 = c1*f1 + c2*g1,   L2 = c1*f2 + c2*g2
// with gates c1, c2 switching on the sign of theta_2.
struct ToyParts {
  double c1, dc1;  // dc* are d/dtheta2 of the gates
  double c2, dc2;
  double u1, u2;   // arguments of the clamped-log valleys; du/da = -0.5, du/db = sech^2(b)
  double du_db;
  double f1, f2;
  double g1, g2;
};

ToyParts toy_parts(double a, double b) {
  ToyParts p;
  const double th = std::tanh(0.5 * b);
  const double sech2_half = 1.0 - th * th;
  // max(x, 0) gates: ties resolve to the active (function) branch.
  p.c1 = std::max(th, 0.0);
  p.dc1 = (th >= 0.0) ? 0.5 * sech2_half : 0.0;
  p.c2 = std::max(-th, 0.0);
  p.dc2 = (-th >= 0.0) ? -0.5 * sech2_half : 0.0;

  const double tb = std::tanh(b);
  p.du_db = 1.0 - tb * tb;
  p.u1 = 0.5 * (-a - 7.0) + tb;
  p.u2 = 0.5 * (-a + 3.0) + tb + 2.0;
  p.f1 = std::log(std::max(std::abs(p.u1), kLogClamp)) + 6.0;
  p.f2 = std::log(std::max(std::abs(p.u2), kLogClamp)) + 6.0;

  p.g1 = ((-a + 7.0) * (-a + 7.0) + 0.1 * (-b - 8.0) * (-b - 8.0)) / 10.0 - 20.0;
  p.g2 = ((-a - 7.0) * (-a - 7.0) + 0.1 * (-b - 8.0) * (-b - 8.0)) / 10.0 - 20.0;
  return p;
}

double toy_value(const Vec& x, bool first) {
  const ToyParts p = toy_parts(x(0), x(1));
  return first ? p.c1 * p.f1 + p.c2 * p.g1 : p.c1 * p.f2 + p.c2 * p.g2;
}

Vec toy_grad(const Vec& x, bool first) {
  const double a = x(0), b = x(1);
  const ToyParts p = toy_parts(a, b);

  const double u = first ? p.u1 : p.u2;
  const double f = first ? p.f1 : p.f2;
  // d log(max(|u|, clamp)) = u'/u outside the clamp, 0 inside it.
  double df_da = 0.0, df_db = 0.0;
  if (std::abs(u) >= kLogClamp) {
    df_da = -0.5 / u;
    df_db = p.du_db / u;
  }

  const double g = first ? p.g1 : p.g2;
  const double dg_da = first ? (a - 7.0) / 5.0 : (a + 7.0) / 5.0;
  const double dg_db = 0.02 * (b + 8.0);

  Vec out(2);
  out(0) = p.c1 * df_da + p.c2 * dg_da;
  out(1) = f * p.dc1 + p.c1 * df_db + g * p.dc2 + p.c2 * dg_db;
  return out;
}

}  // namespace

ToyProblem toy_problem() {
  ToyProblem prob;
  prob.loss1 = Objective{[](const Vec& x) { return toy_value(x, true); },
                         [](const Vec& x) { return toy_grad(x, true); }, "L1"};
  prob.loss2 = Objective{[](const Vec& x) { return toy_value(x, false); },
                         [](const Vec& x) { return toy_grad(x, false); }, "L2"};
  prob.window_lo = Vec::Constant(2, -10.0);
  prob.window_hi = Vec::Constant(2, 10.0);
  return prob;
}

std::pair<Objective, Objective> toy_losses() {
  ToyProblem prob = toy_problem();
  return {std::move(prob.loss1), std::move(prob.loss2)};
}

std::vector<Vec> toy_initializations() {
  const double coords[][2] = {
      {-8.5, 7.5}, {-8.5, -5.0}, {9.0, 9.0}, {-7.5, -0.5}, {9.0, -1.0}};
  std::vector<Vec> inits;
  for (const auto& c : coords) {
    Vec p(2);
    p << c[0], c[1];
    inits.push_back(std::move(p));
  }
  return inits;
}

QuadPairProblem quad_pair_problem() {
  QuadPairProblem prob;
  auto make = [](double center_y, const char* label) {
    return Objective{
        [center_y](const Vec& x) {
          return x(0) * x(0) + (x(1) - center_y) * (x(1) - center_y);
        },
        [center_y](const Vec& x) -> Vec {
          Vec g(2);
          g << 2.0 * x(0), 2.0 * (x(1) - center_y);
          return g;
        },
        label};
  };
  prob.game.objectives = {make(1.0, "l1"), make(-1.0, "l2")};
  Vec top(2), bottom(2);
  top << 0.0, 1.0;
  bottom << 0.0, -1.0;
  prob.game.preferred_states = {top, bottom};
  prob.window_lo = Vec::Constant(2, -1.0);
  prob.window_hi = Vec::Constant(2, 1.0);
  return prob;
}

BargainingGame quad_pair() { return quad_pair_problem().game; }

std::vector<Vec> quad_pair_initializations() {
  const double coords[][2] = {
      {0.5, 0.9}, {-0.8, 0.2}, {0.9, -0.7}, {-0.3, -0.9}, {0.7, 0.4}};
  std::vector<Vec> inits;
  for (const auto& c : coords) {
    Vec p(2);
    p << c[0], c[1];
    inits.push_back(std::move(p));
  }
  return inits;
}

}  // namespace bargain
