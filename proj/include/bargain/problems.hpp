#ifndef BARGAIN_PROBLEMS_HPP
#define BARGAIN_PROBLEMS_HPP

#include <utility>
#include <vector>

#include "bargain/core.hpp"
#include "bargain/dibs.hpp"

namespace bargain {

// Two-objective nonconvex benchmark on the plane. Each loss gates between a
// clamped log valley (theta_2 > 0) and a shallow parabolic bowl
// (theta_2 < 0); on the line theta_2 = 0 both losses vanish identically.
// Gradients are analytic, with the inactive branch of every max() gate
// contributing zero.
struct ToyProblem {
  Objective loss1;
  Objective loss2;
  Vec window_lo;  // plotting window, also the sampling region for checks
  Vec window_hi;
};

ToyProblem toy_problem();
std::pair<Objective, Objective> toy_losses();

// Fixed starting points for the toy study, spread over the plotting window.
// Deterministic across calls.
std::vector<Vec> toy_initializations();

// Symmetric quadratic pair l1 = x^2 + (y-1)^2, l2 = x^2 + (y+1)^2 with exact
// preferred states (0,1) and (0,-1). Every point (0,y), y in [-1,1], is
// Pareto stationary; only (0,0) is balanced.
struct QuadPairProblem {
  BargainingGame game;
  Vec window_lo;
  Vec window_hi;
};

QuadPairProblem quad_pair_problem();
BargainingGame quad_pair();

std::vector<Vec> quad_pair_initializations();

}  // namespace bargain

#endif  // BARGAIN_PROBLEMS_HPP
