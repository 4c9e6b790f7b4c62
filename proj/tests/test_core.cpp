#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bargain/core.hpp"

using bargain::MonotoneTransform;
using bargain::Objective;
using bargain::StepSchedule;
using bargain::Vec;

namespace {

Objective square_1d() {
  return Objective{[](const Vec& x) { return x(0) * x(0); },
                   [](const Vec& x) -> Vec { return 2.0 * x; }, "square"};
}

Vec point1(double v) {
  Vec p(1);
  p << v;
  return p;
}

}  // namespace

TEST_CASE("transform values match the closed forms") {
  CHECK(bargain::apply_transform(MonotoneTransform::signed_power(4), -2.0) ==
        doctest::Approx(-16.0).epsilon(1e-15));
  CHECK(bargain::apply_transform(MonotoneTransform::identity(), 3.7) == 3.7);
  CHECK(bargain::apply_transform(MonotoneTransform::exponential(), 0.0) == 1.0);
  CHECK(bargain::apply_transform(MonotoneTransform::shifted_power(5.0, 4.0), -1.0) ==
        doctest::Approx(256.0));
}

TEST_CASE("transform domain violations are hard errors") {
  const MonotoneTransform t = MonotoneTransform::shifted_power(5.0, 4.0);
  CHECK_NOTHROW(t.apply(-4.999));
  CHECK_THROWS_AS(t.apply(-5.0), std::domain_error);
  CHECK_THROWS_AS(t.apply(-6.0), std::domain_error);
  CHECK_THROWS_AS(t.derivative(-6.0), std::domain_error);
  CHECK_THROWS_AS(MonotoneTransform::signed_power(4).apply(
                      std::numeric_limits<double>::quiet_NaN()),
                  std::domain_error);
}

TEST_CASE("power transforms require exponent > 1") {
  CHECK_THROWS_AS(MonotoneTransform::signed_power(1.0), std::invalid_argument);
  CHECK_THROWS_AS(MonotoneTransform::shifted_power(2.0, 0.5), std::invalid_argument);
}

TEST_CASE("transforms are strictly increasing on a sampled grid") {
  std::mt19937_64 rng(7);
  const MonotoneTransform transforms[] = {
      MonotoneTransform::identity(), MonotoneTransform::signed_power(4.0),
      MonotoneTransform::signed_power(3.0), MonotoneTransform::shifted_power(5.0, 4.0),
      MonotoneTransform::exponential()};
  for (const MonotoneTransform& t : transforms) {
    CAPTURE(t.describe());
    const double lo = std::isfinite(t.domain_lower()) ? t.domain_lower() + 1e-9 : -20.0;
    std::uniform_real_distribution<double> dist(lo, 20.0);
    std::vector<double> grid(200);
    for (double& s : grid) s = dist(rng);
    std::sort(grid.begin(), grid.end());
    for (size_t i = 1; i < grid.size(); ++i) {
      REQUIRE(t.apply(grid[i - 1]) < t.apply(grid[i]));
    }
    // positive derivative on the interior (sampled; continuous draws never
    // hit the single zero-derivative point of signed_power exactly)
    for (const double s : grid) REQUIRE(t.derivative(s) > 0.0);
  }
}

TEST_CASE("transform derivative agrees with central differences") {
  const MonotoneTransform transforms[] = {MonotoneTransform::signed_power(4.0),
                                          MonotoneTransform::shifted_power(5.0, 4.0),
                                          MonotoneTransform::exponential()};
  for (const MonotoneTransform& t : transforms) {
    CAPTURE(t.describe());
    for (double s : {-3.0, -0.7, 0.4, 2.5}) {
      const double h = 1e-6;
      const double fd = (t.apply(s + h) - t.apply(s - h)) / (2.0 * h);
      CHECK(t.derivative(s) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("transform_objective applies the chain rule analytically") {
  const Objective o = square_1d();
  const Objective cubed = transform_objective(o, MonotoneTransform::signed_power(3.0));
  CHECK(cubed.value(point1(2.0)) == doctest::Approx(64.0).epsilon(1e-15));
  CHECK(cubed.grad(point1(2.0))(0) == doctest::Approx(192.0).epsilon(1e-14));

  const Objective same = transform_objective(o, MonotoneTransform::identity());
  CHECK(same.value(point1(2.0)) == 4.0);
  CHECK(same.grad(point1(2.0))(0) == 4.0);
}

TEST_CASE("positive transforms never change the gradient direction") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.3, 4.0);
  const Objective o{[](const Vec& x) { return x.squaredNorm() + 2.0; },
                    [](const Vec& x) -> Vec { return 2.0 * x; }, "bowl"};
  const MonotoneTransform transforms[] = {MonotoneTransform::signed_power(4.0),
                                          MonotoneTransform::shifted_power(5.0, 4.0),
                                          MonotoneTransform::exponential()};
  for (const MonotoneTransform& t : transforms) {
    const Objective to = transform_objective(o, t);
    for (int rep = 0; rep < 50; ++rep) {
      Vec p(3);
      for (int i = 0; i < 3; ++i) p(i) = dist(rng);
      const Vec g = o.grad(p);
      const Vec tg = to.grad(p);
      REQUIRE(g.norm() > 0.0);
      REQUIRE(tg.norm() > 0.0);
      const Vec diff = g / g.norm() - tg / tg.norm();
      REQUIRE(diff.lpNorm<Eigen::Infinity>() <= 1e-12);
    }
  }
}

TEST_CASE("fd_gradient on simple oracles") {
  const Objective o = square_1d();
  CHECK(bargain::fd_gradient(o, point1(1.0), 1e-5)(0) ==
        doctest::Approx(2.0).epsilon(1e-8));

  const Objective constant{[](const Vec&) { return 4.2; },
                           [](const Vec& x) -> Vec { return Vec::Zero(x.size()); },
                           "const"};
  Vec p(3);
  p << 0.3, -1.2, 2.0;
  CHECK(bargain::fd_gradient(constant, p, 1e-5).norm() == 0.0);

  CHECK_THROWS_AS(bargain::fd_gradient(o, point1(1.0), 0.0), std::invalid_argument);
}

TEST_CASE("schedules emit positive steps with the right law") {
  const StepSchedule c = StepSchedule::constant(0.25);
  CHECK(c.at(1) == 0.25);
  CHECK(c.at(1000) == 0.25);

  const StepSchedule rm = StepSchedule::robbins_monro(2.0, 3);
  CHECK(rm.at(1) == doctest::Approx(0.5));
  CHECK(rm.at(7) == doctest::Approx(0.2));
  for (long k : {1L, 10L, 1000L, 1000000L}) CHECK(rm.at(k) > 0.0);

  CHECK_THROWS_AS(StepSchedule::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(StepSchedule::robbins_monro(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(StepSchedule::robbins_monro(1.0, -1), std::invalid_argument);
  CHECK_THROWS_AS(rm.at(0), std::invalid_argument);
}

TEST_CASE("robbins_monro partial sums diverge while squares stay summable") {
  const StepSchedule rm = StepSchedule::robbins_monro(1.0);
  double sum = 0.0, sum_sq = 0.0;
  for (long k = 1; k <= 1000000; ++k) {
    const double a = rm.at(k);
    sum += a;
    sum_sq += a * a;
  }
  CHECK(sum >= 13.0);
  CHECK(sum_sq <= 1.6449342);  // pi^2/6
}
