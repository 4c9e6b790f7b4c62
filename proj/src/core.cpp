#include "bargain/core.hpp"

#include <cmath>
#include <limits>

namespace bargain {

bool is_finite(const Vec& v) { return v.allFinite(); }

MonotoneTransform::MonotoneTransform(Kind kind, double shift, double exponent)
    : kind_(kind), shift_(shift), exponent_(exponent),
      domain_lower_(-std::numeric_limits<double>::infinity()) {
  if (kind_ == Kind::SignedPower || kind_ == Kind::ShiftedPower) {
    if (!(exponent_ > 1.0))
      throw std::invalid_argument("power transform requires exponent > 1");
  }
  if (kind_ == Kind::ShiftedPower) domain_lower_ = -shift_;
}

MonotoneTransform MonotoneTransform::identity() {
  return MonotoneTransform(Kind::Identity, 0.0, 1.0);
}

MonotoneTransform MonotoneTransform::signed_power(double exponent) {
  return MonotoneTransform(Kind::SignedPower, 0.0, exponent);
}

MonotoneTransform MonotoneTransform::shifted_power(double shift, double exponent) {
  return MonotoneTransform(Kind::ShiftedPower, shift, exponent);
}

MonotoneTransform MonotoneTransform::exponential() {
  return MonotoneTransform(Kind::Exponential, 0.0, 1.0);
}

bool MonotoneTransform::in_domain(double s) const noexcept {
  if (!std::isfinite(s)) return false;
  if (kind_ == Kind::ShiftedPower) return s > domain_lower_;
  return true;
}

double MonotoneTransform::apply(double s) const {
  if (!in_domain(s))
    throw std::domain_error(describe() + ": argument " + std::to_string(s) +
                            " outside validity interval");
  switch (kind_) {
    case Kind::Identity:
      return s;
    case Kind::SignedPower:
      return std::copysign(std::pow(std::abs(s), exponent_), s);
    case Kind::ShiftedPower:
      return std::pow(shift_ + s, exponent_);
    case Kind::Exponential:
      return std::exp(s);
  }
  return s;  // unreachable
}

double MonotoneTransform::derivative(double s) const {
  if (!in_domain(s))
    throw std::domain_error(describe() + ": argument " + std::to_string(s) +
                            " outside validity interval");
  switch (kind_) {
    case Kind::Identity:
      return 1.0;
    case Kind::SignedPower:
      return exponent_ * std::pow(std::abs(s), exponent_ - 1.0);
    case Kind::ShiftedPower:
      return exponent_ * std::pow(shift_ + s, exponent_ - 1.0);
    case Kind::Exponential:
      return std::exp(s);
  }
  return 1.0;  // unreachable
}

std::string MonotoneTransform::describe() const {
  switch (kind_) {
    case Kind::Identity:
      return "identity";
    case Kind::SignedPower:
      return "signed_power(" + std::to_string(exponent_) + ")";
    case Kind::ShiftedPower:
      return "shifted_power(" + std::to_string(shift_) + "," +
             std::to_string(exponent_) + ")";
    case Kind::Exponential:
      return "exponential";
  }
  return "unknown";
}

double apply_transform(const MonotoneTransform& t, double s) { return t.apply(s); }

Objective transform_objective(const Objective& o, const MonotoneTransform& t) {
  Objective out;
  out.label = t.describe() + "(" + o.label + ")";
  out.value = [o, t](const Vec& x) { return t.apply(o.value(x)); };
  out.grad = [o, t](const Vec& x) -> Vec {
    return t.derivative(o.value(x)) * o.grad(x);
  };
  return out;
}

Vec fd_gradient(const Objective& o, const Vec& p, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_gradient requires step > 0");
  Vec g(p.size());
  Vec probe = p;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    probe(i) = p(i) + step;
    const double hi = o.value(probe);
    probe(i) = p(i) - step;
    const double lo = o.value(probe);
    probe(i) = p(i);
    g(i) = (hi - lo) / (2.0 * step);
  }
  return g;
}

StepSchedule::StepSchedule(Kind kind, double scale, long offset)
    : kind_(kind), scale_(scale), offset_(offset) {
  if (!(scale_ > 0.0)) throw std::invalid_argument("step scale must be > 0");
  if (offset_ < 0) throw std::invalid_argument("schedule offset must be >= 0");
}

StepSchedule StepSchedule::constant(double alpha) {
  return StepSchedule(Kind::Constant, alpha, 0);
}

StepSchedule StepSchedule::robbins_monro(double c, long offset) {
  return StepSchedule(Kind::RobbinsMonro, c, offset);
}

double StepSchedule::at(long k) const {
  if (k < 1) throw std::invalid_argument("schedule index is 1-based");
  if (kind_ == Kind::Constant) return scale_;
  return scale_ / static_cast<double>(k + offset_);
}

std::string StepSchedule::describe() const {
  if (kind_ == Kind::Constant) return "constant(" + std::to_string(scale_) + ")";
  return "robbins_monro(" + std::to_string(scale_) + "," + std::to_string(offset_) + ")";
}

}  // namespace bargain
