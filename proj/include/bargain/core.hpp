#ifndef BARGAIN_CORE_HPP
#define BARGAIN_CORE_HPP

#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace bargain {

// Optimization state / shared parameter vector. Dimension >= 1, entries finite.
using Vec = Eigen::VectorXd;

// Gradient norms below this threshold are treated as zero when normalizing.
// Only guards against literal 0/0; normalization itself is scale-free.
inline constexpr double kGradFloor = 1e-300;

bool is_finite(const Vec& v);

// Thrown when an iteration produces a non-finite value or gradient, or when
// an iterative solver diverges. Carries the offending iteration index.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, long iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  long iteration() const noexcept { return iteration_; }

  // Re-wraps an existing error with added context, keeping the message as-is.
  static NumericError prefixed(const std::string& prefix, const NumericError& inner) {
    return NumericError(RawTag{}, prefix + inner.what(), inner.iteration_);
  }

 private:
  struct RawTag {};
  NumericError(RawTag, const std::string& what, long iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  long iteration_;
};

// A differentiable scalar cost with hand-coded analytic gradient.
struct Objective {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::string label;
};

// Strictly increasing scalar rescaling of a loss, applied pointwise.
// Evaluation outside the validity interval is a hard error, never a clamp.
class MonotoneTransform {
 public:
  enum class Kind { Identity, SignedPower, ShiftedPower, Exponential };

  static MonotoneTransform identity();
  // h(s) = sign(s) * |s|^p, p > 1, valid on all reals.
  static MonotoneTransform signed_power(double exponent);
  // h(s) = (shift + s)^p, p > 1, valid on s > -shift.
  static MonotoneTransform shifted_power(double shift, double exponent);
  // h(s) = exp(s), valid on all reals.
  static MonotoneTransform exponential();

  double apply(double s) const;
  double derivative(double s) const;
  bool in_domain(double s) const noexcept;
  double domain_lower() const noexcept { return domain_lower_; }

  Kind kind() const noexcept { return kind_; }
  double exponent() const noexcept { return exponent_; }
  double shift() const noexcept { return shift_; }
  std::string describe() const;

 private:
  MonotoneTransform(Kind kind, double shift, double exponent);

  Kind kind_;
  double shift_;
  double exponent_;
  double domain_lower_;
};

double apply_transform(const MonotoneTransform& t, double s);

// Composes t with o. The gradient is propagated analytically via the chain
// rule, t'(o(x)) * grad o(x), so the positive scalar cancels exactly under
// normalization; it is never re-differenced.
Objective transform_objective(const Objective& o, const MonotoneTransform& t);

// Central-difference gradient estimate, the verification oracle for the
// analytic gradient oracles.
Vec fd_gradient(const Objective& o, const Vec& p, double step);

// Step-size sequence for the iterative solvers. robbins_monro emits
// alpha_k = c / (k + offset), which has divergent sum and convergent sum of
// squares for offset >= 0.
class StepSchedule {
 public:
  enum class Kind { Constant, RobbinsMonro };

  static StepSchedule constant(double alpha);
  static StepSchedule robbins_monro(double c, long offset = 0);

  // Step for iteration k, 1-based.
  double at(long k) const;

  Kind kind() const noexcept { return kind_; }
  double scale() const noexcept { return scale_; }
  long offset() const noexcept { return offset_; }
  std::string describe() const;

 private:
  StepSchedule(Kind kind, double scale, long offset);

  Kind kind_;
  double scale_;
  long offset_;
};

}  // namespace bargain

#endif  // BARGAIN_CORE_HPP
