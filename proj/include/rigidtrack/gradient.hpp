// Gradient evaluation of scalar objectives over a flat parameter vector,
// plus the finite-difference verification harness every objective must pass.

#pragma once

#include "rigidtrack/params.hpp"

#include <Eigen/Core>

#include <string>

namespace rigidtrack {

/// A scalar function of a flat parameter vector that can evaluate its own
/// reverse-mode gradient. Implementations hold no mutable state across calls.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual double value(const Eigen::VectorXd& theta) const = 0;

  /// Returns the value; fills grad (resized to theta.size()).
  virtual double value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const = 0;

  /// Optional coordinate naming for diagnostics.
  virtual const ParamLayout* param_layout() const { return nullptr; }
};

struct GradientResult {
  double value = 0.0;
  Eigen::VectorXd grad;
};

/// Evaluates value and gradient; throws if either is non-finite, naming the
/// first offending coordinate.
GradientResult gradient(const Objective& objective, const Eigen::VectorXd& theta);

struct GradCheckReport {
  bool pass = false;
  double max_rel_err = 0.0;          // over coordinates checked relatively
  double max_abs_err = 0.0;          // over small-gradient coordinates
  Eigen::Index worst_index = -1;
  std::string worst_name;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  Eigen::Index checked = 0;
  Eigen::Index failures = 0;

  std::string summary() const;
};

/// Central finite differences per coordinate against the analytic gradient.
/// A coordinate passes if |g - fd| / max(|g|, |fd|) < rel_tol, or
/// |g - fd| < abs_tol when both magnitudes are below small_grad.
GradCheckReport check_gradients(const Objective& objective, const Eigen::VectorXd& theta,
                                double h = 1e-5, double rel_tol = 1e-3, double abs_tol = 1e-6,
                                double small_grad = 1e-3);

}  // namespace rigidtrack
