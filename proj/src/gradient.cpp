#include "rigidtrack/gradient.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rigidtrack {

namespace {

std::string coordinate_label(const Objective& objective, Eigen::Index idx) {
  if (const ParamLayout* layout = objective.param_layout()) {
    return layout->coordinate_name(idx);
  }
  return "theta[" + std::to_string(idx) + "]";
}

}  // namespace

GradientResult gradient(const Objective& objective, const Eigen::VectorXd& theta) {
  GradientResult out;
  out.value = objective.value_and_gradient(theta, out.grad);
  if (!std::isfinite(out.value)) {
    throw std::runtime_error("gradient: non-finite loss value");
  }
  for (Eigen::Index i = 0; i < out.grad.size(); ++i) {
    if (!std::isfinite(out.grad[i])) {
      throw std::runtime_error("gradient: non-finite gradient at " +
                               coordinate_label(objective, i) + " (flat index " +
                               std::to_string(i) + ")");
    }
  }
  return out;
}

std::string GradCheckReport::summary() const {
  std::ostringstream os;
  os << (pass ? "PASS" : "FAIL") << ": checked " << checked << " coordinates, " << failures
     << " failures, max_rel_err=" << max_rel_err << ", max_abs_err=" << max_abs_err;
  if (worst_index >= 0) {
    os << ", worst " << worst_name << " analytic=" << worst_analytic
       << " numeric=" << worst_numeric;
  }
  return os.str();
}

GradCheckReport check_gradients(const Objective& objective, const Eigen::VectorXd& theta,
                                double h, double rel_tol, double abs_tol, double small_grad) {
  GradCheckReport report;
  Eigen::VectorXd analytic;
  const double base = objective.value_and_gradient(theta, analytic);
  if (!std::isfinite(base)) {
    report.pass = false;
    report.worst_name = "loss value non-finite at theta";
    return report;
  }

  Eigen::VectorXd probe = theta;
  double worst_score = -1.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + h;
    const double f_plus = objective.value(probe);
    probe[i] = theta[i] - h;
    const double f_minus = objective.value(probe);
    probe[i] = theta[i];

    const double fd = (f_plus - f_minus) / (2.0 * h);
    const double g = analytic[i];
    const double diff = std::abs(g - fd);
    const double mag = std::max(std::abs(g), std::abs(fd));

    bool ok = true;
    double score = 0.0;
    if (mag < small_grad) {
      ok = diff < abs_tol;
      score = diff / abs_tol;
      report.max_abs_err = std::max(report.max_abs_err, diff);
    } else {
      const double rel = diff / mag;
      ok = rel < rel_tol;
      score = rel / rel_tol;
      report.max_rel_err = std::max(report.max_rel_err, rel);
    }
    ++report.checked;
    if (!ok) ++report.failures;
    if (!std::isfinite(fd) || !std::isfinite(g)) {
      ok = false;
      score = std::numeric_limits<double>::infinity();
      ++report.failures;
    }
    if (score > worst_score) {
      worst_score = score;
      report.worst_index = i;
      report.worst_name = coordinate_label(objective, i);
      report.worst_analytic = g;
      report.worst_numeric = fd;
    }
  }
  report.pass = report.failures == 0;
  return report;
}

}  // namespace rigidtrack
