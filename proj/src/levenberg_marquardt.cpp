// Copyright 2026 the planecal authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "planecal/levenberg_marquardt.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "planecal/errors.hpp"

namespace planecal {

const char* to_string(LmStatus status) {
  switch (status) {
    case LmStatus::ConvergedGradient:
      return "converged_gradient";
    case LmStatus::ConvergedStep:
      return "converged_step";
    case LmStatus::MaxIterations:
      return "max_iterations";
    case LmStatus::NumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& residual,
                                           const Eigen::VectorXd& x,
                                           double step) {
  const Eigen::Index rows = residual(x).size();
  Eigen::MatrixXd jac(rows, x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += step;
    xm(j) -= step;
    jac.col(j) = (residual(xp) - residual(xm)) / (2.0 * step);
  }
  return jac;
}

namespace {

void cross_check_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x,
                          const Eigen::MatrixXd& analytic,
                          const LmConfig& config) {
  const Eigen::MatrixXd numeric =
      finite_difference_jacobian(residual, x, config.finite_difference_step);
  const double scale = std::max(analytic.norm(), numeric.norm());
  const double diff = (analytic - numeric).norm();
  if (scale > 0.0 && diff > config.check_jacobian_rel_tol * scale) {
    throw NumericalFailureError(
        "analytic Jacobian disagrees with finite differences (relative error " +
        std::to_string(diff / scale) + ")");
  }
}

}  // namespace

LmReport levenberg_marquardt(const ResidualFn& residual,
                             const JacobianFn& jacobian, Eigen::VectorXd& x,
                             const LmConfig& config) {
  LmReport report;

  Eigen::VectorXd r = residual(x);
  if (!r.allFinite()) {
    report.status = LmStatus::NumericalFailure;
    return report;
  }
  double cost = r.squaredNorm();
  report.initial_cost = cost;
  report.cost_history.push_back(cost);

  double lambda = config.damping_initial;

  auto evaluate_jacobian = [&](const Eigen::VectorXd& at) -> Eigen::MatrixXd {
    if (!jacobian) {
      return finite_difference_jacobian(residual, at,
                                        config.finite_difference_step);
    }
    Eigen::MatrixXd jac = jacobian(at);
    if (config.check_jacobian) {
      cross_check_jacobian(residual, at, jac, config);
    }
    return jac;
  };

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    const Eigen::MatrixXd jac = evaluate_jacobian(x);
    if (!jac.allFinite()) {
      report.status = LmStatus::NumericalFailure;
      report.final_cost = cost;
      return report;
    }

    const Eigen::VectorXd gradient = jac.transpose() * r;
    report.final_gradient_norm = gradient.lpNorm<Eigen::Infinity>();
    if (report.final_gradient_norm < config.gradient_tolerance) {
      report.status = LmStatus::ConvergedGradient;
      report.final_cost = cost;
      return report;
    }

    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-12);

    // Try steps with increasing damping until one reduces the cost.
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd augmented = jtj;
      augmented.diagonal() += lambda * diag;
      const Eigen::VectorXd step = augmented.ldlt().solve(-gradient);
      if (!step.allFinite()) {
        report.status = LmStatus::NumericalFailure;
        report.final_cost = cost;
        return report;
      }

      const Eigen::VectorXd x_new = x + step;
      const Eigen::VectorXd r_new = residual(x_new);
      const double cost_new =
          r_new.allFinite() ? r_new.squaredNorm()
                            : std::numeric_limits<double>::infinity();

      if (cost_new <= cost) {
        const double step_norm = step.norm();
        x = x_new;
        r = r_new;
        cost = cost_new;
        lambda = std::max(lambda * config.damping_decrease, 1e-15);
        accepted = true;
        ++report.iterations;
        report.cost_history.push_back(cost);
        if (step_norm <
            config.step_tolerance * (x.norm() + config.step_tolerance)) {
          report.status = LmStatus::ConvergedStep;
          report.final_cost = cost;
          return report;
        }
      } else {
        lambda *= config.damping_increase;
        if (lambda > 1e16) {
          // No direction reduces the cost any further; treat as converged
          // by step size (the step has shrunk below representable progress).
          report.status = LmStatus::ConvergedStep;
          report.final_cost = cost;
          return report;
        }
      }
    }
  }

  report.status = LmStatus::MaxIterations;
  report.final_cost = cost;
  return report;
}

}  // namespace planecal
