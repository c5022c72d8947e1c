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

#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace planecal {

/// Residual vector r(x); the solver minimizes sum(r_k^2).
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Jacobian dr/dx, one row per residual.
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct LmConfig {
  int max_iterations = 200;
  double gradient_tolerance = 1e-10;  // on ||J^T r||_inf
  double step_tolerance = 1e-12;      // on ||dx|| relative to ||x||
  double damping_initial = 1e-3;
  double damping_increase = 10.0;   // on rejected step
  double damping_decrease = 0.1;    // on accepted step
  // When set, every analytic Jacobian evaluation is cross-checked against
  // central finite differences and a mismatch raises NumericalFailureError.
  bool check_jacobian = false;
  double check_jacobian_rel_tol = 1e-5;
  double finite_difference_step = 1e-6;
};

enum class LmStatus {
  ConvergedGradient,
  ConvergedStep,
  MaxIterations,
  NumericalFailure,
};

const char* to_string(LmStatus status);

struct LmReport {
  LmStatus status = LmStatus::MaxIterations;
  int iterations = 0;  // accepted steps
  double initial_cost = 0.0;
  double final_cost = 0.0;
  double final_gradient_norm = 0.0;
  /// Cost after each accepted step; non-increasing by construction.
  std::vector<double> cost_history;
};

/// Dense Levenberg-Marquardt with multiplicative damping of diag(J^T J).
/// `jacobian` may be null, in which case central finite differences are
/// used. Non-finite residuals or Jacobians at the current iterate yield
/// status NumericalFailure (a non-finite *initial* residual does too).
LmReport levenberg_marquardt(const ResidualFn& residual,
                             const JacobianFn& jacobian, Eigen::VectorXd& x,
                             const LmConfig& config = {});

/// Central-difference Jacobian used for the no-analytic-Jacobian path and
/// for cross-checking analytic Jacobians.
Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& residual,
                                           const Eigen::VectorXd& x,
                                           double step = 1e-6);

}  // namespace planecal
