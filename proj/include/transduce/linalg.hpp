// Copyright 2026 The transduce Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense numerical kernels shared by the propagators.

#include <cstddef>
#include <functional>

#include <Eigen/Dense>

#include "transduce/operators.hpp"

namespace transduce {

struct ExpmInfo {
  double norm1 = 0.0;         ///< 1-norm of the input matrix
  int squarings = 0;
  double result_norm1 = 0.0;  ///< 1-norm of the result
};

/// Matrix exponential by Pade-13 scaling and squaring (Higham 2005).
/// Throws ConvergenceError when the input or output is not finite.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a, ExpmInfo* info = nullptr);
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a, ExpmInfo* info = nullptr);

struct GmresOptions {
  double rel_tol = 1e-12;
  std::size_t restart = 40;
  std::size_t max_iterations = 400;
};

struct GmresResult {
  std::size_t iterations = 0;
  double residual = 0.0;  ///< relative residual of the (left-)preconditioned system
  bool converged = false;
};

using LinearMap = std::function<CVector(const CVector&)>;

/// Restarted GMRES for A x = b with an optional left preconditioner M^-1.
/// `x` carries the initial guess on entry.
GmresResult gmres(const LinearMap& apply_a, const CVector& b, CVector& x,
                  const LinearMap& apply_m_inv, const GmresOptions& options = {});

/// Solves K Y + Y K^dagger = R for fixed K through a complex Schur form,
/// processing columns backwards (Bartels-Stewart).
class SylvesterSolver {
 public:
  explicit SylvesterSolver(const CMatrix& k);
  CMatrix solve(const CMatrix& r) const;

 private:
  CMatrix q_;
  CMatrix t_;
};

}  // namespace transduce
