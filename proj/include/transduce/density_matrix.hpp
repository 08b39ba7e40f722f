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

#include "transduce/operators.hpp"

namespace transduce {

/// Validity measures of a density matrix, evaluated at sample times.
struct StateDiagnostics {
  double trace_error = 0.0;         ///< |trace(rho) - 1|
  double hermiticity_defect = 0.0;  ///< max |rho - rho^dagger| entry
  double min_eigenvalue = 0.0;      ///< smallest eigenvalue of the Hermitian part
};

/// Density matrix on a composite space.
///
/// Construction only checks the shape; physical validity (Hermitian, unit
/// trace, positive) is measured by `diagnose()` so that numerical drift stays
/// observable instead of being silently projected away.
class DensityMatrix {
 public:
  DensityMatrix(HilbertLayout layout, CMatrix entries);

  /// |psi><psi| for a normalized copy of `psi`.
  static DensityMatrix pure(const HilbertLayout& layout, const CVector& psi);
  /// Product basis state |levels><levels|.
  static DensityMatrix basis_state(const HilbertLayout& layout,
                                   const std::vector<std::size_t>& levels);

  const HilbertLayout& layout() const noexcept { return layout_; }
  const CMatrix& matrix() const noexcept { return entries_; }
  std::size_t dim() const noexcept { return layout_.total_dim(); }

  Complex trace() const { return entries_.trace(); }
  /// trace(rho^2).
  double purity() const;
  StateDiagnostics diagnose() const;

 private:
  HilbertLayout layout_;
  CMatrix entries_;
};

}  // namespace transduce
