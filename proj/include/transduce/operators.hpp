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

// Dense operator algebra on tensor products of truncated bosonic modes and
// two-level systems.
//
// Composite layouts built for the transducer always use the subsystem order
// (microwave, mechanical, electron, optical). Basis states are indexed in
// row-major order over that list, i.e. the last subsystem varies fastest,
// which is the ordering produced by left-to-right Kronecker products.

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

namespace transduce {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

enum class Subsystem : std::size_t { Microwave = 0, Mechanical = 1, Electron = 2, Optical = 3 };

inline constexpr std::size_t kSubsystemCount = 4;

/// Ordered subsystem dimensions of a tensor-product Hilbert space.
class HilbertLayout {
 public:
  /// Generic layout; every dimension must be at least 2.
  explicit HilbertLayout(std::vector<std::size_t> dims);
  HilbertLayout(std::initializer_list<std::size_t> dims)
      : HilbertLayout(std::vector<std::size_t>(dims)) {}

  /// Transducer layout (microwave, mechanical, electron, optical); the
  /// electron entry must be exactly 2.
  static HilbertLayout transducer(std::size_t microwave, std::size_t mechanical,
                                  std::size_t optical);
  static HilbertLayout transducer(const std::array<std::size_t, kSubsystemCount>& dims);

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t index) const { return dims_.at(index); }
  std::size_t dim(Subsystem s) const { return dim(static_cast<std::size_t>(s)); }
  std::size_t total_dim() const noexcept { return total_; }

  /// Flat basis index of a product state given per-subsystem levels.
  std::size_t index_of(const std::vector<std::size_t>& levels) const;
  std::vector<std::size_t> levels_of(std::size_t index) const;

  bool is_transducer() const noexcept;

  friend bool operator==(const HilbertLayout& a, const HilbertLayout& b) {
    return a.dims_ == b.dims_;
  }

 private:
  std::vector<std::size_t> dims_;
  std::size_t total_ = 1;
};

/// Dense complex square matrix tied to a layout. Immutable value type.
class Operator {
 public:
  Operator(HilbertLayout layout, CMatrix entries);

  const HilbertLayout& layout() const noexcept { return layout_; }
  const CMatrix& matrix() const noexcept { return entries_; }
  std::size_t dim() const noexcept { return layout_.total_dim(); }
  Complex operator()(std::size_t row, std::size_t col) const { return entries_(row, col); }

  Operator adjoint() const;
  Complex trace() const { return entries_.trace(); }
  /// Largest |A - A^dagger| entry.
  double hermiticity_defect() const;
  bool is_hermitian(double tol = 1e-10) const { return hermiticity_defect() <= tol; }

  Operator& operator+=(const Operator& other);
  Operator& operator-=(const Operator& other);
  Operator& operator*=(Complex scale);

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(Operator a, Complex s) { return a *= s; }
  friend Operator operator*(Complex s, Operator a) { return a *= s; }
  friend Operator operator*(const Operator& a, const Operator& b);

 private:
  HilbertLayout layout_;
  CMatrix entries_;
};

Operator identity(std::size_t n);
/// Truncated annihilation operator: entry (k, k+1) = sqrt(k+1).
Operator destroy(std::size_t n);
Operator create(std::size_t n);
Operator number(std::size_t n);
/// |g><e| in the {ground, excited} basis.
Operator sigma_minus();
Operator sigma_plus();

Operator identity(const HilbertLayout& layout);
Operator adjoint(const Operator& op);
Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);

/// I (x) ... (x) op (x) ... (x) I with `op` at position `index` of `layout`.
Operator embed(const Operator& op, std::size_t index, const HilbertLayout& layout);
inline Operator embed(const Operator& op, Subsystem s, const HilbertLayout& layout) {
  return embed(op, static_cast<std::size_t>(s), layout);
}

/// Kronecker product; the result layout concatenates both layouts.
Operator kron(const Operator& a, const Operator& b);

class DensityMatrix;

/// trace(rho * op).
Complex expectation(const DensityMatrix& rho, const Operator& op);

}  // namespace transduce
