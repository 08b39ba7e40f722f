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

#include "transduce/operators.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "transduce/density_matrix.hpp"
#include "transduce/errors.hpp"

namespace transduce {

namespace {

void require_same_layout(const HilbertLayout& a, const HilbertLayout& b, const char* what) {
  if (!(a == b)) {
    throw InvalidArgument(std::string(what) + ": layout mismatch");
  }
}

}  // namespace

HilbertLayout::HilbertLayout(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) {
    throw InvalidArgument("HilbertLayout: at least one subsystem is required");
  }
  for (std::size_t d : dims_) {
    if (d < 2) {
      throw InvalidArgument("HilbertLayout: invalid dimension " + std::to_string(d) +
                            " (every subsystem needs at least 2 levels)");
    }
    total_ *= d;
  }
}

HilbertLayout HilbertLayout::transducer(std::size_t microwave, std::size_t mechanical,
                                        std::size_t optical) {
  return HilbertLayout({microwave, mechanical, 2, optical});
}

HilbertLayout HilbertLayout::transducer(const std::array<std::size_t, kSubsystemCount>& dims) {
  if (dims[2] != 2) {
    throw InvalidArgument("HilbertLayout: electron dimension must be exactly 2, got " +
                          std::to_string(dims[2]));
  }
  return HilbertLayout({dims[0], dims[1], dims[2], dims[3]});
}

bool HilbertLayout::is_transducer() const noexcept {
  return dims_.size() == kSubsystemCount && dims_[2] == 2;
}

std::size_t HilbertLayout::index_of(const std::vector<std::size_t>& levels) const {
  if (levels.size() != dims_.size()) {
    throw InvalidArgument("HilbertLayout::index_of: expected " + std::to_string(dims_.size()) +
                          " levels");
  }
  std::size_t index = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (levels[k] >= dims_[k]) {
      throw InvalidArgument("HilbertLayout::index_of: level out of range");
    }
    index = index * dims_[k] + levels[k];
  }
  return index;
}

std::vector<std::size_t> HilbertLayout::levels_of(std::size_t index) const {
  if (index >= total_) {
    throw InvalidArgument("HilbertLayout::levels_of: index out of range");
  }
  std::vector<std::size_t> levels(dims_.size());
  for (std::size_t k = dims_.size(); k-- > 0;) {
    levels[k] = index % dims_[k];
    index /= dims_[k];
  }
  return levels;
}

Operator::Operator(HilbertLayout layout, CMatrix entries)
    : layout_(std::move(layout)), entries_(std::move(entries)) {
  const auto n = static_cast<Eigen::Index>(layout_.total_dim());
  if (entries_.rows() != n || entries_.cols() != n) {
    throw InvalidArgument("Operator: matrix shape does not match layout dimension " +
                          std::to_string(n));
  }
}

Operator Operator::adjoint() const { return Operator(layout_, entries_.adjoint()); }

double Operator::hermiticity_defect() const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

Operator& Operator::operator+=(const Operator& other) {
  require_same_layout(layout_, other.layout_, "Operator::operator+");
  entries_ += other.entries_;
  return *this;
}

Operator& Operator::operator-=(const Operator& other) {
  require_same_layout(layout_, other.layout_, "Operator::operator-");
  entries_ -= other.entries_;
  return *this;
}

Operator& Operator::operator*=(Complex scale) {
  entries_ *= scale;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_layout(a.layout(), b.layout(), "Operator::operator*");
  return Operator(a.layout(), a.matrix() * b.matrix());
}

Operator identity(std::size_t n) {
  HilbertLayout layout({n});
  return Operator(layout, CMatrix::Identity(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n)));
}

Operator destroy(std::size_t n) {
  HilbertLayout layout({n});
  const auto size = static_cast<Eigen::Index>(n);
  CMatrix m = CMatrix::Zero(size, size);
  for (Eigen::Index k = 0; k + 1 < size; ++k) {
    m(k, k + 1) = std::sqrt(static_cast<double>(k + 1));
  }
  return Operator(layout, std::move(m));
}

Operator create(std::size_t n) { return destroy(n).adjoint(); }

Operator number(std::size_t n) {
  HilbertLayout layout({n});
  const auto size = static_cast<Eigen::Index>(n);
  CMatrix m = CMatrix::Zero(size, size);
  for (Eigen::Index k = 0; k < size; ++k) {
    m(k, k) = static_cast<double>(k);
  }
  return Operator(layout, std::move(m));
}

Operator sigma_minus() { return destroy(2); }

Operator sigma_plus() { return create(2); }

Operator identity(const HilbertLayout& layout) {
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  return Operator(layout, CMatrix::Identity(n, n));
}

Operator adjoint(const Operator& op) { return op.adjoint(); }

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Operator anticommutator(const Operator& a, const Operator& b) { return a * b + b * a; }

Operator kron(const Operator& a, const Operator& b) {
  const CMatrix& x = a.matrix();
  const CMatrix& y = b.matrix();
  CMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    }
  }
  std::vector<std::size_t> dims = a.layout().dims();
  dims.insert(dims.end(), b.layout().dims().begin(), b.layout().dims().end());
  return Operator(HilbertLayout(std::move(dims)), std::move(out));
}

Operator embed(const Operator& op, std::size_t index, const HilbertLayout& layout) {
  if (index >= layout.size()) {
    throw InvalidArgument("embed: subsystem index " + std::to_string(index) + " out of range");
  }
  if (op.dim() != layout.dim(index)) {
    throw InvalidArgument("embed: operator dimension " + std::to_string(op.dim()) +
                          " does not match subsystem dimension " +
                          std::to_string(layout.dim(index)));
  }
  // Block structure I_left (x) op (x) I_right without materializing the
  // identities: row (l, r, s) couples to column (l, c, s).
  std::size_t left = 1;
  for (std::size_t k = 0; k < index; ++k) left *= layout.dim(k);
  std::size_t right = 1;
  for (std::size_t k = index + 1; k < layout.size(); ++k) right *= layout.dim(k);

  const std::size_t n = op.dim();
  const auto total = static_cast<Eigen::Index>(layout.total_dim());
  CMatrix out = CMatrix::Zero(total, total);
  for (std::size_t l = 0; l < left; ++l) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        const Complex v = op(r, c);
        if (v == Complex(0.0)) continue;
        for (std::size_t s = 0; s < right; ++s) {
          const auto row = static_cast<Eigen::Index>((l * n + r) * right + s);
          const auto col = static_cast<Eigen::Index>((l * n + c) * right + s);
          out(row, col) = v;
        }
      }
    }
  }
  return Operator(layout, std::move(out));
}

Complex expectation(const DensityMatrix& rho, const Operator& op) {
  require_same_layout(rho.layout(), op.layout(), "expectation");
  // trace(rho * op) without forming the product.
  return (rho.matrix().transpose().cwiseProduct(op.matrix())).sum();
}

DensityMatrix::DensityMatrix(HilbertLayout layout, CMatrix entries)
    : layout_(std::move(layout)), entries_(std::move(entries)) {
  const auto n = static_cast<Eigen::Index>(layout_.total_dim());
  if (entries_.rows() != n || entries_.cols() != n) {
    throw InvalidArgument("DensityMatrix: matrix shape does not match layout");
  }
}

DensityMatrix DensityMatrix::pure(const HilbertLayout& layout, const CVector& psi) {
  if (psi.size() != static_cast<Eigen::Index>(layout.total_dim())) {
    throw InvalidArgument("DensityMatrix::pure: state size does not match layout");
  }
  const double norm = psi.norm();
  if (!(norm > 0.0)) {
    throw InvalidArgument("DensityMatrix::pure: zero state vector");
  }
  const CVector unit = psi / norm;
  return DensityMatrix(layout, unit * unit.adjoint());
}

DensityMatrix DensityMatrix::basis_state(const HilbertLayout& layout,
                                         const std::vector<std::size_t>& levels) {
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  CMatrix m = CMatrix::Zero(n, n);
  const auto i = static_cast<Eigen::Index>(layout.index_of(levels));
  m(i, i) = 1.0;
  return DensityMatrix(layout, std::move(m));
}

double DensityMatrix::purity() const {
  return (entries_.transpose().cwiseProduct(entries_)).sum().real();
}

StateDiagnostics DensityMatrix::diagnose() const {
  StateDiagnostics d;
  d.trace_error = std::abs(entries_.trace() - Complex(1.0));
  d.hermiticity_defect = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  const CMatrix hermitian = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = solver.eigenvalues().minCoeff();
  return d;
}

}  // namespace transduce
