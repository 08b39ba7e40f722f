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

#include <gtest/gtest.h>

#include <cmath>

#include "transduce/density_matrix.hpp"
#include "transduce/errors.hpp"
#include "transduce/operators.hpp"

namespace {

using namespace transduce;

TEST(Operators, DestroyTwoLevels) {
  const Operator a = destroy(2);
  EXPECT_EQ(a(0, 0), Complex(0));
  EXPECT_EQ(a(0, 1), Complex(1));
  EXPECT_EQ(a(1, 0), Complex(0));
  EXPECT_EQ(a(1, 1), Complex(0));
}

TEST(Operators, DestroyThreeLevels) {
  const Operator a = destroy(3);
  EXPECT_DOUBLE_EQ(a(1, 2).real(), std::sqrt(2.0));
  CVector two = CVector::Zero(3);
  two(2) = 1.0;
  const CVector out = a.matrix() * two;
  EXPECT_NEAR(std::abs(out(1) - std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out(0)) + std::abs(out(2)), 0.0, 1e-15);
}

TEST(Operators, NumberIsDiagonalCount) {
  const Operator n = number(4);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(n(k, k).real(), double(k));
  EXPECT_LT((n.matrix() - (create(4) * destroy(4)).matrix()).norm(), 1e-14);
}

TEST(Operators, PauliAlgebra) {
  const Operator sm = sigma_minus();
  const Operator sp = sigma_plus();
  EXPECT_LT((sm * sm).matrix().norm(), 1e-15);
  const Operator proj = sp * sm;
  EXPECT_EQ(proj(1, 1), Complex(1));
  EXPECT_EQ(proj(0, 0), Complex(0));
  EXPECT_LT((anticommutator(sm, sp).matrix() - CMatrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LT((sm.matrix() - destroy(2).matrix()).norm(), 1e-15);
}

TEST(Operators, CanonicalCommutatorAwayFromCutoff) {
  const std::size_t n = 6;
  const CMatrix c = commutator(destroy(n), create(n)).matrix();
  for (std::size_t k = 0; k + 1 < n; ++k) EXPECT_NEAR(c(k, k).real(), 1.0, 1e-14);
  EXPECT_NEAR(c(n - 1, n - 1).real(), 1.0 - double(n), 1e-14);
}

TEST(Operators, EmbedIdentityIsIdentity) {
  const HilbertLayout layout{2, 3, 2, 2};
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const Operator e = embed(identity(layout.dim(k)), k, layout);
    EXPECT_LT((e.matrix() - CMatrix::Identity(24, 24)).norm(), 1e-15);
  }
}

TEST(Operators, EmbeddedNumbersCommute) {
  const HilbertLayout layout{3, 2, 2, 3};
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t k = 0; k < 4; ++k) {
      if (j == k) continue;
      const Operator c = commutator(embed(number(layout.dim(j)), j, layout),
                                    embed(number(layout.dim(k)), k, layout));
      EXPECT_LT(c.matrix().norm(), 1e-14);
    }
  }
}

TEST(Operators, EmbedTraceFactorizes) {
  // Oracle: explicit Kronecker chain on (2, 2, 2, 2).
  const HilbertLayout layout{2, 2, 2, 2};
  CMatrix op(2, 2);
  op << Complex(1.5, 0.25), Complex(2, -1), Complex(0.5, 3), Complex(-0.75, 0.5);
  const Operator local(HilbertLayout{2}, op);
  for (std::size_t k = 0; k < 4; ++k) {
    const Operator e = embed(local, k, layout);
    EXPECT_NEAR(std::abs(e.trace() - op.trace() * 8.0), 0.0, 1e-13);
    CMatrix ref = CMatrix::Identity(1, 1);
    for (std::size_t j = 0; j < 4; ++j) {
      const CMatrix f = j == k ? op : CMatrix(CMatrix::Identity(2, 2));
      CMatrix next(ref.rows() * 2, ref.cols() * 2);
      for (Eigen::Index r = 0; r < ref.rows(); ++r) {
        for (Eigen::Index c = 0; c < ref.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = ref(r, c) * f;
      }
      ref = next;
    }
    EXPECT_LT((e.matrix() - ref).norm(), 1e-14);
  }
}

TEST(Operators, KronMatchesEmbedProduct) {
  const HilbertLayout layout{3, 2};
  const Operator k = kron(destroy(3), sigma_plus());
  const Operator e = embed(destroy(3), 0, layout) * embed(sigma_plus(), 1, layout);
  EXPECT_EQ(k.layout(), layout);
  EXPECT_LT((k.matrix() - e.matrix()).norm(), 1e-15);
}

TEST(Operators, LayoutIndexingLastFastest) {
  const HilbertLayout layout = HilbertLayout::transducer(3, 4, 3);
  EXPECT_EQ(layout.total_dim(), 72u);
  EXPECT_EQ(layout.index_of({0, 0, 0, 1}), 1u);
  EXPECT_EQ(layout.index_of({0, 0, 1, 0}), 3u);
  EXPECT_EQ(layout.index_of({1, 0, 0, 0}), 24u);
  const std::vector<std::size_t> levels{2, 3, 1, 2};
  EXPECT_EQ(layout.levels_of(layout.index_of(levels)), levels);
  EXPECT_TRUE(layout.is_transducer());
}

TEST(Operators, RejectsBadShapes) {
  EXPECT_THROW(HilbertLayout({2, 1}), InvalidArgument);
  EXPECT_THROW(HilbertLayout::transducer({3, 4, 3, 3}), InvalidArgument);
  EXPECT_THROW(Operator(HilbertLayout{2}, CMatrix::Zero(3, 3)), InvalidArgument);
  EXPECT_THROW(destroy(3) * destroy(2), InvalidArgument);
}

TEST(Operators, HermiticityDefect) {
  EXPECT_TRUE(number(5).is_hermitian());
  EXPECT_FALSE(destroy(3).is_hermitian());
  EXPECT_NEAR(destroy(3).hermiticity_defect(), std::sqrt(2.0), 1e-15);
}

TEST(DensityMatrixTest, Expectations) {
  const HilbertLayout layout{4};
  const DensityMatrix ground = DensityMatrix::basis_state(layout, {0});
  EXPECT_NEAR(std::abs(expectation(ground, number(4))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(expectation(ground, identity(layout)) - 1.0), 0.0, 1e-15);
  const DensityMatrix one = DensityMatrix::basis_state(layout, {1});
  EXPECT_NEAR(std::abs(expectation(one, number(4)) - 1.0), 0.0, 1e-15);
}

TEST(DensityMatrixTest, PureStateDiagnostics) {
  const HilbertLayout layout{2, 3};
  CVector psi(6);
  psi << 1.0, Complex(0, 2), 0.5, 0.0, Complex(-1, 1), 0.25;
  const DensityMatrix rho = DensityMatrix::pure(layout, psi);
  EXPECT_NEAR(rho.purity(), 1.0, 1e-14);
  const StateDiagnostics d = rho.diagnose();
  EXPECT_LT(d.trace_error, 1e-15);
  EXPECT_LT(d.hermiticity_defect, 1e-15);
  EXPECT_GT(d.min_eigenvalue, -1e-14);
}

TEST(DensityMatrixTest, DiagnoseSeesNegativeEigenvalue) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;
  const DensityMatrix rho(HilbertLayout{2}, m);
  EXPECT_NEAR(rho.diagnose().min_eigenvalue, -0.2, 1e-14);
}

}  // namespace
