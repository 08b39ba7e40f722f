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

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "transduce/errors.hpp"
#include "transduce/linalg.hpp"

namespace {

using namespace transduce;

Eigen::MatrixXd random_real(Eigen::Index n, double scale, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = scale * g(gen);
  return a;
}

CMatrix random_complex(Eigen::Index n, double scale, unsigned seed) {
  return CMatrix(random_real(n, scale, seed).cast<Complex>()) +
         Complex(0, 1) * random_real(n, scale, seed + 1).cast<Complex>();
}

TEST(Expm, MatchesEigenReference) {
  for (double scale : {1e-3, 0.3, 5.0, 60.0}) {
    const Eigen::MatrixXd a = random_real(12, scale / 12.0, 3);
    const Eigen::MatrixXd ref = a.exp();
    ExpmInfo info;
    EXPECT_LT((expm(a, &info) - ref).norm(), 1e-12 * ref.norm()) << scale;
    const CMatrix c = random_complex(9, scale / 9.0, 5);
    const CMatrix cref = c.exp();
    EXPECT_LT((expm(c) - cref).norm(), 1e-12 * cref.norm()) << scale;
  }
}

TEST(Expm, SkewHermitianIsUnitary) {
  const CMatrix h = random_complex(10, 20.0, 9);
  const CMatrix u = expm(CMatrix(Complex(0, -1) * (h + h.adjoint())));
  EXPECT_LT((u * u.adjoint() - CMatrix::Identity(10, 10)).norm(), 1e-12);
}

TEST(Expm, RejectsNonFinite) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 1) = std::nan("");
  EXPECT_THROW(expm(a), ConvergenceError);
}

TEST(Gmres, SolvesNonsymmetricSystem) {
  const Eigen::Index n = 60;
  const CMatrix a = random_complex(n, 0.1, 21) + 3.0 * CMatrix::Identity(n, n);
  const CVector b = random_complex(n, 1.0, 23).col(0);
  CVector x;
  const LinearMap apply = [&](const CVector& v) { return CVector(a * v); };
  const GmresResult r = gmres(apply, b, x, LinearMap{}, GmresOptions{1e-13, 15, 600});
  EXPECT_TRUE(r.converged);
  EXPECT_LT((a * x - b).norm(), 1e-11 * b.norm());
}

TEST(Sylvester, SolvesLyapunovLikeEquation) {
  const Eigen::Index n = 14;
  const CMatrix k = random_complex(n, 1.0, 31) - 8.0 * CMatrix::Identity(n, n);
  const CMatrix r = random_complex(n, 1.0, 33);
  const SylvesterSolver s(k);
  const CMatrix y = s.solve(r);
  EXPECT_LT((k * y + y * k.adjoint() - r).norm(), 1e-12 * r.norm());
}

}  // namespace
