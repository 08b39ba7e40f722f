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

#include "transduce/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "transduce/errors.hpp"

namespace transduce {

namespace {

// Pade-13 numerator coefficients and the matching scaling threshold.
constexpr double kPade13[14] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                670442572800.0,      33522128640.0,       1323241920.0,
                                40840800.0,          960960.0,            16380.0,
                                182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

template <typename Matrix>
double norm1(const Matrix& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

template <typename Matrix>
Matrix expm_impl(const Matrix& input, ExpmInfo* info) {
  if (input.rows() != input.cols()) {
    throw InvalidArgument("expm: matrix must be square");
  }
  if (!input.allFinite()) {
    throw ConvergenceError("expm: input matrix has non-finite entries");
  }
  const Eigen::Index n = input.rows();
  const double a_norm = n == 0 ? 0.0 : norm1(input);
  int s = 0;
  if (a_norm > kTheta13) {
    s = static_cast<int>(std::ceil(std::log2(a_norm / kTheta13)));
  }
  const Matrix a = input / std::ldexp(1.0, s);
  const Matrix ident = Matrix::Identity(n, n);
  const double* b = kPade13;

  Matrix a2 = a * a;
  Matrix a4 = a2 * a2;
  Matrix a6 = a4 * a2;

  Matrix tmp = b[13] * a6 + b[11] * a4 + b[9] * a2;
  Matrix u = a6 * tmp;
  u += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident;
  u = (a * u).eval();

  tmp = b[12] * a6 + b[10] * a4 + b[8] * a2;
  Matrix v = a6 * tmp;
  v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;

  a2.resize(0, 0);
  a4.resize(0, 0);
  a6.resize(0, 0);
  tmp = v - u;
  v += u;
  u.resize(0, 0);
  Matrix result = Eigen::PartialPivLU<Matrix>(tmp).solve(v);
  tmp.resize(0, 0);
  v.resize(0, 0);

  for (int k = 0; k < s; ++k) {
    result = (result * result).eval();
  }
  const double r_norm = n == 0 ? 0.0 : norm1(result);
  if (info != nullptr) {
    info->norm1 = a_norm;
    info->squarings = s;
    info->result_norm1 = r_norm;
  }
  if (!std::isfinite(r_norm)) {
    throw ConvergenceError("expm: result is not finite (input 1-norm " + std::to_string(a_norm) +
                           ", " + std::to_string(s) + " squarings)");
  }
  return result;
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& a, ExpmInfo* info) { return expm_impl(a, info); }

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a, ExpmInfo* info) { return expm_impl(a, info); }

GmresResult gmres(const LinearMap& apply_a, const CVector& b, CVector& x,
                  const LinearMap& apply_m_inv, const GmresOptions& options) {
  const auto precondition = [&](const CVector& v) {
    return apply_m_inv ? apply_m_inv(v) : v;
  };
  const Eigen::Index n = b.size();
  if (x.size() != n) x = CVector::Zero(n);
  const std::size_t m = std::max<std::size_t>(1, options.restart);

  GmresResult result;
  const double b_norm = precondition(b).norm();
  if (b_norm == 0.0) {
    x.setZero();
    result.converged = true;
    return result;
  }

  while (result.iterations < options.max_iterations) {
    CVector r = precondition(b - apply_a(x));
    double beta = r.norm();
    result.residual = beta / b_norm;
    if (result.residual <= options.rel_tol) {
      result.converged = true;
      return result;
    }
    std::vector<CVector> basis;
    basis.reserve(m + 1);
    basis.push_back(r / beta);
    CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(m + 1), static_cast<Eigen::Index>(m));
    std::vector<Complex> cs(m), sn(m);
    CVector g = CVector::Zero(static_cast<Eigen::Index>(m + 1));
    g(0) = beta;

    std::size_t j = 0;
    for (; j < m && result.iterations < options.max_iterations; ++j) {
      ++result.iterations;
      CVector w = precondition(apply_a(basis[j]));
      const auto jj = static_cast<Eigen::Index>(j);
      for (std::size_t i = 0; i <= j; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        h(ii, jj) = basis[i].dot(w);
        w -= h(ii, jj) * basis[i];
      }
      h(jj + 1, jj) = w.norm();
      for (std::size_t i = 0; i < j; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const Complex t = std::conj(cs[i]) * h(ii, jj) + std::conj(sn[i]) * h(ii + 1, jj);
        h(ii + 1, jj) = -sn[i] * h(ii, jj) + cs[i] * h(ii + 1, jj);
        h(ii, jj) = t;
      }
      const double denom = std::hypot(std::abs(h(jj, jj)), std::abs(h(jj + 1, jj)));
      if (denom == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = h(jj, jj) / denom;
        sn[j] = h(jj + 1, jj) / denom;
      }
      h(jj, jj) = denom;
      h(jj + 1, jj) = 0.0;
      g(jj + 1) = -sn[j] * g(jj);
      g(jj) = std::conj(cs[j]) * g(jj);
      result.residual = std::abs(g(jj + 1)) / b_norm;
      const double w_norm = w.norm();
      if (result.residual <= options.rel_tol || w_norm == 0.0) {
        ++j;
        break;
      }
      basis.push_back(w / w_norm);
    }

    const auto k = static_cast<Eigen::Index>(j);
    const CVector y =
        h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    for (Eigen::Index i = 0; i < k; ++i) {
      x += y(i) * basis[static_cast<std::size_t>(i)];
    }
    if (result.residual <= options.rel_tol) {
      result.converged = true;
      return result;
    }
  }
  return result;
}

SylvesterSolver::SylvesterSolver(const CMatrix& k) {
  if (k.rows() != k.cols()) {
    throw InvalidArgument("SylvesterSolver: matrix must be square");
  }
  Eigen::ComplexSchur<CMatrix> schur(k);
  if (schur.info() != Eigen::Success) {
    throw ConvergenceError("SylvesterSolver: Schur decomposition failed");
  }
  q_ = schur.matrixU();
  t_ = schur.matrixT();
}

CMatrix SylvesterSolver::solve(const CMatrix& r) const {
  const Eigen::Index n = t_.rows();
  if (r.rows() != n || r.cols() != n) {
    throw InvalidArgument("SylvesterSolver::solve: shape mismatch");
  }
  // T Y + Y T^dagger = Q^dagger R Q, column j couples to columns k > j only.
  const CMatrix rt = q_.adjoint() * r * q_;
  CMatrix y(n, n);
  CVector rhs(n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    rhs = rt.col(j);
    const Eigen::Index tail = n - 1 - j;
    if (tail > 0) {
      rhs.noalias() -= y.rightCols(tail) * t_.row(j).tail(tail).adjoint();
    }
    const Complex shift = std::conj(t_(j, j));
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      Complex acc = rhs(i);
      for (Eigen::Index l = i + 1; l < n; ++l) acc -= t_(i, l) * rhs(l);
      const Complex diag = t_(i, i) + shift;
      if (diag == Complex(0.0)) {
        throw ConvergenceError("SylvesterSolver: singular shifted system");
      }
      rhs(i) = acc / diag;
    }
    y.col(j) = rhs;
  }
  return q_ * y * q_.adjoint();
}

}  // namespace transduce
