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

#include "transduce/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "transduce/errors.hpp"
#include "transduce/linalg.hpp"

namespace transduce {

namespace {

constexpr Complex kI(0.0, 1.0);
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

SparseCMatrix to_sparse(const CMatrix& m) {
  return m.sparseView(Complex(1.0), 0.0);
}

SparseCMatrix sparse_identity(Eigen::Index n) {
  SparseCMatrix id(n, n);
  id.setIdentity();
  return id;
}

// Kronecker product of sparse matrices.
SparseCMatrix kron(const SparseCMatrix& a, const SparseCMatrix& b) {
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (Eigen::Index ka = 0; ka < a.outerSize(); ++ka) {
    for (SparseCMatrix::InnerIterator ia(a, ka); ia; ++ia) {
      for (Eigen::Index kb = 0; kb < b.outerSize(); ++kb) {
        for (SparseCMatrix::InnerIterator ib(b, kb); ib; ++ib) {
          triplets.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                                ia.value() * ib.value());
        }
      }
    }
  }
  SparseCMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

void require_layout(const HilbertLayout& a, const HilbertLayout& b, const char* what) {
  if (!(a == b)) {
    throw InvalidArgument(std::string(what) + ": layout mismatch");
  }
}

// No-jump generator K = -iH - (1/2) sum gamma c^dagger c.
CMatrix no_jump_generator(const Operator& h, const std::vector<CollapseChannel>& channels) {
  CMatrix k = -kI * h.matrix();
  for (const auto& ch : channels) {
    if (ch.rate == 0.0) continue;
    k -= 0.5 * ch.rate * (ch.op.matrix().adjoint() * ch.op.matrix());
  }
  return k;
}

}  // namespace

CMatrix lindblad_rhs(const DensityMatrix& rho, const Operator& h,
                     const std::vector<CollapseChannel>& channels) {
  require_layout(rho.layout(), h.layout(), "lindblad_rhs");
  const CMatrix& r = rho.matrix();
  const CMatrix& hm = h.matrix();
  CMatrix out = -kI * (hm * r - r * hm);
  for (const auto& ch : channels) {
    require_layout(rho.layout(), ch.op.layout(), "lindblad_rhs");
    if (ch.rate == 0.0) continue;
    const CMatrix& c = ch.op.matrix();
    const CMatrix cdc = c.adjoint() * c;
    out += 0.5 * ch.rate * (2.0 * c * r * c.adjoint() - cdc * r - r * cdc);
  }
  return out;
}

SparseCMatrix build_liouvillian(const Operator& h, const std::vector<CollapseChannel>& channels) {
  const std::size_t d = h.dim();
  if (d > kMaxLiouvillianDim) {
    throw InvalidArgument("build_liouvillian: dimension " + std::to_string(d) +
                          " exceeds the dense-superoperator guard of " +
                          std::to_string(kMaxLiouvillianDim));
  }
  const auto n = static_cast<Eigen::Index>(d);
  const SparseCMatrix id = sparse_identity(n);
  const SparseCMatrix hs = to_sparse(h.matrix());
  SparseCMatrix l = -kI * (kron(id, hs) - kron(SparseCMatrix(hs.transpose()), id));
  for (const auto& ch : channels) {
    require_layout(h.layout(), ch.op.layout(), "build_liouvillian");
    if (ch.rate == 0.0) continue;
    const SparseCMatrix c = to_sparse(ch.op.matrix());
    const SparseCMatrix cdc = to_sparse(ch.op.matrix().adjoint() * ch.op.matrix());
    const SparseCMatrix c_conj = c.conjugate();
    l += (0.5 * ch.rate) * (2.0 * kron(c_conj, c) - kron(id, cdc) -
                            kron(SparseCMatrix(cdc.transpose()), id));
  }
  l.prune(Complex(0.0), 0.0);
  l.makeCompressed();
  return l;
}

void ObservableSet::add(std::string name, Operator op) {
  if (!ops.empty()) {
    require_layout(ops.front().layout(), op.layout(), "ObservableSet::add");
  }
  names.push_back(std::move(name));
  ops.push_back(std::move(op));
}

std::size_t ObservableSet::index_of(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw InvalidArgument("ObservableSet: unknown observable '" + name + "'");
  }
  return static_cast<std::size_t>(it - names.begin());
}

ObservableSet ObservableSet::transducer(const HilbertLayout& layout) {
  if (!layout.is_transducer()) {
    throw InvalidArgument("ObservableSet::transducer: not a four-subsystem transducer layout");
  }
  ObservableSet set;
  auto numbers = number_operators(layout);
  set.add("p_mw", numbers[0]);
  set.add("p_m", numbers[1]);
  set.add("p_e", numbers[2]);
  set.add("p_opt", numbers[3]);
  set.add("c_opt", optical_annihilation(layout));
  set.add("a_mw", embed(destroy(layout.dim(0)), Subsystem::Microwave, layout));
  set.occupation = 3;
  set.amplitude = 4;
  return set;
}

const std::vector<Complex>& Trajectory::series(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw InvalidArgument("Trajectory: unknown observable '" + name + "'");
  }
  return values[static_cast<std::size_t>(it - names.begin())];
}

StateDiagnostics Trajectory::worst_diagnostics() const {
  StateDiagnostics worst;
  worst.min_eigenvalue = diagnostics.empty() ? 0.0 : diagnostics.front().min_eigenvalue;
  for (const auto& d : diagnostics) {
    worst.trace_error = std::max(worst.trace_error, d.trace_error);
    worst.hermiticity_defect = std::max(worst.hermiticity_defect, d.hermiticity_defect);
    worst.min_eigenvalue = std::min(worst.min_eigenvalue, d.min_eigenvalue);
  }
  return worst;
}

HermitianBasis::HermitianBasis(std::size_t d) : d_(d) {
  if (d == 0) throw InvalidArgument("HermitianBasis: dimension must be positive");
}

Eigen::VectorXd HermitianBasis::coordinates(const CMatrix& rho) const {
  const auto d = static_cast<Eigen::Index>(d_);
  if (rho.rows() != d || rho.cols() != d) {
    throw InvalidArgument("HermitianBasis::coordinates: shape mismatch");
  }
  Eigen::VectorXd x(d * d);
  const double s2 = std::sqrt(2.0);
  for (Eigen::Index i = 0; i < d; ++i) x(i) = rho(i, i).real();
  Eigen::Index k = d;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      x(k++) = s2 * rho(i, j).real();
      x(k++) = s2 * rho(i, j).imag();
    }
  }
  return x;
}

CMatrix HermitianBasis::matrix(const Eigen::VectorXd& x) const {
  const auto d = static_cast<Eigen::Index>(d_);
  if (x.size() != d * d) {
    throw InvalidArgument("HermitianBasis::matrix: size mismatch");
  }
  CMatrix rho(d, d);
  for (Eigen::Index i = 0; i < d; ++i) rho(i, i) = x(i);
  Eigen::Index k = d;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const Complex v = kInvSqrt2 * Complex(x(k), x(k + 1));
      rho(i, j) = v;
      rho(j, i) = std::conj(v);
      k += 2;
    }
  }
  return rho;
}

CVector HermitianBasis::weights(const CMatrix& op) const {
  const auto d = static_cast<Eigen::Index>(d_);
  if (op.rows() != d || op.cols() != d) {
    throw InvalidArgument("HermitianBasis::weights: shape mismatch");
  }
  CVector w(d * d);
  for (Eigen::Index i = 0; i < d; ++i) w(i) = op(i, i);
  Eigen::Index k = d;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      w(k++) = kInvSqrt2 * (op(j, i) + op(i, j));
      w(k++) = kInvSqrt2 * kI * (op(j, i) - op(i, j));
    }
  }
  return w;
}

SparseCMatrix HermitianBasis::unitary() const {
  const auto d = static_cast<Eigen::Index>(d_);
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(static_cast<std::size_t>(2 * d * d));
  for (Eigen::Index i = 0; i < d; ++i) t.emplace_back(i + i * d, i, 1.0);
  Eigen::Index k = d;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      t.emplace_back(i + j * d, k, kInvSqrt2);
      t.emplace_back(j + i * d, k, kInvSqrt2);
      t.emplace_back(i + j * d, k + 1, kI * kInvSqrt2);
      t.emplace_back(j + i * d, k + 1, -kI * kInvSqrt2);
      k += 2;
    }
  }
  SparseCMatrix u(d * d, d * d);
  u.setFromTriplets(t.begin(), t.end());
  return u;
}

Eigen::MatrixXd HermitianBasis::real_generator(const SparseCMatrix& liouvillian) const {
  const auto n = static_cast<Eigen::Index>(d_ * d_);
  if (liouvillian.rows() != n || liouvillian.cols() != n) {
    throw InvalidArgument("HermitianBasis::real_generator: shape mismatch");
  }
  const SparseCMatrix u = unitary();
  const SparseCMatrix ud = u.adjoint();
  const SparseCMatrix lu = liouvillian * u;
  const SparseCMatrix r = ud * lu;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  double max_real = 0.0;
  double max_imag = 0.0;
  for (Eigen::Index k = 0; k < r.outerSize(); ++k) {
    for (SparseCMatrix::InnerIterator it(r, k); it; ++it) {
      out(it.row(), it.col()) = it.value().real();
      max_real = std::max(max_real, std::abs(it.value().real()));
      max_imag = std::max(max_imag, std::abs(it.value().imag()));
    }
  }
  if (max_imag > 1e-9 * std::max(1.0, max_real)) {
    throw InvalidArgument("HermitianBasis::real_generator: generator does not preserve "
                          "Hermiticity (imaginary part " + std::to_string(max_imag) + ")");
  }
  return out;
}

const std::vector<Complex>& Engine::interior(std::size_t state, std::size_t observable) const {
  const auto it = std::find(tracked_.begin(), tracked_.end(), observable);
  if (it == tracked_.end()) {
    throw InvalidArgument("Engine::interior: observable is not integrated");
  }
  return interior_.at(state).at(static_cast<std::size_t>(it - tracked_.begin()));
}

void Engine::init_interior(const ObservableSet& observables, std::size_t states,
                           std::size_t substeps) {
  if (substeps == 0 || (substeps & (substeps - 1)) != 0) {
    throw InvalidArgument("Engine: substeps must be a power of two");
  }
  substeps_ = substeps;
  tracked_.clear();
  for (const std::size_t o : {observables.occupation, observables.amplitude}) {
    if (o != ObservableSet::npos) tracked_.push_back(o);
  }
  interior_.assign(states, std::vector<std::vector<Complex>>(
                               tracked_.size(), std::vector<Complex>(substeps - 1)));
}

std::size_t substeps_for(double dt, double f, double points_per_period) {
  if (!(dt > 0.0) || !(f >= 0.0) || !(points_per_period > 0.0)) {
    throw InvalidArgument("substeps_for: need dt > 0, f >= 0, points_per_period > 0");
  }
  const double needed = points_per_period * dt * f;
  std::size_t m = 1;
  while (static_cast<double>(m) < needed) m *= 2;
  return m;
}

ExpmEngine::ExpmEngine(const SparseCMatrix& liouvillian, std::size_t d, double dt,
                       const std::vector<DensityMatrix>& states, const ObservableSet& observables,
                       std::size_t substeps)
    : basis_(d), dt_(dt) {
  if (!(dt > 0.0)) throw InvalidArgument("ExpmEngine: dt must be positive");
  if (states.empty()) throw InvalidArgument("ExpmEngine: no states to propagate");
  init_interior(observables, states.size(), substeps);
  Eigen::MatrixXd sub;  // exp(R dt / substeps)
  {
    Eigen::MatrixXd generator = basis_.real_generator(liouvillian);
    generator *= dt / static_cast<double>(substeps);
    ExpmInfo info;
    sub = expm(generator, &info);
  }
  step_ = sub;
  for (std::size_t m = 1; m < substeps; m *= 2) step_ = (step_ * step_).eval();
  const auto n = static_cast<Eigen::Index>(basis_.size());
  x_.resize(n, static_cast<Eigen::Index>(states.size()));
  for (std::size_t s = 0; s < states.size(); ++s) {
    if (states[s].dim() != d) throw InvalidArgument("ExpmEngine: state dimension mismatch");
    x_.col(static_cast<Eigen::Index>(s)) = basis_.coordinates(states[s].matrix());
  }
  scratch_.resizeLike(x_);
  weights_.resize(n, static_cast<Eigen::Index>(observables.ops.size()));
  for (std::size_t o = 0; o < observables.ops.size(); ++o) {
    weights_.col(static_cast<Eigen::Index>(o)) = basis_.weights(observables.ops[o].matrix());
  }
  if (substeps > 1 && !tracked_.empty()) {
    // Columns: for each interior point j, then each tracked observable, Re and Im
    // of sub^(j+1)^T w, so that readouts_^T x gives <o> at t + (j+1) dt / substeps.
    const auto width = static_cast<Eigen::Index>(2 * tracked_.size());
    Eigen::MatrixXd v(n, width);
    for (std::size_t t = 0; t < tracked_.size(); ++t) {
      const auto w = weights_.col(static_cast<Eigen::Index>(tracked_[t]));
      v.col(static_cast<Eigen::Index>(2 * t)) = w.real();
      v.col(static_cast<Eigen::Index>(2 * t + 1)) = w.imag();
    }
    readouts_.resize(n, width * static_cast<Eigen::Index>(substeps - 1));
    const Eigen::MatrixXd sub_t = sub.transpose();
    for (std::size_t j = 0; j + 1 < substeps; ++j) {
      v = (sub_t * v).eval();
      readouts_.middleCols(width * static_cast<Eigen::Index>(j), width) = v;
    }
  }
}

void ExpmEngine::advance() {
  if (readouts_.size() > 0) {
    readout_values_.noalias() = readouts_.transpose() * x_;
    for (std::size_t s = 0; s < interior_.size(); ++s) {
      for (std::size_t t = 0; t < tracked_.size(); ++t) {
        for (std::size_t j = 0; j + 1 < substeps_; ++j) {
          const auto row = static_cast<Eigen::Index>(2 * (j * tracked_.size() + t));
          interior_[s][t][j] = {readout_values_(row, static_cast<Eigen::Index>(s)),
                                readout_values_(row + 1, static_cast<Eigen::Index>(s))};
        }
      }
    }
  }
  scratch_.noalias() = step_ * x_;
  x_.swap(scratch_);
}

Complex ExpmEngine::expectation(std::size_t state, std::size_t observable) const {
  const auto x = x_.col(static_cast<Eigen::Index>(state));
  const auto w = weights_.col(static_cast<Eigen::Index>(observable));
  return {w.real().dot(x), w.imag().dot(x)};
}

CMatrix ExpmEngine::density(std::size_t state) const {
  return basis_.matrix(x_.col(static_cast<Eigen::Index>(state)));
}

RkEngine::RkEngine(const Operator& h, const std::vector<CollapseChannel>& channels, double dt,
                   const std::vector<DensityMatrix>& states, const ObservableSet& observables,
                   const RkTolerances& tolerances, std::size_t substeps)
    : dt_(dt), tol_(tolerances) {
  if (!(dt > 0.0)) throw InvalidArgument("RkEngine: dt must be positive");
  if (states.empty()) throw InvalidArgument("RkEngine: no states to propagate");
  init_interior(observables, states.size(), substeps);
  const CMatrix k = no_jump_generator(h, channels);
  k_ = to_sparse(k);
  double scale = 0.0;
  for (const auto& ch : channels) {
    require_layout(h.layout(), ch.op.layout(), "RkEngine");
    if (ch.rate == 0.0) continue;
    jumps_.push_back(to_sparse(ch.op.matrix()));
    jumps_adjoint_.push_back(to_sparse(ch.op.matrix().adjoint()));
    rates_.push_back(ch.rate);
  }
  for (const auto& s : states) {
    require_layout(h.layout(), s.layout(), "RkEngine");
    rho_.push_back(s.matrix());
  }
  for (const auto& op : observables.ops) {
    require_layout(h.layout(), op.layout(), "RkEngine");
    observables_.push_back(op.matrix());
  }
  scale = k.cwiseAbs().rowwise().sum().maxCoeff();
  h_ = tol_.initial_step > 0.0 ? tol_.initial_step : (scale > 0.0 ? 0.01 / scale : dt_);
}

void RkEngine::rhs(const std::vector<CMatrix>& rho, std::vector<CMatrix>& out) const {
  // With rho Hermitian, L(rho) = A + A^dagger for A = K rho + (1/2) sum gamma c rho c^dagger,
  // which keeps every stage exactly Hermitian.
  out.resize(rho.size());
  for (std::size_t s = 0; s < rho.size(); ++s) {
    CMatrix a = k_ * rho[s];
    for (std::size_t j = 0; j < jumps_.size(); ++j) {
      const CMatrix cr = jumps_[j] * rho[s];
      a.noalias() += (0.5 * rates_[j]) * (cr * jumps_adjoint_[j]);
    }
    out[s] = a + a.adjoint();
  }
}

void RkEngine::advance() {
  std::vector<CMatrix> k1;
  rhs(rho_, k1);
  const double t0 = t_;
  for (std::size_t j = 1; j < substeps_; ++j) {
    step_to(t0 + dt_ * static_cast<double>(j) / static_cast<double>(substeps_), k1);
    for (std::size_t s = 0; s < rho_.size(); ++s) {
      for (std::size_t t = 0; t < tracked_.size(); ++t) {
        interior_[s][t][j - 1] = expectation(s, tracked_[t]);
      }
    }
  }
  step_to(t0 + dt_, k1);
}

void RkEngine::step_to(double t_end, std::vector<CMatrix>& k1) {
  // Dormand-Prince 5(4) tableau.
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  (void)c2;
  (void)c3;
  (void)c4;
  (void)c5;

  const std::size_t n = rho_.size();
  std::vector<CMatrix> k2, k3, k4, k5, k6, k7, y(n), y_new(n);
  while (t_ < t_end) {
    const bool clipped = t_ + h_ >= t_end;
    const double h = clipped ? t_end - t_ : h_;
    if (h < tol_.min_step || h < 1e-15 * t_end) {
      throw ConvergenceError("integrate_rk: step size underflow at t = " + std::to_string(t_) +
                             " s (h = " + std::to_string(h) +
                             "); the problem is too stiff for the explicit integrator, use the "
                             "expm engine");
    }
    for (std::size_t s = 0; s < n; ++s) y[s] = rho_[s] + h * a21 * k1[s];
    rhs(y, k2);
    for (std::size_t s = 0; s < n; ++s) y[s] = rho_[s] + h * (a31 * k1[s] + a32 * k2[s]);
    rhs(y, k3);
    for (std::size_t s = 0; s < n; ++s) {
      y[s] = rho_[s] + h * (a41 * k1[s] + a42 * k2[s] + a43 * k3[s]);
    }
    rhs(y, k4);
    for (std::size_t s = 0; s < n; ++s) {
      y[s] = rho_[s] + h * (a51 * k1[s] + a52 * k2[s] + a53 * k3[s] + a54 * k4[s]);
    }
    rhs(y, k5);
    for (std::size_t s = 0; s < n; ++s) {
      y[s] = rho_[s] + h * (a61 * k1[s] + a62 * k2[s] + a63 * k3[s] + a64 * k4[s] + a65 * k5[s]);
    }
    rhs(y, k6);
    for (std::size_t s = 0; s < n; ++s) {
      y_new[s] = rho_[s] + h * (b1 * k1[s] + b3 * k3[s] + b4 * k4[s] + b5 * k5[s] + b6 * k6[s]);
    }
    rhs(y_new, k7);

    double err = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      const CMatrix e =
          h * (e1 * k1[s] + e3 * k3[s] + e4 * k4[s] + e5 * k5[s] + e6 * k6[s] + e7 * k7[s]);
      const Eigen::MatrixXd scale =
          (tol_.atol + tol_.rtol * rho_[s].cwiseAbs().cwiseMax(y_new[s].cwiseAbs()).array())
              .matrix();
      err = std::max(err, (e.cwiseAbs().array() / scale.array()).maxCoeff());
    }
    if (!std::isfinite(err)) {
      throw ConvergenceError("integrate_rk: non-finite local error at t = " + std::to_string(t_));
    }
    if (err <= 1.0) {
      t_ = clipped ? t_end : t_ + h;
      for (std::size_t s = 0; s < n; ++s) {
        rho_[s] = 0.5 * (y_new[s] + y_new[s].adjoint());
      }
      rhs(rho_, k1);
      ++accepted_;
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (!clipped || h * factor < h_) h_ = h * factor;
    } else {
      ++rejected_;
      h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
    }
  }
}

Complex RkEngine::expectation(std::size_t state, std::size_t observable) const {
  const CMatrix& r = rho_.at(state);
  const CMatrix& o = observables_.at(observable);
  return (r.transpose().cwiseProduct(o)).sum();
}

TrajectoryRecorder::TrajectoryRecorder(const ObservableSet& observables, std::size_t states,
                                       bool diagnostics)
    : obs_(&observables), diagnostics_(diagnostics), traj_(states) {
  for (auto& t : traj_) {
    t.names = observables.names;
    t.values.resize(observables.ops.size());
  }
}

void TrajectoryRecorder::record(const Engine& engine, double t) {
  const ObservableSet& obs = *obs_;
  for (std::size_t s = 0; s < traj_.size(); ++s) {
    Trajectory& tr = traj_[s];
    if (!tr.times.empty() && !(t > tr.times.back())) {
      throw InvalidArgument("TrajectoryRecorder: sample times must increase");
    }
    tr.times.push_back(t);
    for (std::size_t o = 0; o < obs.ops.size(); ++o) {
      tr.values[o].push_back(engine.expectation(s, o));
    }
    const std::size_t k = tr.times.size() - 1;
    const std::size_t m = engine.substeps();
    const auto running = [&](std::vector<double>& acc, auto&& f, std::size_t o, auto&& g) {
      if (k == 0) {
        acc.push_back(0.0);
      } else if (m > 1) {
        // Composite Simpson over the m + 1 points of the last step.
        const std::vector<Complex>& inner = engine.interior(s, o);
        const double h = (tr.times[k] - tr.times[k - 1]) / static_cast<double>(m);
        double sum = f(k - 1) + f(k);
        for (std::size_t j = 1; j < m; ++j) sum += (j % 2 == 1 ? 4.0 : 2.0) * g(inner[j - 1]);
        acc.push_back(acc[k - 1] + h / 3.0 * sum);
      } else if (k % 2 == 0) {
        const double h = 0.5 * (tr.times[k] - tr.times[k - 2]);
        acc.push_back(acc[k - 2] + h / 3.0 * (f(k - 2) + 4.0 * f(k - 1) + f(k)));
      } else {
        const double h = tr.times[k] - tr.times[k - 1];
        acc.push_back(acc[k - 1] + 0.5 * h * (f(k - 1) + f(k)));
      }
    };
    if (obs.occupation != ObservableSet::npos) {
      const auto& v = tr.values[obs.occupation];
      running(tr.occupation_integral, [&](std::size_t i) { return v[i].real(); }, obs.occupation,
              [](Complex z) { return z.real(); });
    }
    if (obs.amplitude != ObservableSet::npos) {
      const auto& v = tr.values[obs.amplitude];
      running(tr.amplitude_integral, [&](std::size_t i) { return std::norm(v[i]); }, obs.amplitude,
              [](Complex z) { return std::norm(z); });
    }
    if (diagnostics_) {
      tr.diagnostics.push_back(
          DensityMatrix(obs.ops.front().layout(), engine.density(s)).diagnose());
    }
  }
}

Trajectory propagate_expm(const DensityMatrix& rho0, const SparseCMatrix& liouvillian, double dt,
                          std::size_t n_steps, const ObservableSet& observables, bool diagnostics) {
  if (observables.ops.empty()) {
    throw InvalidArgument("propagate_expm: at least one observable is required");
  }
  ExpmEngine engine(liouvillian, rho0.dim(), dt, {rho0}, observables);
  TrajectoryRecorder recorder(observables, 1, diagnostics);
  recorder.record(engine, 0.0);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    engine.advance();
    recorder.record(engine, static_cast<double>(k) * dt);
  }
  return recorder.take(0);
}

Trajectory integrate_rk(const DensityMatrix& rho0, const Operator& h,
                        const std::vector<CollapseChannel>& channels, double t_end, double dt,
                        const ObservableSet& observables, const RkTolerances& tolerances) {
  if (observables.ops.empty()) {
    throw InvalidArgument("integrate_rk: at least one observable is required");
  }
  if (!(t_end > 0.0) || !(dt > 0.0)) {
    throw InvalidArgument("integrate_rk: t_end and dt must be positive");
  }
  const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));
  RkEngine engine(h, channels, dt, {rho0}, observables, tolerances);
  TrajectoryRecorder recorder(observables, 1, false);
  recorder.record(engine, 0.0);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    engine.advance();
    recorder.record(engine, static_cast<double>(k) * dt);
  }
  return recorder.take(0);
}

EngineKind parse_engine(const std::string& name) {
  if (name == "expm") return EngineKind::Expm;
  if (name == "rk") return EngineKind::Rk;
  throw InvalidArgument("unknown engine '" + name + "' (expected expm or rk)");
}

const char* engine_name(EngineKind kind) { return kind == EngineKind::Expm ? "expm" : "rk"; }

ConvergedRun run_until_converged(const TransducerParams& p, const ConvergenceOptions& options) {
  p.validate();
  if (!(options.dt_sample > 0.0) || !(options.horizon > options.dt_sample)) {
    throw InvalidArgument("run_until_converged: need 0 < dt_sample < horizon");
  }
  if (!(options.tol > 0.0)) {
    throw InvalidArgument("run_until_converged: tol must be positive");
  }
  const HilbertLayout layout = p.layout();
  const Operator h = build_hamiltonian(p);
  const auto channels = build_collapse_channels(p);
  const ObservableSet obs = ObservableSet::transducer(layout);

  ConvergedRun run;
  run.alphas.push_back(p.alpha);
  run.alphas.insert(run.alphas.end(), options.extra_alphas.begin(), options.extra_alphas.end());
  std::vector<DensityMatrix> states;
  for (const Complex a : run.alphas) states.push_back(initial_state(p, a));
  states.push_back(ground_state(p));
  const std::size_t n_signals = run.alphas.size();
  const std::size_t ref = n_signals;

  std::size_t substeps = options.substeps;
  if (substeps == 0) {
    const double fastest = std::max({std::abs(p.omega_mw), std::abs(p.omega_m), std::abs(p.delta_e),
                                     std::abs(p.delta_opt), std::abs(p.omega_rabi)});
    substeps = substeps_for(options.dt_sample, 2.0 * fastest / (2.0 * std::numbers::pi));
  }
  std::unique_ptr<Engine> engine;
  if (options.engine == EngineKind::Expm) {
    engine = std::make_unique<ExpmEngine>(build_liouvillian(h, channels), layout.total_dim(),
                                          options.dt_sample, states, obs, substeps);
  } else {
    engine = std::make_unique<RkEngine>(h, channels, options.dt_sample, states, obs, options.rk,
                                        substeps);
  }
  run.engine = engine->name();

  TrajectoryRecorder recorder(obs, states.size(), options.diagnostics);
  recorder.record(*engine, 0.0);
  std::vector<double> n0(n_signals);
  for (std::size_t s = 0; s < n_signals; ++s) {
    n0[s] = recorder.trajectory(s).values[0][0].real() - recorder.trajectory(ref).values[0][0].real();
  }

  const auto max_steps =
      static_cast<std::size_t>(std::ceil(options.horizon / options.dt_sample - 1e-9));
  ConvergenceStatus& status = run.status;
  for (std::size_t k = 1; k <= max_steps; ++k) {
    engine->advance();
    const double t = static_cast<double>(k) * options.dt_sample;
    recorder.record(*engine, t);

    const Trajectory& rt = recorder.trajectory(ref);
    const std::size_t back = (9 * k) / 10;
    bool done = true;
    status.remaining_excitation = 0.0;
    status.last_increment = 0.0;
    for (std::size_t s = 0; s < n_signals; ++s) {
      const Trajectory& st = recorder.trajectory(s);
      double remaining = 0.0;
      for (std::size_t o = 0; o < kSubsystemCount; ++o) {
        remaining += std::abs(st.values[o][k].real() - rt.values[o][k].real());
      }
      const double rel = n0[s] > 0.0 ? remaining / n0[s] : (remaining == 0.0 ? 0.0 : HUGE_VAL);
      const double scale = n0[s] > 0.0 ? p.gamma_wg / n0[s] : 0.0;
      const double eta_now = scale * (st.occupation_integral[k] - rt.occupation_integral[k]);
      const double eta_back = scale * (st.occupation_integral[back] - rt.occupation_integral[back]);
      const double increment = std::abs(eta_now - eta_back);
      status.remaining_excitation = std::max(status.remaining_excitation, rel);
      status.last_increment = std::max(status.last_increment, increment);
      if (!(rel < options.tol) || !(increment <= options.increment_tol * std::abs(eta_now) + 1e-12)) {
        done = false;
      }
    }
    status.t_f = t;
    if (done) {
      status.converged = true;
      break;
    }
  }
  if (!status.converged) {
    throw ConvergenceError(
        "run_until_converged: horizon " + std::to_string(options.horizon) +
        " s reached without convergence (remaining excitation " +
        std::to_string(status.remaining_excitation) + " of the initial occupation, last-10% "
        "efficiency increment " + std::to_string(status.last_increment) + ")");
  }
  for (std::size_t s = 0; s < n_signals; ++s) run.signals.push_back(recorder.take(s));
  run.reference = recorder.take(ref);
  return run;
}

ResponseIntegral response_integral(const TransducerParams& p, Complex alpha, double rel_tol) {
  p.validate();
  const HilbertLayout layout = p.layout();
  const Operator h = build_hamiltonian(p);
  const auto channels = build_collapse_channels(p);
  const auto d = static_cast<Eigen::Index>(layout.total_dim());

  const CMatrix k = no_jump_generator(h, channels);
  std::vector<SparseCMatrix> jumps;
  std::vector<SparseCMatrix> jumps_adjoint;
  std::vector<double> rates;
  for (const auto& ch : channels) {
    if (ch.rate == 0.0) continue;
    jumps.push_back(to_sparse(ch.op.matrix()));
    jumps_adjoint.push_back(to_sparse(ch.op.matrix().adjoint()));
    rates.push_back(ch.rate);
  }
  const SylvesterSolver sylvester(k);
  const auto ground = static_cast<Eigen::Index>(layout.index_of({0, 0, 0, 0}));

  // Bordered operator X -> L(X) + trace(X)|0><0|; nonsingular because the
  // stationary state is unique, and the solution is traceless for a
  // traceless right-hand side.
  const LinearMap apply = [&](const CVector& v) {
    const Eigen::Map<const CMatrix> x(v.data(), d, d);
    CMatrix y = k * x + x * k.adjoint();
    for (std::size_t j = 0; j < jumps.size(); ++j) {
      const CMatrix cx = jumps[j] * x;
      y.noalias() += rates[j] * (cx * jumps_adjoint[j]);
    }
    y(ground, ground) += x.trace();
    return CVector(Eigen::Map<const CVector>(y.data(), d * d));
  };
  const LinearMap precondition = [&](const CVector& v) {
    const Eigen::Map<const CMatrix> r(v.data(), d, d);
    const CMatrix y = sylvester.solve(r);
    return CVector(Eigen::Map<const CVector>(y.data(), d * d));
  };

  const CMatrix delta = initial_state(p, alpha).matrix() - ground_state(p).matrix();
  const CVector b = -Eigen::Map<const CVector>(delta.data(), d * d);
  // Right preconditioning: GMRES on A M^-1 y = b monitors the true residual.
  // With left preconditioning the monitored residual understates the true
  // one by orders of magnitude because decay rates are tiny next to the
  // mode frequencies.
  const LinearMap apply_right = [&](const CVector& y) { return apply(precondition(y)); };
  CVector y = CVector::Zero(d * d);
  GmresOptions opts;
  opts.rel_tol = rel_tol;
  const GmresResult res = gmres(apply_right, b, y, LinearMap{}, opts);
  if (!res.converged) {
    throw ConvergenceError("response_integral: GMRES stalled at relative residual " +
                           std::to_string(res.residual) + " after " +
                           std::to_string(res.iterations) + " iterations");
  }
  const CVector x = precondition(y);
  ResponseIntegral out;
  out.integral = Eigen::Map<const CMatrix>(x.data(), d, d);
  out.iterations = res.iterations;
  out.residual = res.residual;
  return out;
}

}  // namespace transduce
