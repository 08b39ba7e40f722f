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

// Lindblad propagation of the transducer density matrix.
//
// Two engines share one driver. The default one maps the Liouvillian onto a
// real orthonormal basis of Hermitian matrices, exponentiates it once per
// sample step and advances the coordinate vectors by a single dense
// matrix-vector product per sample. The Runge-Kutta engine works directly on
// complex density matrices with adaptive Dormand-Prince steps and serves as
// an independent oracle.
//
// The dressed vacuum of the counter-rotating Hamiltonian emits a tiny steady
// photon flux. The driver therefore propagates the vacuum |0,0,g,0> next to
// every signal state so that the response to the microwave input can be
// separated from that background.

#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "transduce/density_matrix.hpp"
#include "transduce/model.hpp"
#include "transduce/operators.hpp"

namespace transduce {

using SparseCMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr std::size_t kMaxLiouvillianDim = 128;

/// d(rho)/dt of the master equation.
CMatrix lindblad_rhs(const DensityMatrix& rho, const Operator& h,
                     const std::vector<CollapseChannel>& channels);

/// Column-stacking superoperator L with vec(d rho/dt) = L vec(rho).
/// Throws InvalidArgument above kMaxLiouvillianDim.
SparseCMatrix build_liouvillian(const Operator& h, const std::vector<CollapseChannel>& channels);

/// Named observables sampled along a trajectory. Two of them can be marked
/// for running integrals: Re<occupation> and |<amplitude>|^2.
struct ObservableSet {
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  std::vector<std::string> names;
  std::vector<Operator> ops;
  std::size_t occupation = npos;
  std::size_t amplitude = npos;

  void add(std::string name, Operator op);
  std::size_t index_of(const std::string& name) const;

  /// p_mw, p_m, p_e, p_opt, the optical amplitude c_opt and the microwave
  /// amplitude a_mw; integrates <c^dagger c> and |<c>|^2.
  static ObservableSet transducer(const HilbertLayout& layout);
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<Complex>> values;  ///< values[observable][sample]
  std::vector<double> occupation_integral;   ///< running integral of Re<occupation>
  std::vector<double> amplitude_integral;    ///< running integral of |<amplitude>|^2
  std::vector<StateDiagnostics> diagnostics; ///< per sample, empty when disabled

  std::size_t samples() const noexcept { return times.size(); }
  const std::vector<Complex>& series(const std::string& name) const;
  /// Worst value of each diagnostic over all samples.
  StateDiagnostics worst_diagnostics() const;
};

/// Adaptive Runge-Kutta tolerances.
struct RkTolerances {
  double atol = 1e-10;
  double rtol = 1e-8;
  double initial_step = 0.0;  ///< 0 picks one from the generator norm
  double min_step = 1e-20;
};

/// A set of density matrices advanced together by fixed sample steps.
///
/// The integrated observables (ObservableSet::occupation and ::amplitude) are
/// also resolved at substeps() - 1 equally spaced points inside every step, so
/// their time integrals do not alias fast beats against the sample grid.
class Engine {
 public:
  virtual ~Engine() = default;
  virtual std::size_t state_count() const = 0;
  virtual double dt() const = 0;
  virtual void advance() = 0;
  virtual Complex expectation(std::size_t state, std::size_t observable) const = 0;
  virtual CMatrix density(std::size_t state) const = 0;
  virtual const char* name() const = 0;

  std::size_t substeps() const noexcept { return substeps_; }
  /// Interior values of an integrated observable over the last step.
  const std::vector<Complex>& interior(std::size_t state, std::size_t observable) const;

 protected:
  /// substeps must be a power of two.
  void init_interior(const ObservableSet& observables, std::size_t states, std::size_t substeps);

  std::size_t substeps_ = 1;
  std::vector<std::size_t> tracked_;                         ///< observable indices
  std::vector<std::vector<std::vector<Complex>>> interior_;  ///< [state][tracked][point]
};

/// Smallest power of two giving at least `points_per_period` points per
/// period of the frequency `f` (Hz) inside one step of length dt.
std::size_t substeps_for(double dt, double f, double points_per_period = 8.0);

/// Real Hermitian-basis coordinates of d x d density matrices.
/// Coordinates: rho_ii, then sqrt(2) Re rho_ij and sqrt(2) Im rho_ij for i < j.
class HermitianBasis {
 public:
  explicit HermitianBasis(std::size_t d);
  std::size_t dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return d_ * d_; }
  Eigen::VectorXd coordinates(const CMatrix& rho) const;
  CMatrix matrix(const Eigen::VectorXd& x) const;
  /// w with trace(op rho) = w^T x.
  CVector weights(const CMatrix& op) const;
  /// Column-stacking vec(rho) = U x.
  SparseCMatrix unitary() const;
  /// Real generator U^dagger L U; throws if L does not preserve Hermiticity.
  Eigen::MatrixXd real_generator(const SparseCMatrix& liouvillian) const;

 private:
  std::size_t d_;
};

/// exp(R dt) applied to a block of coordinate vectors.
class ExpmEngine final : public Engine {
 public:
  ExpmEngine(const SparseCMatrix& liouvillian, std::size_t d, double dt,
             const std::vector<DensityMatrix>& states, const ObservableSet& observables,
             std::size_t substeps = 1);

  std::size_t state_count() const override { return static_cast<std::size_t>(x_.cols()); }
  double dt() const override { return dt_; }
  void advance() override;
  Complex expectation(std::size_t state, std::size_t observable) const override;
  CMatrix density(std::size_t state) const override;
  const char* name() const override { return "expm"; }

  const Eigen::MatrixXd& propagator() const noexcept { return step_; }

 private:
  HermitianBasis basis_;
  double dt_;
  Eigen::MatrixXd step_;
  Eigen::MatrixXd x_;
  Eigen::MatrixXd scratch_;
  Eigen::MatrixXcd weights_;  ///< one column per observable
  Eigen::MatrixXd readouts_;  ///< Heisenberg-evolved weights of the tracked observables
  Eigen::MatrixXd readout_values_;
};

/// Dormand-Prince 5(4) on complex density matrices, landing on every sample.
class RkEngine final : public Engine {
 public:
  RkEngine(const Operator& h, const std::vector<CollapseChannel>& channels, double dt,
           const std::vector<DensityMatrix>& states, const ObservableSet& observables,
           const RkTolerances& tolerances = {}, std::size_t substeps = 1);

  std::size_t state_count() const override { return rho_.size(); }
  double dt() const override { return dt_; }
  void advance() override;
  Complex expectation(std::size_t state, std::size_t observable) const override;
  CMatrix density(std::size_t state) const override { return rho_.at(state); }
  const char* name() const override { return "rk"; }

  std::size_t accepted_steps() const noexcept { return accepted_; }
  std::size_t rejected_steps() const noexcept { return rejected_; }

 private:
  void rhs(const std::vector<CMatrix>& rho, std::vector<CMatrix>& out) const;
  void step_to(double t_end, std::vector<CMatrix>& k1);

  double dt_;
  RkTolerances tol_;
  SparseCMatrix k_;  ///< -iH - (1/2) sum gamma c^dagger c
  std::vector<SparseCMatrix> jumps_;
  std::vector<SparseCMatrix> jumps_adjoint_;
  std::vector<double> rates_;
  std::vector<CMatrix> rho_;
  std::vector<CMatrix> observables_;
  double t_ = 0.0;
  double h_ = 0.0;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
};

/// Samples observables and running integrals of every engine state.
class TrajectoryRecorder {
 public:
  TrajectoryRecorder(const ObservableSet& observables, std::size_t states, bool diagnostics);
  void record(const Engine& engine, double t);
  const Trajectory& trajectory(std::size_t state) const { return traj_.at(state); }
  Trajectory take(std::size_t state) { return std::move(traj_.at(state)); }

 private:
  const ObservableSet* obs_;
  bool diagnostics_;
  std::vector<Trajectory> traj_;
};

/// exp(L dt) applied n_steps times starting from rho0.
Trajectory propagate_expm(const DensityMatrix& rho0, const SparseCMatrix& liouvillian, double dt,
                          std::size_t n_steps, const ObservableSet& observables,
                          bool diagnostics = false);

/// Adaptive RK from t = 0 to t_end, sampled every dt.
Trajectory integrate_rk(const DensityMatrix& rho0, const Operator& h,
                        const std::vector<CollapseChannel>& channels, double t_end, double dt,
                        const ObservableSet& observables, const RkTolerances& tolerances = {});

enum class EngineKind { Expm, Rk };

EngineKind parse_engine(const std::string& name);
const char* engine_name(EngineKind kind);

struct ConvergenceOptions {
  EngineKind engine = EngineKind::Expm;
  double dt_sample = 1e-9;
  double tol = 1e-4;
  double horizon = 100e-6;
  double increment_tol = 1e-4;  ///< last-10% change of the efficiency integral
  /// Interior points per sample step for the flux integrals; 0 picks enough
  /// to resolve twice the fastest frame frequency.
  std::size_t substeps = 0;
  bool diagnostics = true;
  RkTolerances rk{};
  /// Extra microwave amplitudes propagated next to p.alpha with the same
  /// propagator (the first signal is always p.alpha).
  std::vector<Complex> extra_alphas;
};

struct ConvergenceStatus {
  bool converged = false;
  double t_f = 0.0;
  double remaining_excitation = 0.0;  ///< background-subtracted, relative to <a^dagger a>_0
  double last_increment = 0.0;        ///< efficiency change over the last 10% of t_f
};

struct ConvergedRun {
  std::vector<Complex> alphas;
  std::vector<Trajectory> signals;  ///< one per alpha
  Trajectory reference;             ///< vacuum background
  ConvergenceStatus status;
  std::string engine;
};

/// Propagates the transducer until the microwave excitation has left the
/// device, see ConvergenceOptions. Throws ConvergenceError past the horizon.
ConvergedRun run_until_converged(const TransducerParams& p, const ConvergenceOptions& options);

struct ResponseIntegral {
  CMatrix integral;  ///< integral over [0, inf) of rho_signal(t) - rho_vacuum(t)
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Time integral of the background-subtracted response, solved in the
/// Laplace domain with GMRES preconditioned by the no-jump Sylvester operator.
ResponseIntegral response_integral(const TransducerParams& p, Complex alpha,
                                   double rel_tol = 1e-11);

}  // namespace transduce
