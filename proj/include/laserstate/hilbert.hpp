// Copyright 2026 The laserstate Authors
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

/**
 * @file hilbert.hpp
 * @brief Dense complex operator algebra over truncated Fock spaces.
 *
 * A CompositeSpace is an ordered list of factors. Basis states of the
 * composite are multi-indices over the factors, flattened row-major with
 * the LAST factor varying fastest, so tensor(A, B) is the ordinary
 * Kronecker product A (x) B.
 *
 * Every value type here is immutable after construction; functions return
 * fresh values and never modify their arguments.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "laserstate/errors.hpp"

namespace laserstate {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Normalizing traces at or below this are treated as zero.
inline constexpr double kDegeneracyThreshold = 1e-14;

/// One tensor factor: a truncated oscillator mode or a finite auxiliary space.
struct Factor {
  enum class Kind { Mode, Aux };

  std::string label;
  int dim = 1;
  Kind kind = Kind::Aux;

  bool is_mode() const { return kind == Kind::Mode; }
  /// Highest photon number for a mode factor (dim - 1).
  int n_max() const { return dim - 1; }

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// A labeled single-mode Fock space truncated at n_max photons.
class ModeSpace {
 public:
  ModeSpace(std::string label, int n_max) : label_(std::move(label)), n_max_(n_max) {
    if (n_max_ < 0) throw PreconditionError("ModeSpace '" + label_ + "': n_max must be >= 0");
  }

  const std::string& label() const { return label_; }
  int n_max() const { return n_max_; }
  int dim() const { return n_max_ + 1; }

  operator Factor() const { return Factor{label_, dim(), Factor::Kind::Mode}; }

  friend bool operator==(const ModeSpace&, const ModeSpace&) = default;

 private:
  std::string label_;
  int n_max_;
};

/// Finite-dimensional non-oscillator factor (two-level atom, spin, ...).
inline Factor aux_space(std::string label, int dim) {
  if (dim < 1) throw PreconditionError("aux space '" + label + "': dim must be >= 1");
  return Factor{std::move(label), dim, Factor::Kind::Aux};
}

class CompositeSpace {
 public:
  CompositeSpace() = default;

  explicit CompositeSpace(std::vector<Factor> factors) : factors_(std::move(factors)) {
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (factors_[i].dim < 1) throw PreconditionError("factor '" + factors_[i].label + "' has dim < 1");
      for (std::size_t j = 0; j < i; ++j)
        if (factors_[i].label == factors_[j].label)
          throw PreconditionError("duplicate factor label '" + factors_[i].label + "'");
    }
  }

  CompositeSpace(const Factor& f) : CompositeSpace(std::vector<Factor>{f}) {}  // NOLINT
  CompositeSpace(const ModeSpace& m) : CompositeSpace(Factor(m)) {}           // NOLINT

  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  const Factor& operator[](std::size_t i) const { return factors_.at(i); }

  Eigen::Index dim() const {
    Eigen::Index d = 1;
    for (const auto& f : factors_) d *= f.dim;
    return d;
  }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t i = 0; i < factors_.size(); ++i)
      if (factors_[i].label == label) return i;
    throw UnknownLabel("no factor labeled '" + label + "'");
  }

  /// Factors at the given positions, in composite order.
  CompositeSpace subspace(std::vector<std::size_t> keep) const {
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    std::vector<Factor> out;
    for (auto k : keep) out.push_back(factors_.at(k));
    return CompositeSpace(std::move(out));
  }

  friend CompositeSpace operator*(const CompositeSpace& a, const CompositeSpace& b) {
    std::vector<Factor> f = a.factors_;
    f.insert(f.end(), b.factors_.begin(), b.factors_.end());
    return CompositeSpace(std::move(f));
  }

  friend bool operator==(const CompositeSpace&, const CompositeSpace&) = default;

 private:
  std::vector<Factor> factors_;
};

inline void require_same_space(const CompositeSpace& a, const CompositeSpace& b, const char* what) {
  if (!(a == b)) throw DimensionMismatch(std::string(what) + ": operands live on different spaces");
}

/// Square complex matrix tagged with the space it acts on.
class LinearOperator {
 public:
  LinearOperator(CompositeSpace space, Matrix m) : space_(std::move(space)), m_(std::move(m)) {
    if (m_.rows() != space_.dim() || m_.cols() != space_.dim())
      throw DimensionMismatch("operator matrix is " + std::to_string(m_.rows()) + "x" +
                              std::to_string(m_.cols()) + ", space dimension is " +
                              std::to_string(space_.dim()));
  }

  static LinearOperator identity(const CompositeSpace& s) {
    return {s, Matrix::Identity(s.dim(), s.dim())};
  }
  static LinearOperator zero(const CompositeSpace& s) { return {s, Matrix::Zero(s.dim(), s.dim())}; }

  const CompositeSpace& space() const { return space_; }
  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  Complex operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

  LinearOperator adjoint() const { return {space_, m_.adjoint()}; }
  Complex trace() const { return m_.trace(); }

  friend LinearOperator operator+(const LinearOperator& a, const LinearOperator& b) {
    require_same_space(a.space_, b.space_, "operator +");
    return {a.space_, a.m_ + b.m_};
  }
  friend LinearOperator operator-(const LinearOperator& a, const LinearOperator& b) {
    require_same_space(a.space_, b.space_, "operator -");
    return {a.space_, a.m_ - b.m_};
  }
  friend LinearOperator operator*(const LinearOperator& a, const LinearOperator& b) {
    require_same_space(a.space_, b.space_, "operator *");
    return {a.space_, a.m_ * b.m_};
  }
  friend LinearOperator operator*(Complex s, const LinearOperator& a) { return {a.space_, s * a.m_}; }
  friend LinearOperator operator*(const LinearOperator& a, Complex s) { return s * a; }

 private:
  CompositeSpace space_;
  Matrix m_;
};

class StateVector {
 public:
  StateVector(CompositeSpace space, Vector v) : space_(std::move(space)), v_(std::move(v)) {
    if (v_.size() != space_.dim())
      throw DimensionMismatch("state has " + std::to_string(v_.size()) + " amplitudes, space dimension is " +
                              std::to_string(space_.dim()));
  }

  const CompositeSpace& space() const { return space_; }
  const Vector& amplitudes() const { return v_; }
  Complex operator[](Eigen::Index i) const { return v_(i); }
  double norm() const { return v_.norm(); }

  StateVector normalized() const {
    const double n = v_.norm();
    if (n <= 1e-300) throw DegenerateNormalization("cannot normalize a zero state");
    return {space_, v_ / n};
  }

  /// |psi><psi|
  LinearOperator projector() const { return {space_, v_ * v_.adjoint()}; }

  friend StateVector operator*(const LinearOperator& op, const StateVector& s) {
    require_same_space(op.space(), s.space_, "operator * state");
    return {s.space_, op.matrix() * s.v_};
  }
  friend StateVector operator+(const StateVector& a, const StateVector& b) {
    require_same_space(a.space_, b.space_, "state +");
    return {a.space_, a.v_ + b.v_};
  }
  friend StateVector operator*(Complex s, const StateVector& a) { return {a.space_, s * a.v_}; }

 private:
  CompositeSpace space_;
  Vector v_;
};

// ---------------------------------------------------------------------------
// Elementwise diagnostics
// ---------------------------------------------------------------------------

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double max_abs_diff(const LinearOperator& a, const LinearOperator& b) {
  require_same_space(a.space(), b.space(), "max_abs_diff");
  return max_abs(a.matrix() - b.matrix());
}

inline double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i <= j; ++i) worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
  return worst;
}

inline LinearOperator commutator(const LinearOperator& a, const LinearOperator& b) { return a * b - b * a; }

// ---------------------------------------------------------------------------
// Density operators
// ---------------------------------------------------------------------------

struct DensityDiagnostics {
  double hermiticity_defect = 0.0;
  double min_eigenvalue = 0.0;
  double trace_defect = 0.0;
};

/// Smallest eigenvalue of the Hermitian part of m.
inline double min_eigenvalue_hermitian(const Matrix& m) {
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// True when m + tol*I is numerically positive definite. A Cholesky attempt
/// is much cheaper than a full eigensolve and decides the same question.
inline bool is_psd(const Matrix& m, double tol) {
  const Matrix shifted = 0.5 * (m + m.adjoint()) + tol * Matrix::Identity(m.rows(), m.cols());
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() == Eigen::Success) return true;
  return min_eigenvalue_hermitian(m) >= -tol;
}

/// Positive, Hermitian, unit-trace operator. Construction validates.
class DensityOperator {
 public:
  static constexpr double kTolerance = 1e-10;

  explicit DensityOperator(LinearOperator op, double tol = kTolerance) : op_(std::move(op)) {
    const auto& m = op_.matrix();
    const double herm = hermiticity_defect(m);
    const double tr_defect = std::abs(m.trace() - Complex(1.0));
    if (herm > tol || tr_defect > tol || !is_psd(m, tol)) {
      const auto d = diagnose(m);
      throw ValidationError("not a density operator: hermiticity defect " + std::to_string(d.hermiticity_defect) +
                            ", min eigenvalue " + std::to_string(d.min_eigenvalue) + ", trace defect " +
                            std::to_string(d.trace_defect));
    }
  }

  /// For results of positivity-preserving maps (congruence M rho M^dag,
  /// partial trace, tensor product, sums of projectors). Hermiticity and
  /// trace are still checked; the O(d^3) spectral check is skipped.
  static DensityOperator from_positive(LinearOperator op, double tol = kTolerance) {
    const auto& m = op.matrix();
    const double herm = hermiticity_defect(m);
    const double tr_defect = std::abs(m.trace() - Complex(1.0));
    if (herm > tol || tr_defect > tol)
      throw ValidationError("not a density operator: hermiticity defect " + std::to_string(herm) +
                            ", trace defect " + std::to_string(tr_defect));
    return DensityOperator(std::move(op), Unchecked{});
  }

  static DensityOperator from_state(const StateVector& s) { return from_positive(s.normalized().projector()); }

  /// Divides by the trace before validating; throws when the trace is degenerate.
  static DensityOperator normalized(const LinearOperator& op, double degeneracy = kDegeneracyThreshold) {
    const double tr = op.trace().real();
    if (!(tr > degeneracy)) throw DegenerateNormalization("trace " + std::to_string(tr) + " below threshold");
    return DensityOperator(Complex(1.0 / tr) * op);
  }

  static DensityDiagnostics diagnose(const Matrix& m) {
    return {hermiticity_defect(m), min_eigenvalue_hermitian(m), std::abs(m.trace() - Complex(1.0))};
  }

  const LinearOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  const CompositeSpace& space() const { return op_.space(); }
  Eigen::Index dim() const { return op_.dim(); }

 private:
  struct Unchecked {};
  DensityOperator(LinearOperator op, Unchecked) : op_(std::move(op)) {}

  LinearOperator op_;
};

// ---------------------------------------------------------------------------
// Standard single-mode operators
// ---------------------------------------------------------------------------

/// a|n> = sqrt(n)|n-1>
inline LinearOperator annihilation(const ModeSpace& s) {
  Matrix m = Matrix::Zero(s.dim(), s.dim());
  for (int n = 1; n <= s.n_max(); ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return {s, m};
}

inline LinearOperator creation(const ModeSpace& s) { return annihilation(s).adjoint(); }

inline LinearOperator number_operator(const ModeSpace& s) {
  Matrix m = Matrix::Zero(s.dim(), s.dim());
  for (int n = 0; n <= s.n_max(); ++n) m(n, n) = static_cast<double>(n);
  return {s, m};
}

/// N^{1/2}, diagonal square root in the number basis.
inline LinearOperator sqrt_number_operator(const ModeSpace& s) {
  Matrix m = Matrix::Zero(s.dim(), s.dim());
  for (int n = 0; n <= s.n_max(); ++n) m(n, n) = std::sqrt(static_cast<double>(n));
  return {s, m};
}

/// Susskind-Glogower lowering operator E = sum_n |n><n+1|.
///
/// On the truncated space E^dag E = 1 - |0><0| as in infinite dimensions, but
/// E E^dag = 1 - |n_max><n_max| picks up a defect at the top state.
inline LinearOperator susskind_glogower(const ModeSpace& s) {
  Matrix m = Matrix::Zero(s.dim(), s.dim());
  for (int n = 0; n < s.n_max(); ++n) m(n, n + 1) = 1.0;
  return {s, m};
}

/// exp(-i N dphi): uniform shift of the phase distribution by dphi.
inline LinearOperator phase_shift_operator(const ModeSpace& s, double dphi) {
  Matrix m = Matrix::Zero(s.dim(), s.dim());
  for (int n = 0; n <= s.n_max(); ++n) m(n, n) = std::exp(-kI * (static_cast<double>(n) * dphi));
  return {s, m};
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

inline StateVector basis_state(const CompositeSpace& s, Eigen::Index index) {
  if (index < 0 || index >= s.dim()) throw PreconditionError("basis index out of range");
  Vector v = Vector::Zero(s.dim());
  v(index) = 1.0;
  return {s, v};
}

/// Flattened index of a multi-index (last factor fastest).
inline Eigen::Index flat_index(const CompositeSpace& s, std::span<const int> multi) {
  if (multi.size() != s.size()) throw DimensionMismatch("multi-index rank does not match space");
  Eigen::Index idx = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (multi[k] < 0 || multi[k] >= s[k].dim) throw PreconditionError("multi-index component out of range");
    idx = idx * s[k].dim + multi[k];
  }
  return idx;
}

inline Eigen::Index flat_index(const CompositeSpace& s, std::initializer_list<int> multi) {
  return flat_index(s, std::span<const int>(multi.begin(), multi.size()));
}

inline StateVector fock_state(const ModeSpace& s, int n) {
  if (n < 0 || n > s.n_max())
    throw TruncationError("Fock state |" + std::to_string(n) + "> outside space with n_max " +
                          std::to_string(s.n_max()));
  return basis_state(s, n);
}

/// Poisson mass above n_max, sum_{n>n_max} e^{-|alpha|^2}|alpha|^{2n}/n!, summed directly.
inline double coherent_tail_mass(double abs_alpha, int n_max) {
  const double mean = abs_alpha * abs_alpha;
  if (mean == 0.0) return 0.0;
  double tail = 0.0;
  for (int n = n_max + 1;; ++n) {
    const double term = std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
    tail += term;
    if (n > mean && term < 1e-30 * std::max(tail, 1e-300)) break;
    if (n > n_max + 10000) break;
  }
  return tail;
}

/// Smallest n_max whose coherent tail mass is below tail_tol.
inline int coherent_n_max(double abs_alpha, double tail_tol = 1e-12) {
  int n = 0;
  while (coherent_tail_mass(abs_alpha, n) >= tail_tol) ++n;
  return n;
}

/// Truncated coherent state, amplitudes proportional to alpha^n / sqrt(n!),
/// renormalized on the truncated space.
inline StateVector coherent_state(Complex alpha, const ModeSpace& s, double tail_tol = 1e-12) {
  const double tail = coherent_tail_mass(std::abs(alpha), s.n_max());
  if (tail >= tail_tol)
    throw TruncationError("coherent state |alpha|=" + std::to_string(std::abs(alpha)) + " has tail mass " +
                          std::to_string(tail) + " above n_max=" + std::to_string(s.n_max()));
  Vector v(s.dim());
  v(0) = 1.0;
  for (int n = 1; n <= s.n_max(); ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return StateVector(s, v).normalized();
}

// ---------------------------------------------------------------------------
// Multilinear algebra
// ---------------------------------------------------------------------------

inline LinearOperator tensor(std::span<const LinearOperator> ops) {
  if (ops.empty()) throw PreconditionError("tensor of an empty operator list");
  CompositeSpace space = ops[0].space();
  Matrix m = ops[0].matrix();
  for (std::size_t k = 1; k < ops.size(); ++k) {
    space = space * ops[k].space();
    m = Eigen::kroneckerProduct(m, ops[k].matrix()).eval();
  }
  return {space, m};
}

inline LinearOperator tensor(std::initializer_list<LinearOperator> ops) {
  return tensor(std::span<const LinearOperator>(ops.begin(), ops.size()));
}

inline StateVector tensor(std::initializer_list<StateVector> states) {
  if (states.size() == 0) throw PreconditionError("tensor of an empty state list");
  auto it = states.begin();
  CompositeSpace space = it->space();
  Vector v = it->amplitudes();
  for (++it; it != states.end(); ++it) {
    space = space * it->space();
    v = Eigen::kroneckerProduct(v, it->amplitudes()).eval();
  }
  return {space, v};
}

inline DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator::from_positive(tensor({a.op(), b.op()}));
}

/// Lifts an operator acting on factor `which` of `space` to the full space.
inline LinearOperator embed(const LinearOperator& local, const CompositeSpace& space, std::size_t which) {
  if (which >= space.size()) throw DimensionMismatch("embed: factor index out of range");
  if (local.space().size() != 1 || !(local.space()[0] == space[which]))
    throw DimensionMismatch("embed: operator does not act on factor '" + space[which].label + "'");
  Eigen::Index left = 1, right = 1;
  for (std::size_t k = 0; k < which; ++k) left *= space[k].dim;
  for (std::size_t k = which + 1; k < space.size(); ++k) right *= space[k].dim;
  Matrix m = Eigen::kroneckerProduct(Matrix::Identity(left, left),
                                     Eigen::kroneckerProduct(local.matrix(), Matrix::Identity(right, right)).eval())
                 .eval();
  return {space, m};
}

inline LinearOperator embed(const LinearOperator& local, const CompositeSpace& space, const std::string& label) {
  return embed(local, space, space.index_of(label));
}

/// Traces out every factor not listed in `keep`. The result's factors stay in
/// composite order regardless of the order of `keep`.
inline LinearOperator partial_trace(const LinearOperator& op, std::vector<std::size_t> keep) {
  const auto& space = op.space();
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (auto k : keep)
    if (k >= space.size()) throw DimensionMismatch("partial_trace: factor index out of range");

  const auto n = space.size();
  std::vector<bool> kept(n, false);
  for (auto k : keep) kept[k] = true;

  Eigen::Index dk = 1, dt = 1;
  for (std::size_t f = 0; f < n; ++f) (kept[f] ? dk : dt) *= space[f].dim;

  // full_index[kk * dt + tt] for kept multi-index kk and traced multi-index tt
  std::vector<Eigen::Index> full(static_cast<std::size_t>(dk * dt));
  std::vector<int> digit(n, 0);
  for (Eigen::Index idx = 0; idx < space.dim(); ++idx) {
    Eigen::Index kk = 0, tt = 0;
    for (std::size_t f = 0; f < n; ++f) {
      if (kept[f])
        kk = kk * space[f].dim + digit[f];
      else
        tt = tt * space[f].dim + digit[f];
    }
    full[static_cast<std::size_t>(kk * dt + tt)] = idx;
    for (std::size_t f = n; f-- > 0;) {
      if (++digit[f] < space[f].dim) break;
      digit[f] = 0;
    }
  }

  const Matrix& m = op.matrix();
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index r = 0; r < dk; ++r)
    for (Eigen::Index c = 0; c < dk; ++c) {
      Complex acc = 0.0;
      for (Eigen::Index t = 0; t < dt; ++t)
        acc += m(full[static_cast<std::size_t>(r * dt + t)], full[static_cast<std::size_t>(c * dt + t)]);
      out(r, c) = acc;
    }
  return {space.subspace(keep), out};
}

inline DensityOperator partial_trace(const DensityOperator& rho, std::vector<std::size_t> keep) {
  return DensityOperator::from_positive(partial_trace(rho.op(), std::move(keep)));
}

inline Complex expectation(const StateVector& s, const LinearOperator& op) {
  require_same_space(s.space(), op.space(), "expectation");
  return s.amplitudes().dot(op.matrix() * s.amplitudes());
}

/// Tr(rho O) without forming the product.
inline Complex expectation(const DensityOperator& rho, const LinearOperator& op) {
  require_same_space(rho.space(), op.space(), "expectation");
  return rho.matrix().transpose().cwiseProduct(op.matrix()).sum();
}

/// General matrix exponential (scaling and squaring, Pade approximant).
inline LinearOperator matrix_exponential(const LinearOperator& op) {
  return {op.space(), op.matrix().exp()};
}

/// Real eigenvalues of the Hermitian part, ascending.
inline std::vector<double> eigenvalues_hermitian(const LinearOperator& op) {
  const Matrix h = 0.5 * (op.matrix() + op.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// exp(-i H t) for Hermitian H via eigendecomposition; unitary to roundoff.
inline LinearOperator unitary_evolution(const LinearOperator& hamiltonian, double t) {
  if (hermiticity_defect(hamiltonian.matrix()) > 1e-10)
    throw PreconditionError("unitary_evolution: generator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (hamiltonian.matrix() + hamiltonian.matrix().adjoint()));
  const Vector phases = (-kI * t * es.eigenvalues().cast<Complex>()).array().exp();
  Matrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return {hamiltonian.space(), u};
}

inline double unitarity_defect(const LinearOperator& u) {
  return max_abs(u.matrix().adjoint() * u.matrix() - Matrix::Identity(u.dim(), u.dim()));
}

inline DensityOperator evolve(const DensityOperator& rho, const LinearOperator& u) {
  require_same_space(rho.space(), u.space(), "evolve");
  return DensityOperator::from_positive(
      LinearOperator(rho.space(), u.matrix() * rho.matrix() * u.matrix().adjoint()));
}

/// Largest population in a top Fock level of any mode factor.
inline double top_level_occupation(const DensityOperator& rho) {
  double worst = 0.0;
  for (std::size_t f = 0; f < rho.space().size(); ++f) {
    if (!rho.space()[f].is_mode()) continue;
    const auto reduced = partial_trace(rho.op(), {f});
    worst = std::max(worst, std::abs(reduced(reduced.dim() - 1, reduced.dim() - 1)));
  }
  return worst;
}

}  // namespace laserstate
