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
 * @file sources.hpp
 * @brief Source systems that feed a single field mode through the
 * energy-conserving coupling H = i lambda (a^dag c - c^dag a).
 *
 * Two sources are provided: a quantum harmonic oscillator (c is its
 * annihilation operator) and up to four two-level atoms
 * (c = sum_i g_i |g><e|_i, with the g_i folded into the coupling).
 * Composite factor order is source factors first, field last.
 */
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "laserstate/hilbert.hpp"

namespace laserstate {

inline constexpr int kMaxAtoms = 4;

/// Two-level atom, basis (|g>, |e>).
inline Factor atom_space(const std::string& label) { return aux_space(label, 2); }

/// |g><e| on a single atom.
inline LinearOperator atom_lowering(const Factor& atom) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return {CompositeSpace(atom), m};
}

/// |e><e| on a single atom.
inline LinearOperator atom_excited_projector(const Factor& atom) {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 1) = 1.0;
  return {CompositeSpace(atom), m};
}

/// Source coupled to one field mode.
struct SourceFieldSystem {
  CompositeSpace space;
  std::size_t field = 0;          ///< index of the field factor (last)
  double coupling = 0.0;          ///< lambda
  LinearOperator hamiltonian;     ///< i lambda (a^dag c - c^dag a)
  LinearOperator excitation;      ///< N_a plus the source excitation number
  LinearOperator source_lowering; ///< c, lifted to the full space

  ModeSpace field_space() const { return {space[field].label, space[field].n_max()}; }
  CompositeSpace source_space() const {
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < space.size(); ++k)
      if (k != field) keep.push_back(k);
    return space.subspace(keep);
  }
};

namespace detail {

inline SourceFieldSystem make_system(CompositeSpace space, double lambda, const LinearOperator& c,
                                     const LinearOperator& source_excitation) {
  const std::size_t field = space.size() - 1;
  const ModeSpace fm(space[field].label, space[field].n_max());
  const auto a = embed(annihilation(fm), space, field);
  const auto h = Complex(0.0, lambda) * (a.adjoint() * c - c.adjoint() * a);
  const auto excitation = embed(number_operator(fm), space, field) + source_excitation;

  if (hermiticity_defect(h.matrix()) > 1e-10) throw ValidationError("source Hamiltonian is not Hermitian");
  if (max_abs(commutator(h, excitation).matrix()) > 1e-9)
    throw ValidationError("source Hamiltonian does not conserve total excitation");
  return {std::move(space), field, lambda, h, excitation, c};
}

}  // namespace detail

/// Charged quantum oscillator (factor "source") driving the field (factor "field").
inline SourceFieldSystem build_oscillator_source(int source_n_max, int field_n_max, double lambda) {
  const ModeSpace src("source", source_n_max);
  const ModeSpace fld("field", field_n_max);
  CompositeSpace space({Factor(src), Factor(fld)});
  const auto c = embed(annihilation(src), space, 0);
  const auto nc = embed(number_operator(src), space, 0);
  return detail::make_system(std::move(space), lambda, c, nc);
}

/// k two-level atoms ("atom1".."atomk") with individual couplings g_i; the
/// system coupling lambda is 1 and c = sum_i g_i |g><e|_i.
inline SourceFieldSystem build_atomic_source(const std::vector<double>& couplings, int field_n_max) {
  const auto k = couplings.size();
  if (k < 1 || k > kMaxAtoms) throw PreconditionError("atomic source supports 1 to 4 atoms");
  std::vector<Factor> factors;
  for (std::size_t i = 0; i < k; ++i) factors.push_back(atom_space("atom" + std::to_string(i + 1)));
  factors.push_back(ModeSpace("field", field_n_max));
  CompositeSpace space(std::move(factors));

  auto c = LinearOperator::zero(space);
  auto ne = LinearOperator::zero(space);
  for (std::size_t i = 0; i < k; ++i) {
    c = c + Complex(couplings[i]) * embed(atom_lowering(space[i]), space, i);
    ne = ne + embed(atom_excited_projector(space[i]), space, i);
  }
  return detail::make_system(std::move(space), 1.0, c, ne);
}

inline constexpr double kTopOccupationLimit = 1e-8;

inline void require_untruncated(const DensityOperator& rho, const char* what) {
  const double top = top_level_occupation(rho);
  if (top > kTopOccupationLimit)
    throw TruncationError(std::string(what) + ": top Fock level occupied with probability " + std::to_string(top));
}

inline void require_untruncated(const StateVector& psi, const char* what) {
  require_untruncated(DensityOperator::from_positive(psi.projector()), what);
}

struct CoherenceTransferReport {
  Complex gamma;              ///< initial <c>
  Complex alpha;              ///< field <a> at time t
  Complex source_amplitude;   ///< <c> at time t
  Complex alpha_exact;        ///< gamma sin(lambda t) for the oscillator source
  double eigen_residual = 0;  ///< ||(a - alpha)|psi(t)>||
  double arg_alignment = 0;   ///< |arg alpha - arg gamma|, wrapped to [0, pi]
  double reality_defect = 0;  ///< |Im(alpha^* <c(t)>)|
};

/// Evolves |gamma>_S |0>_F for time t and measures how closely the field is an
/// eigenstate of a, and whether its phase tracks the source phase.
inline CoherenceTransferReport coherence_transfer_check(const SourceFieldSystem& sys, const StateVector& source_state,
                                                        double t) {
  if (!(source_state.space() == sys.source_space()))
    throw DimensionMismatch("coherence_transfer_check: source state does not live on the source space");
  const auto psi_s = source_state.normalized();

  // Precondition: the source starts in an eigenstate of c.
  const auto fm = sys.field_space();
  const auto vac = fock_state(fm, 0);
  const StateVector psi0 = tensor({psi_s, vac});
  const Complex gamma = expectation(psi0, sys.source_lowering);
  const Vector c_res = sys.source_lowering.matrix() * psi0.amplitudes() - gamma * psi0.amplitudes();
  if (c_res.norm() > 1e-8)
    throw PreconditionError("coherence_transfer_check: source state is not an eigenstate of c (residual " +
                            std::to_string(c_res.norm()) + ")");

  const auto u = unitary_evolution(sys.hamiltonian, t);
  const StateVector psi = u * psi0;
  require_untruncated(psi, "coherence_transfer_check");

  const auto a = embed(annihilation(fm), sys.space, sys.field);
  CoherenceTransferReport r;
  r.gamma = gamma;
  r.alpha = expectation(psi, a);
  r.source_amplitude = expectation(psi, sys.source_lowering);
  r.alpha_exact = gamma * std::sin(sys.coupling * t);
  r.eigen_residual = (a.matrix() * psi.amplitudes() - r.alpha * psi.amplitudes()).norm();
  if (std::abs(r.alpha) > 1e-12 && std::abs(gamma) > 1e-12) {
    double d = std::remainder(std::arg(r.alpha) - std::arg(gamma), 2.0 * kPi);
    r.arg_alignment = std::abs(d);
  }
  r.reality_defect = std::abs((std::conj(r.alpha) * r.source_amplitude).imag());
  return r;
}

/// Field state produced by an oscillator prepared in sum_N P_N |N><N|:
/// each |N>_S|0>_F is evolved, mixed with weight P_N and the source traced out.
/// weights[N] is P_N.
inline DensityOperator number_mixture_field(const SourceFieldSystem& sys, const std::vector<double>& weights, double t) {
  if (sys.space.size() != 2 || !sys.space[0].is_mode())
    throw PreconditionError("number_mixture_field: requires an oscillator source");
  const ModeSpace src(sys.space[0].label, sys.space[0].n_max());
  const auto fm = sys.field_space();
  if (static_cast<int>(weights.size()) > src.dim())
    throw PreconditionError("number_mixture_field: weights extend beyond the source space");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw PreconditionError("number_mixture_field: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-10) throw PreconditionError("number_mixture_field: weights must sum to 1");

  // Excitation is conserved, so |N>_S|0>_F never leaves the N-excitation block;
  // the field only needs room for N photons plus the sizing margin.
  const int n_top = static_cast<int>(weights.size()) - 1;
  if (fm.n_max() < n_top + 2)
    throw TruncationError("number_mixture_field: field n_max " + std::to_string(fm.n_max()) +
                          " below required " + std::to_string(n_top + 2));

  const auto u = unitary_evolution(sys.hamiltonian, t);
  Matrix joint = Matrix::Zero(sys.space.dim(), sys.space.dim());
  for (std::size_t n = 0; n < weights.size(); ++n) {
    if (weights[n] == 0.0) continue;
    const StateVector c_n = u * tensor({fock_state(src, static_cast<int>(n)), fock_state(fm, 0)});
    joint += weights[n] * c_n.amplitudes() * c_n.amplitudes().adjoint();
  }
  return partial_trace(DensityOperator::from_positive(LinearOperator(sys.space, joint)), {sys.field});
}

/// Reduced field state after joint evolution of an atomic source state and an
/// initial field state (vacuum or a number-diagonal mixture).
inline DensityOperator atomic_source_field(const SourceFieldSystem& sys, const DensityOperator& atoms,
                                           const DensityOperator& field0, double t) {
  if (!(atoms.space() == sys.source_space()))
    throw DimensionMismatch("atomic_source_field: atom state does not match the source space");
  if (!(field0.space() == CompositeSpace(sys.space[sys.field])))
    throw DimensionMismatch("atomic_source_field: field state does not match the field space");
  const auto& f = field0.matrix();
  for (Eigen::Index r = 0; r < f.rows(); ++r)
    for (Eigen::Index c = 0; c < f.cols(); ++c)
      if (r != c && std::abs(f(r, c)) > 1e-12)
        throw PreconditionError("atomic_source_field: initial field must be number-diagonal");

  int top_photon = 0;
  for (Eigen::Index n = 0; n < f.rows(); ++n)
    if (std::abs(f(n, n)) > 1e-14) top_photon = static_cast<int>(n);
  const int needed = top_photon + static_cast<int>(sys.space.size() - 1) + 2;
  if (sys.space[sys.field].n_max() < needed)
    throw TruncationError("atomic_source_field: field n_max " + std::to_string(sys.space[sys.field].n_max()) +
                          " below required " + std::to_string(needed));

  const auto rho0 = tensor(atoms, field0);
  const auto rho = evolve(rho0, unitary_evolution(sys.hamiltonian, t));
  require_untruncated(rho, "atomic_source_field");
  return partial_trace(rho, {sys.field});
}

inline DensityOperator atomic_source_field(const SourceFieldSystem& sys, const StateVector& atoms,
                                           const DensityOperator& field0, double t) {
  return atomic_source_field(sys, DensityOperator::from_state(atoms), field0, t);
}

/// Largest |<n|rho|n'>| with n != n'.
inline double max_off_diagonal(const DensityOperator& rho) {
  Matrix m = rho.matrix();
  m.diagonal().setZero();
  return max_abs(m);
}

}  // namespace laserstate
