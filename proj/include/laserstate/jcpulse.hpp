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
 * @file jcpulse.hpp
 * @brief Resonant Jaynes-Cummings pi-pulses and mid-pulse phase disruption.
 *
 * Atom-field space is (atom, field) with atom basis (|g>, |e>) and
 *
 *     H = i lambda (a^dag |g><e| - a |e><g|).
 *
 * |g, n> Rabi-oscillates into |e, n-1> with c_g = cos(sqrt(n) lambda t),
 * c_e = -sin(sqrt(n) lambda t), so t_pi = pi / (2 sqrt(n) lambda).
 *
 * U(pi) = exp(-i pi N) anticommutes with H, hence
 * exp(-iHt) U(pi) exp(-iHt) = U(pi) for every t: a pi phase kick halfway
 * through the pulse returns the atom to |g> whatever the field state.
 */
#pragma once

#include <cmath>
#include <variant>

#include "laserstate/hilbert.hpp"
#include "laserstate/sources.hpp"

namespace laserstate {

/// Composite (atom, field) space for a field truncated at n_max.
inline CompositeSpace atom_field_space(int field_n_max) {
  return CompositeSpace({atom_space("atom"), Factor(ModeSpace("field", field_n_max))});
}

inline LinearOperator jc_hamiltonian(int field_n_max, double lambda) {
  const auto space = atom_field_space(field_n_max);
  const ModeSpace fm("field", field_n_max);
  const auto a = embed(annihilation(fm), space, 1);
  const auto sigma = embed(atom_lowering(space[0]), space, 0);  // |g><e|
  return Complex(0.0, lambda) * (a.adjoint() * sigma - a * sigma.adjoint());
}

/// N + |e><e| on the atom-field space.
inline LinearOperator jc_excitation(int field_n_max) {
  const auto space = atom_field_space(field_n_max);
  return embed(number_operator(ModeSpace("field", field_n_max)), space, 1) +
         embed(atom_excited_projector(space[0]), space, 0);
}

/// U(pi) on the field, identity on the atom.
inline LinearOperator field_phase_kick(int field_n_max, double dphi) {
  return embed(phase_shift_operator(ModeSpace("field", field_n_max), dphi), atom_field_space(field_n_max), 1);
}

struct AtomFieldState {
  std::variant<StateVector, DensityOperator> state;
  double coupling = 1.0;

  const CompositeSpace& space() const {
    return std::visit([](const auto& s) -> const CompositeSpace& { return s.space(); }, state);
  }
  int field_n_max() const { return space()[1].n_max(); }

  DensityOperator density() const {
    if (const auto* psi = std::get_if<StateVector>(&state)) return DensityOperator::from_state(*psi);
    return std::get<DensityOperator>(state);
  }
};

namespace detail {

inline void require_atom_field(const CompositeSpace& s) {
  if (s.size() != 2 || s[0].dim != 2 || s[0].is_mode() || !s[1].is_mode())
    throw DimensionMismatch("expected an (atom, field) space");
}

inline AtomFieldState apply(const AtomFieldState& s, const LinearOperator& u) {
  if (const auto* psi = std::get_if<StateVector>(&s.state)) return {u * *psi, s.coupling};
  return {evolve(std::get<DensityOperator>(s.state), u), s.coupling};
}

}  // namespace detail

/// Applies exp(-i H t).
inline AtomFieldState evolve(const AtomFieldState& s, double t) {
  detail::require_atom_field(s.space());
  return detail::apply(s, unitary_evolution(jc_hamiltonian(s.field_n_max(), s.coupling), t));
}

inline double pi_pulse_time(int n_ref, double lambda) {
  if (n_ref < 1) throw PreconditionError("pi-pulse needs at least one reference photon");
  if (!(lambda > 0.0)) throw PreconditionError("pi-pulse needs a positive coupling");
  return kPi / (2.0 * std::sqrt(static_cast<double>(n_ref)) * lambda);
}

/// Probability of finding the atom in |g>.
inline double atom_ground_probability(const AtomFieldState& s) {
  const auto reduced = partial_trace(s.density().op(), {0});
  return reduced(0, 0).real();
}

inline constexpr int kFieldMargin = 5;

struct DisruptedPulseResult {
  AtomFieldState midpoint;  ///< state at t_pi / 2, before the kick
  AtomFieldState final_state;
  double ground_probability = 0.0;
};

/// Atom in |g> meets the field; after t_pi/2 the field gets a pi phase kick,
/// then the pulse runs another t_pi/2. t_pi is fixed by n_ref.
inline DisruptedPulseResult disrupted_pi_pulse(const std::variant<StateVector, DensityOperator>& field, int n_ref,
                                               double lambda) {
  const auto& fspace = std::visit([](const auto& s) -> const CompositeSpace& { return s.space(); }, field);
  if (fspace.size() != 1 || !fspace[0].is_mode()) throw DimensionMismatch("disrupted_pi_pulse: expected a field mode");
  const int n_max = fspace[0].n_max();
  if (n_max < n_ref + kFieldMargin)
    throw TruncationError("disrupted_pi_pulse: field n_max " + std::to_string(n_max) + " below n_ref + " +
                          std::to_string(kFieldMargin));

  // Re-label the field onto the canonical (atom, field) space.
  const ModeSpace fm("field", n_max);
  const auto ground = basis_state(CompositeSpace(atom_space("atom")), 0);
  auto initial = [&]() -> std::variant<StateVector, DensityOperator> {
    if (const auto* psi = std::get_if<StateVector>(&field))
      return tensor({ground, StateVector(fm, psi->normalized().amplitudes())});
    const auto& rho = std::get<DensityOperator>(field);
    return DensityOperator::from_positive(tensor({ground.projector(), LinearOperator(fm, rho.matrix())}));
  };
  const AtomFieldState s0{initial(), lambda};

  const double half = 0.5 * pi_pulse_time(n_ref, lambda);
  const auto u_half = unitary_evolution(jc_hamiltonian(n_max, lambda), half);
  const auto kick = field_phase_kick(n_max, kPi);

  auto midpoint = detail::apply(s0, u_half);
  auto final_state = detail::apply(detail::apply(midpoint, kick), u_half);
  const double pg = atom_ground_probability(final_state);
  return {std::move(midpoint), std::move(final_state), pg};
}

/// max |exp(-iHt) U(pi) exp(-iHt) - U(pi)| with t = t_pi / 2 for n_ref.
inline double combined_unitary_identity_check(int n_max, double lambda, int n_ref) {
  const double half = lambda == 0.0 ? 0.0 : 0.5 * pi_pulse_time(n_ref, lambda);
  const auto u_half = unitary_evolution(jc_hamiltonian(n_max, lambda), half);
  const auto kick = field_phase_kick(n_max, kPi);
  return max_abs_diff(u_half * kick * u_half, kick);
}

/// Same identity at an arbitrary half-time t.
inline double combined_unitary_deviation_at(int n_max, double lambda, double t) {
  const auto u = unitary_evolution(jc_hamiltonian(n_max, lambda), t);
  const auto kick = field_phase_kick(n_max, kPi);
  return max_abs_diff(u * kick * u, kick);
}

}  // namespace laserstate
