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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "laserstate/laserstate.hpp"
#include "test_support.hpp"

using namespace laserstate;

namespace {

/// Coherent source state tight enough that c|gamma> = gamma|gamma> to 1e-8.
StateVector source_coherent(Complex gamma, int n_max) {
  return StateVector(ModeSpace("source", n_max), coherent_state(gamma, ModeSpace("source", n_max)).amplitudes());
}

int tight_n_max(double modulus) { return coherent_n_max(modulus, 1e-20); }

StateVector atom_product(const SourceFieldSystem& sys, const std::vector<Vector>& atoms) {
  Vector v = atoms[0];
  for (std::size_t k = 1; k < atoms.size(); ++k) v = Eigen::kroneckerProduct(v, atoms[k]).eval();
  return {sys.source_space(), v};
}

Vector ground() { return Vector::Unit(2, 0); }
Vector excited() { return Vector::Unit(2, 1); }

}  // namespace

TEST(OscillatorSource, HermitianAndConserving) {
  const auto sys = build_oscillator_source(6, 8, 0.7);
  EXPECT_LT(hermiticity_defect(sys.hamiltonian.matrix()), 1e-12);
  EXPECT_LT(max_abs(commutator(sys.hamiltonian, sys.excitation).matrix()), 1e-12);
  EXPECT_EQ(sys.field, 1u);
  EXPECT_EQ(sys.field_space(), ModeSpace("field", 8));
}

TEST(OscillatorSource, SmallTimeFieldGrowth) {
  const double lambda = 0.5;
  const Complex gamma = std::polar(1.0, 0.6);
  const int n = tight_n_max(1.0);
  const auto sys = build_oscillator_source(n, n, lambda);
  const auto psi0 = tensor({source_coherent(gamma, n), fock_state(sys.field_space(), 0)});
  const auto a = embed(annihilation(sys.field_space()), sys.space, 1);
  for (double t : {0.01, 0.05, 0.1}) {
    const auto psi = unitary_evolution(sys.hamiltonian, t) * psi0;
    const Complex alpha = expectation(psi, a);
    const double lt = lambda * t;
    // series: gamma (lt - lt^3/6 + ...)
    EXPECT_LE(std::abs(alpha - gamma * lt), std::abs(gamma) * lt * lt * lt / 6.0 * 1.01 + 1e-12);
    EXPECT_NEAR(std::abs(alpha - gamma * (lt - lt * lt * lt / 6.0)), 0.0, std::pow(lt, 5) / 100.0 + 1e-12);
  }
}

TEST(CoherenceTransfer, VacuumSource) {
  const auto sys = build_oscillator_source(4, 4, 1.0);
  const auto r = coherence_transfer_check(sys, source_coherent(0.0, 4), 0.3);
  EXPECT_EQ(r.eigen_residual, 0.0);
  EXPECT_EQ(std::abs(r.alpha), 0.0);
}

TEST(CoherenceTransfer, PhaseAlignment) {
  for (double theta : {0.0, 1.1, -2.4}) {
    const Complex gamma = std::polar(1.0, theta);
    const int n = tight_n_max(1.0);
    const auto sys = build_oscillator_source(n, n, 1.0);
    const auto r = coherence_transfer_check(sys, source_coherent(gamma, n), 0.2);
    EXPECT_LT(r.arg_alignment, 1e-6);
    EXPECT_LT(r.reality_defect, 1e-8);
    EXPECT_LT(r.eigen_residual, 1e-3);
    EXPECT_NEAR(std::abs(r.alpha - r.alpha_exact), 0.0, 1e-9);
  }
}

TEST(CoherenceTransfer, RealityThroughout) {
  const Complex gamma = std::polar(std::sqrt(2.0), 0.8);
  const int n = tight_n_max(std::sqrt(2.0));
  const auto sys = build_oscillator_source(n, n, 1.0);
  for (double t = 0.0; t <= 0.3 + 1e-12; t += 0.05) {
    const auto r = coherence_transfer_check(sys, source_coherent(gamma, n), t);
    EXPECT_LT(r.reality_defect, 1e-8) << t;
    EXPECT_LT(r.eigen_residual, 1e-3) << t;
  }
}

TEST(CoherenceTransfer, RejectsNonCoherentSource) {
  const auto sys = build_oscillator_source(4, 4, 1.0);
  EXPECT_THROW(coherence_transfer_check(sys, fock_state(ModeSpace("source", 4), 1), 0.1), PreconditionError);
}

TEST(CoherenceTransfer, TruncationDetected) {
  const int n = tight_n_max(1.4);
  const auto sys = build_oscillator_source(n, 3, 1.0);
  EXPECT_THROW(coherence_transfer_check(sys, source_coherent(1.4, n), 1.5), TruncationError);
}

TEST(NumberMixture, DiagonalBinomial) {
  const double lambda = 1.0;
  const std::vector<double> weights{0.1, 0.2, 0.3, 0.4};
  const auto sys = build_oscillator_source(3, 5, lambda);
  for (double t : {0.1, 0.4, 0.9}) {
    const auto rho = number_mixture_field(sys, weights, t);
    EXPECT_LT(max_off_diagonal(rho), 1e-10);
    // |N>_S|0>_F splits binomially with s = sin^2(lambda t)
    const double s = std::pow(std::sin(lambda * t), 2);
    for (int n = 0; n <= 5; ++n) {
      double p = 0.0;
      for (int big = n; big < 4; ++big) {
        const double binom = std::exp(std::lgamma(big + 1.0) - std::lgamma(n + 1.0) - std::lgamma(big - n + 1.0));
        p += weights[std::size_t(big)] * binom * std::pow(s, n) * std::pow(1.0 - s, big - n);
      }
      EXPECT_NEAR(rho.matrix()(n, n).real(), p, 1e-10) << t << " " << n;
    }
    for (int m = 1; m <= 4; ++m) EXPECT_LT(std::abs(phase_moment(rho, m)), 1e-10);
  }
}

TEST(NumberMixture, TimeZeroIsVacuum) {
  const auto sys = build_oscillator_source(3, 5, 1.0);
  const auto rho = number_mixture_field(sys, {0.25, 0.25, 0.25, 0.25}, 0.0);
  EXPECT_LT(max_abs(rho.matrix() - fock_state(ModeSpace("field", 5), 0).projector().matrix()), 1e-12);
}

TEST(NumberMixture, Preconditions) {
  const auto sys = build_oscillator_source(3, 5, 1.0);
  EXPECT_THROW(number_mixture_field(sys, {0.5, 0.6}, 0.1), PreconditionError);
  EXPECT_THROW(number_mixture_field(sys, {0.2, 0.2, 0.2, 0.2, 0.2}, 0.1), PreconditionError);
  const auto tight = build_oscillator_source(3, 3, 1.0);
  EXPECT_THROW(number_mixture_field(tight, {0.0, 0.0, 0.0, 1.0}, 0.1), TruncationError);
}

TEST(AtomicSource, HamiltonianChecks) {
  const auto sys = build_atomic_source({1.0, 0.7, 1.3}, 5);
  EXPECT_LT(hermiticity_defect(sys.hamiltonian.matrix()), 1e-12);
  EXPECT_LT(max_abs(commutator(sys.hamiltonian, sys.excitation).matrix()), 1e-12);
  EXPECT_THROW(build_atomic_source({}, 5), PreconditionError);
  EXPECT_THROW(build_atomic_source({1, 1, 1, 1, 1}, 5), PreconditionError);
}

TEST(AtomicSource, EnergyEigenstatesStayDiagonal) {
  const auto sys = build_atomic_source({1.0, 0.7, 1.3}, 5);
  const auto atoms = atom_product(sys, {excited(), excited(), ground()});
  const auto vac = DensityOperator(fock_state(sys.field_space(), 0).projector());
  for (double t : {0.0, 0.3, 0.8, 1.7, 3.1}) {
    const auto rho = atomic_source_field(sys, atoms, vac, t);
    EXPECT_LT(max_off_diagonal(rho), 1e-10) << t;
  }
}

TEST(AtomicSource, MixturesAndNumberDiagonalFieldStayDiagonal) {
  std::mt19937_64 rng(21);
  const auto sys = build_atomic_source({0.9, 1.2}, 6);
  const CompositeSpace src = sys.source_space();
  // field initially in a mixture of |0>, |1>, |2>
  Matrix f = Matrix::Zero(7, 7);
  f(0, 0) = 0.5;
  f(1, 1) = 0.3;
  f(2, 2) = 0.2;
  const DensityOperator field0(LinearOperator(sys.field_space(), f));
  for (int trial = 0; trial < 5; ++trial) {
    const auto atoms = laserstate::testing::random_diagonal_density(rng, src);
    for (double t : {0.2, 0.9, 2.3}) EXPECT_LT(max_off_diagonal(atomic_source_field(sys, atoms, field0, t)), 1e-10);
  }
}

TEST(AtomicSource, CoherentSuperpositionImpressesPhase) {
  const double theta = 0.6;
  const Vector sup = (ground() + std::exp(kI * theta) * excited()) / std::sqrt(2.0);
  const auto sys = build_atomic_source({1.0, 1.0, 1.0}, 5);
  const auto atoms = atom_product(sys, {sup, sup, sup});
  const auto vac = DensityOperator(fock_state(sys.field_space(), 0).projector());
  const auto rho = atomic_source_field(sys, atoms, vac, 0.3);
  EXPECT_GT(std::abs(rho.matrix()(0, 1)), 1e-3);
  // the impressed phase follows the atomic phase
  EXPECT_NEAR(std::remainder(std::arg(phase_moment(rho, 1)) - theta, 2.0 * kPi), 0.0, 1e-9);
}

TEST(AtomicSource, TimeZeroUnchanged) {
  const auto sys = build_atomic_source({1.0, 0.5}, 5);
  Matrix f = Matrix::Zero(6, 6);
  f(0, 0) = 0.7;
  f(1, 1) = 0.3;
  const DensityOperator field0(LinearOperator(sys.field_space(), f));
  const auto atoms = atom_product(sys, {excited(), ground()});
  EXPECT_LT(max_abs(atomic_source_field(sys, atoms, field0, 0.0).matrix() - f), 1e-12);
}

TEST(AtomicSource, SizingAndPreconditions) {
  const auto sys = build_atomic_source({1.0, 0.5}, 3);
  const auto atoms = atom_product(sys, {excited(), excited()});
  Matrix f = Matrix::Zero(4, 4);
  f(1, 1) = 1.0;
  EXPECT_THROW(atomic_source_field(sys, atoms, DensityOperator(LinearOperator(sys.field_space(), f)), 0.1),
               TruncationError);
  Matrix g = Matrix::Constant(4, 4, 0.25);
  const auto roomy = build_atomic_source({1.0, 0.5}, 9);
  Matrix h = Matrix::Zero(10, 10);
  h.topLeftCorner(4, 4) = g;
  EXPECT_THROW(
      atomic_source_field(roomy, atom_product(roomy, {excited(), ground()}),
                          DensityOperator(LinearOperator(roomy.field_space(), h)), 0.1),
      PreconditionError);
}

TEST(Evolution, ExcitationAndNormConserved) {
  std::mt19937_64 rng(33);
  const auto sys = build_atomic_source({1.0, 0.8, 0.6}, 6);
  for (int trial = 0; trial < 3; ++trial) {
    const auto psi0 = laserstate::testing::random_state(rng, sys.space);
    const auto psi = unitary_evolution(sys.hamiltonian, 0.7 + trial) * psi0;
    EXPECT_NEAR(psi.norm(), 1.0, 1e-10);
    EXPECT_NEAR(expectation(psi, sys.excitation).real(), expectation(psi0, sys.excitation).real(), 1e-9);
  }
}
