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
using laserstate::testing::random_density;

TEST(ModeSpace, RejectsNegativeNMax) { EXPECT_THROW(ModeSpace("a", -1), PreconditionError); }

TEST(CompositeSpace, DimensionIsProduct) {
  const CompositeSpace s({ModeSpace("a", 2), aux_space("atom", 2), ModeSpace("b", 4)});
  EXPECT_EQ(s.dim(), 3 * 2 * 5);
  EXPECT_EQ(s.index_of("atom"), 1u);
  EXPECT_THROW(s.index_of("c"), UnknownLabel);
}

TEST(CompositeSpace, DuplicateLabelsRejected) {
  EXPECT_THROW(CompositeSpace({ModeSpace("a", 1), ModeSpace("a", 2)}), PreconditionError);
}

TEST(CompositeSpace, LastFactorVariesFastest) {
  const CompositeSpace s({ModeSpace("a", 2), ModeSpace("b", 3)});
  EXPECT_EQ(flat_index(s, {0, 1}), 1);
  EXPECT_EQ(flat_index(s, {1, 0}), 4);
  EXPECT_EQ(flat_index(s, {2, 3}), 11);
}

TEST(LinearOperator, DimensionChecked) {
  EXPECT_THROW(LinearOperator(ModeSpace("a", 2), Matrix::Zero(2, 2)), DimensionMismatch);
  const auto a = annihilation(ModeSpace("a", 2));
  const auto b = annihilation(ModeSpace("b", 2));
  EXPECT_THROW(a + b, DimensionMismatch);
  EXPECT_THROW(a * b, DimensionMismatch);
}

TEST(Annihilation, BasisAction) {
  const ModeSpace s("a", 2);
  const auto a = annihilation(s);
  const auto one = a * fock_state(s, 1);
  EXPECT_NEAR(std::abs(one[0] - 1.0), 0.0, 1e-15);
  const auto two = a * fock_state(s, 2);
  EXPECT_NEAR(std::abs(two[1] - std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_EQ((a * fock_state(s, 0)).norm(), 0.0);
}

TEST(Annihilation, CoherentExpectationOne) {
  const ModeSpace s("a", 30);
  const auto psi = coherent_state(1.0, s);
  // direct matrix-vector product against the eigenvalue
  const Vector apsi = annihilation(s).matrix() * psi.amplitudes();
  const Complex mean = psi.amplitudes().dot(apsi);
  EXPECT_NEAR(std::abs(mean - 1.0), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(expectation(psi, annihilation(s)) - 1.0), 0.0, 1e-10);
}

TEST(Annihilation, CommutatorTopDefect) {
  for (int n_max : {0, 1, 3, 10}) {
    const ModeSpace s("a", n_max);
    const auto a = annihilation(s);
    Matrix expected = Matrix::Identity(s.dim(), s.dim());
    expected(n_max, n_max) -= static_cast<double>(n_max + 1);
    // sqrt(n)^2 rounds to within one ulp of n
    EXPECT_LT(max_abs(commutator(a, a.adjoint()).matrix() - expected), 1e-14) << n_max;
  }
}

TEST(SusskindGlogower, LowersByOne) {
  const ModeSpace s("a", 4);
  const auto e = susskind_glogower(s);
  const auto out = e * fock_state(s, 1);
  EXPECT_EQ(max_abs(out.amplitudes() - fock_state(s, 0).amplitudes()), 0.0);
  EXPECT_EQ((e * fock_state(s, 0)).norm(), 0.0);
}

TEST(SusskindGlogower, SquareRootNumberRelation) {
  const ModeSpace s("a", 10);
  const auto e = susskind_glogower(s);
  const auto a = annihilation(s);
  const auto root = sqrt_number_operator(s);
  EXPECT_LT(max_abs_diff(e.adjoint() * a, root), 1e-12);
  EXPECT_LT(max_abs_diff(a.adjoint() * e, root), 1e-12);
}

TEST(SusskindGlogower, TruncatedDefectLocations) {
  const ModeSpace s("a", 6);
  const auto e = susskind_glogower(s);
  Matrix top = Matrix::Identity(7, 7);
  top(6, 6) = 0.0;
  Matrix vac = Matrix::Identity(7, 7);
  vac(0, 0) = 0.0;
  EXPECT_EQ(max_abs((e * e.adjoint()).matrix() - top), 0.0);
  EXPECT_EQ(max_abs((e.adjoint() * e).matrix() - vac), 0.0);
}

TEST(CoherentState, VacuumAtZero) {
  const ModeSpace s("a", 5);
  EXPECT_EQ(max_abs(coherent_state(0.0, s).amplitudes() - fock_state(s, 0).amplitudes()), 0.0);
}

TEST(CoherentState, PoissonMean) {
  const ModeSpace s("a", 30);
  const auto psi = coherent_state(2.0, s);
  double mean = 0.0;
  for (int n = 0; n <= 30; ++n) mean += n * std::norm(psi[n]);
  EXPECT_NEAR(mean, 4.0, 1e-9);
  EXPECT_NEAR(expectation(psi, number_operator(s)).real(), 4.0, 1e-9);
}

TEST(CoherentState, PhaseMomentArgument) {
  const ModeSpace s("a", 30);
  for (double theta : {0.3, -1.2, 2.9}) {
    const auto psi = coherent_state(std::polar(2.0, theta), s);
    const Complex me = expectation(psi, susskind_glogower(s));
    // Poisson sum of sqrt(p_n p_{n+1}) carries the full modulus
    double modulus = 0.0;
    for (int n = 0; n < 30; ++n) {
      const double pn = std::exp(-4.0 + n * std::log(4.0) - std::lgamma(n + 1.0));
      const double pn1 = std::exp(-4.0 + (n + 1) * std::log(4.0) - std::lgamma(n + 2.0));
      modulus += std::sqrt(pn * pn1);
    }
    EXPECT_NEAR(std::arg(me), theta, 1e-9);
    EXPECT_NEAR(std::abs(me), modulus, 1e-9);
  }
}

TEST(CoherentState, TailCheck) {
  EXPECT_THROW(coherent_state(2.0, ModeSpace("a", 10)), TruncationError);
  const int n = coherent_n_max(2.0);
  EXPECT_NO_THROW(coherent_state(2.0, ModeSpace("a", n)));
  EXPECT_THROW(coherent_state(2.0, ModeSpace("a", n - 1)), TruncationError);
  EXPECT_LT(coherent_tail_mass(2.0, n), 1e-12);
}

TEST(PhaseShift, ZeroIsIdentity) {
  const ModeSpace s("a", 7);
  EXPECT_EQ(max_abs_diff(phase_shift_operator(s, 0.0), LinearOperator::identity(s)), 0.0);
}

TEST(PhaseShift, PiFlipsOddNumbers) {
  const ModeSpace s("a", 7);
  const auto u = phase_shift_operator(s, kPi);
  for (int n = 0; n <= 7; ++n) {
    const auto out = u * fock_state(s, n);
    EXPECT_NEAR(std::abs(out[n] - ((n % 2) ? -1.0 : 1.0)), 0.0, 1e-15);
  }
}

TEST(PhaseShift, PiMapsCoherentToNegative) {
  const ModeSpace s("a", 40);
  const Complex alpha = std::polar(2.0, 0.7);
  const auto out = phase_shift_operator(s, kPi) * coherent_state(alpha, s);
  EXPECT_LT(max_abs(out.amplitudes() - coherent_state(-alpha, s).amplitudes()), 1e-10);
}

TEST(Tensor, KroneckerOrdering) {
  const ModeSpace a("a", 1), b("b", 2);
  const auto psi = tensor({fock_state(a, 1), fock_state(b, 2)});
  const CompositeSpace ab({a, b});
  EXPECT_EQ(psi.space(), ab);
  EXPECT_EQ(psi[flat_index(ab, {1, 2})], Complex(1.0));
  const auto op = tensor({annihilation(a), LinearOperator::identity(b)});
  EXPECT_EQ(max_abs_diff(op, embed(annihilation(a), ab, 0)), 0.0);
}

TEST(PartialTrace, ProductStateIdentity) {
  std::mt19937_64 rng(7);
  const ModeSpace a("a", 3), b("b", 2);
  const auto ra = random_density(rng, a);
  const auto rb = random_density(rng, b);
  const auto joint = tensor(ra, rb);
  EXPECT_LT(max_abs_diff(partial_trace(joint.op(), {0}), ra.op()), 1e-12);
  EXPECT_LT(max_abs_diff(partial_trace(joint.op(), {1}), rb.op()), 1e-12);
}

TEST(PartialTrace, OperatorTimesTrace) {
  std::mt19937_64 rng(11);
  const ModeSpace a("a", 2);
  const Factor x = aux_space("x", 3);
  const LinearOperator A(a, laserstate::testing::random_complex(rng, 3, 3));
  const LinearOperator B(x, laserstate::testing::random_complex(rng, 3, 3));
  const auto ab = tensor({A, B});
  EXPECT_LT(max_abs_diff(partial_trace(ab, {0}), B.trace() * A), 1e-12);
  EXPECT_LT(max_abs_diff(partial_trace(ab, {1}), A.trace() * B), 1e-12);
}

TEST(PartialTrace, PreservesTraceAndMiddleFactor) {
  std::mt19937_64 rng(5);
  const CompositeSpace s({ModeSpace("a", 1), aux_space("m", 3), ModeSpace("b", 2)});
  const auto rho = random_density(rng, s);
  const auto mid = partial_trace(rho.op(), {1});
  EXPECT_NEAR(std::abs(mid.trace() - 1.0), 0.0, 1e-12);
  EXPECT_EQ(mid.space(), CompositeSpace(aux_space("m", 3)));
  // element-by-element oracle
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      Complex acc = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 3; ++k) acc += rho.matrix()(flat_index(s, {i, r, k}), flat_index(s, {i, c, k}));
      EXPECT_NEAR(std::abs(mid(r, c) - acc), 0.0, 1e-14);
    }
}

TEST(MatrixExponential, ZeroIsIdentity) {
  const ModeSpace s("a", 4);
  EXPECT_EQ(max_abs_diff(matrix_exponential(LinearOperator::zero(s)), LinearOperator::identity(s)), 0.0);
}

TEST(MatrixExponential, AntiHermitianIsUnitary) {
  std::mt19937_64 rng(3);
  const CompositeSpace s({ModeSpace("a", 5), aux_space("x", 2)});
  for (int trial = 0; trial < 5; ++trial) {
    Matrix g = laserstate::testing::random_complex(rng, s.dim(), s.dim());
    Matrix h = g + g.adjoint();
    h *= 50.0 / h.operatorNorm();
    const LinearOperator gen(s, -kI * h);
    EXPECT_LT(unitarity_defect(matrix_exponential(gen)), 1e-9);
    EXPECT_LT(unitarity_defect(unitary_evolution(LinearOperator(s, h), 1.0)), 1e-9);
    EXPECT_LT(max_abs_diff(matrix_exponential(gen), unitary_evolution(LinearOperator(s, h), 1.0)), 1e-9);
  }
}

TEST(MatrixExponential, JaynesCummingsPiPulseAmplitudes) {
  const int n = 3;
  const double lambda = 0.8;
  const auto h = jc_hamiltonian(6, lambda);
  const double t = pi_pulse_time(n, lambda);
  const auto u = matrix_exponential(Complex(0.0, -t) * h);
  const auto space = atom_field_space(6);
  const Vector out = u.matrix().col(flat_index(space, {0, n}));
  const double x = std::sqrt(double(n)) * lambda * t;
  EXPECT_NEAR(std::abs(out(flat_index(space, {0, n})) - std::cos(x)), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(out(flat_index(space, {1, n - 1})) + std::sin(x)), 0.0, 1e-9);
}

TEST(Eigenvalues, HermitianSpectrum) {
  const ModeSpace s("a", 4);
  const auto ev = eigenvalues_hermitian(number_operator(s));
  ASSERT_EQ(ev.size(), 5u);
  for (int n = 0; n <= 4; ++n) EXPECT_NEAR(ev[std::size_t(n)], n, 1e-12);
}

TEST(DensityOperator, ValidationRejects) {
  const ModeSpace s("a", 1);
  Matrix m(2, 2);
  m << 0.5, 0.1, 0.2, 0.5;  // not Hermitian
  EXPECT_THROW(DensityOperator(LinearOperator(s, m)), ValidationError);
  m << 0.6, 0.0, 0.0, 0.6;  // trace 1.2
  EXPECT_THROW(DensityOperator(LinearOperator(s, m)), ValidationError);
  m << 1.2, 0.0, 0.0, -0.2;  // negative eigenvalue
  EXPECT_THROW(DensityOperator(LinearOperator(s, m)), ValidationError);
  m << 0.5, 0.5, 0.5, 0.5;
  EXPECT_NO_THROW(DensityOperator(LinearOperator(s, m)));
}

TEST(DensityOperator, NormalizedRejectsZeroTrace) {
  const ModeSpace s("a", 2);
  EXPECT_THROW(DensityOperator::normalized(LinearOperator::zero(s)), DegenerateNormalization);
}

TEST(Expectation, DensityMatchesTraceOfProduct) {
  std::mt19937_64 rng(19);
  const ModeSpace s("a", 5);
  const auto rho = random_density(rng, s);
  const auto a = annihilation(s);
  EXPECT_NEAR(std::abs(expectation(rho, a) - (rho.matrix() * a.matrix()).trace()), 0.0, 1e-13);
}
