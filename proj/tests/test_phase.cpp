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
using laserstate::testing::coherent_density;
using laserstate::testing::fock_density;

namespace {

/// Tr(rho E_a^m (E_b^dag)^m) by explicit operator products.
Complex moment_by_products(const DensityOperator& rho, int m) {
  const auto& s = rho.space();
  const ModeSpace a(s[0].label, s[0].n_max()), b(s[1].label, s[1].n_max());
  auto ea = LinearOperator::identity(s), ebd = LinearOperator::identity(s);
  for (int k = 0; k < m; ++k) {
    ea = ea * embed(susskind_glogower(a), s, 0);
    ebd = ebd * embed(susskind_glogower(b).adjoint(), s, 1);
  }
  return (rho.matrix() * (ea * ebd).matrix()).trace();
}

/// Fourier sum over every p the truncated space allows, moments by products.
std::vector<double> full_sum_density(const DensityOperator& rho, const std::vector<double>& grid) {
  const int top = std::min(rho.space()[0].n_max(), rho.space()[1].n_max());
  std::vector<Complex> mp;
  for (int p = 0; p <= top; ++p) mp.push_back(moment_by_products(rho, p));
  std::vector<double> out;
  for (double d : grid) {
    Complex acc = 0.0;
    for (int p = -top; p <= top; ++p) {
      const Complex m = p >= 0 ? std::conj(mp[std::size_t(p)]) : mp[std::size_t(-p)];
      acc += std::exp(kI * (p * d)) * m;
    }
    out.push_back(acc.real() / (2.0 * kPi));
  }
  return out;
}

TwoCavityState number_pair(int n) {
  const ModeSpace a("a", n + 1), b("b", n + 1);
  return TwoCavityState::product(fock_density(a, n), fock_density(b, n));
}

}  // namespace

TEST(PhaseMoment, NumberStateVanishes) {
  const ModeSpace s("a", 8);
  for (int n : {0, 3, 8})
    for (int m = 1; m <= 4; ++m) EXPECT_EQ(phase_moment(fock_density(s, n), m), Complex(0.0));
}

TEST(PhaseMoment, ZeroOrderIsOne) {
  const ModeSpace s("a", 8);
  EXPECT_EQ(phase_moment(fock_density(s, 2), 0), Complex(1.0));
  EXPECT_THROW(phase_moment(fock_density(s, 2), -1), PreconditionError);
}

TEST(PhaseMoment, CoherentMatchesCosSinSums) {
  const ModeSpace s("a", 40);
  const auto psi = coherent_state(std::polar(2.0, 0.9), s);
  const auto rho = DensityOperator::from_state(psi);
  const auto& r = rho.matrix();
  // <cos phi> = (1/2) sum (rho_{n,n+1} + rho_{n+1,n}), <sin phi> = (1/2i) sum (rho_{n+1,n} - rho_{n,n+1})
  Complex c = 0.0, sn = 0.0;
  for (int n = 0; n < 40; ++n) {
    c += 0.5 * (r(n, n + 1) + r(n + 1, n));
    sn += (r(n + 1, n) - r(n, n + 1)) / (2.0 * kI);
  }
  const Complex me = phase_moment(rho, 1);
  EXPECT_NEAR(std::abs(me - (c + kI * sn)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(me - (rho.matrix() * susskind_glogower(s).matrix()).trace()), 0.0, 1e-12);
}

TEST(PhaseDifferenceMoment, NumberDiagonalVanishes) {
  std::mt19937_64 rng(2);
  const ModeSpace a("a", 5), b("b", 4);
  const auto rho = tensor(laserstate::testing::random_diagonal_density(rng, a),
                          laserstate::testing::random_diagonal_density(rng, b));
  EXPECT_EQ(phase_difference_moment(rho, 1), Complex(0.0));
  EXPECT_EQ(phase_difference_moment(rho, 0), Complex(1.0));
}

TEST(PhaseDifferenceMoment, CoherentProductFactorizes) {
  const ModeSpace a("a", 40), b("b", 40);
  const auto ra = coherent_density(std::polar(2.0, 0.4), a);
  const auto rb = coherent_density(std::polar(1.5, -1.1), b);
  const auto rho = tensor(ra, rb);
  for (int m = 1; m <= 3; ++m) {
    const Complex expected = phase_moment(ra, m) * std::conj(phase_moment(rb, m));
    EXPECT_NEAR(std::abs(phase_difference_moment(rho, m) - expected), 0.0, 1e-12) << m;
  }
}

TEST(PhaseDifferenceMoment, MatchesOperatorProducts) {
  std::mt19937_64 rng(6);
  const CompositeSpace s({ModeSpace("a", 3), ModeSpace("b", 4)});
  const auto rho = laserstate::testing::random_density(rng, s);
  for (int m = 0; m <= 3; ++m)
    EXPECT_NEAR(std::abs(phase_difference_moment(rho, m) - moment_by_products(rho, m)), 0.0, 1e-13) << m;
}

TEST(PhaseDifferenceMoment, BoundedByOne) {
  std::mt19937_64 rng(9);
  const CompositeSpace s({ModeSpace("a", 4), ModeSpace("b", 4)});
  for (int trial = 0; trial < 20; ++trial) {
    const auto rho = laserstate::testing::random_density(rng, s, 1 + int(rng() % 4));
    for (int m = 0; m <= 4; ++m) EXPECT_LE(std::abs(phase_difference_moment(rho, m)), 1.0 + 1e-12);
  }
}

TEST(PhaseDifferenceDistribution, NumberDiagonalUniform) {
  const auto s = number_pair(3);
  const auto d = phase_difference_distribution(s.rho, 4, 256);
  for (double p : d.density) EXPECT_NEAR(p, 1.0 / (2.0 * kPi), 1e-15);
  EXPECT_FALSE(check_distribution(d).has_value());
}

TEST(PhaseDifferenceDistribution, PostCollapseCosine) {
  for (int n : {1, 4, 9})
    for (double gamma : {0.0, 0.7, -2.0}) {
      const auto after = collapse_first_detection(number_pair(n), {1, gamma});
      const auto d = phase_difference_distribution(after.rho, n + 1, 512);
      for (std::size_t k = 0; k < d.size(); ++k)
        EXPECT_NEAR(d.density[k], (1.0 + std::cos(d.grid[k] - gamma)) / (2.0 * kPi), 1e-9);
      EXPECT_FALSE(check_distribution(d).has_value());
    }
}

TEST(PhaseDifferenceDistribution, FirstOrderMatchesFullSum) {
  std::mt19937_64 rng(14);
  const ModeSpace a("a", 4), b("b", 3);
  const auto before = TwoCavityState::product(laserstate::testing::random_diagonal_density(rng, a),
                                              laserstate::testing::random_diagonal_density(rng, b));
  const auto after = collapse_first_detection(before, {1, 0.3});
  for (int p = 2; p <= 3; ++p) EXPECT_LT(std::abs(phase_difference_moment(after.rho, p)), 1e-15);
  const auto d = phase_difference_distribution(after.rho, 1, 128);
  const auto full = full_sum_density(after.rho, d.grid);
  for (std::size_t k = 0; k < d.size(); ++k) EXPECT_NEAR(d.density[k], full[k], 1e-9);
}

TEST(PhaseDifferenceDistribution, GeneralStateMatchesFullSum) {
  std::mt19937_64 rng(15);
  const CompositeSpace s({ModeSpace("a", 3), ModeSpace("b", 3)});
  const auto rho = laserstate::testing::random_density(rng, s);
  const auto d = phase_difference_distribution(rho, 3, 64, 0.25);
  EXPECT_NEAR(d.grid.front(), 0.25, 1e-15);
  const auto full = full_sum_density(rho, d.grid);
  for (std::size_t k = 0; k < d.size(); ++k) EXPECT_NEAR(d.density[k], full[k], 1e-12);
  EXPECT_NEAR(d.integral(), 1.0, 1e-12);
}

TEST(PhaseDifferenceDistribution, Preconditions) {
  const auto s = number_pair(2);
  EXPECT_THROW(phase_difference_distribution(s.rho, 0, 64), PreconditionError);
  EXPECT_THROW(phase_difference_distribution(s.rho, 1, 7), PreconditionError);
  EXPECT_THROW(phase_difference_distribution(fock_density(ModeSpace("a", 2), 1), 1, 64), DimensionMismatch);
}

TEST(PhaseDifferenceDistribution, ShiftTranslates) {
  const int grid = 512;
  const double h = 2.0 * kPi / grid;
  const int steps = 37;
  const double dphi = steps * h;
  const auto after = collapse_first_detection(number_pair(3), {1, 0.2});
  const auto& s = after.rho.space();
  const auto u = embed(phase_shift_operator(ModeSpace("a", 4), dphi), s, 0);
  const auto shifted = evolve(after.rho, u);
  const auto d0 = phase_difference_distribution(after.rho, 4, grid);
  const auto d1 = phase_difference_distribution(shifted, 4, grid);
  // exp(-i N_a dphi) moves the distribution to Delta - dphi
  for (int k = 0; k < grid; ++k)
    EXPECT_NEAR(d1.density[std::size_t(k)], d0.density[std::size_t((k + steps) % grid)], 1e-12);
  EXPECT_NEAR(std::remainder(peak_center(d1) - peak_center(d0) + dphi, 2.0 * kPi), 0.0, h);
}

TEST(CircularVariance, UniformIsPiSquaredOverThree) {
  const auto d = phase_difference_distribution(number_pair(2).rho, 2, kDefaultGridSize);
  for (double c : {0.0, 1.0, -2.5}) EXPECT_NEAR(circular_variance(d, c), kPi * kPi / 3.0, 2e-3);
}

TEST(CircularVariance, CosineIsPiSquaredOverThreeMinusTwo) {
  for (double gamma : {0.0, 0.5, 3.0}) {
    const auto after = collapse_first_detection(number_pair(5), {1, gamma});
    const auto d = phase_difference_distribution(after.rho, 6, kDefaultGridSize);
    EXPECT_NEAR(circular_variance(d, gamma), kPi * kPi / 3.0 - 2.0, 2e-3);
    EXPECT_NEAR(peak_center(d), std::remainder(gamma, 2.0 * kPi), 1e-3);
    EXPECT_NEAR(peak_centered_variance(d), kPi * kPi / 3.0 - 2.0, 2e-3);
  }
}

TEST(CircularVariance, ShrinksWithWidth) {
  double last = 10.0;
  for (double sigma : {0.5, 0.2, 0.05, 0.01}) {
    PhaseDistribution d;
    d.window_origin = -kPi;
    const int g = kDefaultGridSize;
    double norm = 0.0;
    for (int k = 0; k < g; ++k) {
      const double x = -kPi + 2.0 * kPi * k / g;
      d.grid.push_back(x);
      d.density.push_back(std::exp(-0.5 * x * x / (sigma * sigma)));
      norm += d.density.back();
    }
    for (double& p : d.density) p /= norm * d.spacing();
    const double v = circular_variance(d, 0.0);
    EXPECT_NEAR(v, sigma * sigma, 2e-3);
    EXPECT_LT(v, last);
    last = v;
  }
}
