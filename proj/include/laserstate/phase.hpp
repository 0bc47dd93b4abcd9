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
 * @file phase.hpp
 * @brief Canonical phase and phase-difference statistics.
 *
 * Canonical phase moments are Susskind-Glogower moments:
 *
 *     <exp(i m phi)>   = Tr(rho E^m)
 *     <exp(i m Delta)> = Tr(rho E_a^m (E_b^dag)^m),   Delta = phi_a - phi_b
 *
 * and the phase-difference density is the Fourier series
 *
 *     P(Delta) = (1/2pi) sum_p exp(i p Delta) <exp(-i p Delta)>.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "laserstate/hilbert.hpp"

namespace laserstate {

/// Sampled 2pi-periodic density on [window_origin, window_origin + 2pi).
struct PhaseDistribution {
  double window_origin = 0.0;
  std::vector<double> grid;
  std::vector<double> density;

  std::size_t size() const { return grid.size(); }
  double spacing() const { return 2.0 * kPi / static_cast<double>(grid.size()); }

  /// Periodic trapezoidal integral over one window.
  double integral() const {
    double s = 0.0;
    for (double p : density) s += p;
    return s * spacing();
  }

  /// Linear interpolation with periodic wrap.
  double at(double delta) const {
    const double h = spacing();
    double u = std::fmod(delta - window_origin, 2.0 * kPi);
    if (u < 0) u += 2.0 * kPi;
    const double pos = u / h;
    auto k = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(k);
    k %= density.size();
    return (1.0 - frac) * density[k] + frac * density[(k + 1) % density.size()];
  }
};

/// Empty when density >= -1e-9 and the window integral is 1 within 1e-6.
inline std::optional<std::string> check_distribution(const PhaseDistribution& d) {
  if (d.grid.size() != d.density.size() || d.grid.empty()) return "grid and density sizes differ";
  const double lo = *std::min_element(d.density.begin(), d.density.end());
  if (lo < -1e-9) return "negative density " + std::to_string(lo);
  const double integral = d.integral();
  if (std::abs(integral - 1.0) > 1e-6) return "integral " + std::to_string(integral) + " != 1";
  return std::nullopt;
}

namespace detail {

inline void require_single_mode(const CompositeSpace& s, const char* what) {
  if (s.size() != 1 || !s[0].is_mode()) throw DimensionMismatch(std::string(what) + ": expected a single-mode state");
}

inline void require_two_mode(const CompositeSpace& s, const char* what) {
  if (s.size() != 2 || !s[0].is_mode() || !s[1].is_mode())
    throw DimensionMismatch(std::string(what) + ": expected a two-mode (a, b) state");
}

}  // namespace detail

/// <exp(i m phi)> = Tr(rho E^m) = sum_n <n+m|rho|n>. The m-th negative moment is
/// the complex conjugate.
inline Complex phase_moment(const DensityOperator& rho, int m) {
  detail::require_single_mode(rho.space(), "phase_moment");
  if (m < 0) throw PreconditionError("phase_moment: m must be non-negative");
  if (m == 0) return 1.0;
  const auto& r = rho.matrix();
  Complex acc = 0.0;
  for (Eigen::Index n = 0; n + m < r.rows(); ++n) acc += r(n + m, n);
  return acc;
}

/// <exp(i m Delta)> = Tr(rho E_a^m (E_b^dag)^m). E_a^m (E_b^dag)^m maps
/// |n_a, n_b> to |n_a - m, n_b + m>, so only those matrix elements contribute.
inline Complex phase_difference_moment(const DensityOperator& rho_ab, int m) {
  detail::require_two_mode(rho_ab.space(), "phase_difference_moment");
  if (m < 0) throw PreconditionError("phase_difference_moment: m must be non-negative");
  if (m == 0) return 1.0;
  const int da = rho_ab.space()[0].dim;
  const int db = rho_ab.space()[1].dim;
  const auto& r = rho_ab.matrix();
  Complex acc = 0.0;
  for (int na = m; na < da; ++na)
    for (int nb = 0; nb + m < db; ++nb) acc += r(Eigen::Index(na) * db + nb, Eigen::Index(na - m) * db + nb + m);
  return acc;
}

/// Largest moment order that can be nonzero on the truncated two-mode space.
inline int max_phase_order(const CompositeSpace& two_mode) {
  return std::min(two_mode[0].n_max(), two_mode[1].n_max());
}

inline constexpr int kDefaultGridSize = 4096;

/// Fourier-series P(Delta) from the moments |p| <= p_max, sampled on
/// grid_size points starting at window_origin.
inline PhaseDistribution phase_difference_distribution(const DensityOperator& rho_ab, int p_max, int grid_size,
                                                       double window_origin = -kPi) {
  detail::require_two_mode(rho_ab.space(), "phase_difference_distribution");
  if (p_max < 1) throw PreconditionError("phase_difference_distribution: p_max must be >= 1");
  if (grid_size < 8) throw PreconditionError("phase_difference_distribution: grid_size must be >= 8");

  const int top = std::min(p_max, max_phase_order(rho_ab.space()));
  std::vector<Complex> moments(static_cast<std::size_t>(top) + 1);
  for (int p = 0; p <= top; ++p) moments[static_cast<std::size_t>(p)] = phase_difference_moment(rho_ab, p);

  PhaseDistribution out;
  out.window_origin = window_origin;
  out.grid.resize(static_cast<std::size_t>(grid_size));
  out.density.resize(static_cast<std::size_t>(grid_size));
  const double h = 2.0 * kPi / grid_size;
  for (int k = 0; k < grid_size; ++k) {
    const double delta = window_origin + h * k;
    // p and -p terms: exp(ip D) conj(M_p) + exp(-ip D) M_p
    Complex sum = moments[0];
    for (int p = 1; p <= top; ++p) {
      const Complex e = std::exp(kI * (p * delta));
      const Complex mp = moments[static_cast<std::size_t>(p)];
      sum += e * std::conj(mp) + std::conj(e) * mp;
    }
    sum /= 2.0 * kPi;
    if (std::abs(sum.imag()) > 1e-8)
      throw FourierResidue("imaginary residue " + std::to_string(sum.imag()) + " at delta " + std::to_string(delta));
    out.grid[static_cast<std::size_t>(k)] = delta;
    out.density[static_cast<std::size_t>(k)] = sum.real();
  }
  return out;
}

inline PhaseDistribution phase_difference_distribution(const DensityOperator& rho_ab) {
  return phase_difference_distribution(rho_ab, max_phase_order(rho_ab.space()), kDefaultGridSize);
}

/// Location of the density maximum, refined by a parabola through the
/// neighbouring samples.
inline double peak_center(const PhaseDistribution& d) {
  const auto n = d.density.size();
  const auto k = static_cast<std::size_t>(std::max_element(d.density.begin(), d.density.end()) - d.density.begin());
  const double ym = d.density[(k + n - 1) % n];
  const double y0 = d.density[k];
  const double yp = d.density[(k + 1) % n];
  const double curv = ym - 2.0 * y0 + yp;
  const double shift = curv < 0.0 ? std::clamp(0.5 * (ym - yp) / curv, -0.5, 0.5) : 0.0;
  return d.grid[k] + shift * d.spacing();
}

/// Integral of (Delta - center)^2 P(Delta) over [center - pi, center + pi),
/// trapezoidal on the distribution's samples re-mapped into that window. The
/// window edges are added as nodes, interpolated periodically.
inline double circular_variance(const PhaseDistribution& d, double center) {
  const double lo = center - kPi;
  std::vector<std::pair<double, double>> nodes;
  nodes.reserve(d.size() + 2);
  for (std::size_t k = 0; k < d.size(); ++k) {
    double x = std::fmod(d.grid[k] - lo, 2.0 * kPi);
    if (x < 0) x += 2.0 * kPi;
    nodes.emplace_back(lo + x, d.density[k]);
  }
  const double edge = d.at(lo);
  nodes.emplace_back(lo, edge);
  nodes.emplace_back(lo + 2.0 * kPi, edge);
  std::sort(nodes.begin(), nodes.end());

  double acc = 0.0;
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    const auto [x0, p0] = nodes[k - 1];
    const auto [x1, p1] = nodes[k];
    const double f0 = (x0 - center) * (x0 - center) * p0;
    const double f1 = (x1 - center) * (x1 - center) * p1;
    acc += 0.5 * (x1 - x0) * (f0 + f1);
  }
  return acc;
}

/// Variance in the window centred on the distribution's peak.
inline double peak_centered_variance(const PhaseDistribution& d) { return circular_variance(d, peak_center(d)); }

}  // namespace laserstate
