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
 * @file twolaser.hpp
 * @brief Photodetection of light leaking from one or two cavities.
 *
 * Light from cavities a and b meets on a 50:50 beam splitter. A click at
 * detector 1 with path phase gamma applies the jump operator
 *
 *     M = a + exp(i gamma) b,        rho -> M rho M^dag / Tr(M rho M^dag),
 *
 * and a click at detector 2 uses gamma + pi. The leak amplitude is a common
 * factor of every conditional quantity and never appears.
 *
 * Cavity internal systems may carry extra factors (sources, atoms); the
 * field modes are located by factor index.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "laserstate/hilbert.hpp"
#include "laserstate/phase.hpp"

namespace laserstate {

struct DetectionEvent {
  int detector = 1;    ///< 1 or 2
  double gamma = 0.0;  ///< path phase for detector 1

  /// exp(i gamma) for detector 1, exp(i (gamma + pi)) = -exp(i gamma) for detector 2.
  Complex phase_factor() const {
    if (detector != 1 && detector != 2) throw PreconditionError("detector must be 1 or 2");
    const Complex e = std::exp(kI * gamma);
    return detector == 1 ? e : -e;
  }

  /// gamma, or gamma + pi for detector 2.
  double effective_gamma() const { return detector == 1 ? gamma : gamma + kPi; }
};

/// Density operator over both cavities' internal systems, with the two field
/// modes identified by factor index.
struct TwoCavityState {
  DensityOperator rho;
  std::size_t mode_a = 0;
  std::size_t mode_b = 1;

  /// rho_a (x) rho_b, each on a single field mode.
  static TwoCavityState product(const DensityOperator& a, const DensityOperator& b) {
    return {tensor(a, b), 0, 1};
  }

  /// rho_a (x) rho_b where each cavity may carry extra factors; the field
  /// factor of each is named by label.
  static TwoCavityState product(const DensityOperator& a, const std::string& field_a, const DensityOperator& b,
                                const std::string& field_b) {
    const auto ia = a.space().index_of(field_a);
    const auto ib = b.space().index_of(field_b);
    if (!a.space()[ia].is_mode() || !b.space()[ib].is_mode())
      throw PreconditionError("field factors must be oscillator modes");
    return {tensor(a, b), ia, a.space().size() + ib};
  }

  ModeSpace space_a() const { return {rho.space()[mode_a].label, rho.space()[mode_a].n_max()}; }
  ModeSpace space_b() const { return {rho.space()[mode_b].label, rho.space()[mode_b].n_max()}; }

  /// Reduced two-mode field state (a, b), in that order.
  DensityOperator fields() const {
    if (rho.space().size() == 2 && mode_a == 0 && mode_b == 1) return rho;
    if (mode_a > mode_b) throw PreconditionError("fields(): mode a must precede mode b in the composite");
    return partial_trace(rho, {mode_a, mode_b});
  }
};

namespace detail {

/// One term c * a_k of a jump operator M = sum_k c_k a_k.
struct LoweringTerm {
  std::size_t mode;
  Complex coeff;
};

using JumpOperator = std::vector<LoweringTerm>;

inline Eigen::Index stride_of(const CompositeSpace& space, std::size_t which) {
  Eigen::Index s = 1;
  for (std::size_t k = which + 1; k < space.size(); ++k) s *= space[k].dim;
  return s;
}

/// X M^dag, acting on whole columns: (X a_k^dag)(:, c) = sqrt(n_k(c) + 1) X(:, c + stride_k).
inline Matrix times_adjoint(const Matrix& x, const CompositeSpace& space, const JumpOperator& m) {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (const auto& t : m) {
    const Eigen::Index stride = stride_of(space, t.mode);
    const int dim = space[t.mode].dim;
    const Complex c = std::conj(t.coeff);
    for (Eigen::Index col = 0; col < x.cols(); ++col) {
      const int n = static_cast<int>((col / stride) % dim);
      if (n + 1 < dim) out.col(col) += (c * std::sqrt(double(n + 1))) * x.col(col + stride);
    }
  }
  return out;
}

/// M rho M^dag for Hermitian rho, as ((rho M^dag)^dag M^dag)^dag.
inline Matrix sandwich(const JumpOperator& m, const CompositeSpace& space, const Matrix& rho) {
  const Matrix y = times_adjoint(rho, space, m);
  return times_adjoint(y.adjoint(), space, m).adjoint();
}

/// Tr(M rho M^dag) without forming the product.
inline double sandwich_trace(const JumpOperator& m, const CompositeSpace& space, const Matrix& rho) {
  const Matrix y = times_adjoint(rho, space, m);
  Complex acc = 0.0;
  for (const auto& t : m) {
    const Eigen::Index stride = stride_of(space, t.mode);
    const int dim = space[t.mode].dim;
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      const int n = static_cast<int>((r / stride) % dim);
      if (n + 1 < dim) acc += t.coeff * std::sqrt(double(n + 1)) * y(r + stride, r);
    }
  }
  return acc.real();
}

inline JumpOperator jump_operator(const TwoCavityState& s, const DetectionEvent& e) {
  return {{s.mode_a, 1.0}, {s.mode_b, e.phase_factor()}};
}

}  // namespace detail

struct CollapseResult {
  DensityOperator rho;
  double weight = 0.0;  ///< Tr(a rho a^dag) = mean photon number
};

/// One detection from a single cavity: rho -> a rho a^dag / Tr(a rho a^dag).
inline CollapseResult single_cavity_collapse(const DensityOperator& rho, std::size_t mode) {
  const auto& space = rho.space();
  if (mode >= space.size() || !space[mode].is_mode())
    throw PreconditionError("single_cavity_collapse: factor is not an oscillator mode");
  const Eigen::Index stride = detail::stride_of(space, mode);
  double w = 0.0;
  for (Eigen::Index i = 0; i < rho.dim(); ++i)
    w += static_cast<double>((i / stride) % space[mode].dim) * rho.matrix()(i, i).real();
  if (!(w > kDegeneracyThreshold))
    throw NoPhoton("single_cavity_collapse: mean photon number " + std::to_string(w) + " is zero");
  const Matrix out = detail::sandwich({{mode, 1.0}}, space, rho.matrix());
  return {DensityOperator::from_positive(LinearOperator(space, out / w)), w};
}

/// Tr[(a + e b) rho (a^dag + e^* b^dag)], e the event's phase factor.
inline double detection_weight(const TwoCavityState& state, const DetectionEvent& event) {
  return std::max(0.0, detail::sandwich_trace(detail::jump_operator(state, event), state.rho.space(),
                                              state.rho.matrix()));
}

/// State after the first click, M rho M^dag / Tr(M rho M^dag).
inline TwoCavityState collapse_first_detection(const TwoCavityState& state, const DetectionEvent& event) {
  const Matrix out = detail::sandwich(detail::jump_operator(state, event), state.rho.space(), state.rho.matrix());
  const double w = out.trace().real();
  if (!(w > kDegeneracyThreshold))
    throw NoPhoton("collapse_first_detection: detection weight " + std::to_string(w) + " is zero");
  return {DensityOperator::from_positive(LinearOperator(state.rho.space(), out / w)), state.mode_a, state.mode_b};
}

/// Largest coherence <n_a n_b|rho|n_a' n_b'> between different joint photon numbers.
inline double number_coherence(const DensityOperator& fields) {
  detail::require_two_mode(fields.space(), "number_coherence");
  const auto& r = fields.matrix();
  double worst = 0.0;
  for (Eigen::Index x = 0; x < r.rows(); ++x)
    for (Eigen::Index y = 0; y < r.cols(); ++y)
      if (x != y) worst = std::max(worst, std::abs(r(x, y)));
  return worst;
}

inline bool is_number_diagonal(const TwoCavityState& s, double tol = 1e-10) {
  return number_coherence(s.fields()) <= tol;
}

/// Photon-number moments of the two cavity fields before detection.
struct FieldMoments {
  double mean_a = 0, mean_b = 0;    ///< <n_a>, <n_b>
  double square_a = 0, square_b = 0;  ///< <n_a^2>, <n_b^2>
  double product = 0;               ///< <n_a n_b>
  double sqrt_product = 0;          ///< <n_a^{1/2} n_b^{1/2}>
};

inline FieldMoments field_moments(const TwoCavityState& s) {
  const auto f = s.fields();
  const int db = f.space()[1].dim;
  FieldMoments m;
  for (Eigen::Index x = 0; x < f.dim(); ++x) {
    const double p = f.matrix()(x, x).real();
    const double na = static_cast<double>(x / db);
    const double nb = static_cast<double>(x % db);
    m.mean_a += p * na;
    m.mean_b += p * nb;
    m.square_a += p * na * na;
    m.square_b += p * nb * nb;
    m.product += p * na * nb;
    m.sqrt_product += p * std::sqrt(na * nb);
  }
  return m;
}

/// Closed-form amplitude c in P(Delta) = 1/(2pi) + (c/pi) cos(Delta - gamma)
/// after one click on number-diagonal cavities.
inline double post_collapse_fringe_amplitude(const FieldMoments& m) {
  return m.sqrt_product / (m.mean_a + m.mean_b);
}

struct PhaseComparison {
  PhaseDistribution numeric;
  PhaseDistribution analytic;
  double fringe_amplitude = 0.0;
  double max_deviation = 0.0;
};

/// P(Delta) after the first click, computed from the collapsed state's phase
/// moments and compared pointwise with the closed form. Refuses inputs with
/// optical coherences, for which the closed form does not hold.
inline PhaseComparison post_collapse_phase_distribution(const TwoCavityState& before, const DetectionEvent& event,
                                                        int grid_size = kDefaultGridSize, int p_max = -1,
                                                        double window_origin = -kPi) {
  if (!is_number_diagonal(before))
    throw PreconditionError("post_collapse_phase_distribution: cavities carry optical coherences");
  const auto after = collapse_first_detection(before, event);
  const auto fields = after.fields();
  const int order = p_max < 0 ? max_phase_order(fields.space()) : p_max;

  PhaseComparison out;
  out.numeric = phase_difference_distribution(fields, std::max(order, 1), grid_size, window_origin);
  out.fringe_amplitude = post_collapse_fringe_amplitude(field_moments(before));
  out.analytic = out.numeric;
  const double g = event.effective_gamma();
  for (std::size_t k = 0; k < out.analytic.size(); ++k) {
    out.analytic.density[k] =
        1.0 / (2.0 * kPi) + out.fringe_amplitude / kPi * std::cos(out.analytic.grid[k] - g);
    out.max_deviation = std::max(out.max_deviation, std::abs(out.analytic.density[k] - out.numeric.density[k]));
  }
  return out;
}

struct SecondDetectionRatio {
  double p11 = 0.0;  ///< weight for the same detector again
  double p12 = 0.0;  ///< weight for the other detector
  double ratio = 0.0;
  double ratio_analytic = 0.0;
};

/// (<n_a^2> + <n_b^2> - <n_a> - <n_b>) / (same + 4 <n_a n_b>)
inline double second_detection_ratio_analytic(const FieldMoments& m) {
  const double base = m.square_a + m.square_b - m.mean_a - m.mean_b;
  return base / (base + 4.0 * m.product);
}

/// After a detector-1 click at gamma, relative weights of the next click at
/// detector 2 versus detector 1.
inline SecondDetectionRatio second_detection_ratio(const TwoCavityState& state, double gamma) {
  if (!is_number_diagonal(state))
    throw PreconditionError("second_detection_ratio: cavities carry optical coherences");
  const DetectionEvent first{1, gamma};
  const auto after = collapse_first_detection(state, first);
  SecondDetectionRatio r;
  r.p11 = detection_weight(after, first);
  r.p12 = detection_weight(after, DetectionEvent{2, gamma});
  if (!(r.p11 > kDegeneracyThreshold)) throw NoPhoton("second_detection_ratio: no second photon");
  r.ratio = r.p12 / r.p11;
  r.ratio_analytic = second_detection_ratio_analytic(field_moments(state));
  return r;
}

struct SimulationTrace {
  std::uint64_t seed = 0;
  std::vector<DetectionEvent> events;
  std::vector<double> weight1;    ///< detector-1 weight before each event
  std::vector<double> weight2;    ///< detector-2 weight before each event
  std::vector<double> variance;   ///< peak-centred P(Delta) variance; [0] is the initial state
};

/// Uniform double in [0, 1) from the top 53 bits; fixed across platforms.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Repeated clicks: weights are recomputed from the current collapsed state,
/// a detector is drawn in proportion, and the state collapses again.
inline SimulationTrace sequential_detection_simulation(const TwoCavityState& initial, double gamma, int n_events,
                                                       std::uint64_t seed, int grid_size = kDefaultGridSize) {
  const auto m0 = field_moments(initial);
  if (n_events < 0) throw PreconditionError("n_events must be non-negative");
  if (m0.mean_a + m0.mean_b + 1e-9 < n_events)
    throw PreconditionError("sequential_detection_simulation: fewer photons than requested events");

  std::mt19937_64 rng(seed);
  SimulationTrace trace;
  trace.seed = seed;
  auto variance_of = [&](const TwoCavityState& s) {
    const auto f = s.fields();
    return peak_centered_variance(
        phase_difference_distribution(f, std::max(1, max_phase_order(f.space())), grid_size));
  };

  TwoCavityState state = initial;
  trace.variance.push_back(variance_of(state));
  for (int k = 0; k < n_events; ++k) {
    const double w1 = detection_weight(state, {1, gamma});
    const double w2 = detection_weight(state, {2, gamma});
    if (!(w1 + w2 > kDegeneracyThreshold)) throw NoPhoton("sequential_detection_simulation: cavities exhausted");
    const DetectionEvent ev{uniform01(rng) * (w1 + w2) < w1 ? 1 : 2, gamma};
    state = collapse_first_detection(state, ev);
    trace.events.push_back(ev);
    trace.weight1.push_back(w1);
    trace.weight2.push_back(w2);
    trace.variance.push_back(variance_of(state));
  }
  return trace;
}

/// Coherent states of one amplitude with phases theta_i prepared with
/// probabilities weights[i].
struct CoherentEnsemble {
  ModeSpace space;
  double modulus = 0.0;
  std::vector<double> phases;
  std::vector<double> weights;

  static CoherentEnsemble uniform(const ModeSpace& space, double modulus, int points) {
    if (points < 1) throw PreconditionError("ensemble needs at least one phase");
    CoherentEnsemble e{space, modulus, {}, {}};
    for (int i = 0; i < points; ++i) {
      e.phases.push_back(2.0 * kPi * i / points);
      e.weights.push_back(1.0 / points);
    }
    return e;
  }

  void validate() const {
    if (phases.empty() || phases.size() != weights.size())
      throw PreconditionError("ensemble phases and weights must be nonempty and the same length");
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw PreconditionError("ensemble weight is negative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-10) throw PreconditionError("ensemble weights must sum to 1");
  }

  Complex amplitude(std::size_t i) const { return std::polar(modulus, phases[i]); }

  /// a priori density sum_i P(i) |alpha_i><alpha_i|
  DensityOperator density() const {
    validate();
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    for (std::size_t i = 0; i < phases.size(); ++i) {
      const auto v = coherent_state(amplitude(i), space).amplitudes();
      m += weights[i] * v * v.adjoint();
    }
    return DensityOperator::from_positive(LinearOperator(space, m));
  }
};

struct RetrodictionResult {
  Eigen::MatrixXd posterior_weights;  ///< P(i, k | event), rows index ensemble a, columns b
  DensityOperator posterior;
};

/// Retrodiction over coherent preparations after one click:
/// P(i, k | event) proportional to P_a(i) P_b(k) |alpha_i + e beta_k|^2, and the
/// posterior density sum_ik P(i, k | event) |alpha_i><alpha_i| (x) |beta_k><beta_k|.
inline RetrodictionResult retrodict_coherent_ensemble(const CoherentEnsemble& ens_a, const CoherentEnsemble& ens_b,
                                                      const DetectionEvent& event) {
  ens_a.validate();
  ens_b.validate();
  const Complex e = event.phase_factor();
  const auto na = static_cast<Eigen::Index>(ens_a.phases.size());
  const auto nb = static_cast<Eigen::Index>(ens_b.phases.size());

  Eigen::MatrixXd w(na, nb);
  double total = 0.0;
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index k = 0; k < nb; ++k) {
      const double v = ens_a.weights[std::size_t(i)] * ens_b.weights[std::size_t(k)] *
                       std::norm(ens_a.amplitude(std::size_t(i)) + e * ens_b.amplitude(std::size_t(k)));
      w(i, k) = v;
      total += v;
    }
  if (!(total > kDegeneracyThreshold)) throw DegenerateNormalization("retrodiction: every posterior weight vanishes");
  w /= total;

  std::vector<Vector> kets_a, kets_b;
  for (Eigen::Index i = 0; i < na; ++i) kets_a.push_back(coherent_state(ens_a.amplitude(std::size_t(i)), ens_a.space).amplitudes());
  for (Eigen::Index k = 0; k < nb; ++k) kets_b.push_back(coherent_state(ens_b.amplitude(std::size_t(k)), ens_b.space).amplitudes());

  // posterior = X X^dag with columns sqrt(w_ik) |alpha_i> (x) |beta_k>, built in blocks.
  const CompositeSpace space({Factor(ens_a.space), Factor(ens_b.space)});
  const Eigen::Index dim = space.dim();
  const Eigen::Index db = ens_b.space.dim();
  Matrix post = Matrix::Zero(dim, dim);
  constexpr Eigen::Index kBlock = 256;
  Matrix x(dim, kBlock);
  Eigen::Index filled = 0;
  auto flush = [&] {
    if (filled == 0) return;
    post.noalias() += x.leftCols(filled) * x.leftCols(filled).adjoint();
    filled = 0;
  };
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index k = 0; k < nb; ++k) {
      if (w(i, k) == 0.0) continue;
      const double s = std::sqrt(w(i, k));
      for (Eigen::Index p = 0; p < ens_a.space.dim(); ++p)
        x.col(filled).segment(p * db, db) = (s * kets_a[std::size_t(i)](p)) * kets_b[std::size_t(k)];
      if (++filled == kBlock) flush();
    }
  flush();
  return {w, DensityOperator::from_positive(LinearOperator(space, post))};
}

}  // namespace laserstate
