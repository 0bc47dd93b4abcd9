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
 * @file prepmeas.hpp
 * @brief Preparation-measurement symmetric probabilities.
 *
 * A preparation device is a labeled list of positive operators
 * Lambda_i = P(i) rho_i with Tr(sum Lambda_i) = 1. A measurement device is a
 * POM: positive Pi_j summing to the identity. From the symmetric joint rule
 *
 *     P(i, j) = Tr(Lambda_i Gamma_j) / Tr(Lambda Gamma)
 *
 * follow the a priori probability Tr(Lambda_i), the predictive probability
 * Tr(rho_i Pi_j) and the retrodictive probability
 * Tr(Lambda_i Pi_j) / Tr(Lambda Pi_j).
 *
 * Retrodiction only ranges over device labels: an operator that is not one
 * of the Lambda_i cannot be asked for, and so has preparation probability 0.
 */
#pragma once

#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "laserstate/hilbert.hpp"

namespace laserstate {

struct LabeledOperator {
  std::string label;
  LinearOperator op;
};

/// Preparation device operators Lambda_i, stored directly.
struct PrepDevice {
  std::vector<LabeledOperator> items;

  const LinearOperator& at(const std::string& label) const {
    for (const auto& it : items)
      if (it.label == label) return it.op;
    throw UnknownLabel("preparation device has no item '" + label + "'");
  }

  /// Lambda = sum_i Lambda_i
  LinearOperator total() const;

  /// rho_i = Lambda_i / Tr Lambda_i
  DensityOperator state(const std::string& label) const { return DensityOperator::normalized(at(label)); }
};

/// Probability operator measure elements Pi_j.
struct Pom {
  std::vector<LabeledOperator> items;

  const LinearOperator& at(const std::string& label) const {
    for (const auto& it : items)
      if (it.label == label) return it.op;
    throw UnknownLabel("POM has no element '" + label + "'");
  }

  LinearOperator total() const;
};

namespace detail {

inline LinearOperator sum_ops(const std::vector<LabeledOperator>& items, const char* what) {
  if (items.empty()) throw PreconditionError(std::string(what) + " has no items");
  LinearOperator acc = items.front().op;
  for (std::size_t k = 1; k < items.size(); ++k) acc = acc + items[k].op;
  return acc;
}

}  // namespace detail

inline LinearOperator PrepDevice::total() const { return detail::sum_ops(items, "preparation device"); }
inline LinearOperator Pom::total() const { return detail::sum_ops(items, "POM"); }

struct Defect {
  std::string label;  ///< offending item, or empty for a device-wide defect
  std::string kind;   ///< "positivity", "hermiticity", "completeness", "normalization"
  double magnitude = 0.0;
};

using Diagnostics = std::vector<Defect>;

namespace detail {

inline void check_items(const std::vector<LabeledOperator>& items, double tol, Diagnostics& out) {
  for (const auto& it : items) {
    const double herm = hermiticity_defect(it.op.matrix());
    if (herm > tol) out.push_back({it.label, "hermiticity", herm});
    const double lo = min_eigenvalue_hermitian(it.op.matrix());
    if (lo < -tol) out.push_back({it.label, "positivity", -lo});
  }
}

}  // namespace detail

/// Positivity of each element and ||sum Pi_j - 1||_max.
inline Diagnostics validate_pom(const Pom& pom, double tol = 1e-10) {
  Diagnostics out;
  detail::check_items(pom.items, tol, out);
  if (!pom.items.empty()) {
    const auto total = pom.total();
    const double completeness = max_abs(total.matrix() - Matrix::Identity(total.dim(), total.dim()));
    if (completeness > tol) out.push_back({"", "completeness", completeness});
  }
  return out;
}

/// Positivity of each Lambda_i and |Tr Lambda - 1|.
inline Diagnostics validate_prep(const PrepDevice& prep, double tol = 1e-10) {
  Diagnostics out;
  detail::check_items(prep.items, tol, out);
  if (!prep.items.empty()) {
    const double norm = std::abs(prep.total().trace() - Complex(1.0));
    if (norm > tol) out.push_back({"", "normalization", norm});
  }
  return out;
}

inline std::string describe(const Diagnostics& d) {
  std::string s;
  for (const auto& x : d) {
    if (!s.empty()) s += "; ";
    s += x.kind + (x.label.empty() ? "" : " of '" + x.label + "'") + " defect " + std::to_string(x.magnitude);
  }
  return s;
}

inline void require_valid(const Pom& pom) {
  if (auto d = validate_pom(pom); !d.empty()) throw ValidationError("invalid POM: " + describe(d));
}

inline void require_valid(const PrepDevice& prep) {
  if (auto d = validate_prep(prep); !d.empty()) throw ValidationError("invalid preparation device: " + describe(d));
}

namespace detail {

/// Tr(A B) without forming the product.
inline Complex trace_product(const LinearOperator& a, const LinearOperator& b) {
  require_same_space(a.space(), b.space(), "trace of product");
  return a.matrix().transpose().cwiseProduct(b.matrix()).sum();
}

}  // namespace detail

/// P(i, j) = Tr(Lambda_i Gamma_j) / Tr(Lambda Gamma) for raw measurement
/// device operators Gamma_j (any positive scale).
inline double joint_probability(const PrepDevice& prep, const std::vector<LabeledOperator>& gammas,
                                const std::string& i, const std::string& j) {
  const auto lambda = prep.total();
  const auto gamma = detail::sum_ops(gammas, "measurement device");
  const double norm = detail::trace_product(lambda, gamma).real();
  if (!(norm > kDegeneracyThreshold))
    throw DegenerateNormalization("Tr(Lambda Gamma) = " + std::to_string(norm) + " is degenerate");
  const LinearOperator* gj = nullptr;
  for (const auto& g : gammas)
    if (g.label == j) gj = &g.op;
  if (gj == nullptr) throw UnknownLabel("measurement device has no item '" + j + "'");
  return detail::trace_product(prep.at(i), *gj).real() / norm;
}

/// P(i) = Tr(Lambda_i); the causality constraint makes this independent of the
/// measuring device.
inline double a_priori_preparation_probability(const PrepDevice& prep, const std::string& i) {
  return prep.at(i).trace().real();
}

/// P(j|rho) = Tr(rho Pi_j)
inline double predictive_probability(const DensityOperator& rho, const Pom& pom, const std::string& j) {
  require_valid(pom);
  return expectation(rho, pom.at(j)).real();
}

/// P(i|j) = Tr(Lambda_i Pi_j) / Tr(Lambda Pi_j). Invariant under positive
/// rescaling of the POM element, so any outcome operator proportional to
/// Pi_j can be passed.
inline double retrodictive_probability(const PrepDevice& prep, const LinearOperator& pom_element,
                                       const std::string& i) {
  const double evidence = detail::trace_product(prep.total(), pom_element).real();
  if (!(evidence > kDegeneracyThreshold))
    throw DegenerateNormalization("Tr(Lambda Pi_j) = " + std::to_string(evidence) + " is degenerate");
  return detail::trace_product(prep.at(i), pom_element).real() / evidence;
}

/// rho = sum_i Lambda_i = sum_i P(i) rho_i
inline DensityOperator density_from_prep(const PrepDevice& prep) { return DensityOperator(prep.total()); }

/// Device built from (label, P(i), rho_i) triples.
inline PrepDevice make_prep_device(const std::vector<std::tuple<std::string, double, DensityOperator>>& parts) {
  PrepDevice d;
  for (const auto& [label, p, rho] : parts) d.items.push_back({label, Complex(p) * rho.op()});
  return d;
}

}  // namespace laserstate
