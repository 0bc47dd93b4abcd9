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
 * @file io.hpp
 * @brief Serialization: device / POM JSON and phase-distribution CSV.
 *
 * Device JSON is an array of items
 *
 *     [{"label": "...", "matrix": [[re, im], [re, im], ...]}, ...]
 *
 * with the matrix flattened row-major. Doubles are written with enough
 * digits to round-trip exactly.
 */
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "laserstate/phase.hpp"
#include "laserstate/prepmeas.hpp"

namespace laserstate {

/// printf("%.12g") as a string.
inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// x rounded to 12 significant digits (for JSON reports).
inline double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::stod(format_number(x));
}

inline nlohmann::json to_json(const std::vector<LabeledOperator>& items) {
  auto arr = nlohmann::json::array();
  for (const auto& it : items) {
    auto mat = nlohmann::json::array();
    const auto& m = it.op.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) mat.push_back({m(r, c).real(), m(r, c).imag()});
    arr.push_back({{"label", it.label}, {"matrix", std::move(mat)}});
  }
  return arr;
}

/// Parses device items. Without an explicit space each operator is placed on
/// a single auxiliary factor "system" of the inferred dimension.
inline std::vector<LabeledOperator> labeled_operators_from_json(const nlohmann::json& j,
                                                                std::optional<CompositeSpace> space = std::nullopt) {
  if (!j.is_array()) throw ValidationError("device JSON must be an array of {label, matrix}");
  std::vector<LabeledOperator> out;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("label") || !item.contains("matrix"))
      throw ValidationError("device item must have 'label' and 'matrix'");
    const auto& mat = item.at("matrix");
    const auto n = static_cast<Eigen::Index>(mat.size());
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (d * d != n || d == 0) throw ValidationError("matrix entry count " + std::to_string(n) + " is not a square");
    const CompositeSpace s = space ? *space : CompositeSpace(aux_space("system", static_cast<int>(d)));
    if (s.dim() != d) throw DimensionMismatch("matrix dimension does not match the given space");
    Matrix m(d, d);
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& e = mat.at(static_cast<std::size_t>(k));
      if (!e.is_array() || e.size() != 2) throw ValidationError("matrix entries must be [re, im] pairs");
      m(k / d, k % d) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
    out.push_back({item.at("label").get<std::string>(), LinearOperator(s, m)});
  }
  return out;
}

inline nlohmann::json to_json(const PrepDevice& d) { return to_json(d.items); }
inline nlohmann::json to_json(const Pom& p) { return to_json(p.items); }

inline PrepDevice prep_device_from_json(const nlohmann::json& j, std::optional<CompositeSpace> space = std::nullopt) {
  return {labeled_operators_from_json(j, std::move(space))};
}

inline Pom pom_from_json(const nlohmann::json& j, std::optional<CompositeSpace> space = std::nullopt) {
  return {labeled_operators_from_json(j, std::move(space))};
}

/// CSV with header "delta_radians,density", plus a density_analytic column
/// when a reference distribution on the same grid is supplied.
inline void write_phase_csv(std::ostream& os, const PhaseDistribution& d,
                            const PhaseDistribution* analytic = nullptr) {
  os << "delta_radians,density" << (analytic ? ",density_analytic" : "") << '\n';
  for (std::size_t k = 0; k < d.size(); ++k) {
    os << format_number(d.grid[k]) << ',' << format_number(d.density[k]);
    if (analytic) os << ',' << format_number(analytic->density.at(k));
    os << '\n';
  }
}

}  // namespace laserstate
