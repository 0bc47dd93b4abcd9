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

// Experiment parameters: a flat JSON object from --config, overridden by
// --param key=value flags, checked against the keys a subcommand declares.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace laserstate::cli {

/// Bad config or flag value; reported with exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Params {
 public:
  Params(std::string experiment, nlohmann::json defaults)
      : experiment_(std::move(experiment)), values_(std::move(defaults)) {}

  /// Merges a config file. The file must hold a JSON object; an "experiment"
  /// key, if present, must name this subcommand.
  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }))
      throw UsageError("config file '" + path + "' is empty");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw UsageError("config file '" + path + "' must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key == "experiment") {
        if (!value.is_string() || value.get<std::string>() != experiment_)
          throw UsageError("config names experiment " + value.dump() + " but the subcommand is '" + experiment_ + "'");
        continue;
      }
      set(key, value);
    }
  }

  /// key=value; the value is read as JSON when it parses, else as a string.
  void apply_flag(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
      throw UsageError("--param expects key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    set(key, value);
  }

  void set(const std::string& key, const nlohmann::json& value) {
    if (!values_.contains(key)) {
      std::string known;
      for (const auto& [k, v] : values_.items()) known += (known.empty() ? "" : ", ") + k;
      throw UsageError("unknown parameter '" + key + "' for " + experiment_ + " (known: " + known + ")");
    }
    values_[key] = value;
  }

  const nlohmann::json& raw(const std::string& key) const { return values_.at(key); }
  const nlohmann::json& all() const { return values_; }

  double number(const std::string& key, double lo = -std::numeric_limits<double>::infinity(),
                double hi = std::numeric_limits<double>::infinity()) const {
    return check_range(key, as_number(key, raw(key)), lo, hi);
  }

  int integer(const std::string& key, int lo = std::numeric_limits<int>::min(),
              int hi = std::numeric_limits<int>::max()) const {
    return as_integer(key, raw(key), lo, hi);
  }

  std::uint64_t unsigned64(const std::string& key) const {
    const auto& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw UsageError(key + " must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string choice(const std::string& key, const std::set<std::string>& allowed) const {
    const auto& v = raw(key);
    if (!v.is_string()) throw UsageError(key + " must be a string");
    const auto s = v.get<std::string>();
    if (!allowed.count(s)) {
      std::string opts;
      for (const auto& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
      throw UsageError(key + " must be one of: " + opts + " (got '" + s + "')");
    }
    return s;
  }

  /// A number or an array of numbers.
  std::vector<double> numbers(const std::string& key, double lo = -std::numeric_limits<double>::infinity(),
                              double hi = std::numeric_limits<double>::infinity()) const {
    std::vector<double> out;
    const auto& v = raw(key);
    if (v.is_array()) {
      if (v.empty()) throw UsageError(key + " must not be empty");
      for (const auto& e : v) out.push_back(check_range(key, as_number(key, e), lo, hi));
    } else {
      out.push_back(number(key, lo, hi));
    }
    return out;
  }

  std::vector<int> integers(const std::string& key, int lo = std::numeric_limits<int>::min(),
                            int hi = std::numeric_limits<int>::max()) const {
    std::vector<int> out;
    const auto& v = raw(key);
    if (v.is_array()) {
      if (v.empty()) throw UsageError(key + " must not be empty");
      for (const auto& e : v) out.push_back(as_integer(key, e, lo, hi));
    } else {
      out.push_back(integer(key, lo, hi));
    }
    return out;
  }

 private:
  static double as_number(const std::string& key, const nlohmann::json& v) {
    if (!v.is_number()) throw UsageError(key + " must be a number (got " + v.dump() + ")");
    return v.get<double>();
  }

  static double check_range(const std::string& key, double x, double lo, double hi) {
    if (!std::isfinite(x) || x < lo || x > hi) {
      std::ostringstream os;
      os << key << " = " << x << " is outside [" << lo << ", " << hi << "]";
      throw UsageError(os.str());
    }
    return x;
  }

  static int as_integer(const std::string& key, const nlohmann::json& v, int lo, int hi) {
    if (!v.is_number_integer()) throw UsageError(key + " must be an integer (got " + v.dump() + ")");
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi)
      throw UsageError(key + " = " + std::to_string(x) + " is outside [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
    return static_cast<int>(x);
  }

  std::string experiment_;
  nlohmann::json values_;
};

/// One embedded tolerance comparison in a report.
struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

class CheckList {
 public:
  void at_most(const std::string& name, double value, double limit) {
    checks_.push_back({name, value, limit, value <= limit});
  }
  void at_least(const std::string& name, double value, double limit) {
    checks_.push_back({name, value, limit, value >= limit});
  }
  bool all_pass() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.pass; });
  }
  const std::vector<Check>& items() const { return checks_; }

 private:
  std::vector<Check> checks_;
};

}  // namespace laserstate::cli
