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

#pragma once

#include <stdexcept>
#include <string>

namespace laserstate {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A Fock-space truncation is too small for the requested state or evolution.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// A matrix failed density-operator / POM / device validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A normalizing trace fell below the degeneracy threshold.
class DegenerateNormalization : public Error {
 public:
  using Error::Error;
};

class UnknownLabel : public Error {
 public:
  using Error::Error;
};

/// Photodetection requested on a state with no photons to give.
class NoPhoton : public Error {
 public:
  using Error::Error;
};

/// Phase distribution has an imaginary part beyond roundoff.
class FourierResidue : public Error {
 public:
  using Error::Error;
};

/// Input violates an operation's stated precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace laserstate
