// Copyright 2026 The alri Authors
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

namespace alri {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Zero-norm or otherwise unusable point.
class DegeneratePointError : public Error {
 public:
  using Error::Error;
};

/// No nonzero coordinate spacing could be observed.
class QuantizationError : public Error {
 public:
  using Error::Error;
};

/// Point too close to the sensor axis for the angular error bound.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Weighted least-squares design is degenerate or underdetermined.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Parameter estimation could not produce a result.
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Broken internal bookkeeping (e.g. a vote removed twice).
class InternalError : public Error {
 public:
  using Error::Error;
};

class MetricDomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

}  // namespace alri
