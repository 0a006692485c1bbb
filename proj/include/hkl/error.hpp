/*
   Copyright 2026 The hklab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace hkl {

/// Invalid run parameters (p not an odd prime, a < 1, missing exponent, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A user-supplied field modulus is not monic of the right degree or not irreducible.
class ModulusError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fields that are not in a subfield relation on the constructed tower.
class TowerError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested computation exceeds the configured enumeration budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A CycInt with nonzero zeta-components was asked for its integer value.
class NotRationalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation applied outside its mathematical domain (non-unit division,
/// power of something that is not a 1-unit, mismatched cyclotomic levels).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested precision cannot support the computation; carries the smallest
/// pi-adic precision that would.
class PrecisionError : public std::runtime_error {
 public:
  PrecisionError(const std::string& what, long needed_pi_precision)
      : std::runtime_error(what), needed_(needed_pi_precision) {}
  long needed() const noexcept { return needed_; }

 private:
  long needed_;
};

/// The Euler product was not supplied exactly one factor per closed point.
class CoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical statement that should hold on this instance failed
/// (slope facts, functional equation, integrality). These are findings, not bugs.
class FindingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Local factor whose Newton slopes are not exactly {0, 1, ..., n}.
class SlopeViolation : public FindingError {
 public:
  using FindingError::FindingError;
};

/// Local factor without a simple unit root modulo the maximal ideal.
class DegenerateFactor : public FindingError {
 public:
  using FindingError::FindingError;
};

/// Malformed cache record.
class CacheFormatError : public std::runtime_error {
 public:
  CacheFormatError(const std::string& what, long line)
      : std::runtime_error(what), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace hkl
