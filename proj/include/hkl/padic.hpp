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

// Capped-precision arithmetic in Z_p[ζ_p].
//
// A PadicCyc is known modulo p^N, i.e. modulo π^{N(p-1)} for the uniformizer
// π = 1 - ζ. Precision certificates are reported in π-units; internally they are
// always whole multiples of p - 1 so that residues have a canonical form.

#include <gmpxx.h>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hkl/cyclo.hpp"

namespace hkl::padic {

using cyclo::CycInt;

/// π-adic valuation with a flag telling whether it is exact or only a lower bound.
struct Valuation {
  long value;
  bool exact;
};

class PadicCyc {
 public:
  PadicCyc() = default;
  /// Reduces every coordinate into [0, p^N).
  PadicCyc(int p, int N, std::vector<mpz_class> coords);

  static PadicCyc zero(int p, int N);
  static PadicCyc one(int p, int N) { return from_integer(p, N, 1); }
  static PadicCyc from_integer(int p, int N, const mpz_class& v);

  int p() const { return p_; }
  /// Precision exponent: the value is known modulo p^N.
  int N() const { return N_; }
  /// Precision certificate in π-units.
  long cert() const { return static_cast<long>(N_) * (p_ - 1); }
  const std::vector<mpz_class>& coords() const { return c_; }

  Valuation val() const;
  bool is_unit() const;
  /// Image in the residue field F_p.
  int residue() const;

  PadicCyc operator+(const PadicCyc& o) const;
  PadicCyc operator-(const PadicCyc& o) const;
  PadicCyc operator-() const;
  PadicCyc operator*(const PadicCyc& o) const;
  PadicCyc pow(unsigned long e) const;

  /// Inverse of a certified unit; any other division is a DomainError.
  PadicCyc inverse() const;
  /// Exact division by p^k; requires a certified valuation >= k(p-1). Costs k digits.
  PadicCyc div_p_power(int k) const;
  PadicCyc mul_p_power(int k) const;
  /// Drops precision to N' <= N.
  PadicCyc reduce(int N) const;

  /// The Z_p value when all ζ-components vanish modulo p^N, else nullopt.
  std::optional<mpz_class> zp_value() const;

  /// True when the two values are congruent at the smaller of the two precisions.
  bool agrees(const PadicCyc& o) const;
  /// Lower bound for the π-valuation of this - o (exact when below both certificates).
  Valuation val_difference(const PadicCyc& o) const;

  bool operator==(const PadicCyc& o) const { return p_ == o.p_ && N_ == o.N_ && c_ == o.c_; }

  /// `p:[c_0,...]+O(p^N)`
  std::string to_string() const;

 private:
  void check_level(const PadicCyc& o) const;
  mpz_class modulus() const;

  int p_ = 0;
  int N_ = 0;
  std::vector<mpz_class> c_;
};

PadicCyc embed(const CycInt& x, int N);

/// κ ∈ Z_p given by base-p digits d_0..d_{s-1}. An exact-integer exponent is the
/// non-negative integer with those digits; a truncated exponent is only known
/// modulo p^s.
class PadicExponent {
 public:
  enum class Kind { ExactInteger, Truncated };

  static PadicExponent integer(int p, const mpz_class& k);
  static PadicExponent truncated(int p, std::vector<int> digits);

  Kind kind() const { return kind_; }
  int p() const { return p_; }
  const std::vector<int>& digits() const { return digits_; }
  /// Σ d_i p^i.
  mpz_class value() const;
  std::string to_string() const;

 private:
  int p_ = 0;
  Kind kind_ = Kind::ExactInteger;
  std::vector<int> digits_;
};

/// Unit root of a monic polynomial Σ r_i Y^{deg-i} (r_0 = 1) whose reduction has
/// exactly one nonzero root, which is simple. Certified to the coefficients' precision.
PadicCyc unit_root(std::span<const PadicCyc> monic);

/// π_0 for a local factor P(T) = 1 + c_1 T + ... + c_{n+1} T^{n+1}: the unit root of
/// X^{n+1} P(1/X), certified modulo p^N.
PadicCyc hensel_unit_root(std::span<const CycInt> P, int N);

/// All reciprocal roots π_0..π_n of P, with ord_p π_j = j·slope_unit, each
/// certified modulo p^N. slope_unit is a·d for a point of degree d over F_{p^a}.
/// Throws SlopeViolation unless the Newton slopes are exactly {0, 1, ..., n}.
std::vector<PadicCyc> slope_split(std::span<const CycInt> P, int slope_unit, int N);

/// True when the Newton polygon of P w.r.t. ord_{p^slope_unit} has slopes exactly {0,...,deg-1}.
bool has_unit_step_slopes(std::span<const CycInt> P, int slope_unit);

/// u^κ for a 1-unit u via Σ_l binom(κ, l)(u-1)^l, certified to `target` π-units
/// (rounded down to a whole digit), and never beyond what u and κ support.
PadicCyc one_unit_power(const PadicCyc& u, const PadicExponent& kappa, long target);

/// Precision (in π-units) that one_unit_power can certify for this input.
long one_unit_power_limit(const PadicCyc& u, const PadicExponent& kappa, long target);

}  // namespace hkl::padic
