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

// Exact arithmetic in Z[ζ_p] on the power basis {1, ζ, ..., ζ^{p-2}}.

#include <gmpxx.h>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hkl::cyclo {

class CycInt {
 public:
  CycInt() = default;
  /// Zero at level p.
  explicit CycInt(int p);
  CycInt(int p, std::vector<mpz_class> coords);

  static CycInt zero(int p) { return CycInt(p); }
  static CycInt one(int p) { return from_integer(p, 1); }
  static CycInt from_integer(int p, const mpz_class& c);
  /// ζ^e for any integer e.
  static CycInt zeta_power(int p, long e);
  /// Σ_e counts[e] ζ^e for e in [0, p).
  static CycInt from_exponent_counts(int p, std::span<const long long> counts);

  int p() const { return p_; }
  const std::vector<mpz_class>& coords() const { return c_; }
  bool is_zero() const;

  CycInt operator+(const CycInt& o) const;
  CycInt operator-(const CycInt& o) const;
  CycInt operator-() const;
  CycInt operator*(const CycInt& o) const;
  CycInt operator*(const mpz_class& s) const;
  CycInt& operator+=(const CycInt& o);
  CycInt& operator-=(const CycInt& o);
  bool operator==(const CycInt& o) const { return p_ == o.p_ && c_ == o.c_; }

  CycInt pow(unsigned long e) const;

  /// Exact division by a rational integer; nullopt if some coordinate is not divisible.
  std::optional<CycInt> divexact(const mpz_class& k) const;

  /// Galois substitution ζ -> ζ^c, c not divisible by p.
  CycInt galois(long c) const;

  /// Division by the uniformizer 1 - ζ; nullopt if not divisible.
  std::optional<CycInt> div_uniformizer() const;

  /// (1-ζ)-adic valuation; nullopt stands for +∞ (the zero element).
  std::optional<long> pi_val() const;

  /// The rational integer c when this equals c·1; throws NotRationalError otherwise.
  mpz_class as_integer() const;
  bool is_integer() const;

  /// `p:[c_0,...,c_{p-2}]`
  std::string to_string() const;
  static CycInt parse(std::string_view text);

 private:
  void check_level(const CycInt& o) const;

  int p_ = 0;
  std::vector<mpz_class> c_;
};

/// Reduces a length-p vector in Z[x]/(x^p - 1) onto the power basis.
std::vector<mpz_class> reduce_cyclic(std::vector<mpz_class> v, int p);

}  // namespace hkl::cyclo
