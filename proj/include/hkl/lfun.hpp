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

// Local L-factors at closed points, their symmetric powers (finite k exactly,
// κ ∈ Z_p and unit root p-adically), and truncated Euler products.

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "hkl/cyclo.hpp"
#include "hkl/expsum.hpp"
#include "hkl/ff.hpp"
#include "hkl/padic.hpp"

namespace hkl::lfun {

using cyclo::CycInt;
using padic::PadicCyc;
using padic::PadicExponent;

/// P(T) = ∏_{j=0}^{n} (1 - π_j T) at a closed point of degree d over F_q, q = p^a.
struct LocalFactor {
  int n = 0;
  int d = 0;
  int a = 1;
  std::vector<CycInt> coeffs;  // n + 2 entries, coeffs[0] = 1
  int leading_sign = 1;        // c_{n+1} = leading_sign · q^{n(n+1)d/2}

  int p() const { return coeffs.front().p(); }
  /// a·d: ord_p of π_1, i.e. the p-adic size of one q^d-slope step.
  int slope_unit() const { return a * d; }
};

/// Coefficients of ∏(1 - λ T) from the power sums Σ λ^m, m = 1..len, by Newton's
/// identities. The division by m is exact in Z[ζ_p]; failure is a DomainError.
std::vector<CycInt> coeffs_from_power_sums(std::span<const CycInt> power_sums);

/// Σ_j π_j^m for m = 1..m_max, division free: p_m = -m c_m - Σ_{i<m} c_i p_{m-i}.
std::vector<CycInt> eigen_power_sums(std::span<const CycInt> P, int m_max);

/// Builds the local factor from Kl_n(t̄, m), m = 1..n+1, and enforces the
/// structural facts: degree n+1, leading coefficient ±q^{n(n+1)d/2}, Newton
/// slopes {0,...,n} w.r.t. ord_{q^d}, simple 1-unit root. Failures are findings.
LocalFactor local_factor_from_sums(int n, int d, int a, std::span<const CycInt> sums);

/// Local factor at a closed point, sums drawn through the optional cache.
LocalFactor local_factor(int n, const ff::ClosedPoint& t, const ff::Tower& tower, expsum::SumCache* cache = nullptr,
                         std::uint64_t max_terms = expsum::kDefaultMaxTerms);

/// det(I - M T) for a square matrix via Berkowitz's division-free algorithm.
std::vector<CycInt> det_one_minus(const std::vector<std::vector<CycInt>>& M);

/// k-th symmetric power of a square matrix on the monomial basis of degree k.
std::vector<std::vector<CycInt>> sym_power_matrix(const std::vector<std::vector<CycInt>>& M, int k);

/// ∏_{|i| = k} (1 - π^i T): the Sym^k local factor, degree binom(n+k, n), constant term 1.
std::vector<CycInt> sym_k_factor(std::span<const CycInt> P, int k);

/// Local series are power series in T (not T^d) truncated at degree D.
using PadicSeries = std::vector<PadicCyc>;
using ExactSeries = std::vector<CycInt>;

/// 1 / Q(T^d) to degree D for Q with constant term 1.
ExactSeries inverse_series(std::span<const CycInt> Q, int d, int D);

/// Tuple (i_1, ..., i_n) with weight w = Σ j·i_j.
struct TupleWeight {
  std::vector<int> tuple;
  int weight = 0;
};

/// All tuples with weight < bound, in lexicographic order.
std::vector<TupleWeight> tuples_below(int n, int bound);

/// Precision (whole p-adic digits) actually used for a π-precision request V.
int digits_for(int p, long V);

/// ∏_i 1/(1 - π_0^{κ-|i|} π_1^{i_1}⋯π_n^{i_n} T^d) to degree D, certified to V
/// π-units (rounded down to a whole digit). Tuples with (p-1)·a·d·w ≥ V contribute
/// factors ≡ 1 at that precision and are skipped. Throws PrecisionError if V < p-1.
PadicSeries sym_inf_local(const LocalFactor& P, const PadicExponent& kappa, long V, int D);

/// The same series through power sums S_m = π_0^{κm} ∏_j (1 - (π_j/π_0)^m)^{-1} and
/// h_r = (1/r) Σ_m S_m h_{r-m}. Division by p^{ord_p r} costs digits; the result is
/// certified only to what survives. Cross-check route.
PadicSeries sym_inf_local_hsum(const LocalFactor& P, const PadicExponent& kappa, long V, int D);

/// 1 / (1 - π_0^κ T^d) to degree D.
PadicSeries unit_root_local(const LocalFactor& P, const PadicExponent& kappa, long V, int D);

/// π_0^e with e = κ - shift (shift ≥ 0), certified to `target` π-units.
PadicCyc unit_root_power(const PadicCyc& pi0, const PadicExponent& kappa, int shift, long target);

/// One coefficient of a global truncation: exact or certified.
using Coeff = std::variant<CycInt, PadicCyc>;

struct TruncSeries {
  int D = 0;
  int p = 0;
  int a = 1;
  std::vector<Coeff> coeffs;

  bool all_exact() const;
};

/// Local contribution of one closed point.
struct PointSeries {
  ff::ClosedPoint point;
  std::variant<ExactSeries, PadicSeries> inv;
};

/// Product of all local contributions. Exactly one entry per closed point of
/// degree ≤ D is required (CoverageError otherwise); extra points of higher degree
/// are rejected too since they cannot affect the truncation. The product is taken in
/// canonical point order so the result does not depend on input order.
/// Exact products must have rational-integer coefficients (FindingError otherwise).
TruncSeries euler_product(int p, int a, int D, std::vector<PointSeries> locals);

struct IntegralityReport {
  bool ok = true;
  std::vector<int> failing;  // coefficient indices
};

/// Exact coefficients: as_integer succeeds. Certified coefficients: ζ-components
/// vanish modulo the certificate.
IntegralityReport check_integrality(const TruncSeries& s);

/// Multiplies a series by a polynomial, truncating at s.D (used for synthetic factors).
TruncSeries times_polynomial(const TruncSeries& s, std::span<const CycInt> poly);

}  // namespace hkl::lfun
