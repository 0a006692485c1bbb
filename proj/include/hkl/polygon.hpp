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

// Hodge and Newton polygons over exact rationals, the coefficient-wise
// "Newton above Hodge" check and the low-slope comparison of two series.

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "hkl/lfun.hpp"

namespace hkl::polygon {

using Rational = mpq_class;

struct Vertex {
  Rational x;
  Rational y;
  bool operator==(const Vertex&) const = default;
};

/// Convex lower polygon: x strictly increasing, slopes strictly increasing.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Vertex> vertices);

  const std::vector<Vertex>& vertices() const { return v_; }
  bool empty() const { return v_.empty(); }
  /// Piecewise-linear value at x; x must lie within [x_0, x_last].
  Rational at(const Rational& x) const;
  std::vector<Rational> slopes() const;

  bool operator==(const Polygon&) const = default;

 private:
  std::vector<Vertex> v_;
};

/// h_0(n), ..., h_{i_max}(n) from R(T)/(1 - T^{n+1}).
std::vector<mpz_class> hodge_coeffs(int n, int i_max);

/// Lower hull of (0,0) and the points (Σ_{i≤N} h_i, (1 - 1/(p-1)) Σ_{i≤N} i h_i) for N ≤ i_max.
Polygon hodge_polygon(int n, int p, int i_max);

/// Hodge polygon extended until it covers x = m_max.
Polygon hodge_polygon_covering(int n, int p, int m_max);

/// Lower convex hull; points must have distinct x. Collinear points are merged.
Polygon lower_hull(std::vector<Vertex> points);

struct CoeffPoint {
  int m = 0;
  /// ord_q lower bound; nullopt for an exact zero coefficient (ord = ∞).
  std::optional<Rational> bound;
  bool exact = true;
  /// Underlying π-valuation (or certificate when inexact); -1 for exact zero.
  long pi = -1;
};

/// One point per coefficient, ord_q = π-valuation / (a(p-1)).
std::vector<CoeffPoint> newton_points(const lfun::TruncSeries& s);

/// Lower hull of the finite points' bounds.
Polygon newton_hull(const std::vector<CoeffPoint>& points);

enum class Outcome { Pass, Violation, Inconclusive, Agree, Disagree };
std::string to_string(Outcome o);

struct Verdict {
  Outcome outcome = Outcome::Pass;
  /// Leftmost offending index, when any.
  std::optional<int> m;
  std::optional<Rational> ord;
  std::optional<Rational> bound;
  /// π-precision that would settle an inconclusive point.
  std::optional<long> needed_pi;
  std::string detail;
};

/// Every (m, ord_q c_m) on or above H. p and a convert H(m) into π-units when a
/// point is undecided.
Verdict verify_above(const std::vector<CoeffPoint>& points, const Polygon& H, int p, int a);

/// Prefix of the hull made of segments with slope ≤ k.
Polygon low_slope_part(const Polygon& hull, const Rational& k);

/// Agreement of the slope-≤k parts of the two Newton hulls.
Verdict compare_slope_range(const std::vector<CoeffPoint>& A, const std::vector<CoeffPoint>& B, const Rational& k);

}  // namespace hkl::polygon
