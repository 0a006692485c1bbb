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

#include "hkl/polygon.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "hkl/error.hpp"

namespace hkl::polygon {

namespace {

Rational slope(const Vertex& a, const Vertex& b) { return (b.y - a.y) / (b.x - a.x); }

// Cross product sign of (b - a) x (c - a); <= 0 means b is on or above the chord a-c.
Rational cross(const Vertex& a, const Vertex& b, const Vertex& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

mpz_class ceil_q(const Rational& r) {
  mpz_class out;
  mpz_cdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return out;
}

}  // namespace

Polygon::Polygon(std::vector<Vertex> vertices) : v_(std::move(vertices)) {
  for (std::size_t i = 1; i < v_.size(); ++i) {
    if (!(v_[i].x > v_[i - 1].x)) throw std::invalid_argument("polygon vertices must have increasing x");
    if (i >= 2 && !(slope(v_[i - 1], v_[i]) > slope(v_[i - 2], v_[i - 1]))) {
      throw std::invalid_argument("polygon slopes must be strictly increasing");
    }
  }
}

Rational Polygon::at(const Rational& x) const {
  if (v_.empty() || x < v_.front().x || x > v_.back().x) {
    throw std::out_of_range("polygon evaluated outside its range");
  }
  for (std::size_t i = 0; i + 1 < v_.size(); ++i) {
    if (x <= v_[i + 1].x) return v_[i].y + slope(v_[i], v_[i + 1]) * (x - v_[i].x);
  }
  return v_.back().y;
}

std::vector<Rational> Polygon::slopes() const {
  std::vector<Rational> s;
  for (std::size_t i = 0; i + 1 < v_.size(); ++i) s.push_back(slope(v_[i], v_[i + 1]));
  return s;
}

std::vector<mpz_class> hodge_coeffs(int n, int i_max) {
  if (n < 1) throw ConfigError("n must be >= 1");
  // R(T)/(1 - T^{n+1}) = ∏_{j=2}^{n+1} 1/(1 - T^j)
  std::vector<mpz_class> h(i_max + 1, 0);
  h[0] = 1;
  for (int j = 2; j <= n + 1; ++j) {
    for (int i = j; i <= i_max; ++i) h[i] += h[i - j];
  }
  return h;
}

Polygon hodge_polygon(int n, int p, int i_max) {
  const auto h = hodge_coeffs(n, i_max);
  const Rational scale = 1 - Rational(1, p - 1);
  std::vector<Vertex> pts{{0, 0}};
  mpz_class count = 0;
  mpz_class weighted = 0;
  for (int i = 0; i <= i_max; ++i) {
    if (h[i] == 0) continue;
    count += h[i];
    weighted += h[i] * i;
    pts.push_back({Rational(count), scale * Rational(weighted)});
  }
  return lower_hull(std::move(pts));
}

Polygon hodge_polygon_covering(int n, int p, int m_max) {
  // Σ_{i≤N} h_i ≥ N/(n+1), so i_max = (n+1)·m_max is always enough.
  for (int i_max = std::max(1, m_max);; i_max *= 2) {
    Polygon H = hodge_polygon(n, p, i_max);
    if (H.vertices().back().x >= m_max) return H;
    if (i_max > (n + 1) * (m_max + 1)) throw std::logic_error("Hodge polygon does not grow");
  }
}

Polygon lower_hull(std::vector<Vertex> points) {
  std::sort(points.begin(), points.end(), [](const Vertex& a, const Vertex& b) { return a.x < b.x; });
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].x == points[i - 1].x) throw std::invalid_argument("lower_hull needs distinct x coordinates");
  }
  std::vector<Vertex> hull;
  for (const auto& pt : points) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), pt) <= 0) hull.pop_back();
    hull.push_back(pt);
  }
  return Polygon(std::move(hull));
}

std::vector<CoeffPoint> newton_points(const lfun::TruncSeries& s) {
  const Rational scale(1, static_cast<long>(s.a) * (s.p - 1));
  std::vector<CoeffPoint> out;
  for (int m = 0; m < static_cast<int>(s.coeffs.size()); ++m) {
    CoeffPoint pt;
    pt.m = m;
    if (const auto* c = std::get_if<cyclo::CycInt>(&s.coeffs[m])) {
      const auto v = c->pi_val();
      pt.exact = true;
      if (v) {
        pt.pi = *v;
        pt.bound = Rational(*v) * scale;
      }
    } else {
      const auto v = std::get<padic::PadicCyc>(s.coeffs[m]).val();
      pt.exact = v.exact;
      pt.pi = v.value;
      pt.bound = Rational(v.value) * scale;
    }
    out.push_back(std::move(pt));
  }
  return out;
}

Polygon newton_hull(const std::vector<CoeffPoint>& points) {
  std::vector<Vertex> v;
  for (const auto& pt : points) {
    if (pt.bound) v.push_back({Rational(pt.m), *pt.bound});
  }
  return lower_hull(std::move(v));
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Violation: return "violation";
    case Outcome::Inconclusive: return "inconclusive";
    case Outcome::Agree: return "agree";
    case Outcome::Disagree: return "disagree";
  }
  return "unknown";
}

Verdict verify_above(const std::vector<CoeffPoint>& points, const Polygon& H, int p, int a) {
  std::optional<Verdict> undecided;
  for (const auto& pt : points) {
    if (!pt.bound) continue;
    const Rational h = H.at(pt.m);
    if (*pt.bound >= h) continue;
    if (pt.exact) {
      Verdict v;
      v.outcome = Outcome::Violation;
      v.m = pt.m;
      v.ord = *pt.bound;
      v.bound = h;
      v.detail = "coefficient " + std::to_string(pt.m) + " has ord_q " + pt.bound->get_str() +
                 " below the Hodge bound " + h.get_str();
      return v;
    }
    if (!undecided) {
      Verdict v;
      v.outcome = Outcome::Inconclusive;
      v.m = pt.m;
      v.ord = *pt.bound;
      v.bound = h;
      v.needed_pi = ceil_q(h * Rational(static_cast<long>(a) * (p - 1))).get_si();
      v.detail = "coefficient " + std::to_string(pt.m) + " is only known to have ord_q >= " + pt.bound->get_str() +
                 ", Hodge bound " + h.get_str();
      undecided = std::move(v);
    }
  }
  if (undecided) return *undecided;
  return Verdict{};
}

Polygon low_slope_part(const Polygon& hull, const Rational& k) {
  const auto& v = hull.vertices();
  std::vector<Vertex> out;
  if (v.empty()) return Polygon();
  out.push_back(v[0]);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (slope(v[i], v[i + 1]) > k) break;
    out.push_back(v[i + 1]);
  }
  return Polygon(std::move(out));
}

Verdict compare_slope_range(const std::vector<CoeffPoint>& A, const std::vector<CoeffPoint>& B, const Rational& k) {
  const Polygon la = low_slope_part(newton_hull(A), k);
  const Polygon lb = low_slope_part(newton_hull(B), k);
  auto check_exact = [](const Polygon& part, const std::vector<CoeffPoint>& pts) -> std::optional<int> {
    std::map<long, bool> exact;
    for (const auto& pt : pts) exact[pt.m] = pt.exact;
    for (const auto& v : part.vertices()) {
      const long m = v.x.get_num().get_si();
      if (!exact.at(m)) return static_cast<int>(m);
    }
    return std::nullopt;
  };
  const auto ia = check_exact(la, A);
  const auto ib = check_exact(lb, B);
  if (ia || ib) {
    Verdict v;
    v.outcome = Outcome::Inconclusive;
    v.m = ia && ib ? std::min(*ia, *ib) : (ia ? *ia : *ib);
    v.detail = "hull vertex at m = " + std::to_string(*v.m) + " is not certified exact";
    return v;
  }
  const auto& va = la.vertices();
  const auto& vb = lb.vertices();
  for (std::size_t i = 0; i < std::max(va.size(), vb.size()); ++i) {
    if (i >= va.size() || i >= vb.size() || !(va[i] == vb[i])) {
      Verdict v;
      v.outcome = Outcome::Disagree;
      const Vertex& w = i < va.size() ? va[i] : vb[i];
      v.m = static_cast<int>(w.x.get_num().get_si());
      v.ord = i < va.size() ? std::optional<Rational>(va[i].y) : std::nullopt;
      v.bound = i < vb.size() ? std::optional<Rational>(vb[i].y) : std::nullopt;
      v.detail = "slope <= " + k.get_str() + " parts differ at vertex " + std::to_string(i);
      return v;
    }
  }
  Verdict v;
  v.outcome = Outcome::Agree;
  return v;
}

}  // namespace hkl::polygon
