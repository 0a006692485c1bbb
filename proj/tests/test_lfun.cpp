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

#include <doctest.h>

#include <algorithm>
#include <random>

#include "hkl/error.hpp"
#include "hkl/lfun.hpp"

using namespace hkl;
using namespace hkl::lfun;

namespace {

std::vector<CycInt> ints(int p, std::initializer_list<long> v) {
  std::vector<CycInt> out;
  for (long x : v) out.push_back(CycInt::from_integer(p, x));
  return out;
}

mpz_class zp(const PadicCyc& x) {
  auto v = x.zp_value();
  REQUIRE(v.has_value());
  return *v;
}

// Sym^k power sums through complete homogeneous polynomials of the eigenvalue
// powers: s_m = h_k(λ^m), h_k = (1/k) Σ_i p_{im} h_{k-i}. Independent of Berkowitz.
std::vector<CycInt> sym_k_by_power_sums(const std::vector<CycInt>& P, int k) {
  const int p = P[0].p();
  const int r = static_cast<int>(P.size()) - 1;
  mpz_class deg = 1;
  for (int i = 1; i <= r - 1; ++i) deg = deg * (k + i) / i;
  const int M = static_cast<int>(deg.get_si());
  const auto ps = eigen_power_sums(P, M * std::max(k, 1));
  std::vector<CycInt> sym_ps;
  for (int m = 1; m <= M; ++m) {
    std::vector<CycInt> h{CycInt::one(p)};
    for (int j = 1; j <= k; ++j) {
      CycInt acc = CycInt::zero(p);
      for (int i = 1; i <= j; ++i) acc += ps[i * m - 1] * h[j - i];
      h.push_back(*acc.divexact(j));
    }
    sym_ps.push_back(h[k]);
  }
  return coeffs_from_power_sums(sym_ps);
}

std::vector<LocalFactor> factors(const ff::Tower& tower, int n, int d) {
  std::vector<LocalFactor> out;
  for (const auto& pt : ff::closed_points(tower, d)) out.push_back(local_factor(n, pt, tower));
  return out;
}

}  // namespace

TEST_CASE("local factor examples over F_3") {
  ff::Tower tower(ff::make_field(3, 1));
  const auto f = factors(tower, 1, 1);
  REQUIRE(f.size() == 2);
  CHECK(f[0].coeffs == ints(3, {1, -1, 3}));
  CHECK(f[1].coeffs == ints(3, {1, 2, 3}));
  for (int n : {1, 2}) {
    for (int d : {1, 2}) {
      for (const auto& lf : factors(tower, n, d)) {
        CHECK(lf.coeffs.size() == static_cast<std::size_t>(n + 2));
        CHECK(lf.coeffs[0] == CycInt::one(3));
      }
    }
  }
}

TEST_CASE("the power-sum sign is forced by the structural facts") {
  // Kl_1 over F_3 at t = 1 for m = 1, 2; the wrong sign breaks the leading coefficient.
  ff::Tower tower(ff::make_field(3, 1));
  const auto pt = ff::closed_points(tower, 1)[0];
  std::vector<CycInt> sums{expsum::kloosterman(1, pt, 1, tower), expsum::kloosterman(1, pt, 2, tower)};
  CHECK_NOTHROW(local_factor_from_sums(1, 1, 1, sums));
  std::vector<CycInt> flipped{-sums[0], -sums[1]};
  CHECK_THROWS_AS(local_factor_from_sums(1, 1, 1, flipped), FindingError);
}

TEST_CASE("eigen power sums") {
  const auto ps = eigen_power_sums(ints(3, {1, -1, 3}), 2);
  CHECK(ps[0].as_integer() == 1);
  CHECK(ps[1].as_integer() == -5);
  const int p = 5;
  const auto qs = eigen_power_sums(ints(p, {1, -(1 + p), p}), 6);
  mpz_class pw = 1;
  for (int m = 1; m <= 6; ++m) {
    pw *= p;
    CHECK(qs[m - 1].as_integer() == 1 + pw);
  }
  // round trip against recomputed sums: p_m = (-1)^n Kl_n(t, m)
  ff::Tower tower(ff::make_field(3, 1));
  for (int n : {1, 2}) {
    for (const auto& pt : ff::closed_points(tower, 1)) {
      const auto lf = local_factor(n, pt, tower);
      const auto e = eigen_power_sums(lf.coeffs, n + 2);
      for (int m = 1; m <= n + 2; ++m) {
        const auto kl = expsum::kloosterman(n, pt, m, tower);
        CHECK(e[m - 1] == (n % 2 == 0 ? kl : -kl));
      }
    }
  }
}

TEST_CASE("Sym^k factor examples") {
  const auto P = ints(3, {1, -1, 3});
  CHECK(sym_k_factor(P, 1) == P);
  CHECK(sym_k_factor(P, 0) == ints(3, {1, -1}));
  CHECK(sym_k_factor(P, 2) == ints(3, {1, 2, -6, -27}));
}

TEST_CASE("Sym^k by Berkowitz matches the power-sum route") {
  ff::Tower tower(ff::make_field(3, 1));
  for (int n : {1, 2}) {
    for (const auto& lf : factors(tower, n, 1)) {
      for (int k = 0; k <= 4; ++k) CHECK(sym_k_factor(lf.coeffs, k) == sym_k_by_power_sums(lf.coeffs, k));
    }
  }
  ff::Tower t5(ff::make_field(5, 1));
  for (const auto& lf : factors(t5, 1, 1)) {
    for (int k = 1; k <= 3; ++k) CHECK(sym_k_factor(lf.coeffs, k) == sym_k_by_power_sums(lf.coeffs, k));
  }
}

TEST_CASE("Berkowitz characteristic polynomial of small matrices") {
  // [[1,2],[3,4]]: det(I - MT) = 1 - 5T - 2T^2
  std::vector<std::vector<CycInt>> M{{CycInt::from_integer(3, 1), CycInt::from_integer(3, 2)},
                                     {CycInt::from_integer(3, 3), CycInt::from_integer(3, 4)}};
  CHECK(det_one_minus(M) == ints(3, {1, -5, -2}));
  // upper triangular 3x3 with diagonal 2, 3, 5
  std::vector<std::vector<CycInt>> U(3, std::vector<CycInt>(3, CycInt::from_integer(3, 7)));
  U[1][0] = U[2][0] = U[2][1] = CycInt::zero(3);
  U[0][0] = CycInt::from_integer(3, 2);
  U[1][1] = CycInt::from_integer(3, 3);
  U[2][2] = CycInt::from_integer(3, 5);
  CHECK(det_one_minus(U) == ints(3, {1, -10, 31, -30}));
}

TEST_CASE("inverse series") {
  const auto s = inverse_series(ints(3, {1, -1, 3}), 1, 4);
  // 1/(1 - T + 3T^2) = 1 + T - 2T^2 - 5T^3 + T^4
  CHECK(s == ints(3, {1, 1, -2, -5, 1}));
  const auto s2 = inverse_series(ints(3, {1, -1, 3}), 2, 4);
  CHECK(s2 == ints(3, {1, 0, 1, 0, -2}));
}

TEST_CASE("tuples below a weight bound") {
  CHECK(tuples_below(1, 3).size() == 3);
  const auto t = tuples_below(2, 5);  // i1 + 2 i2 < 5
  CHECK(t.size() == 9);
  for (const auto& tw : t) CHECK(tw.weight == tw.tuple[0] + 2 * tw.tuple[1]);
  CHECK(tuples_below(3, 0).empty());
}

TEST_CASE("Sym^{κ,∞} local example") {
  ff::Tower tower(ff::make_field(3, 1));
  const auto lf = factors(tower, 1, 1)[0];
  const auto s = sym_inf_local(lf, padic::PadicExponent::integer(3, 2), 4, 3);
  CHECK(zp(s[1]) == 7);
  // closed form π_0^2 / (1 - π_1/π_0) at higher precision as oracle
  const auto r = padic::slope_split(lf.coeffs, 1, 6);
  const auto closed = r[0].pow(2) * (PadicCyc::one(3, 6) - r[1] * r[0].inverse()).inverse();
  CHECK(s[1].agrees(closed));
}

TEST_CASE("only the zero tuple survives at tiny precision") {
  ff::Tower tower(ff::make_field(3, 1));
  for (const auto& lf : factors(tower, 1, 1)) {
    const auto kappa = padic::PadicExponent::integer(3, 3);
    const auto s = sym_inf_local(lf, kappa, 2, 4);
    const auto u = unit_root_local(lf, kappa, 2, 4);
    for (int m = 0; m <= 4; ++m) CHECK(s[m].agrees(u[m]));
  }
  CHECK_THROWS_AS(sym_inf_local(factors(tower, 1, 1)[0], padic::PadicExponent::integer(3, 1), 1, 2), PrecisionError);
}

TEST_CASE("product route and h-sum route agree") {
  for (int p : {3, 5}) {
    ff::Tower tower(ff::make_field(p, 1));
    for (int n : {1, 2}) {
      for (int d : {1, 2}) {
        if (p == 5 && n == 2 && d == 2) continue;
        for (const auto& lf : factors(tower, n, d)) {
          for (long k : {0L, 1L, 3L}) {
            const auto kappa = padic::PadicExponent::integer(p, k);
            const auto a = sym_inf_local(lf, kappa, 12 * (p - 1), 4);
            const auto b = sym_inf_local_hsum(lf, kappa, 12 * (p - 1), 4);
            for (int m = 0; m <= 4; ++m) {
              const long cert = std::min(a[m].cert(), b[m].cert());
              CHECK(a[m].val_difference(b[m]).value >= cert);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("unit-root local series") {
  ff::Tower tower(ff::make_field(3, 1));
  const auto lf2 = factors(tower, 1, 2)[0];
  const auto s = unit_root_local(lf2, padic::PadicExponent::integer(3, 0), 8, 6);
  for (int m = 0; m <= 6; ++m) CHECK(zp(s[m]) == (m % 2 == 0 ? 1 : 0));
  const auto lf = factors(tower, 1, 1)[0];
  const auto u = unit_root_local(lf, padic::PadicExponent::integer(3, 1), 4, 3);
  CHECK(zp(u[1]) == 7);
  CHECK(zp(u[2]) == 49 % 9);
  const auto hi = unit_root_local(lf, padic::PadicExponent::integer(3, 1), 16, 3);
  for (int m = 0; m <= 3; ++m) CHECK(hi[m].agrees(u[m]));
}

TEST_CASE("Euler products") {
  const auto empty = euler_product(3, 1, 0, {});
  REQUIRE(empty.coeffs.size() == 1);
  CHECK(std::get<CycInt>(empty.coeffs[0]) == CycInt::one(3));

  ff::Tower tower(ff::make_field(3, 1));
  std::vector<PointSeries> locals;
  for (const auto& pt : ff::closed_points(tower, 1)) {
    locals.push_back({pt, inverse_series(local_factor(1, pt, tower).coeffs, 1, 1)});
  }
  const auto s = euler_product(3, 1, 1, locals);
  CHECK(std::get<CycInt>(s.coeffs[1]).as_integer() == -1);

  // order independence
  std::vector<PointSeries> all;
  for (int d = 1; d <= 3; ++d) {
    for (const auto& pt : ff::closed_points(tower, d)) {
      all.push_back({pt, inverse_series(sym_k_factor(local_factor(1, pt, tower).coeffs, 2), d, 3)});
    }
  }
  const auto ref = euler_product(3, 1, 3, all);
  std::mt19937 rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    std::shuffle(all.begin(), all.end(), rng);
    const auto again = euler_product(3, 1, 3, all);
    for (int m = 0; m <= 3; ++m) CHECK(std::get<CycInt>(again.coeffs[m]) == std::get<CycInt>(ref.coeffs[m]));
  }
  CHECK(check_integrality(ref).ok);

  auto missing = all;
  missing.pop_back();
  CHECK_THROWS_AS(euler_product(3, 1, 3, missing), CoverageError);
  auto dup = all;
  dup.push_back(all.front());
  CHECK_THROWS_AS(euler_product(3, 1, 3, dup), CoverageError);
  CHECK_THROWS_AS(euler_product(3, 1, 2, all), CoverageError);
}

TEST_CASE("non-integral exact products are findings") {
  ff::Tower tower(ff::make_field(3, 1));
  std::vector<PointSeries> locals;
  for (const auto& pt : ff::closed_points(tower, 1)) {
    ExactSeries s{CycInt::one(3), pt.rep.index() == 1 ? CycInt::zeta_power(3, 1) : CycInt::zero(3)};
    locals.push_back({pt, s});
  }
  CHECK_THROWS_AS(euler_product(3, 1, 1, locals), FindingError);
}

TEST_CASE("synthetic factors") {
  TruncSeries s{3, 3, 1, {CycInt::one(3), CycInt::from_integer(3, -1), CycInt::zero(3), CycInt::zero(3)}};
  const auto t = times_polynomial(s, ints(3, {1, -9}));
  CHECK(std::get<CycInt>(t.coeffs[1]).as_integer() == -10);
  CHECK(std::get<CycInt>(t.coeffs[2]).as_integer() == 9);
  CHECK(std::get<CycInt>(t.coeffs[3]).as_integer() == 0);
}
