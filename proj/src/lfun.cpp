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

#include "hkl/lfun.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "hkl/error.hpp"

namespace hkl::lfun {

namespace {

PadicCyc cap(const PadicCyc& x, int N) { return x.N() > N ? x.reduce(N) : x; }

int p_adic_order(long r, int p) {
  int v = 0;
  while (r % p == 0) {
    r /= p;
    ++v;
  }
  return v;
}

// Truncated product of two series of length D + 1, precision capped at N.
PadicSeries mul_trunc(const PadicSeries& x, const PadicSeries& y, int N) {
  const int p = x.front().p();
  PadicSeries out(x.size(), PadicCyc::zero(p, N));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].val().value >= x[i].cert() && x[i].N() >= N) continue;  // certified zero
    for (std::size_t j = 0; i + j < x.size(); ++j) out[i + j] = cap(out[i + j] + cap(x[i] * y[j], N), N);
  }
  return out;
}

ExactSeries mul_trunc(const ExactSeries& x, const ExactSeries& y) {
  const int p = x.front().p();
  ExactSeries out(x.size(), CycInt::zero(p));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].is_zero()) continue;
    for (std::size_t j = 0; i + j < x.size(); ++j) {
      if (!y[j].is_zero()) out[i + j] += x[i] * y[j];
    }
  }
  return out;
}

// 1 + λT^d + λ²T^{2d} + ... to degree D.
PadicSeries geometric(const PadicCyc& lambda, int d, int D, int N) {
  const int p = lambda.p();
  PadicSeries g(D + 1, PadicCyc::zero(p, N));
  PadicCyc pw = PadicCyc::one(p, N);
  for (int e = 0; e <= D; e += d) {
    g[e] = pw;
    pw = cap(pw * lambda, N);
  }
  return g;
}

std::vector<PadicCyc> roots_of(const LocalFactor& P, int N) { return padic::slope_split(P.coeffs, P.slope_unit(), N); }

}  // namespace

// ---------------------------------------------------------------- local factors

std::vector<CycInt> coeffs_from_power_sums(std::span<const CycInt> ps) {
  if (ps.empty()) throw DomainError("need at least one power sum");
  const int p = ps.front().p();
  std::vector<CycInt> c{CycInt::one(p)};
  for (std::size_t m = 1; m <= ps.size(); ++m) {
    // m c_m = -Σ_{i<m} c_i p_{m-i}
    CycInt acc = CycInt::zero(p);
    for (std::size_t i = 0; i < m; ++i) acc -= c[i] * ps[m - i - 1];
    auto q = acc.divexact(static_cast<unsigned long>(m));
    if (!q) {
      throw DomainError("power sums are not those of algebraic integers: " + acc.to_string() + " not divisible by " +
                        std::to_string(m));
    }
    c.push_back(std::move(*q));
  }
  return c;
}

std::vector<CycInt> eigen_power_sums(std::span<const CycInt> P, int m_max) {
  if (P.empty()) throw DomainError("empty polynomial");
  const int p = P.front().p();
  auto coeff = [&](int i) { return i < static_cast<int>(P.size()) ? P[i] : CycInt::zero(p); };
  std::vector<CycInt> ps;
  for (int m = 1; m <= m_max; ++m) {
    CycInt v = -(coeff(m) * mpz_class(m));
    for (int i = 1; i < m; ++i) v -= coeff(i) * ps[m - i - 1];
    ps.push_back(std::move(v));
  }
  return ps;
}

LocalFactor local_factor_from_sums(int n, int d, int a, std::span<const CycInt> sums) {
  if (static_cast<int>(sums.size()) < n + 1) throw DomainError("local factor needs Kl_n(t, m) for m = 1..n+1");
  const int p = sums.front().p();
  std::vector<CycInt> ps;
  for (int m = 0; m <= n; ++m) ps.push_back(n % 2 == 0 ? sums[m] : -sums[m]);

  LocalFactor f;
  f.n = n;
  f.d = d;
  f.a = a;
  f.coeffs = coeffs_from_power_sums(ps);

  const mpz_class expected = [&] {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p),
                  static_cast<unsigned long>(a) * d * static_cast<unsigned long>(n) * (n + 1) / 2);
    return r;
  }();
  const CycInt& lead = f.coeffs.back();
  if (!lead.is_integer()) {
    throw FindingError("leading coefficient " + lead.to_string() + " is not a rational integer");
  }
  const mpz_class lv = lead.as_integer();
  if (lv == expected) {
    f.leading_sign = 1;
  } else if (lv == -expected) {
    f.leading_sign = -1;
  } else {
    throw FindingError("leading coefficient " + lv.get_str() + " is not ±" + expected.get_str());
  }
  if (!padic::has_unit_step_slopes(f.coeffs, f.slope_unit())) {
    std::ostringstream os;
    os << "Newton slopes of the local factor are not {0,...," << n << "}; π-valuations";
    for (const auto& c : f.coeffs) {
      auto v = c.pi_val();
      os << ' ' << (v ? std::to_string(*v) : std::string("inf"));
    }
    throw SlopeViolation(os.str());
  }
  const PadicCyc pi0 = padic::hensel_unit_root(f.coeffs, 1);
  if (pi0.residue() != 1) {
    throw FindingError("unit root is not a 1-unit (residue " + std::to_string(pi0.residue()) + ")");
  }
  return f;
}

LocalFactor local_factor(int n, const ff::ClosedPoint& t, const ff::Tower& tower, expsum::SumCache* cache,
                         std::uint64_t max_terms) {
  std::vector<CycInt> sums;
  for (int m = 1; m <= n + 1; ++m) sums.push_back(expsum::cached_kloosterman(n, t, m, tower, cache, max_terms));
  return local_factor_from_sums(n, t.d, tower.base()->degree(), sums);
}

// ---------------------------------------------------------------- Sym^k

std::vector<CycInt> det_one_minus(const std::vector<std::vector<CycInt>>& M) {
  const int r = static_cast<int>(M.size());
  if (r == 0) throw DomainError("empty matrix");
  const int p = M[0][0].p();
  // Berkowitz: charpoly(A) = Toeplitz(A) · charpoly(A_1), A_1 the trailing block.
  std::vector<CycInt> poly{CycInt::one(p), -M[r - 1][r - 1]};
  for (int k = r - 2; k >= 0; --k) {
    const int s = r - k;  // size of the current block
    std::vector<CycInt> t{CycInt::one(p), -M[k][k]};
    std::vector<CycInt> vec;  // A_1^j C
    for (int i = k + 1; i < r; ++i) vec.push_back(M[i][k]);
    for (int j = 0; j + 2 <= s; ++j) {
      CycInt rc = CycInt::zero(p);
      for (int i = k + 1; i < r; ++i) rc += M[k][i] * vec[i - k - 1];
      t.push_back(-rc);
      if (j + 3 > s) break;
      std::vector<CycInt> nv(vec.size(), CycInt::zero(p));
      for (int i = k + 1; i < r; ++i) {
        for (int l = k + 1; l < r; ++l) nv[i - k - 1] += M[i][l] * vec[l - k - 1];
      }
      vec = std::move(nv);
    }
    std::vector<CycInt> next(s + 1, CycInt::zero(p));
    for (int i = 0; i <= s; ++i) {
      for (int j = 0; j < s && j <= i; ++j) next[i] += t[i - j] * poly[j];
    }
    poly = std::move(next);
  }
  return poly;
}

namespace {

using Monomial = std::vector<int>;

void monomials(int vars, int k, Monomial& cur, int pos, std::vector<Monomial>& out) {
  if (pos == vars - 1) {
    cur[pos] = k;
    out.push_back(cur);
    return;
  }
  for (int e = k; e >= 0; --e) {
    cur[pos] = e;
    monomials(vars, k - e, cur, pos + 1, out);
  }
}

}  // namespace

std::vector<std::vector<CycInt>> sym_power_matrix(const std::vector<std::vector<CycInt>>& M, int k) {
  const int r = static_cast<int>(M.size());
  const int p = M[0][0].p();
  std::vector<Monomial> basis;
  Monomial cur(r);
  monomials(r, k, cur, 0, basis);
  std::map<Monomial, std::size_t> index;
  for (std::size_t i = 0; i < basis.size(); ++i) index[basis[i]] = i;

  std::vector<std::vector<CycInt>> S(basis.size(), std::vector<CycInt>(basis.size(), CycInt::zero(p)));
  for (std::size_t col = 0; col < basis.size(); ++col) {
    // ∏_j (M e_j)^{α_j} expanded on monomials.
    std::map<Monomial, CycInt> prod{{Monomial(r, 0), CycInt::one(p)}};
    for (int j = 0; j < r; ++j) {
      for (int e = 0; e < basis[col][j]; ++e) {
        std::map<Monomial, CycInt> next;
        for (const auto& [mono, c] : prod) {
          for (int i = 0; i < r; ++i) {
            if (M[i][j].is_zero()) continue;
            Monomial m2 = mono;
            ++m2[i];
            auto [it, fresh] = next.try_emplace(m2, CycInt::zero(p));
            it->second += c * M[i][j];
          }
        }
        prod = std::move(next);
      }
    }
    for (const auto& [mono, c] : prod) S[index.at(mono)][col] = c;
  }
  return S;
}

std::vector<CycInt> sym_k_factor(std::span<const CycInt> P, int k) {
  if (k < 0) throw ConfigError("k must be >= 0");
  if (P.size() < 2) throw DomainError("local factor of degree >= 1 expected");
  const int p = P.front().p();
  const int r = static_cast<int>(P.size()) - 1;
  // Companion matrix of X^r + c_1 X^{r-1} + ... + c_r; det(I - C T) = P(T).
  std::vector<std::vector<CycInt>> C(r, std::vector<CycInt>(r, CycInt::zero(p)));
  for (int i = 1; i < r; ++i) C[i][i - 1] = CycInt::one(p);
  for (int i = 0; i < r; ++i) C[i][r - 1] = -P[r - i];
  return det_one_minus(sym_power_matrix(C, k));
}

ExactSeries inverse_series(std::span<const CycInt> Q, int d, int D) {
  const int p = Q.front().p();
  ExactSeries s(D + 1, CycInt::zero(p));
  s[0] = CycInt::one(p);
  for (int m = d; m <= D; m += d) {
    CycInt acc = CycInt::zero(p);
    for (int i = 1; i * d <= m && i < static_cast<int>(Q.size()); ++i) acc -= Q[i] * s[m - i * d];
    s[m] = std::move(acc);
  }
  return s;
}

// ---------------------------------------------------------------- p-adic symmetric powers

std::vector<TupleWeight> tuples_below(int n, int bound) {
  std::vector<TupleWeight> out;
  std::vector<int> cur(n, 0);
  auto rec = [&](auto&& self, int j, int w) -> void {
    if (j == n) {
      out.push_back({cur, w});
      return;
    }
    for (int i = 0; w + (j + 1) * i < bound; ++i) {
      cur[j] = i;
      self(self, j + 1, w + (j + 1) * i);
    }
    cur[j] = 0;
  };
  if (bound > 0) rec(rec, 0, 0);
  return out;
}

int digits_for(int p, long V) {
  const long N = V / (p - 1);
  if (N < 1) throw PrecisionError("π-precision " + std::to_string(V) + " is below one p-adic digit", p - 1);
  return static_cast<int>(N);
}

PadicCyc unit_root_power(const PadicCyc& pi0, const PadicExponent& kappa, int shift, long target) {
  PadicCyc u = padic::one_unit_power(pi0, kappa, target);
  if (shift > 0) u = cap(u * pi0.inverse().pow(static_cast<unsigned long>(shift)), u.N());
  return u;
}

PadicSeries sym_inf_local(const LocalFactor& P, const PadicExponent& kappa, long V, int D) {
  const int p = P.p();
  const int N = digits_for(p, V);
  const long Veff = static_cast<long>(N) * (p - 1);
  const auto roots = roots_of(P, N);
  const PadicCyc uk = padic::one_unit_power(roots[0], kappa, Veff);
  const PadicCyc inv0 = roots[0].inverse();

  // (p-1)·a·d·w < Veff  <=>  a·d·w < N
  const int unit = P.slope_unit();
  const int bound = (N + unit - 1) / unit;
  PadicSeries series(D + 1, PadicCyc::zero(p, N));
  series[0] = PadicCyc::one(p, N);
  for (const auto& tw : tuples_below(P.n, bound)) {
    int total = 0;
    PadicCyc lambda = uk;
    for (int j = 0; j < P.n; ++j) {
      total += tw.tuple[j];
      if (tw.tuple[j] > 0) lambda = cap(lambda * roots[j + 1].pow(static_cast<unsigned long>(tw.tuple[j])), N);
    }
    if (total > 0) lambda = cap(lambda * inv0.pow(static_cast<unsigned long>(total)), N);
    series = mul_trunc(series, geometric(lambda, P.d, D, N), N);
  }
  return series;
}

PadicSeries sym_inf_local_hsum(const LocalFactor& P, const PadicExponent& kappa, long V, int D) {
  const int p = P.p();
  const int N = digits_for(p, V);
  const int R = D / P.d;
  int extra = 0;
  for (int r = 1; r <= R; ++r) extra += p_adic_order(r, p);
  const int Nw = N + extra;
  const long Vw = static_cast<long>(Nw) * (p - 1);
  const auto roots = roots_of(P, Nw);
  const PadicCyc uk = padic::one_unit_power(roots[0], kappa, Vw);
  const PadicCyc inv0 = roots[0].inverse();

  std::vector<PadicCyc> S(R + 1, PadicCyc::zero(p, Nw));
  for (int m = 1; m <= R; ++m) {
    PadicCyc s = uk.pow(static_cast<unsigned long>(m));
    for (int j = 1; j <= P.n; ++j) {
      const PadicCyc ratio = cap(roots[j] * inv0, Nw).pow(static_cast<unsigned long>(m));
      s = cap(s * (PadicCyc::one(p, Nw) - ratio).inverse(), Nw);
    }
    S[m] = s;
  }
  std::vector<PadicCyc> h{PadicCyc::one(p, Nw)};
  for (int r = 1; r <= R; ++r) {
    PadicCyc acc = PadicCyc::zero(p, Nw);
    for (int m = 1; m <= r; ++m) acc = acc + S[m] * h[r - m];
    const int v = p_adic_order(r, p);
    long unit = r;
    for (int i = 0; i < v; ++i) unit /= p;
    acc = acc.div_p_power(v);
    acc = acc * PadicCyc::from_integer(p, acc.N(), unit).inverse();
    h.push_back(acc);
  }
  PadicSeries out(D + 1, PadicCyc::zero(p, N));
  for (int r = 0; r <= R; ++r) out[r * P.d] = cap(h[r], N);
  return out;
}

PadicSeries unit_root_local(const LocalFactor& P, const PadicExponent& kappa, long V, int D) {
  const int p = P.p();
  const int N = digits_for(p, V);
  const PadicCyc pi0 = padic::hensel_unit_root(P.coeffs, N);
  const PadicCyc uk = padic::one_unit_power(pi0, kappa, static_cast<long>(N) * (p - 1));
  return geometric(uk, P.d, D, N);
}

// ---------------------------------------------------------------- Euler products

bool TruncSeries::all_exact() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const Coeff& c) { return std::holds_alternative<CycInt>(c); });
}

TruncSeries euler_product(int p, int a, int D, std::vector<PointSeries> locals) {
  const std::uint64_t q = ff::ipow(static_cast<std::uint64_t>(p), a);
  std::map<int, std::uint64_t> per_degree;
  std::set<std::pair<int, std::uint32_t>> seen;
  for (const auto& l : locals) {
    if (l.point.d < 1 || l.point.d > D) {
      throw CoverageError("closed point of degree " + std::to_string(l.point.d) + " supplied for truncation degree " +
                          std::to_string(D));
    }
    if (!seen.emplace(l.point.d, l.point.rep.index()).second) {
      throw CoverageError("closed point supplied twice (degree " + std::to_string(l.point.d) + ", index " +
                          std::to_string(l.point.rep.index()) + ")");
    }
    ++per_degree[l.point.d];
  }
  for (int d = 1; d <= D; ++d) {
    const std::uint64_t want = ff::closed_point_count(q, d);
    const std::uint64_t got = per_degree.count(d) ? per_degree[d] : 0;
    if (got != want) {
      throw CoverageError("degree " + std::to_string(d) + ": " + std::to_string(got) + " local factors, " +
                          std::to_string(want) + " closed points");
    }
  }
  std::sort(locals.begin(), locals.end(), [](const PointSeries& x, const PointSeries& y) {
    return std::pair(x.point.d, x.point.rep.index()) < std::pair(y.point.d, y.point.rep.index());
  });

  TruncSeries out;
  out.D = D;
  out.p = p;
  out.a = a;
  const bool exact = std::all_of(locals.begin(), locals.end(),
                                 [](const PointSeries& l) { return std::holds_alternative<ExactSeries>(l.inv); });
  if (exact) {
    ExactSeries acc(D + 1, CycInt::zero(p));
    acc[0] = CycInt::one(p);
    for (const auto& l : locals) acc = mul_trunc(acc, std::get<ExactSeries>(l.inv));
    for (int m = 0; m <= D; ++m) {
      if (!acc[m].is_integer()) {
        throw FindingError("Euler product coefficient c_" + std::to_string(m) + " = " + acc[m].to_string() +
                           " is not a rational integer");
      }
      out.coeffs.emplace_back(acc[m]);
    }
    return out;
  }
  int N = 0;
  bool first = true;
  for (const auto& l : locals) {
    if (const auto* s = std::get_if<PadicSeries>(&l.inv)) {
      for (const auto& c : *s) {
        N = first ? c.N() : std::min(N, c.N());
        first = false;
      }
    }
  }
  PadicSeries acc(D + 1, PadicCyc::zero(p, N));
  acc[0] = PadicCyc::one(p, N);
  for (const auto& l : locals) {
    if (const auto* s = std::get_if<PadicSeries>(&l.inv)) {
      acc = mul_trunc(acc, *s, N);
    } else {
      PadicSeries e;
      for (const auto& c : std::get<ExactSeries>(l.inv)) e.push_back(padic::embed(c, N));
      acc = mul_trunc(acc, e, N);
    }
  }
  for (auto& c : acc) out.coeffs.emplace_back(std::move(c));
  return out;
}

IntegralityReport check_integrality(const TruncSeries& s) {
  IntegralityReport r;
  for (std::size_t m = 0; m < s.coeffs.size(); ++m) {
    const bool ok = std::visit(
        [](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, CycInt>) {
            return c.is_integer();
          } else {
            return c.zp_value().has_value();
          }
        },
        s.coeffs[m]);
    if (!ok) {
      r.ok = false;
      r.failing.push_back(static_cast<int>(m));
    }
  }
  return r;
}

TruncSeries times_polynomial(const TruncSeries& s, std::span<const CycInt> poly) {
  TruncSeries out = s;
  for (int m = 0; m <= s.D; ++m) {
    std::optional<Coeff> acc;
    for (int i = 0; i <= m && i < static_cast<int>(poly.size()); ++i) {
      const Coeff& c = s.coeffs[m - i];
      Coeff term = std::visit(
          [&](const auto& x) -> Coeff {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, CycInt>) {
              return x * poly[i];
            } else {
              return x * padic::embed(poly[i], x.N());
            }
          },
          c);
      if (!acc) {
        acc = std::move(term);
      } else {
        acc = std::visit(
            [](const auto& x, const auto& y) -> Coeff {
              using X = std::decay_t<decltype(x)>;
              using Y = std::decay_t<decltype(y)>;
              if constexpr (std::is_same_v<X, Y>) {
                return x + y;
              } else if constexpr (std::is_same_v<X, CycInt>) {
                return padic::embed(x, y.N()) + y;
              } else {
                return x + padic::embed(y, x.N());
              }
            },
            *acc, term);
      }
    }
    out.coeffs[m] = std::move(*acc);
  }
  return out;
}

}  // namespace hkl::lfun
