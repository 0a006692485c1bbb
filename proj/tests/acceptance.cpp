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

// Acceptance binary: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "hkl/error.hpp"
#include "hkl/expsum.hpp"
#include "hkl/lfun.hpp"
#include "hkl/polygon.hpp"
#include "hkl/run.hpp"

using namespace hkl;
using cyclo::CycInt;
using padic::PadicCyc;
using padic::PadicExponent;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream log;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) log << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

struct Instance {
  int p, n, max_d;
};

polygon::Rational frac(long a, long b) {
  polygon::Rational r(a, b);
  r.canonicalize();
  return r;
}

const std::vector<Instance> kLocalInstances{{3, 1, 3}, {5, 1, 3}, {3, 2, 2}};

std::string tag(int p, int n, int d, std::size_t idx) {
  return "p=" + std::to_string(p) + " n=" + std::to_string(n) + " d=" + std::to_string(d) + " point#" +
         std::to_string(idx);
}

// ---- 1
void local_factor_facts(Check& c) {
  long checked = 0;
  for (const auto& in : kLocalInstances) {
    ff::Tower tower(ff::make_field(in.p, 1));
    for (int d = 1; d <= in.max_d; ++d) {
      const auto pts = ff::closed_points(tower, d);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto lf = lfun::local_factor(in.n, pts[i], tower);
        const auto& P = lf.coeffs;
        const std::string where = tag(in.p, in.n, d, i);
        c.expect(P.size() == static_cast<std::size_t>(in.n + 2), where + " degree");
        c.expect(P.front() == CycInt::one(in.p), where + " constant term");
        // leading coefficient ±q^{n(n+1)d/2}
        mpz_class q_pow;
        mpz_ui_pow_ui(q_pow.get_mpz_t(), in.p, static_cast<unsigned long>(in.n * (in.n + 1) * d / 2));
        c.expect(P.back().is_integer() && abs(P.back().as_integer()) == q_pow, where + " leading coefficient");
        // slopes exactly 0..n in ord_{q^d}: lower hull of (j, ord c_j) is j(j-1)/2
        std::vector<polygon::Vertex> vs;
        for (int j = 0; j <= in.n + 1; ++j) {
          const auto v = P[j].pi_val();
          if (!v) continue;
          vs.push_back({polygon::Rational(j), frac(*v, (in.p - 1) * d)});
        }
        const auto hull = polygon::lower_hull(vs);
        std::vector<polygon::Vertex> want;
        for (int j = 0; j <= in.n + 1; ++j) want.push_back({polygon::Rational(j), frac(j * (j - 1), 2)});
        c.expect(hull.vertices() == want, where + " Newton slopes");
        // unit root: 1-unit and a root of the reversed polynomial to 8 digits
        const auto pi0 = padic::hensel_unit_root(P, 8);
        c.expect((pi0 - PadicCyc::one(in.p, 8)).val().value > 0, where + " 1-unit");
        PadicCyc acc = PadicCyc::zero(in.p, 8);
        for (const auto& coeff : P) acc = acc * pi0 + padic::embed(coeff, 8);
        c.expect(!acc.val().exact, where + " unit root");
        ++checked;
      }
    }
  }
  c.log << checked << " local factors";
}

// ---- 2 and 9 share these runs
struct VerifyCase {
  int n, k, D;
};
const std::vector<VerifyCase> kVerifyCases{{1, 1, 4}, {1, 2, 4}, {1, 3, 4}, {1, 4, 4}, {2, 1, 2}, {2, 2, 2}};

run::RunConfig verify_config(const VerifyCase& vc) {
  run::RunConfig cfg;
  cfg.mode = run::Mode::Verify;
  cfg.p = 3;
  cfg.n = vc.n;
  cfg.k = vc.k;
  cfg.D = vc.D;
  return cfg;
}

void hodge_bound(Check& c) {
  for (const auto& vc : kVerifyCases) {
    auto cfg = verify_config(vc);
    const long V0 = run::default_precision(3, 1, vc.n, vc.D);
    for (long V : {V0, 2 * V0}) {
      cfg.V = V;
      const auto r = run::run(cfg);
      const std::string where = "n=" + std::to_string(vc.n) + " k=" + std::to_string(vc.k) + " V=" + std::to_string(V);
      c.expect(r.exit_code == run::kOk, where + " exit code");
      c.expect(r.report["verdicts"]["symk"]["outcome"] == "pass", where + " Sym^k verdict");
      c.expect(r.report["verdicts"]["syminf"]["outcome"] == "pass", where + " Sym^{k,inf} verdict");
    }
  }
  c.log << kVerifyCases.size() << " cases at two precisions";
}

// ---- 3
void slope_coincidence(Check& c) {
  run::RunConfig cfg;
  cfg.mode = run::Mode::Compare;
  cfg.p = 3;
  cfg.n = 1;
  cfg.k = 1;
  cfg.D = 3;
  const auto r = run::run(cfg);
  c.expect(r.exit_code == run::kOk && r.report["verdicts"]["overall"] == "agree", "compare verdict");

  const int k = 1;
  run::Pipeline pipe(3, 1, std::nullopt, 1, nullptr);
  const auto A = pipe.symk(1, k, 3);
  const auto B = pipe.syminf(1, PadicExponent::integer(3, k), run::default_precision(3, 1, 1, 3), 3);
  const std::vector<CycInt> synthetic{CycInt::one(3), CycInt::from_integer(3, -9)};  // 1 - q^{k+1} T
  const auto At = lfun::times_polynomial(A, synthetic);
  const auto Bt = lfun::times_polynomial(B, synthetic);
  using polygon::newton_points;
  const auto base = polygon::compare_slope_range(newton_points(A), newton_points(B), k).outcome;
  c.expect(base == polygon::Outcome::Agree, "direct comparison");
  c.expect(polygon::compare_slope_range(newton_points(At), newton_points(Bt), k).outcome == base,
           "comparison after the synthetic factor");
  c.expect(polygon::compare_slope_range(newton_points(A), newton_points(At), k).outcome == polygon::Outcome::Agree,
           "Sym^k against its multiplied series");
  c.expect(polygon::compare_slope_range(newton_points(B), newton_points(Bt), k).outcome == polygon::Outcome::Agree,
           "Sym^{k,inf} against its multiplied series");
  c.log << "p=3 n=1 k=1 D=3";
}

// ---- 4
void dual_oracle(Check& c) {
  long instances = 0;
  for (int p : {3, 5}) {
    ff::Tower tower(ff::make_field(p, 1));
    const std::uint64_t limit = 729;
    for (int n : {1, 2}) {
      for (int d = 1; ff::ipow(p, d) <= limit; ++d) {
        const auto pts = ff::closed_points(tower, d);
        for (int m = 1; ff::ipow(p, d * m) <= limit; ++m) {
          const auto big = tower.level(d * m);
          const auto emb = tower.embedding(d, d * m);
          const auto table = expsum::kloosterman_table(n, *big);
          for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto direct = expsum::kloosterman(n, pts[i], m, tower);
            c.expect(direct == table[emb->map(pts[i].rep.index())], tag(p, n, d, i) + " m=" + std::to_string(m));
            ++instances;
          }
        }
      }
    }
  }
  c.log << instances << " instances";
}

// ---- 5
long brute_tuple_count(int n, int i) {
  // #{(i_2, ..., i_n, s) : Σ j i_j + (n+1) s = i}
  std::function<long(int, int)> rec = [&](int j, int rest) -> long {
    if (j > n + 1) return rest == 0 ? 1 : 0;
    long total = 0;
    for (int e = 0; e * j <= rest; ++e) total += rec(j + 1, rest - e * j);
    return total;
  };
  return rec(2, i);
}

void hodge_numbers(Check& c) {
  const auto h1 = polygon::hodge_coeffs(1, 6);
  const auto h2 = polygon::hodge_coeffs(2, 6);
  const std::vector<long> want1{1, 0, 1, 0, 1, 0, 1}, want2{1, 0, 1, 1, 1, 1, 2};
  for (int i = 0; i <= 6; ++i) {
    c.expect(h1[i] == want1[i], "h(1) at " + std::to_string(i));
    c.expect(h2[i] == want2[i], "h(2) at " + std::to_string(i));
    c.expect(brute_tuple_count(1, i) == want1[i] && brute_tuple_count(2, i) == want2[i], "brute count at " + std::to_string(i));
  }
  for (int n = 1; n <= 5; ++n) {
    const auto h = polygon::hodge_coeffs(n, 30);
    for (int i = 0; i <= 30; ++i) c.expect(h[i] == brute_tuple_count(n, i), "n=" + std::to_string(n) + " i=" + std::to_string(i));
  }
  c.log << "n<=5, i<=30";
}

// ---- 6
void integrality(Check& c) {
  run::Pipeline p3(3, 1, std::nullopt, 1, nullptr);
  for (const auto& vc : kVerifyCases) {
    const std::string where = "n=" + std::to_string(vc.n) + " k=" + std::to_string(vc.k);
    const auto s = p3.symk(vc.n, vc.k, vc.D);
    c.expect(s.all_exact(), where + " exact Sym^k");
    for (const auto& coeff : s.coeffs) c.expect(std::get<CycInt>(coeff).is_integer(), where + " Sym^k coefficient");
    const auto t = p3.syminf(vc.n, PadicExponent::integer(3, vc.k), run::default_precision(3, 1, vc.n, vc.D), vc.D);
    c.expect(lfun::check_integrality(t).ok, where + " Sym^{k,inf} ζ-components");
  }
  run::Pipeline p5(5, 1, std::nullopt, 1, nullptr);
  for (int k = 1; k <= 3; ++k) {
    c.expect(lfun::check_integrality(p5.symk(1, k, 3)).ok, "p=5 Sym^" + std::to_string(k));
    c.expect(lfun::check_integrality(p5.syminf(1, PadicExponent::integer(5, k), 40, 3)).ok, "p=5 Sym^{k,inf}");
  }
  c.log << "p=3 criterion-2 cases and p=5 n=1 k<=3";
}

// ---- 7
void padic_limit(Check& c) {
  const int p = 3, D = 4;
  const long V = 60;
  ff::Tower tower(ff::make_field(p, 1));
  // the literal exponent (2,1,1) and a longer expansion sharing those digits (1/2 in Z_3)
  std::vector<int> half{2};
  for (int i = 1; i < 14; ++i) half.push_back(1);
  const std::vector<std::vector<int>> kappas{{2, 1, 1}, half};
  const std::vector<long> ks{2, 5, 14};
  long comparisons = 0;
  for (const auto& pt : ff::closed_points(tower, 1)) {
    const auto lf = lfun::local_factor(1, pt, tower);
    const auto pi0 = padic::hensel_unit_root(lf.coeffs, 30);
    const auto v0 = (pi0 - PadicCyc::one(p, 30)).val();
    c.expect(v0.exact, "pi_val(π0 - 1) determined");
    for (const auto& digits : kappas) {
      const auto full = lfun::sym_inf_local(lf, PadicExponent::truncated(p, digits), V, D);
      for (int s = 1; s <= 3; ++s) {
        const auto trunc = lfun::sym_inf_local(lf, PadicExponent::integer(p, ks[s - 1]), V, D);
        const long need = (p - 1) * s + v0.value;
        for (int m = 0; m <= D; ++m) {
          const auto diff = full[m].val_difference(trunc[m]);
          c.expect(diff.value >= need, "s=" + std::to_string(s) + " m=" + std::to_string(m) + " digits=" +
                                           std::to_string(digits.size()));
          ++comparisons;
        }
      }
    }
  }
  c.log << comparisons << " coefficient comparisons";
}

// ---- 8
std::vector<PadicCyc> sym_roots(const std::vector<PadicCyc>& roots, int k) {
  std::vector<PadicCyc> out;
  std::vector<int> e(roots.size(), 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t j, int rest) {
    if (j + 1 == roots.size()) {
      e[j] = rest;
      PadicCyc mon = PadicCyc::one(roots[0].p(), roots[0].N());
      for (std::size_t i = 0; i < roots.size(); ++i) mon = mon * roots[i].pow(e[i]);
      out.push_back(mon);
      return;
    }
    for (int x = 0; x <= rest; ++x) {
      e[j] = x;
      rec(j + 1, rest - x);
    }
  };
  rec(0, k);
  return out;
}

void cross_routes(Check& c) {
  long count = 0;
  {
    ff::Tower tower(ff::make_field(3, 1));
    const auto kappa = PadicExponent::integer(3, 1);
    const long V = run::default_precision(3, 1, 1, 3);
    for (int d = 1; d <= 3; ++d) {
      const auto pts = ff::closed_points(tower, d);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto lf = lfun::local_factor(1, pts[i], tower);
        const auto a = lfun::sym_inf_local(lf, kappa, V, 3);
        const auto b = lfun::sym_inf_local_hsum(lf, kappa, V, 3);
        for (std::size_t m = 0; m < a.size(); ++m) {
          const long cert = std::min(a[m].cert(), b[m].cert());
          c.expect(a[m].val_difference(b[m]).value >= cert, tag(3, 1, d, i) + " product vs h-sum");
          ++count;
        }
      }
    }
  }
  const int N = 8;
  for (const auto& in : kLocalInstances) {
    ff::Tower tower(ff::make_field(in.p, 1));
    for (int d = 1; d <= in.max_d; ++d) {
      const auto pts = ff::closed_points(tower, d);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto lf = lfun::local_factor(in.n, pts[i], tower);
        const auto roots = padic::slope_split(lf.coeffs, lf.slope_unit(), N);
        for (int k = 1; k <= 3; ++k) {
          const auto exact = lfun::sym_k_factor(lf.coeffs, k);
          std::vector<PadicCyc> rebuilt{PadicCyc::one(in.p, N)};
          for (const auto& mu : sym_roots(roots, k)) {
            std::vector<PadicCyc> next(rebuilt.size() + 1, PadicCyc::zero(in.p, N));
            for (std::size_t j = 0; j < rebuilt.size(); ++j) {
              next[j] = next[j] + rebuilt[j];
              next[j + 1] = next[j + 1] - rebuilt[j] * mu;
            }
            rebuilt = std::move(next);
          }
          c.expect(rebuilt.size() == exact.size(), tag(in.p, in.n, d, i) + " Sym^k degree");
          for (std::size_t j = 0; j < exact.size() && j < rebuilt.size(); ++j) {
            const auto e = padic::embed(exact[j], N);
            c.expect(e.val_difference(rebuilt[j]).value >= std::min(e.cert(), rebuilt[j].cert()),
                     tag(in.p, in.n, d, i) + " Sym^" + std::to_string(k) + " coefficient " + std::to_string(j));
            ++count;
          }
        }
      }
    }
  }
  c.log << count << " coefficient agreements";
}

// ---- 9
void determinism(Check& c) {
  for (const auto& vc : kVerifyCases) {
    auto cfg = verify_config(vc);
    cfg.workers = 1;
    auto one = run::run(cfg).report;
    cfg.workers = 3;
    auto three = run::run(cfg).report;
    one.erase("runtime");
    three.erase("runtime");
    c.expect(one.dump() == three.dump(), "n=" + std::to_string(vc.n) + " k=" + std::to_string(vc.k) + " workers");
  }
  // monotone in precision: a pass never turns into a violation
  run::Pipeline pipe(3, 1, std::nullopt, 1, nullptr);
  for (const auto& vc : kVerifyCases) {
    const auto H = polygon::hodge_polygon_covering(vc.n, 3, vc.D);
    const long V0 = run::default_precision(3, 1, vc.n, vc.D);
    std::optional<polygon::Outcome> prev;
    for (long V : {2L, V0 / 2, V0, 2 * V0}) {
      if (V < 2) continue;
      polygon::Outcome now;
      try {
        const auto s = pipe.syminf(vc.n, PadicExponent::integer(3, vc.k), V, vc.D);
        now = polygon::verify_above(polygon::newton_points(s), H, 3, 1).outcome;
      } catch (const PrecisionError&) {
        now = polygon::Outcome::Inconclusive;
      }
      c.expect(!(prev == polygon::Outcome::Pass && now == polygon::Outcome::Violation), "regression at V=" + std::to_string(V));
      c.expect(now != polygon::Outcome::Violation, "violation at V=" + std::to_string(V));
      prev = now;
    }
  }
  c.log << "workers 1 vs 3, four precisions";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"local-factor facts", local_factor_facts},
      {"Newton above Hodge at desk scale", hodge_bound},
      {"slope <= k coincidence", slope_coincidence},
      {"direct vs convolution Kloosterman sums", dual_oracle},
      {"Hodge numbers vs brute-force count", hodge_numbers},
      {"integrality", integrality},
      {"p-adic limit in the exponent", padic_limit},
      {"cross-route equality", cross_routes},
      {"determinism and precision monotonicity", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.log << "exception: " << e.what();
    }
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << (i + 1) << ": " << (c.ok ? "PASS" : "FAIL") << " - " << criteria[i].first << " ["
              << c.log.str() << ", " << ms << " ms]" << std::endl;
    failures += !c.ok;
  }
  return failures == 0 ? 0 : 1;
}
