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

#include "hkl/run.hpp"

#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "hkl/error.hpp"
#include "hkl/parallel.hpp"

namespace hkl::run {

using nlohmann::ordered_json;

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Points: return "points";
    case Mode::Sum: return "sum";
    case Mode::Local: return "local";
    case Mode::SymK: return "symk";
    case Mode::SymInf: return "syminf";
    case Mode::UnitRoot: return "unitroot";
    case Mode::Verify: return "verify-newton-hodge";
    case Mode::Compare: return "compare-slopes";
  }
  return "unknown";
}

// ---------------------------------------------------------------- config

void RunConfig::validate() const {
  if (p == 2) {
    throw ConfigError("p = 2 is not supported: the Newton-above-Hodge statement assumes p is an odd prime");
  }
  if (!ff::is_prime(p)) throw ConfigError("p = " + std::to_string(p) + " is not an odd prime");
  if (a < 1) throw ConfigError("a must be >= 1 (q = p^a must be a field)");
  if (n < 1) throw ConfigError("n must be >= 1");
  if (D < 0) throw ConfigError("D must be >= 0");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (retries < 0) throw ConfigError("retries must be >= 0");
  if (V && *V < p - 1) throw ConfigError("V must be at least p - 1 (one p-adic digit)");
  if (D > max_degree && (mode != Mode::Sum)) {
    throw ConfigError("D = " + std::to_string(D) + " exceeds the configured maximum degree " +
                      std::to_string(max_degree));
  }
  if (mode == Mode::Sum && (d < 1 || m < 1 || d > max_degree)) throw ConfigError("sum needs 1 <= d <= max degree, m >= 1");
  if (k && *k < 0) throw ConfigError("k must be >= 0");
  if (kappa_digits) {
    for (int x : *kappa_digits) {
      if (x < 0 || x >= p) throw ConfigError("κ digit " + std::to_string(x) + " is not in [0, p)");
    }
    if (kappa_digits->empty()) throw ConfigError("κ needs at least one digit");
  }
  if ((mode == Mode::SymK || mode == Mode::Compare) && !k) {
    throw ConfigError(to_string(mode) + " needs an integer exponent (--k)");
  }
  if ((mode == Mode::SymInf || mode == Mode::UnitRoot || mode == Mode::Verify) && !k && !kappa_digits) {
    throw ConfigError(to_string(mode) + " needs an exponent (--k, --kappa or --kappa-int)");
  }
  if (k && kappa_digits) throw ConfigError("give either an integer exponent or κ digits, not both");
}

padic::PadicExponent RunConfig::exponent() const {
  if (kappa_digits) return padic::PadicExponent::truncated(p, *kappa_digits);
  if (k) return padic::PadicExponent::integer(p, *k);
  throw ConfigError("no exponent configured");
}

long default_precision(int p, int a, int n, int D) {
  const auto H = polygon::hodge_polygon_covering(n, p, D);
  const mpq_class h = H.at(D);
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), h.get_num_mpz_t(), h.get_den_mpz_t());
  return static_cast<long>(p - 1) * a * (c.get_si() + 4);
}

// ---------------------------------------------------------------- pipeline

Pipeline::Pipeline(int p, int a, std::optional<ff::Poly> modulus, int workers, expsum::SumCache* cache,
                   std::uint64_t max_terms, std::uint64_t max_field)
    : p_(p),
      a_(a),
      workers_(workers),
      cache_(cache),
      max_terms_(max_terms),
      tower_(std::make_unique<ff::Tower>(ff::make_field(p, a, std::move(modulus), max_field), max_field)) {}

const std::vector<ff::ClosedPoint>& Pipeline::points(int d) {
  std::lock_guard lock(mu_);
  auto it = points_.find(d);
  if (it == points_.end()) it = points_.emplace(d, ff::closed_points(*tower_, d)).first;
  return it->second;
}

const std::vector<lfun::LocalFactor>& Pipeline::local_factors(int n, int d) {
  const auto& pts = points(d);
  {
    std::lock_guard lock(mu_);
    auto it = factors_.find({n, d});
    if (it != factors_.end()) return it->second;
  }
  // Build the levels up front so workers only read the tower.
  for (int m = 1; m <= n + 1; ++m) tower_->embedding(d, d * m);
  auto fs = parallel_map(pts.size(), workers_, [&](std::size_t i) {
    return lfun::local_factor(n, pts[i], *tower_, cache_, max_terms_);
  });
  std::lock_guard lock(mu_);
  return factors_.emplace(std::pair(n, d), std::move(fs)).first->second;
}

template <class F>
lfun::TruncSeries Pipeline::product(int n, int D, F&& local) {
  std::vector<lfun::PointSeries> locals;
  for (int d = 1; d <= D; ++d) {
    const auto& pts = points(d);
    const auto& fs = local_factors(n, d);
    auto series = parallel_map(pts.size(), workers_, [&](std::size_t i) {
      return std::variant<lfun::ExactSeries, lfun::PadicSeries>(local(fs[i]));
    });
    for (std::size_t i = 0; i < pts.size(); ++i) locals.push_back({pts[i], std::move(series[i])});
  }
  return lfun::euler_product(p_, a_, D, std::move(locals));
}

lfun::TruncSeries Pipeline::symk(int n, int k, int D) {
  return product(n, D, [&](const lfun::LocalFactor& f) {
    return lfun::inverse_series(lfun::sym_k_factor(f.coeffs, k), f.d, D);
  });
}

lfun::TruncSeries Pipeline::syminf(int n, const padic::PadicExponent& kappa, long V, int D) {
  return product(n, D, [&](const lfun::LocalFactor& f) { return lfun::sym_inf_local(f, kappa, V, D); });
}

lfun::TruncSeries Pipeline::unitroot(int n, const padic::PadicExponent& kappa, long V, int D) {
  return product(n, D, [&](const lfun::LocalFactor& f) { return lfun::unit_root_local(f, kappa, V, D); });
}

// ---------------------------------------------------------------- JSON

ordered_json int_json(const mpz_class& v) {
  if (v.fits_slong_p()) return v.get_si();
  return v.get_str();
}

ordered_json rational_json(const mpq_class& v) { return ordered_json::array({int_json(v.get_num()), int_json(v.get_den())}); }

ordered_json cyc_json(const cyclo::CycInt& v) {
  if (v.is_integer()) return int_json(v.as_integer());
  ordered_json coords = ordered_json::array();
  for (const auto& c : v.coords()) coords.push_back(int_json(c));
  return ordered_json{{"coords", coords}};
}

ordered_json polygon_json(const polygon::Polygon& poly) {
  ordered_json out = ordered_json::array();
  for (const auto& v : poly.vertices()) out.push_back(ordered_json::array({rational_json(v.x), rational_json(v.y)}));
  return out;
}

ordered_json verdict_json(const polygon::Verdict& v) {
  ordered_json out{{"outcome", polygon::to_string(v.outcome)}};
  if (v.m) out["m"] = *v.m;
  if (v.ord) out["ord_q"] = rational_json(*v.ord);
  if (v.bound) out["bound"] = rational_json(*v.bound);
  if (v.needed_pi) out["needed_pi_precision"] = *v.needed_pi;
  if (!v.detail.empty()) out["detail"] = v.detail;
  return out;
}

ordered_json series_json(const lfun::TruncSeries& s, const polygon::Polygon* hodge) {
  ordered_json coeffs = ordered_json::array();
  const auto pts = polygon::newton_points(s);
  for (int m = 0; m <= s.D; ++m) {
    ordered_json c{{"m", m}};
    if (const auto* x = std::get_if<cyclo::CycInt>(&s.coeffs[m])) {
      c["kind"] = "exact";
      c["value"] = cyc_json(*x);
    } else {
      const auto& y = std::get<padic::PadicCyc>(s.coeffs[m]);
      c["kind"] = "padic";
      if (auto z = y.zp_value()) {
        c["value"] = int_json(*z);
      } else {
        ordered_json coords = ordered_json::array();
        for (const auto& v : y.coords()) coords.push_back(int_json(v));
        c["value"] = ordered_json{{"coords", coords}};
      }
      c["precision_digits"] = y.N();
      c["certificate_pi"] = y.cert();
    }
    const auto& pt = pts[m];
    c["valuation_exact"] = pt.exact;
    c["pi_val"] = pt.bound ? ordered_json(pt.pi) : ordered_json(nullptr);
    c["ord_q"] = pt.bound ? rational_json(*pt.bound) : ordered_json(nullptr);
    if (hodge) c["hodge"] = rational_json(hodge->at(m));
    coeffs.push_back(std::move(c));
  }
  const auto integ = lfun::check_integrality(s);
  return ordered_json{{"D", s.D},
                      {"p", s.p},
                      {"a", s.a},
                      {"coefficients", coeffs},
                      {"integrality", {{"ok", integ.ok}, {"failing", integ.failing}}}};
}

std::string series_csv(const std::string& label, const lfun::TruncSeries& s, const polygon::Polygon* hodge) {
  std::ostringstream os;
  const auto pts = polygon::newton_points(s);
  for (int m = 0; m <= s.D; ++m) {
    const auto& pt = pts[m];
    os << label << ',' << m << ',' << (pt.exact ? "exact" : "bound") << ',';
    if (pt.bound) {
      os << pt.pi << ',' << pt.bound->get_str();
    } else {
      os << "inf,inf";
    }
    os << ',' << (hodge ? hodge->at(m).get_str() : std::string()) << '\n';
  }
  return os.str();
}

namespace {

constexpr const char* kCsvHeader = "series,m,status,pi_val,ord_q,hodge\n";

ordered_json config_json(const RunConfig& c) {
  ordered_json out{{"mode", to_string(c.mode)}, {"p", c.p}, {"a", c.a}, {"n", c.n}};
  if (c.modulus) out["modulus"] = *c.modulus;
  if (c.k) out["k"] = *c.k;
  if (c.kappa_digits) out["kappa_digits"] = *c.kappa_digits;
  if (c.mode == Mode::Sum) {
    out["d"] = c.d;
    out["m"] = c.m;
  } else {
    out["D"] = c.D;
  }
  if (c.V) out["V"] = *c.V;
  out["retries"] = c.retries;
  return out;
}

ordered_json point_json(const ff::ClosedPoint& pt) {
  return ordered_json{{"d", pt.d}, {"index", pt.rep.index()}, {"coords", pt.rep.coords()}};
}

polygon::Outcome combine(polygon::Outcome x, polygon::Outcome y) {
  auto rank = [](polygon::Outcome o) {
    switch (o) {
      case polygon::Outcome::Violation:
      case polygon::Outcome::Disagree: return 2;
      case polygon::Outcome::Inconclusive: return 1;
      default: return 0;
    }
  };
  return rank(x) >= rank(y) ? x : y;
}

int exit_for(polygon::Outcome o) {
  switch (o) {
    case polygon::Outcome::Violation:
    case polygon::Outcome::Disagree: return kFinding;
    case polygon::Outcome::Inconclusive: return kInconclusive;
    default: return kOk;
  }
}

}  // namespace

// ---------------------------------------------------------------- run

RunResult run(const RunConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  std::unique_ptr<expsum::SumCache> cache;
  if (config.cache_path) {
    cache = std::make_unique<expsum::SumCache>(*config.cache_path);
  } else {
    cache = std::make_unique<expsum::SumCache>();
  }
  Pipeline pipe(config.p, config.a, config.modulus, config.workers, cache.get(), config.max_terms, config.max_field);

  RunResult res;
  auto& rep = res.report;
  rep["schema_version"] = kSchemaVersion;
  rep["tool_version"] = kToolVersion;
  rep["config"] = config_json(config);
  rep["field"] = {{"q", pipe.tower().q()}, {"modulus", pipe.tower().base()->desc().modulus()}};
  std::string csv;
  const int n = config.n;
  const int D = config.D;

  switch (config.mode) {
    case Mode::Points: {
      ordered_json degrees = ordered_json::array();
      for (int d = 1; d <= D; ++d) {
        const auto& pts = pipe.points(d);
        ordered_json list = ordered_json::array();
        for (const auto& pt : pts) list.push_back(point_json(pt));
        degrees.push_back({{"d", d},
                           {"count", pts.size()},
                           {"expected", ff::closed_point_count(pipe.tower().q(), d)},
                           {"points", list}});
      }
      rep["points"] = degrees;
      break;
    }
    case Mode::Sum: {
      const auto& pts = pipe.points(config.d);
      ordered_json list = ordered_json::array();
      auto values = parallel_map(pts.size(), config.workers, [&](std::size_t i) {
        return expsum::cached_kloosterman(n, pts[i], config.m, pipe.tower(), cache.get(), config.max_terms);
      });
      for (std::size_t i = 0; i < pts.size(); ++i) {
        list.push_back({{"point", point_json(pts[i])}, {"value", cyc_json(values[i])}});
      }
      rep["sums"] = list;
      break;
    }
    case Mode::Local: {
      ordered_json list = ordered_json::array();
      for (int d = 1; d <= D; ++d) {
        const auto& pts = pipe.points(d);
        const auto& fs = pipe.local_factors(n, d);
        for (std::size_t i = 0; i < pts.size(); ++i) {
          ordered_json coeffs = ordered_json::array();
          for (const auto& c : fs[i].coeffs) coeffs.push_back(cyc_json(c));
          list.push_back({{"point", point_json(pts[i])}, {"coefficients", coeffs}, {"leading_sign", fs[i].leading_sign}});
        }
      }
      rep["local_factors"] = list;
      break;
    }
    case Mode::SymK:
    case Mode::SymInf:
    case Mode::UnitRoot: {
      const auto H = polygon::hodge_polygon_covering(n, config.p, D);
      const long V = config.V.value_or(default_precision(config.p, config.a, n, D));
      lfun::TruncSeries s;
      std::string label;
      if (config.mode == Mode::SymK) {
        s = pipe.symk(n, static_cast<int>(*config.k), D);
        label = "symk";
      } else if (config.mode == Mode::SymInf) {
        s = pipe.syminf(n, config.exponent(), V, D);
        label = "syminf";
      } else {
        s = pipe.unitroot(n, config.exponent(), V, D);
        label = "unitroot";
      }
      if (config.mode != Mode::SymK) rep["precision"] = {{"V", V}};
      rep["series"][label] = series_json(s, &H);
      rep["polygons"] = {{"hodge", polygon_json(H)}, {"newton_" + label, polygon_json(polygon::newton_hull(polygon::newton_points(s)))}};
      rep["verdicts"][label + "_above_hodge"] = verdict_json(polygon::verify_above(polygon::newton_points(s), H, config.p, config.a));
      csv = series_csv(label, s, &H);
      break;
    }
    case Mode::Verify: {
      const auto H = polygon::hodge_polygon_covering(n, config.p, D);
      rep["polygons"]["hodge"] = polygon_json(H);
      rep["polygons"]["normalization"] = "coefficient-wise: every (m, ord_q c_m) of the degree-D truncation";
      polygon::Outcome overall = polygon::Outcome::Pass;
      if (config.k) {
        const auto s = pipe.symk(n, static_cast<int>(*config.k), D);
        const auto v = polygon::verify_above(polygon::newton_points(s), H, config.p, config.a);
        rep["series"]["symk"] = series_json(s, &H);
        rep["polygons"]["newton_symk"] = polygon_json(polygon::newton_hull(polygon::newton_points(s)));
        rep["verdicts"]["symk"] = verdict_json(v);
        csv += series_csv("symk", s, &H);
        overall = combine(overall, v.outcome);
      }
      long V = config.V.value_or(default_precision(config.p, config.a, n, D));
      ordered_json attempts = ordered_json::array();
      for (int attempt = 0;; ++attempt) {
        const auto s = pipe.syminf(n, config.exponent(), V, D);
        const auto pts = polygon::newton_points(s);
        const auto v = polygon::verify_above(pts, H, config.p, config.a);
        attempts.push_back({{"V", V}, {"outcome", polygon::to_string(v.outcome)}});
        if (v.outcome != polygon::Outcome::Inconclusive || attempt >= config.retries) {
          rep["series"]["syminf"] = series_json(s, &H);
          rep["polygons"]["newton_syminf"] = polygon_json(polygon::newton_hull(pts));
          rep["verdicts"]["syminf"] = verdict_json(v);
          csv += series_csv("syminf", s, &H);
          overall = combine(overall, v.outcome);
          break;
        }
        V *= 2;
      }
      rep["precision"] = {{"attempts", attempts}};
      rep["verdicts"]["overall"] = polygon::to_string(overall);
      res.exit_code = exit_for(overall);
      break;
    }
    case Mode::Compare: {
      const int k = static_cast<int>(*config.k);
      const auto A = pipe.symk(n, k, D);
      const auto pa = polygon::newton_points(A);
      long V = config.V.value_or(default_precision(config.p, config.a, n, D));
      ordered_json attempts = ordered_json::array();
      for (int attempt = 0;; ++attempt) {
        const auto B = pipe.syminf(n, padic::PadicExponent::integer(config.p, k), V, D);
        const auto pb = polygon::newton_points(B);
        const auto v = polygon::compare_slope_range(pa, pb, k);
        attempts.push_back({{"V", V}, {"outcome", polygon::to_string(v.outcome)}});
        if (v.outcome != polygon::Outcome::Inconclusive || attempt >= config.retries) {
          rep["series"]["symk"] = series_json(A, nullptr);
          rep["series"]["syminf"] = series_json(B, nullptr);
          rep["polygons"]["newton_symk"] = polygon_json(polygon::newton_hull(pa));
          rep["polygons"]["newton_syminf"] = polygon_json(polygon::newton_hull(pb));
          rep["polygons"]["low_slope_symk"] = polygon_json(polygon::low_slope_part(polygon::newton_hull(pa), k));
          rep["polygons"]["low_slope_syminf"] = polygon_json(polygon::low_slope_part(polygon::newton_hull(pb), k));
          rep["verdicts"]["compare"] = verdict_json(v);
          rep["verdicts"]["overall"] = polygon::to_string(v.outcome);
          csv += series_csv("symk", A, nullptr) + series_csv("syminf", B, nullptr);
          res.exit_code = exit_for(v.outcome);
          break;
        }
        V *= 2;
      }
      rep["precision"] = {{"attempts", attempts}};
      break;
    }
  }

  const auto stats = cache->stats();
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  rep["runtime"] = {{"elapsed_ms", elapsed},
                    {"workers", config.workers},
                    {"cache",
                     {{"path", config.cache_path ? config.cache_path->string() : std::string()},
                      {"records", stats.records},
                      {"hits", stats.hits},
                      {"misses", stats.misses},
                      {"inserts", stats.inserts}}}};
  if (!csv.empty()) res.csv = kCsvHeader + csv;
  return res;
}

RunResult error_result(const std::exception& e) {
  RunResult res;
  auto& rep = res.report;
  rep["schema_version"] = kSchemaVersion;
  rep["tool_version"] = kToolVersion;
  auto set = [&](const char* kind, int code) {
    rep["error"] = {{"kind", kind}, {"message", e.what()}};
    res.exit_code = code;
  };
  if (dynamic_cast<const SlopeViolation*>(&e)) {
    set("slope-violation", kFinding);
  } else if (dynamic_cast<const DegenerateFactor*>(&e)) {
    set("degenerate-factor", kFinding);
  } else if (dynamic_cast<const FindingError*>(&e)) {
    set("finding", kFinding);
  } else if (const auto* pe = dynamic_cast<const PrecisionError*>(&e)) {
    set("precision", kInconclusive);
    rep["error"]["needed_pi_precision"] = pe->needed();
  } else if (const auto* ce = dynamic_cast<const CacheFormatError*>(&e)) {
    set("cache-format", kUsage);
    rep["error"]["line"] = ce->line();
  } else if (dynamic_cast<const ModulusError*>(&e)) {
    set("modulus", kUsage);
  } else if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const TowerError*>(&e) ||
             dynamic_cast<const std::invalid_argument*>(&e)) {
    set("config", kUsage);
  } else if (dynamic_cast<const ResourceError*>(&e)) {
    set("resource", kResource);
  } else {
    set("internal", kResource);
  }
  return res;
}

// ---------------------------------------------------------------- cache admin

RunResult cache_admin(const std::filesystem::path& path, CacheCommand command, std::size_t sample) {
  RunResult res;
  auto& rep = res.report;
  rep["schema_version"] = kSchemaVersion;
  rep["tool_version"] = kToolVersion;
  rep["cache"] = {{"path", path.string()}};
  const auto records = expsum::read_cache_file(path);
  std::map<std::string, std::size_t> first;
  std::vector<std::size_t> duplicates;
  std::vector<long> conflicts;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, fresh] = first.emplace(records[i].key.to_string(), i);
    if (!fresh) {
      duplicates.push_back(i);
      if (!(records[it->second].value == records[i].value)) conflicts.push_back(records[i].line);
    }
  }
  rep["cache"]["records"] = records.size();
  rep["cache"]["distinct_keys"] = first.size();
  rep["cache"]["duplicates"] = duplicates.size();
  rep["cache"]["conflicting_lines"] = conflicts;
  if (!conflicts.empty()) res.exit_code = kFinding;

  switch (command) {
    case CacheCommand::Stat: rep["command"] = "stat"; break;
    case CacheCommand::Verify: {
      rep["command"] = "verify";
      std::vector<std::size_t> pick;
      if (sample == 0 || sample >= records.size()) {
        for (std::size_t i = 0; i < records.size(); ++i) pick.push_back(i);
      } else {
        for (std::size_t j = 0; j < sample; ++j) pick.push_back(j * records.size() / sample);
      }
      std::map<std::string, std::unique_ptr<ff::Tower>> towers;
      ordered_json mismatches = ordered_json::array();
      for (std::size_t i : pick) {
        const auto& r = records[i];
        const std::string fkey = std::to_string(r.key.p) + "," + std::to_string(r.key.a) + "," +
                                 ff::poly_to_string(r.key.modulus);
        auto& tw = towers[fkey];
        if (!tw) tw = std::make_unique<ff::Tower>(ff::make_field(r.key.p, r.key.a, r.key.modulus));
        const auto field = tw->level(r.key.d);
        const ff::ClosedPoint pt{field->elem_from_coords(r.key.rep), r.key.d};
        const auto value = expsum::kloosterman(r.key.n, pt, r.key.m, *tw);
        if (!(value == r.value)) {
          mismatches.push_back({{"line", r.line}, {"key", r.key.to_string()}, {"expected", value.to_string()}});
        }
      }
      rep["verify"] = {{"checked", pick.size()}, {"mismatches", mismatches}};
      if (!mismatches.empty()) res.exit_code = kFinding;
      break;
    }
    case CacheCommand::Compact: {
      rep["command"] = "compact";
      const auto tmp = std::filesystem::path(path.string() + ".tmp");
      {
        std::ofstream out(tmp, std::ios::trunc);
        out << expsum::kCacheHeader << '\n';
        for (std::size_t i = 0; i < records.size(); ++i) {
          if (first.at(records[i].key.to_string()) == i) out << expsum::format_record(records[i].key, records[i].value) << '\n';
        }
        if (!out) throw std::runtime_error("failed to write " + tmp.string());
      }
      std::filesystem::rename(tmp, path);
      rep["compact"] = {{"kept", first.size()}, {"removed", duplicates.size()}};
      break;
    }
  }
  return res;
}

}  // namespace hkl::run
