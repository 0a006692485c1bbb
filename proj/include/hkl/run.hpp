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

// Pipeline orchestration: closed points -> sums -> local factors -> series ->
// polygons -> verdict, plus the JSON report and the cache administration verbs.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hkl/expsum.hpp"
#include "hkl/ff.hpp"
#include "hkl/lfun.hpp"
#include "hkl/polygon.hpp"

namespace hkl::run {

inline constexpr const char* kToolVersion = "0.3.0";
inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCacheEnv = "HKL_CACHE";

enum class Mode { Points, Sum, Local, SymK, SymInf, UnitRoot, Verify, Compare };
std::string to_string(Mode m);

enum ExitCode : int { kOk = 0, kUsage = 1, kFinding = 2, kInconclusive = 3, kResource = 4 };

struct RunConfig {
  Mode mode = Mode::Verify;
  int p = 3;
  int a = 1;
  int n = 1;
  std::optional<ff::Poly> modulus;
  std::optional<long> k;
  std::optional<std::vector<int>> kappa_digits;
  int D = 4;
  /// π-precision; defaulted from the Hodge height at D.
  std::optional<long> V;
  int retries = 3;
  /// Degree and power for the `sum` verb.
  int d = 1;
  int m = 1;
  int workers = 1;
  std::uint64_t max_terms = expsum::kDefaultMaxTerms;
  std::uint64_t max_field = ff::kDefaultMaxFieldSize;
  int max_degree = 4;
  std::optional<std::filesystem::path> cache_path;
  std::optional<std::filesystem::path> out_path;
  std::optional<std::filesystem::path> csv_path;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
  /// The exponent: kappa digits when given, else the integer k.
  padic::PadicExponent exponent() const;
};

/// (p-1)·a·(⌈H(D)⌉ + 4).
long default_precision(int p, int a, int n, int D);

/// Shared state of one run: the field tower, the optional cache and memoized
/// local factors. Results are independent of `workers`.
class Pipeline {
 public:
  Pipeline(int p, int a, std::optional<ff::Poly> modulus, int workers, expsum::SumCache* cache,
           std::uint64_t max_terms = expsum::kDefaultMaxTerms,
           std::uint64_t max_field = ff::kDefaultMaxFieldSize);

  const ff::Tower& tower() const { return *tower_; }
  int p() const { return p_; }
  int a() const { return a_; }

  /// Closed points of exact degree d, canonical order.
  const std::vector<ff::ClosedPoint>& points(int d);
  /// Local factors at all points of degree d, same order as points(d).
  const std::vector<lfun::LocalFactor>& local_factors(int n, int d);

  lfun::TruncSeries symk(int n, int k, int D);
  lfun::TruncSeries syminf(int n, const padic::PadicExponent& kappa, long V, int D);
  lfun::TruncSeries unitroot(int n, const padic::PadicExponent& kappa, long V, int D);

 private:
  template <class F>
  lfun::TruncSeries product(int n, int D, F&& local);

  int p_;
  int a_;
  int workers_;
  expsum::SumCache* cache_;
  std::uint64_t max_terms_;
  std::unique_ptr<ff::Tower> tower_;
  std::mutex mu_;
  std::map<int, std::vector<ff::ClosedPoint>> points_;
  std::map<std::pair<int, int>, std::vector<lfun::LocalFactor>> factors_;
};

struct RunResult {
  nlohmann::ordered_json report;
  int exit_code = kOk;
  std::string csv;
};

/// Runs one configuration. Mathematical findings and inconclusive checks are
/// reported through the exit code; usage and resource errors propagate.
RunResult run(const RunConfig& config);

/// Maps an exception from run() to an exit code and a short error report.
RunResult error_result(const std::exception& e);

enum class CacheCommand { Stat, Verify, Compact };

/// stat: record counts; verify: recompute `sample` records with the direct method
/// (0 means all); compact: drop duplicate records, keeping the first.
RunResult cache_admin(const std::filesystem::path& path, CacheCommand command, std::size_t sample = 0);

/// Exact JSON forms: integers as numbers when they fit in 64 bits, else strings;
/// rationals as [numerator, denominator].
nlohmann::ordered_json int_json(const mpz_class& v);
nlohmann::ordered_json rational_json(const mpq_class& v);
nlohmann::ordered_json cyc_json(const cyclo::CycInt& v);
nlohmann::ordered_json series_json(const lfun::TruncSeries& s, const polygon::Polygon* hodge);
nlohmann::ordered_json polygon_json(const polygon::Polygon& poly);
nlohmann::ordered_json verdict_json(const polygon::Verdict& v);

std::string series_csv(const std::string& label, const lfun::TruncSeries& s, const polygon::Polygon* hodge);

}  // namespace hkl::run
