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

// hkl: command-line driver for the hyper-Kloosterman lab.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hkl/error.hpp"
#include "hkl/run.hpp"

namespace {

using hkl::run::Mode;
using hkl::run::RunConfig;

std::vector<int> parse_digits(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw hkl::ConfigError("bad digit list: " + text);
    out.push_back(v);
  }
  return out;
}

struct Options {
  RunConfig cfg;
  std::string modulus;
  std::string kappa;
  long kappa_int = -1;
  long V = 0;
  std::string cache;
  std::string out;
  std::string csv;
  bool pretty = false;
};

void add_field(CLI::App* app, Options& o) {
  app->add_option("--p", o.cfg.p, "odd prime p")->capture_default_str();
  app->add_option("--a", o.cfg.a, "q = p^a")->capture_default_str();
  app->add_option("--modulus", o.modulus, "F_q modulus, coefficients constant-first, e.g. 1,0,1 for X^2+1");
  app->add_option("--n", o.cfg.n, "dimension n of Kl_n")->capture_default_str();
  app->add_option("--workers,-j", o.cfg.workers, "worker threads")->capture_default_str();
  app->add_option("--cache", o.cache, "sum cache file (default: $HKL_CACHE)");
  app->add_option("--out,-o", o.out, "write the JSON report here instead of stdout");
  app->add_option("--max-terms", o.cfg.max_terms, "enumeration budget per sum")->capture_default_str();
  app->add_option("--max-field", o.cfg.max_field, "largest field size to tabulate")->capture_default_str();
  app->add_option("--max-degree", o.cfg.max_degree, "largest closed-point degree")->capture_default_str();
  app->add_flag("--pretty", o.pretty, "indent the JSON report");
}

void add_series(CLI::App* app, Options& o, bool exponent, bool kappa) {
  app->add_option("--D", o.cfg.D, "truncation degree")->capture_default_str();
  if (exponent) app->add_option("--k", o.cfg.k, "integer symmetric power");
  if (kappa) {
    app->add_option("--kappa", o.kappa, "κ as base-p digits d0,d1,...");
    app->add_option("--kappa-int", o.kappa_int, "κ as a non-negative integer");
  }
  if (kappa || exponent) {
    app->add_option("--V", o.V, "π-adic working precision (default from the Hodge height)");
    app->add_option("--retries", o.cfg.retries, "precision doublings on inconclusive checks")->capture_default_str();
    app->add_option("--csv", o.csv, "also write the coefficient table as CSV");
  }
}

void finish(Options& o) {
  if (!o.modulus.empty()) o.cfg.modulus = parse_digits(o.modulus);
  if (!o.kappa.empty()) o.cfg.kappa_digits = parse_digits(o.kappa);
  if (o.kappa_int >= 0) {
    if (o.cfg.k) throw hkl::ConfigError("--k and --kappa-int are mutually exclusive");
    o.cfg.k = o.kappa_int;
  }
  if (o.V > 0) o.cfg.V = o.V;
  if (!o.cache.empty()) {
    o.cfg.cache_path = o.cache;
  } else if (const char* env = std::getenv(hkl::run::kCacheEnv); env && *env) {
    o.cfg.cache_path = env;
  }
  if (!o.out.empty()) o.cfg.out_path = o.out;
  if (!o.csv.empty()) o.cfg.csv_path = o.csv;
}

int emit(const hkl::run::RunResult& res, const Options& o) {
  const std::string text = res.report.dump(o.pretty ? 2 : -1) + "\n";
  if (o.cfg.out_path) {
    std::ofstream(*o.cfg.out_path) << text;
  } else {
    std::cout << text;
  }
  if (o.cfg.csv_path && !res.csv.empty()) std::ofstream(*o.cfg.csv_path) << res.csv;
  if (res.report.contains("error")) std::cerr << "hkl: " << res.report["error"]["message"].get<std::string>() << "\n";
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyper-Kloosterman sums, symmetric power L-functions and Hodge bounds"};
  app.require_subcommand(1);
  Options o;

  auto* points = app.add_subcommand("points", "list closed points of G_m of degree <= D");
  add_field(points, o);
  add_series(points, o, false, false);

  auto* sum = app.add_subcommand("sum", "Kl_n(t, m) at every closed point of degree d");
  add_field(sum, o);
  sum->add_option("--d", o.cfg.d, "closed-point degree")->capture_default_str();
  sum->add_option("--m", o.cfg.m, "power m")->capture_default_str();

  auto* local = app.add_subcommand("local", "local L-factors at all points of degree <= D");
  add_field(local, o);
  add_series(local, o, false, false);

  auto* symk = app.add_subcommand("symk", "truncated L(Sym^k Kl_n, T)");
  add_field(symk, o);
  add_series(symk, o, true, false);

  auto* syminf = app.add_subcommand("syminf", "truncated L(Sym^{κ,∞} Kl_n, T)");
  add_field(syminf, o);
  add_series(syminf, o, true, true);

  auto* unitroot = app.add_subcommand("unitroot", "truncated unit-root L-function");
  add_field(unitroot, o);
  add_series(unitroot, o, true, true);

  auto* verify = app.add_subcommand("verify", "check Newton above Hodge coefficient-wise");
  add_field(verify, o);
  add_series(verify, o, true, true);

  auto* compare = app.add_subcommand("compare", "compare slope <= k parts of Sym^k and Sym^{k,∞}");
  add_field(compare, o);
  add_series(compare, o, true, false);

  auto* cache = app.add_subcommand("cache", "inspect or maintain a sum cache");
  std::string cache_cmd;
  std::size_t sample = 0;
  cache->add_option("command", cache_cmd, "stat | verify | compact")
      ->required()
      ->check(CLI::IsMember({"stat", "verify", "compact"}));
  cache->add_option("--path", o.cache, "cache file (default: $HKL_CACHE)");
  cache->add_option("--sample", sample, "records to recompute for verify (0 = all)")->capture_default_str();
  cache->add_option("--out,-o", o.out, "write the JSON report here instead of stdout");
  cache->add_flag("--pretty", o.pretty, "indent the JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hkl::run::kUsage;
  }

  const std::pair<CLI::App*, Mode> modes[] = {{points, Mode::Points}, {sum, Mode::Sum},       {local, Mode::Local},
                                              {symk, Mode::SymK},     {syminf, Mode::SymInf}, {unitroot, Mode::UnitRoot},
                                              {verify, Mode::Verify}, {compare, Mode::Compare}};
  try {
    finish(o);
    if (cache->parsed()) {
      if (!o.cfg.cache_path) throw hkl::ConfigError("cache: no --path and HKL_CACHE is unset");
      const auto command = cache_cmd == "stat"     ? hkl::run::CacheCommand::Stat
                           : cache_cmd == "verify" ? hkl::run::CacheCommand::Verify
                                                   : hkl::run::CacheCommand::Compact;
      return emit(hkl::run::cache_admin(*o.cfg.cache_path, command, sample), o);
    }
    for (const auto& [sub, mode] : modes) {
      if (sub->parsed()) o.cfg.mode = mode;
    }
    return emit(hkl::run::run(o.cfg), o);
  } catch (const std::exception& e) {
    return emit(hkl::run::error_result(e), o);
  }
}
