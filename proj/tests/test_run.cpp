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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hkl/error.hpp"
#include "hkl/parallel.hpp"
#include "hkl/run.hpp"

using namespace hkl;
using namespace hkl::run;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove(path);
  }
  ~TempFile() { std::filesystem::remove(path); }
};

nlohmann::ordered_json stripped(nlohmann::ordered_json rep) {
  rep.erase("runtime");
  return rep;
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p, std::ios::trunc);
  for (const auto& l : lines) out << l << '\n';
}

RunConfig verify_config() {
  RunConfig c;
  c.mode = Mode::Verify;
  c.p = 3;
  c.n = 1;
  c.k = 2;
  c.D = 3;
  return c;
}

}  // namespace

TEST_CASE("parallel_map keeps index order") {
  for (int w : {1, 2, 4}) {
    const auto out = parallel_map(50, w, [](std::size_t i) { return static_cast<int>(i * i); });
    REQUIRE(out.size() == 50);
    for (std::size_t i = 0; i < 50; ++i) CHECK(out[i] == static_cast<int>(i * i));
  }
  CHECK(parallel_map(0, 3, [](std::size_t) { return 1; }).empty());
}

TEST_CASE("parallel_map rethrows the lowest failing index") {
  for (int w : {1, 3}) {
    try {
      parallel_map(20, w, [](std::size_t i) -> int {
        if (i == 7 || i == 13) throw std::runtime_error(std::to_string(i));
        return 0;
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "7");
    }
  }
}

TEST_CASE("config validation") {
  RunConfig c;
  c.p = 2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("odd") != std::string::npos);
  }
  RunConfig d;
  d.p = 9;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  RunConfig e;
  e.D = -1;
  CHECK_THROWS_AS(e.validate(), ConfigError);
  RunConfig f;
  f.k = std::nullopt;
  f.kappa_digits = std::nullopt;
  f.mode = Mode::SymInf;
  CHECK_THROWS_AS(f.validate(), ConfigError);
  CHECK_THROWS_AS(run::run(c), ConfigError);
}

TEST_CASE("default precision") {
  // H(4) = 6 for n = 1, p = 3
  CHECK(default_precision(3, 1, 1, 4) == 2 * (6 + 4));
  CHECK(default_precision(3, 2, 1, 4) == 2 * 2 * (6 + 4));
}

TEST_CASE("points mode counts closed points") {
  RunConfig c;
  c.mode = Mode::Points;
  c.p = 3;
  c.D = 3;
  const auto r = run::run(c);
  CHECK(r.exit_code == kOk);
  const auto& deg = r.report["points"];
  REQUIRE(deg.size() == 3);
  for (const auto& entry : deg) CHECK(entry["count"] == entry["expected"]);
  CHECK(deg[0]["count"] == 2);
  CHECK(deg[1]["count"] == 3);
  CHECK(deg[2]["count"] == 8);
}

TEST_CASE("verify passes and reports are deterministic") {
  auto c = verify_config();
  const auto one = run::run(c);
  CHECK(one.exit_code == kOk);
  CHECK(one.report["verdicts"]["overall"] == "pass");
  CHECK(one.report["schema_version"] == kSchemaVersion);
  c.workers = 3;
  const auto three = run::run(c);
  CHECK(stripped(one.report) == stripped(three.report));
  CHECK(three.report["runtime"]["workers"] == 3);
}

TEST_CASE("warm cache reruns match cold runs") {
  TempFile tmp("hkl_run_cache_test.txt");
  auto c = verify_config();
  c.cache_path = tmp.path;
  const auto cold = run::run(c);
  const auto warm = run::run(c);
  CHECK(stripped(cold.report) == stripped(warm.report));
  CHECK(warm.report["runtime"]["cache"]["inserts"] == 0);
  CHECK(warm.report["runtime"]["cache"]["hits"].get<long>() > 0);
  const auto plain = run::run(verify_config());
  auto a = stripped(cold.report), b = stripped(plain.report);
  a["config"].erase("cache");
  b["config"].erase("cache");
  CHECK(a == b);
}

TEST_CASE("compare agrees on a small case") {
  RunConfig c;
  c.mode = Mode::Compare;
  c.p = 3;
  c.n = 1;
  c.k = 1;
  c.D = 3;
  const auto r = run::run(c);
  CHECK(r.exit_code == kOk);
  CHECK(r.report["verdicts"]["overall"] == "agree");
}

TEST_CASE("CSV output") {
  RunConfig c;
  c.mode = Mode::SymK;
  c.p = 3;
  c.k = 1;
  c.D = 2;
  const auto r = run::run(c);
  std::istringstream in(r.csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "series,m,status,pi_val,ord_q,hodge");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("cache administration") {
  TempFile tmp("hkl_run_admin_test.txt");
  std::ofstream(tmp.path).close();
  const auto empty = cache_admin(tmp.path, CacheCommand::Stat);
  CHECK(empty.report["cache"]["records"] == 0);

  auto c = verify_config();
  c.cache_path = tmp.path;
  run::run(c);
  const auto st = cache_admin(tmp.path, CacheCommand::Stat);
  const long records = st.report["cache"]["records"].get<long>();
  CHECK(records > 0);
  CHECK(st.report["cache"]["duplicates"] == 0);

  const auto ok = cache_admin(tmp.path, CacheCommand::Verify, 3);
  CHECK(ok.exit_code == kOk);
  CHECK(ok.report["verify"]["checked"] == 3);
  CHECK(ok.report["verify"]["mismatches"].empty());

  auto lines = lines_of(tmp.path);
  const auto original = lines;
  // duplicate one record and tamper with another
  lines.push_back(lines[1]);
  auto& victim = lines[2];
  victim = victim.substr(0, victim.rfind('|') + 1) + "3:[7,1]";
  write_lines(tmp.path, lines);
  const auto bad = cache_admin(tmp.path, CacheCommand::Verify);
  CHECK(bad.exit_code == kFinding);
  REQUIRE(bad.report["verify"]["mismatches"].size() == 1);
  CHECK(bad.report["verify"]["mismatches"][0]["line"] == 3);

  write_lines(tmp.path, original);
  auto dup = original;
  dup.push_back(original[1]);
  dup.push_back(original[2]);
  write_lines(tmp.path, dup);
  const auto compact = cache_admin(tmp.path, CacheCommand::Compact);
  CHECK(compact.report["compact"]["removed"] == 2);
  CHECK(lines_of(tmp.path) == original);

  write_lines(tmp.path, {original[0], original[1], "v1|garbage"});
  CHECK_THROWS_AS(cache_admin(tmp.path, CacheCommand::Stat), CacheFormatError);
}

TEST_CASE("error mapping") {
  CHECK(error_result(ConfigError("x")).exit_code == kUsage);
  CHECK(error_result(FindingError("x")).exit_code == kFinding);
  CHECK(error_result(SlopeViolation("x")).exit_code == kFinding);
  CHECK(error_result(ResourceError("x")).exit_code == kResource);
  CHECK(error_result(std::runtime_error("x")).exit_code == kResource);
  const auto pe = error_result(PrecisionError("x", 12));
  CHECK(pe.exit_code == kInconclusive);
  CHECK(pe.report["error"]["needed_pi_precision"] == 12);
  const auto ce = error_result(CacheFormatError("x", 4));
  CHECK(ce.report["error"]["line"] == 4);
}

TEST_CASE("JSON number forms") {
  CHECK(int_json(mpz_class(-5)) == -5);
  CHECK(int_json(mpz_class("123456789012345678901234567890")) == "123456789012345678901234567890");
  CHECK(rational_json(mpq_class(1, 2)) == nlohmann::ordered_json::array({1, 2}));
}
