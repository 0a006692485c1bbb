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

#include "hkl/expsum.hpp"

#include <array>
#include <charconv>
#include <functional>
#include <mutex>
#include <sstream>

#include "hkl/error.hpp"

namespace hkl::expsum {

namespace {

std::string list_to_string(const std::vector<int>& v) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i];
  }
  os << ']';
  return os.str();
}

int parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

std::vector<int> parse_list(std::string_view s) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
    throw std::invalid_argument("expected a bracketed list, got '" + std::string(s) + "'");
  }
  s = s.substr(1, s.size() - 2);
  std::vector<int> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    out.push_back(parse_int(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s = s.substr(comma + 1);
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = s.find(sep);
    parts.push_back(s.substr(0, pos));
    if (pos == std::string_view::npos) break;
    s = s.substr(pos + 1);
  }
  return parts;
}

// Absolute trace of g^l for every discrete log l.
std::vector<std::uint8_t> trace_by_log(const ff::Field& field) {
  const std::uint32_t order = field.size() - 1;
  std::vector<std::uint8_t> t(order);
  for (std::uint32_t l = 0; l < order; ++l) t[l] = static_cast<std::uint8_t>(field.abs_trace(field.exp(l)));
  return t;
}

std::uint64_t checked_power(std::uint64_t base, int e, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (base != 0 && r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

}  // namespace

std::string SumKey::to_string() const {
  std::ostringstream os;
  os << "v1|" << p << ',' << a << ',' << list_to_string(modulus) << '|' << n << '|' << d << '|'
     << list_to_string(rep) << '|' << m;
  return os.str();
}

SumKey SumKey::parse(std::string_view text) {
  const auto parts = split(text, '|');
  if (parts.size() != 6 || parts[0] != "v1") {
    throw std::invalid_argument("malformed sum key: " + std::string(text));
  }
  SumKey k;
  const auto field = parts[1];
  const auto c1 = field.find(',');
  const auto c2 = c1 == std::string_view::npos ? c1 : field.find(',', c1 + 1);
  if (c2 == std::string_view::npos) throw std::invalid_argument("malformed field description: " + std::string(field));
  k.p = parse_int(field.substr(0, c1));
  k.a = parse_int(field.substr(c1 + 1, c2 - c1 - 1));
  k.modulus = parse_list(field.substr(c2 + 1));
  k.n = parse_int(parts[2]);
  k.d = parse_int(parts[3]);
  k.rep = parse_list(parts[4]);
  k.m = parse_int(parts[5]);
  if (k.p < 3 || k.a < 1 || static_cast<int>(k.modulus.size()) != k.a + 1 || k.n < 1 || k.d < 1 || k.m < 1 ||
      static_cast<int>(k.rep.size()) != k.a * k.d) {
    throw std::invalid_argument("inconsistent sum key: " + std::string(text));
  }
  return k;
}

SumKey make_key(const ff::Tower& tower, int n, const ff::ClosedPoint& t, int m) {
  const auto& base = tower.base()->desc();
  return SumKey{base.p(), base.degree(), base.modulus(), n, t.d, t.rep.coords(), m};
}

CycInt kloosterman_in_field(int n, const ff::Field& field, std::uint32_t t, std::uint64_t max_terms) {
  if (n < 1) throw ConfigError("n must be >= 1");
  if (t == 0) throw ConfigError("the Kloosterman parameter must be nonzero");
  const int p = field.p();
  const std::uint32_t order = field.size() - 1;
  if (checked_power(order, n, max_terms) > max_terms) {
    throw ResourceError("direct Kloosterman enumeration over F_" + std::to_string(field.size()) + " with n=" +
                        std::to_string(n) + " exceeds the term budget");
  }
  const auto tr = trace_by_log(field);
  const std::uint32_t log_t = field.log(t);

  std::array<long long, 256> counts{};
  // Outer variables x_1..x_{n-1}; the innermost loop covers x_n and closes the phase
  // with the t / (x_1 ⋯ x_n) term read off the log table.
  std::function<void(int, unsigned, std::uint64_t)> rec = [&](int depth, unsigned tr_sum, std::uint64_t log_sum) {
    if (depth == n - 1) {
      const std::uint64_t base = (log_t + order - log_sum % order) % order;
      for (std::uint32_t l = 0; l < order; ++l) {
        const std::uint32_t last = static_cast<std::uint32_t>((base + order - l) % order);
        ++counts[(tr_sum + tr[l] + tr[last]) % p];
      }
      return;
    }
    for (std::uint32_t l = 0; l < order; ++l) rec(depth + 1, (tr_sum + tr[l]) % p, log_sum + l);
  };
  rec(0, 0, 0);
  return CycInt::from_exponent_counts(p, std::span<const long long>(counts.data(), p));
}

CycInt kloosterman(int n, const ff::ClosedPoint& t, int m, const ff::Tower& tower, std::uint64_t max_terms) {
  if (m < 1) throw ConfigError("m must be >= 1");
  if (t.rep.is_zero()) throw ConfigError("closed points of G_m are nonzero");
  const auto level = tower.level(t.d);
  if (!(t.rep.owner().desc() == level->desc())) {
    throw TowerError("closed point representative does not live in F_{q^d}");
  }
  const auto field = tower.level(t.d * m);
  const auto emb = tower.embedding(t.d, t.d * m);
  return kloosterman_in_field(n, *field, emb->map(t.rep.index()), max_terms);
}

std::vector<CycInt> kloosterman_table(int n, const ff::Field& field, std::uint64_t max_terms) {
  if (n < 1) throw ConfigError("n must be >= 1");
  const int p = field.p();
  const std::uint32_t order = field.size() - 1;
  const std::uint64_t sq = checked_power(order, 2, max_terms);
  if (sq > max_terms || sq * static_cast<std::uint64_t>(n) > max_terms) {
    throw ResourceError("Kloosterman table over F_" + std::to_string(field.size()) + " exceeds the term budget");
  }
  const auto tr = trace_by_log(field);
  // g[l * p + e]: coefficient of ζ^e in g_j(g^l)
  std::vector<long long> g(static_cast<std::size_t>(order) * p, 0);
  for (std::uint32_t l = 0; l < order; ++l) g[static_cast<std::size_t>(l) * p + tr[l]] = 1;
  std::vector<long long> next(g.size());
  for (int j = 1; j <= n; ++j) {
    std::fill(next.begin(), next.end(), 0);
    for (std::uint32_t lt = 0; lt < order; ++lt) {
      long long* out = &next[static_cast<std::size_t>(lt) * p];
      for (std::uint32_t lx = 0; lx < order; ++lx) {
        const std::uint32_t lq = (lt + order - lx) % order;  // t / x
        const long long* in = &g[static_cast<std::size_t>(lq) * p];
        const int shift = tr[lx];
        for (int e = 0; e < p; ++e) {
          int k = e + shift;
          if (k >= p) k -= p;
          out[k] += in[e];
        }
      }
    }
    g.swap(next);
  }
  std::vector<CycInt> table(field.size(), CycInt::zero(p));
  for (std::uint32_t l = 0; l < order; ++l) {
    table[field.exp(l)] =
        CycInt::from_exponent_counts(p, std::span<const long long>(&g[static_cast<std::size_t>(l) * p], p));
  }
  return table;
}

// ---------------------------------------------------------------- cache

std::string format_record(const SumKey& key, const CycInt& value) {
  return key.to_string() + '|' + value.to_string();
}

CacheRecord parse_record(std::string_view text, long line) {
  const auto bar = text.rfind('|');
  if (bar == std::string_view::npos) throw CacheFormatError("cache line " + std::to_string(line) + ": no value", line);
  try {
    CacheRecord rec;
    rec.line = line;
    rec.key = SumKey::parse(text.substr(0, bar));
    rec.value = CycInt::parse(text.substr(bar + 1));
    if (rec.value.p() != rec.key.p) throw std::invalid_argument("value level differs from the key's prime");
    return rec;
  } catch (const std::invalid_argument& e) {
    throw CacheFormatError("cache line " + std::to_string(line) + ": " + e.what(), line);
  } catch (const DomainError& e) {
    throw CacheFormatError("cache line " + std::to_string(line) + ": " + e.what(), line);
  }
}

std::vector<CacheRecord> read_cache_file(const std::filesystem::path& path) {
  std::vector<CacheRecord> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string text;
  long line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty() || text[0] == '#') {
      if (line == 1 && !text.empty() && text != kCacheHeader) {
        throw CacheFormatError("cache line 1: unsupported header '" + text + "'", 1);
      }
      continue;
    }
    out.push_back(parse_record(text, line));
  }
  return out;
}

SumCache::SumCache(std::filesystem::path path) : path_(std::move(path)) {
  const bool existed = std::filesystem::exists(*path_) && std::filesystem::file_size(*path_) > 0;
  for (auto& rec : read_cache_file(*path_)) entries_.insert_or_assign(rec.key.to_string(), std::move(rec.value));
  out_.open(*path_, std::ios::app);
  if (!out_) throw std::runtime_error("cannot open cache file " + path_->string());
  if (!existed) out_ << kCacheHeader << '\n' << std::flush;
}

std::optional<CycInt> SumCache::lookup(const SumKey& key) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(key.to_string());
  if (it == entries_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second;
}

void SumCache::insert(const SumKey& key, const CycInt& value) {
  std::unique_lock lock(mu_);
  const auto k = key.to_string();
  if (entries_.count(k)) return;
  entries_.emplace(k, value);
  ++inserts_;
  if (out_.is_open()) out_ << format_record(key, value) << '\n' << std::flush;
}

SumCache::Stats SumCache::stats() const {
  std::shared_lock lock(mu_);
  return {entries_.size(), hits_, misses_, inserts_};
}

CycInt cached_kloosterman(int n, const ff::ClosedPoint& t, int m, const ff::Tower& tower, SumCache* cache,
                          std::uint64_t max_terms) {
  if (!cache) return kloosterman(n, t, m, tower, max_terms);
  const SumKey key = make_key(tower, n, t, m);
  if (auto hit = cache->lookup(key)) return *hit;
  CycInt v = kloosterman(n, t, m, tower, max_terms);
  cache->insert(key, v);
  return v;
}

}  // namespace hkl::expsum
