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

// Hyper-Kloosterman sums
//
//   Kl_n(t, m) = Σ_{x ∈ (F_{q^{dm}}^*)^n} ζ_p^{Tr(x_1 + ... + x_n + t / (x_1 ⋯ x_n))}
//
// with Tr the absolute trace down to F_p, evaluated exactly in Z[ζ_p], plus the
// persistent line-oriented cache that stores them.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "hkl/cyclo.hpp"
#include "hkl/ff.hpp"

namespace hkl::expsum {

using cyclo::CycInt;

inline constexpr std::uint64_t kDefaultMaxTerms = std::uint64_t{1} << 36;

/// Key of one cached sum: the full description of F_q, the dimension, and the
/// closed point (degree and canonical representative coordinates in F_{q^d}).
struct SumKey {
  int p = 0;
  int a = 0;
  ff::Poly modulus;
  int n = 0;
  int d = 0;
  std::vector<int> rep;
  int m = 0;

  /// `v1|p,a,[modulus]|n|d|[rep]|m`
  std::string to_string() const;
  static SumKey parse(std::string_view text);

  auto operator<=>(const SumKey&) const = default;
};

SumKey make_key(const ff::Tower& tower, int n, const ff::ClosedPoint& t, int m);

/// Direct enumeration over (F^*)^n for the parameter t ∈ F^* (given by index).
CycInt kloosterman_in_field(int n, const ff::Field& field, std::uint32_t t,
                            std::uint64_t max_terms = kDefaultMaxTerms);

/// Kl_n(t̄, m) for a closed point of degree d: the sum over F_{q^{dm}} at the embedded t̄.
CycInt kloosterman(int n, const ff::ClosedPoint& t, int m, const ff::Tower& tower,
                   std::uint64_t max_terms = kDefaultMaxTerms);

/// All Kl_n(t) for t ∈ F^* at once, via g_j(t) = Σ_x ψ(x) g_{j-1}(t/x), g_0 = ψ.
/// Indexed by element index; entry 0 is unused and left zero.
std::vector<CycInt> kloosterman_table(int n, const ff::Field& field,
                                      std::uint64_t max_terms = kDefaultMaxTerms);

struct CacheRecord {
  long line = 0;
  SumKey key;
  CycInt value;
};

inline constexpr std::string_view kCacheHeader = "# hklab sum cache v1";

/// Format one record line (no trailing newline).
std::string format_record(const SumKey& key, const CycInt& value);
/// Parses a record line; throws CacheFormatError carrying `line`.
CacheRecord parse_record(std::string_view text, long line);
/// Reads every record of a cache file. Missing files read as empty.
std::vector<CacheRecord> read_cache_file(const std::filesystem::path& path);

/// Write-through sum cache: concurrent lookups, serialized appends.
class SumCache {
 public:
  struct Stats {
    std::size_t records = 0;
    std::size_t hits = 0;
    std::size_t misses = 0;
    std::size_t inserts = 0;
  };

  /// In-memory only.
  SumCache() = default;
  /// Loads `path` (if present) and appends new records to it.
  explicit SumCache(std::filesystem::path path);

  std::optional<CycInt> lookup(const SumKey& key) const;
  void insert(const SumKey& key, const CycInt& value);
  Stats stats() const;
  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::shared_mutex mu_;
  std::map<std::string, CycInt> entries_;
  std::ofstream out_;
  mutable std::size_t hits_ = 0;
  mutable std::size_t misses_ = 0;
  std::size_t inserts_ = 0;
};

/// Kl_n(t̄, m) through the cache when one is given.
CycInt cached_kloosterman(int n, const ff::ClosedPoint& t, int m, const ff::Tower& tower, SumCache* cache,
                          std::uint64_t max_terms = kDefaultMaxTerms);

}  // namespace hkl::expsum
