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

// Finite fields F_p ⊂ F_q ⊂ F_{q^d}, table driven.
//
// Every field is stored as an absolute extension F_p[Y]/(g) and elements are
// encoded as integers idx = c_0 + c_1 p + ... + c_{e-1} p^{e-1} where c_i is the
// coefficient of Y^i. The numeric order of these indices is the lexicographic
// order on coordinate vectors with the highest coordinate most significant; it
// is the fixed total order used for modulus selection and orbit representatives.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hkl::ff {

/// Polynomial over F_p, constant term first, entries in [0, p).
using Poly = std::vector<int>;

inline constexpr std::uint64_t kDefaultMaxFieldSize = std::uint64_t{1} << 24;

bool is_prime(std::int64_t v);
bool is_irreducible(const Poly& f, int p);

/// Smallest monic irreducible polynomial of the given degree in index order.
Poly smallest_irreducible(int p, int degree);

/// Number of closed points of degree d on G_m over F_q (Möbius count).
std::uint64_t closed_point_count(std::uint64_t q, int d);

std::uint64_t ipow(std::uint64_t base, int exp);

class FieldDesc {
 public:
  FieldDesc(int p, int degree, Poly modulus)
      : p_(p), degree_(degree), modulus_(std::move(modulus)) {}

  int p() const { return p_; }
  /// Absolute degree over F_p.
  int degree() const { return degree_; }
  const Poly& modulus() const { return modulus_; }
  std::uint64_t size() const { return ipow(static_cast<std::uint64_t>(p_), degree_); }

  bool operator==(const FieldDesc&) const = default;

 private:
  int p_;
  int degree_;
  Poly modulus_;
};

class Field;
using FieldPtr = std::shared_ptr<const Field>;

/// Element of a specific field. Cheap to copy.
class ExtElem {
 public:
  ExtElem(FieldPtr owner, std::uint32_t index);

  const Field& owner() const { return *owner_; }
  const FieldPtr& owner_ptr() const { return owner_; }
  std::uint32_t index() const { return index_; }
  std::vector<int> coords() const;
  bool is_zero() const { return index_ == 0; }

  ExtElem operator+(const ExtElem& o) const;
  ExtElem operator-(const ExtElem& o) const;
  ExtElem operator*(const ExtElem& o) const;
  ExtElem operator/(const ExtElem& o) const;
  ExtElem pow(std::uint64_t e) const;

  bool operator==(const ExtElem& o) const;

 private:
  void check_same(const ExtElem& o) const;

  FieldPtr owner_;
  std::uint32_t index_;
};

/// Arithmetic tables for one finite field. Immutable once built.
class Field : public std::enable_shared_from_this<Field> {
 public:
  /// Builds tables; `modulus` must already be known irreducible.
  static FieldPtr create(FieldDesc desc, std::uint64_t max_size = kDefaultMaxFieldSize);

  const FieldDesc& desc() const { return desc_; }
  int p() const { return desc_.p(); }
  int degree() const { return desc_.degree(); }
  std::uint32_t size() const { return size_; }

  std::uint32_t add(std::uint32_t x, std::uint32_t y) const;
  std::uint32_t neg(std::uint32_t x) const;
  std::uint32_t sub(std::uint32_t x, std::uint32_t y) const { return add(x, neg(y)); }
  std::uint32_t mul(std::uint32_t x, std::uint32_t y) const;
  std::uint32_t inv(std::uint32_t x) const;
  std::uint32_t pow(std::uint32_t x, std::uint64_t e) const;
  /// x^(p^j)
  std::uint32_t frobenius(std::uint32_t x, int j) const;

  /// Discrete log w.r.t. the field's fixed primitive element; x must be nonzero.
  std::uint32_t log(std::uint32_t x) const { return log_[x]; }
  std::uint32_t exp(std::uint64_t k) const { return exp_[k % (size_ - 1)]; }
  std::uint32_t primitive() const { return exp_[1 % (size_ - 1)]; }

  /// Absolute trace Tr_{F/F_p}(x) as an element of [0, p).
  int abs_trace(std::uint32_t x) const { return trace_[x]; }

  std::uint32_t from_coords(std::span<const int> coords) const;
  std::vector<int> coords(std::uint32_t x) const;
  /// Embeds an F_p value.
  std::uint32_t from_int(std::int64_t v) const;

  ExtElem elem(std::uint32_t index) const { return ExtElem(shared_from_this(), index); }
  ExtElem elem_from_coords(std::span<const int> coords) const { return elem(from_coords(coords)); }

  /// Evaluates a polynomial with F_p coefficients at x.
  std::uint32_t eval(const Poly& f, std::uint32_t x) const;

 private:
  explicit Field(FieldDesc desc);
  std::uint32_t mul_slow(std::uint32_t x, std::uint32_t y) const;
  void build_tables();

  FieldDesc desc_;
  std::uint32_t size_;
  std::vector<std::uint32_t> digit_pow_;
  std::vector<std::uint32_t> exp_;
  std::vector<std::uint32_t> log_;
  std::vector<std::uint8_t> trace_;
};

/// Validates p, a and the modulus. When the modulus is omitted the smallest
/// irreducible of degree a is used.
FieldPtr make_field(int p, int a, std::optional<Poly> modulus = std::nullopt,
                    std::uint64_t max_size = kDefaultMaxFieldSize);

/// Ring embedding from -> to sending the generator of `from` to the smallest
/// root (in index order) of its modulus inside `to`.
class Embedding {
 public:
  Embedding(FieldPtr from, FieldPtr to);
  static Embedding identity(FieldPtr f);

  const FieldPtr& from() const { return from_; }
  const FieldPtr& to() const { return to_; }
  std::uint32_t relative_degree() const;

  std::uint32_t map(std::uint32_t x) const { return image_[x]; }
  ExtElem operator()(const ExtElem& x) const;
  std::optional<ExtElem> preimage(const ExtElem& y) const;

 private:
  Embedding() = default;

  FieldPtr from_;
  FieldPtr to_;
  std::vector<std::uint32_t> image_;
  std::vector<std::uint32_t> preimage_;  // size_of(to); sentinel = from size
};

struct Extension {
  FieldPtr field;
  Embedding embedding;
};

/// F_{q^d} over base = F_q; for d = 1 returns base with the identity embedding.
Extension extend(const FieldPtr& base, int d, std::uint64_t max_size = kDefaultMaxFieldSize);

/// Relative trace Tr_{to/from}(x) pulled back into `down.from()`. `x` must live in `down.to()`.
ExtElem trace(const ExtElem& x, const Embedding& down);

/// The tower F_q ⊂ F_{q^2} ⊂ ... with one deterministic field per level and
/// cached embeddings between levels. Thread-safe.
class Tower {
 public:
  explicit Tower(FieldPtr base, std::uint64_t max_size = kDefaultMaxFieldSize);

  const FieldPtr& base() const { return base_; }
  std::uint64_t q() const { return base_->size(); }
  std::uint64_t max_size() const { return max_size_; }

  /// F_{q^d}; level 1 is the base.
  FieldPtr level(int d) const;
  /// Embedding F_{q^from_d} -> F_{q^to_d}; from_d must divide to_d.
  std::shared_ptr<const Embedding> embedding(int from_d, int to_d) const;

  /// Trace from the level-`from_d` field down to level `down_d`.
  ExtElem trace(const ExtElem& x, int from_d, int down_d) const;

 private:
  FieldPtr base_;
  std::uint64_t max_size_;
  mutable std::mutex mu_;
  mutable std::map<int, FieldPtr> levels_;
  mutable std::map<std::pair<int, int>, std::shared_ptr<const Embedding>> embeddings_;
};

struct ClosedPoint {
  ExtElem rep;  // canonical (smallest index) element of the Frobenius orbit
  int d;        // exact degree over F_q
};

/// One canonical representative per q-Frobenius orbit of exact degree d in
/// F_{q^d}^*, sorted by representative index.
std::vector<ClosedPoint> closed_points(const Tower& tower, int d);

std::string poly_to_string(const Poly& f);

}  // namespace hkl::ff
