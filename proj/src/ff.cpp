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

#include "hkl/ff.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "hkl/error.hpp"

namespace hkl::ff {

namespace {

int mod_p(long v, int p) {
  long r = v % p;
  return static_cast<int>(r < 0 ? r + p : r);
}

int inv_mod_p(int v, int p) {
  // p is prime and small
  long r = 1, b = v, e = p - 2;
  while (e > 0) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return static_cast<int>(r);
}

void trim(Poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

Poly poly_mod(Poly a, const Poly& m, int p) {
  trim(a);
  const int dm = static_cast<int>(m.size()) - 1;
  const int lead_inv = inv_mod_p(m.back(), p);
  for (int i = static_cast<int>(a.size()) - 1; i >= dm; --i) {
    const int t = static_cast<int>(static_cast<long>(a[i]) * lead_inv % p);
    if (t == 0) continue;
    for (int j = 0; j <= dm; ++j) {
      a[i - dm + j] = mod_p(a[i - dm + j] - static_cast<long>(t) * m[j], p);
    }
  }
  trim(a);
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m, int p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      r[i + j] = static_cast<int>((r[i + j] + static_cast<long>(a[i]) * b[j]) % p);
    }
  }
  return poly_mod(std::move(r), m, p);
}

Poly poly_powmod(Poly base, std::uint64_t e, const Poly& m, int p) {
  Poly r{1};
  base = poly_mod(std::move(base), m, p);
  while (e > 0) {
    if (e & 1) r = poly_mulmod(r, base, m, p);
    base = poly_mulmod(base, base, m, p);
    e >>= 1;
  }
  return r;
}

Poly poly_gcd(Poly a, Poly b, int p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

}  // namespace

std::uint64_t ipow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / base) {
      throw ResourceError("integer power overflows 64 bits");
    }
    r *= base;
  }
  return r;
}

bool is_prime(std::int64_t v) {
  if (v < 2) return false;
  for (std::int64_t d = 2; d * d <= v; ++d) {
    if (v % d == 0) return false;
  }
  return true;
}

bool is_irreducible(const Poly& f_in, int p) {
  Poly f = f_in;
  trim(f);
  const int e = static_cast<int>(f.size()) - 1;
  if (e < 1) return false;
  if (e == 1) return true;
  // A reducible f has an irreducible factor of degree i <= e/2, which divides X^{p^i} - X.
  Poly xp{0, 1};
  for (int i = 1; i <= e / 2; ++i) {
    xp = poly_powmod(xp, static_cast<std::uint64_t>(p), f, p);
    Poly h = xp;
    if (h.size() < 2) h.resize(2, 0);
    h[1] = mod_p(h[1] - 1, p);
    trim(h);
    if (h.empty()) return false;
    if (poly_gcd(f, h, p).size() > 1) return false;
  }
  return true;
}

Poly smallest_irreducible(int p, int degree) {
  if (degree < 1) throw ConfigError("extension degree must be >= 1");
  const std::uint64_t count = ipow(static_cast<std::uint64_t>(p), degree);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    Poly f(degree + 1, 0);
    std::uint64_t v = idx;
    for (int i = 0; i < degree; ++i) {
      f[i] = static_cast<int>(v % p);
      v /= p;
    }
    f[degree] = 1;
    if (is_irreducible(f, p)) return f;
  }
  throw std::logic_error("no irreducible polynomial found");
}

std::uint64_t closed_point_count(std::uint64_t q, int d) {
  auto mobius = [](int v) {
    int result = 1;
    for (int f = 2; f * f <= v; ++f) {
      if (v % f == 0) {
        v /= f;
        if (v % f == 0) return 0;
        result = -result;
      }
    }
    if (v > 1) result = -result;
    return result;
  };
  std::int64_t total = 0;
  for (int e = 1; e <= d; ++e) {
    if (d % e != 0) continue;
    total += mobius(d / e) * static_cast<std::int64_t>(ipow(q, e) - 1);
  }
  return static_cast<std::uint64_t>(total / d);
}

std::string poly_to_string(const Poly& f) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) os << ',';
    os << f[i];
  }
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------- ExtElem

ExtElem::ExtElem(FieldPtr owner, std::uint32_t index) : owner_(std::move(owner)), index_(index) {}

std::vector<int> ExtElem::coords() const { return owner_->coords(index_); }

void ExtElem::check_same(const ExtElem& o) const {
  if (owner_ != o.owner_ && !(owner_->desc() == o.owner_->desc())) {
    throw TowerError("arithmetic between elements of different fields");
  }
}

ExtElem ExtElem::operator+(const ExtElem& o) const {
  check_same(o);
  return {owner_, owner_->add(index_, o.index_)};
}
ExtElem ExtElem::operator-(const ExtElem& o) const {
  check_same(o);
  return {owner_, owner_->sub(index_, o.index_)};
}
ExtElem ExtElem::operator*(const ExtElem& o) const {
  check_same(o);
  return {owner_, owner_->mul(index_, o.index_)};
}
ExtElem ExtElem::operator/(const ExtElem& o) const {
  check_same(o);
  return {owner_, owner_->mul(index_, owner_->inv(o.index_))};
}
ExtElem ExtElem::pow(std::uint64_t e) const { return {owner_, owner_->pow(index_, e)}; }

bool ExtElem::operator==(const ExtElem& o) const {
  return index_ == o.index_ && (owner_ == o.owner_ || owner_->desc() == o.owner_->desc());
}

// ---------------------------------------------------------------- Field

Field::Field(FieldDesc desc) : desc_(std::move(desc)), size_(0) {}

FieldPtr Field::create(FieldDesc desc, std::uint64_t max_size) {
  const std::uint64_t size = desc.size();
  if (size > max_size || size > (std::uint64_t{1} << 31)) {
    throw ResourceError("field of size " + std::to_string(size) + " exceeds the table budget " +
                        std::to_string(max_size));
  }
  auto f = std::shared_ptr<Field>(new Field(std::move(desc)));
  f->size_ = static_cast<std::uint32_t>(size);
  f->build_tables();
  return f;
}

std::uint32_t Field::from_coords(std::span<const int> coords) const {
  std::uint32_t r = 0;
  const int p = desc_.p();
  for (int i = 0; i < degree() && i < static_cast<int>(coords.size()); ++i) {
    r += static_cast<std::uint32_t>(mod_p(coords[i], p)) * digit_pow_[i];
  }
  return r;
}

std::vector<int> Field::coords(std::uint32_t x) const {
  std::vector<int> c(degree());
  const auto p = static_cast<std::uint32_t>(desc_.p());
  for (int i = 0; i < degree(); ++i) {
    c[i] = static_cast<int>(x % p);
    x /= p;
  }
  return c;
}

std::uint32_t Field::from_int(std::int64_t v) const {
  return static_cast<std::uint32_t>(mod_p(static_cast<long>(v % desc_.p()), desc_.p()));
}

std::uint32_t Field::add(std::uint32_t x, std::uint32_t y) const {
  const auto p = static_cast<std::uint32_t>(desc_.p());
  std::uint32_t r = 0;
  for (int i = 0; i < degree() && (x | y); ++i) {
    std::uint32_t s = x % p + y % p;
    if (s >= p) s -= p;
    r += s * digit_pow_[i];
    x /= p;
    y /= p;
  }
  return r;
}

std::uint32_t Field::neg(std::uint32_t x) const {
  const auto p = static_cast<std::uint32_t>(desc_.p());
  std::uint32_t r = 0;
  for (int i = 0; i < degree() && x; ++i) {
    const std::uint32_t c = x % p;
    if (c) r += (p - c) * digit_pow_[i];
    x /= p;
  }
  return r;
}

std::uint32_t Field::mul(std::uint32_t x, std::uint32_t y) const {
  if (x == 0 || y == 0) return 0;
  const std::uint64_t k = static_cast<std::uint64_t>(log_[x]) + log_[y];
  return exp_[k % (size_ - 1)];
}

std::uint32_t Field::inv(std::uint32_t x) const {
  if (x == 0) throw DomainError("inverse of zero in a finite field");
  const std::uint32_t order = size_ - 1;
  return exp_[(order - log_[x]) % order];
}

std::uint32_t Field::pow(std::uint32_t x, std::uint64_t e) const {
  if (e == 0) return from_int(1);
  if (x == 0) return 0;
  const std::uint64_t order = size_ - 1;
  const std::uint64_t k = (static_cast<unsigned __int128>(log_[x]) * (e % order)) % order;
  return exp_[k];
}

std::uint32_t Field::frobenius(std::uint32_t x, int j) const {
  if (x == 0) return 0;
  const std::uint64_t order = size_ - 1;
  std::uint64_t pj = 1;
  for (int i = 0; i < j % degree(); ++i) pj = pj * desc_.p() % order;
  return exp_[(static_cast<std::uint64_t>(log_[x]) * pj) % order];
}

std::uint32_t Field::eval(const Poly& f, std::uint32_t x) const {
  std::uint32_t r = 0;
  for (auto it = f.rbegin(); it != f.rend(); ++it) {
    r = add(mul(r, x), from_int(*it));
  }
  return r;
}

std::uint32_t Field::mul_slow(std::uint32_t x, std::uint32_t y) const {
  const int p = desc_.p();
  const auto a = coords(x);
  const auto b = coords(y);
  Poly prod(2 * degree() - 1, 0);
  for (int i = 0; i < degree(); ++i) {
    for (int j = 0; j < degree(); ++j) {
      prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
    }
  }
  Poly r = poly_mod(std::move(prod), desc_.modulus(), p);
  r.resize(degree(), 0);
  return from_coords(r);
}

void Field::build_tables() {
  const int p = desc_.p();
  digit_pow_.assign(degree(), 1);
  for (int i = 1; i < degree(); ++i) digit_pow_[i] = digit_pow_[i - 1] * static_cast<std::uint32_t>(p);

  const std::uint32_t order = size_ - 1;
  exp_.assign(order, 0);
  log_.assign(size_, 0);
  bool found = false;
  for (std::uint32_t g = (size_ > 2 ? 2u : 1u); g < size_ && !found; ++g) {
    std::uint32_t cur = 1;
    bool ok = true;
    for (std::uint32_t k = 0; k < order; ++k) {
      if (k > 0 && cur == 1) {
        ok = false;
        break;
      }
      exp_[k] = cur;
      cur = mul_slow(cur, g);
    }
    if (ok && cur == 1) found = true;
  }
  if (!found) throw std::logic_error("no primitive element: modulus is not irreducible");
  for (std::uint32_t k = 0; k < order; ++k) log_[exp_[k]] = k;

  // Absolute trace is F_p-linear: tabulate it on the power basis first.
  std::vector<int> basis_trace(degree(), 0);
  for (int i = 0; i < degree(); ++i) {
    const std::uint32_t yi = digit_pow_[i];
    std::uint32_t acc = 0;
    for (int j = 0; j < degree(); ++j) acc = add(acc, frobenius(yi, j));
    basis_trace[i] = static_cast<int>(acc % static_cast<std::uint32_t>(p));
  }
  trace_.assign(size_, 0);
  for (std::uint32_t x = 0; x < size_; ++x) {
    std::uint32_t v = x;
    long t = 0;
    for (int i = 0; i < degree(); ++i) {
      t += static_cast<long>(v % p) * basis_trace[i];
      v /= p;
    }
    trace_[x] = static_cast<std::uint8_t>(t % p);
  }
}

FieldPtr make_field(int p, int a, std::optional<Poly> modulus, std::uint64_t max_size) {
  if (p % 2 == 0 || !is_prime(p)) {
    throw ConfigError("p must be an odd prime (Newton-above-Hodge assumes an odd prime), got " +
                      std::to_string(p));
  }
  if (p > 255) throw ConfigError("p must be < 256 for the trace tables");
  if (a < 1) throw ConfigError("extension degree a must be >= 1, got " + std::to_string(a));
  Poly f;
  if (modulus) {
    f = *modulus;
    for (auto& c : f) c = mod_p(c, p);
    if (static_cast<int>(f.size()) != a + 1 || f.back() != 1) {
      throw ModulusError("modulus must be monic of degree " + std::to_string(a) + ": " +
                         poly_to_string(f));
    }
    if (!is_irreducible(f, p)) throw ModulusError("modulus is reducible: " + poly_to_string(f));
  } else {
    f = smallest_irreducible(p, a);
  }
  return Field::create(FieldDesc(p, a, std::move(f)), max_size);
}

// ---------------------------------------------------------------- Embedding

Embedding Embedding::identity(FieldPtr f) {
  Embedding e;
  e.from_ = f;
  e.to_ = f;
  e.image_.resize(f->size());
  e.preimage_.resize(f->size());
  for (std::uint32_t x = 0; x < f->size(); ++x) {
    e.image_[x] = x;
    e.preimage_[x] = x;
  }
  return e;
}

Embedding::Embedding(FieldPtr from, FieldPtr to) : from_(std::move(from)), to_(std::move(to)) {
  if (from_->p() != to_->p() || to_->degree() % from_->degree() != 0) {
    throw TowerError("no embedding F_" + std::to_string(from_->size()) + " -> F_" +
                     std::to_string(to_->size()));
  }
  const Poly& f = from_->desc().modulus();
  std::optional<std::uint32_t> root;
  for (std::uint32_t y = 0; y < to_->size(); ++y) {
    if (to_->eval(f, y) == 0) {
      root = y;
      break;
    }
  }
  if (!root) throw std::logic_error("modulus has no root in the larger field");

  // Images of the power basis, then extend F_p-linearly.
  std::vector<std::uint32_t> basis(from_->degree());
  std::uint32_t cur = to_->from_int(1);
  for (int i = 0; i < from_->degree(); ++i) {
    basis[i] = cur;
    cur = to_->mul(cur, *root);
  }
  image_.assign(from_->size(), 0);
  preimage_.assign(to_->size(), from_->size());
  for (std::uint32_t x = 0; x < from_->size(); ++x) {
    const auto c = from_->coords(x);
    std::uint32_t img = 0;
    for (int i = 0; i < from_->degree(); ++i) {
      for (int r = 0; r < c[i]; ++r) img = to_->add(img, basis[i]);
    }
    image_[x] = img;
    preimage_[img] = x;
  }
}

std::uint32_t Embedding::relative_degree() const {
  return static_cast<std::uint32_t>(to_->degree() / from_->degree());
}

ExtElem Embedding::operator()(const ExtElem& x) const {
  if (!(x.owner().desc() == from_->desc())) throw TowerError("element is not in the embedding's source");
  return to_->elem(image_[x.index()]);
}

std::optional<ExtElem> Embedding::preimage(const ExtElem& y) const {
  if (!(y.owner().desc() == to_->desc())) throw TowerError("element is not in the embedding's target");
  const std::uint32_t x = preimage_[y.index()];
  if (x == from_->size()) return std::nullopt;
  return from_->elem(x);
}

Extension extend(const FieldPtr& base, int d, std::uint64_t max_size) {
  if (d < 1) throw ConfigError("extension degree must be >= 1");
  if (d == 1) return {base, Embedding::identity(base)};
  const int deg = base->degree() * d;
  auto field = Field::create(FieldDesc(base->p(), deg, smallest_irreducible(base->p(), deg)), max_size);
  Embedding emb(base, field);
  return {field, std::move(emb)};
}

ExtElem trace(const ExtElem& x, const Embedding& down) {
  if (!(x.owner().desc() == down.to()->desc())) {
    throw TowerError("trace target is not a subfield of the element's field on this tower");
  }
  const Field& big = *down.to();
  const std::uint64_t small_q = down.from()->size();
  std::uint32_t acc = 0;
  std::uint32_t term = x.index();
  for (std::uint32_t i = 0; i < down.relative_degree(); ++i) {
    acc = big.add(acc, term);
    term = big.pow(term, small_q);
  }
  auto pulled = down.preimage(big.elem(acc));
  if (!pulled) throw std::logic_error("trace is not fixed by the subfield Frobenius");
  return *pulled;
}

// ---------------------------------------------------------------- Tower

Tower::Tower(FieldPtr base, std::uint64_t max_size) : base_(std::move(base)), max_size_(max_size) {
  levels_[1] = base_;
}

FieldPtr Tower::level(int d) const {
  if (d < 1) throw ConfigError("tower level must be >= 1");
  std::lock_guard lock(mu_);
  auto it = levels_.find(d);
  if (it != levels_.end()) return it->second;
  const int deg = base_->degree() * d;
  auto f = Field::create(FieldDesc(base_->p(), deg, smallest_irreducible(base_->p(), deg)), max_size_);
  levels_[d] = f;
  return f;
}

std::shared_ptr<const Embedding> Tower::embedding(int from_d, int to_d) const {
  if (from_d < 1 || to_d % from_d != 0) {
    throw TowerError("level " + std::to_string(from_d) + " is not a subfield of level " +
                     std::to_string(to_d));
  }
  {
    std::lock_guard lock(mu_);
    auto it = embeddings_.find({from_d, to_d});
    if (it != embeddings_.end()) return it->second;
  }
  auto from = level(from_d);
  auto to = level(to_d);
  auto emb = from_d == to_d ? std::make_shared<const Embedding>(Embedding::identity(from))
                            : std::make_shared<const Embedding>(from, to);
  std::lock_guard lock(mu_);
  auto [it, inserted] = embeddings_.emplace(std::make_pair(from_d, to_d), emb);
  return it->second;
}

ExtElem Tower::trace(const ExtElem& x, int from_d, int down_d) const {
  return ff::trace(x, *embedding(down_d, from_d));
}

std::vector<ClosedPoint> closed_points(const Tower& tower, int d) {
  if (d < 1) throw ConfigError("closed point degree must be >= 1");
  const FieldPtr field = tower.level(d);
  const std::uint64_t q = tower.q();
  const std::uint32_t size = field->size();
  std::vector<bool> seen(size, false);
  std::vector<ClosedPoint> out;
  for (std::uint32_t x = 1; x < size; ++x) {
    if (seen[x]) continue;
    std::vector<std::uint32_t> orbit{x};
    seen[x] = true;
    for (std::uint32_t y = field->pow(x, q); y != x; y = field->pow(y, q)) {
      orbit.push_back(y);
      seen[y] = true;
    }
    // x is the first unseen element, hence the orbit minimum.
    if (static_cast<int>(orbit.size()) == d) out.push_back({field->elem(x), d});
  }
  return out;
}

}  // namespace hkl::ff
