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

#include "hkl/cyclo.hpp"

#include <charconv>
#include <sstream>

#include "hkl/error.hpp"

namespace hkl::cyclo {

std::vector<mpz_class> reduce_cyclic(std::vector<mpz_class> v, int p) {
  // ζ^{p-1} = -(1 + ζ + ... + ζ^{p-2})
  const mpz_class top = v[p - 1];
  v.pop_back();
  if (top != 0) {
    for (auto& c : v) c -= top;
  }
  return v;
}

CycInt::CycInt(int p) : p_(p), c_(static_cast<std::size_t>(p - 1)) {}

CycInt::CycInt(int p, std::vector<mpz_class> coords) : p_(p), c_(std::move(coords)) {
  if (static_cast<int>(c_.size()) != p - 1) {
    throw DomainError("CycInt at level " + std::to_string(p) + " needs " + std::to_string(p - 1) +
                      " coordinates");
  }
}

CycInt CycInt::from_integer(int p, const mpz_class& c) {
  CycInt r(p);
  r.c_[0] = c;
  return r;
}

CycInt CycInt::zeta_power(int p, long e) {
  long k = e % p;
  if (k < 0) k += p;
  std::vector<mpz_class> v(p);
  v[k] = 1;
  return CycInt(p, reduce_cyclic(std::move(v), p));
}

CycInt CycInt::from_exponent_counts(int p, std::span<const long long> counts) {
  std::vector<mpz_class> v(p);
  for (int e = 0; e < p && e < static_cast<int>(counts.size()); ++e) {
    v[e] = static_cast<long>(counts[e]);
  }
  return CycInt(p, reduce_cyclic(std::move(v), p));
}

bool CycInt::is_zero() const {
  for (const auto& c : c_) {
    if (c != 0) return false;
  }
  return true;
}

void CycInt::check_level(const CycInt& o) const {
  if (p_ != o.p_) {
    throw DomainError("cyclotomic level mismatch: " + std::to_string(p_) + " vs " + std::to_string(o.p_));
  }
}

CycInt CycInt::operator+(const CycInt& o) const {
  CycInt r = *this;
  r += o;
  return r;
}

CycInt CycInt::operator-(const CycInt& o) const {
  CycInt r = *this;
  r -= o;
  return r;
}

CycInt CycInt::operator-() const {
  CycInt r = *this;
  for (auto& c : r.c_) c = -c;
  return r;
}

CycInt& CycInt::operator+=(const CycInt& o) {
  check_level(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

CycInt& CycInt::operator-=(const CycInt& o) {
  check_level(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

CycInt CycInt::operator*(const CycInt& o) const {
  check_level(o);
  const int n = p_ - 1;
  std::vector<mpz_class> v(p_);
  for (int i = 0; i < n; ++i) {
    if (c_[i] == 0) continue;
    for (int j = 0; j < n; ++j) {
      if (o.c_[j] == 0) continue;
      int k = i + j;
      if (k >= p_) k -= p_;
      v[k] += c_[i] * o.c_[j];
    }
  }
  return CycInt(p_, reduce_cyclic(std::move(v), p_));
}

CycInt CycInt::operator*(const mpz_class& s) const {
  CycInt r = *this;
  for (auto& c : r.c_) c *= s;
  return r;
}

CycInt CycInt::pow(unsigned long e) const {
  CycInt r = one(p_);
  CycInt b = *this;
  while (e > 0) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

std::optional<CycInt> CycInt::divexact(const mpz_class& k) const {
  if (k == 0) throw DomainError("division by zero");
  CycInt r = *this;
  for (auto& c : r.c_) {
    if (!mpz_divisible_p(c.get_mpz_t(), k.get_mpz_t())) return std::nullopt;
    mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), k.get_mpz_t());
  }
  return r;
}

CycInt CycInt::galois(long c) const {
  long cc = c % p_;
  if (cc < 0) cc += p_;
  if (cc == 0) throw DomainError("Galois substitution needs c prime to p");
  std::vector<mpz_class> v(p_);
  for (int i = 0; i < p_ - 1; ++i) v[(i * cc) % p_] += c_[i];
  return CycInt(p_, reduce_cyclic(std::move(v), p_));
}

std::optional<CycInt> CycInt::div_uniformizer() const {
  // Solve x = (1-ζ) y: with s = y_{p-2}, y_i = (x_0 + ... + x_i) - (i+1) s and p s = Σ x_j.
  mpz_class total = 0;
  for (const auto& c : c_) total += c;
  if (!mpz_divisible_ui_p(total.get_mpz_t(), static_cast<unsigned long>(p_))) return std::nullopt;
  const mpz_class s = total / p_;
  CycInt y(p_);
  mpz_class prefix = 0;
  for (int i = 0; i < p_ - 1; ++i) {
    prefix += c_[i];
    y.c_[i] = prefix - s * (i + 1);
  }
  return y;
}

std::optional<long> CycInt::pi_val() const {
  if (is_zero()) return std::nullopt;
  // Strip whole powers of p first: p = unit · (1-ζ)^{p-1}.
  mpz_class g = 0;
  for (const auto& c : c_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  long v = 0;
  CycInt x = *this;
  const unsigned long up = static_cast<unsigned long>(p_);
  const long vp = static_cast<long>(mpz_remove(g.get_mpz_t(), g.get_mpz_t(), mpz_class(up).get_mpz_t()));
  if (vp > 0) {
    mpz_class pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), up, static_cast<unsigned long>(vp));
    for (auto& c : x.c_) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), pk.get_mpz_t());
    v = vp * (p_ - 1);
  }
  while (true) {
    auto q = x.div_uniformizer();
    if (!q) return v;
    x = std::move(*q);
    ++v;
  }
}

bool CycInt::is_integer() const {
  for (std::size_t i = 1; i < c_.size(); ++i) {
    if (c_[i] != 0) return false;
  }
  return true;
}

mpz_class CycInt::as_integer() const {
  if (!is_integer()) throw NotRationalError("not a rational integer: " + to_string());
  return c_[0];
}

std::string CycInt::to_string() const {
  std::ostringstream os;
  os << p_ << ":[";
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (i) os << ',';
    os << c_[i].get_str();
  }
  os << ']';
  return os.str();
}

CycInt CycInt::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || text.size() < colon + 3 || text[colon + 1] != '[' ||
      text.back() != ']') {
    throw std::invalid_argument("malformed CycInt: " + std::string(text));
  }
  int p = 0;
  const auto head = text.substr(0, colon);
  auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), p);
  if (ec != std::errc() || ptr != head.data() + head.size() || p < 2) {
    throw std::invalid_argument("malformed CycInt level: " + std::string(text));
  }
  std::vector<mpz_class> coords;
  auto body = text.substr(colon + 2, text.size() - colon - 3);
  while (!body.empty()) {
    const auto comma = body.find(',');
    const std::string tok(body.substr(0, comma));
    mpz_class v;
    if (tok.empty() || v.set_str(tok, 10) != 0) {
      throw std::invalid_argument("malformed CycInt coordinate: " + std::string(text));
    }
    coords.push_back(v);
    if (comma == std::string_view::npos) break;
    body = body.substr(comma + 1);
  }
  if (static_cast<int>(coords.size()) != p - 1) {
    throw std::invalid_argument("CycInt coordinate count does not match level: " + std::string(text));
  }
  return CycInt(p, std::move(coords));
}

}  // namespace hkl::cyclo
