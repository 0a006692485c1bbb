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

#include "hkl/padic.hpp"

#include <algorithm>
#include <sstream>

#include "hkl/error.hpp"

namespace hkl::padic {

namespace {

mpz_class p_power(int p, int k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(std::max(k, 0)));
  return r;
}

PadicCyc cap(const PadicCyc& x, int N) { return x.N() > N ? x.reduce(N) : x; }

int mod_p(const mpz_class& v, int p) {
  return static_cast<int>(mpz_fdiv_ui(v.get_mpz_t(), static_cast<unsigned long>(p)));
}

}  // namespace

// ---------------------------------------------------------------- PadicCyc

PadicCyc::PadicCyc(int p, int N, std::vector<mpz_class> coords) : p_(p), N_(N), c_(std::move(coords)) {
  if (N < 0) throw DomainError("negative p-adic precision");
  if (static_cast<int>(c_.size()) != p - 1) throw DomainError("PadicCyc needs p - 1 coordinates");
  const mpz_class m = modulus();
  for (auto& c : c_) mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), m.get_mpz_t());
}

mpz_class PadicCyc::modulus() const { return p_power(p_, N_); }

PadicCyc PadicCyc::zero(int p, int N) { return PadicCyc(p, N, std::vector<mpz_class>(p - 1)); }

PadicCyc PadicCyc::from_integer(int p, int N, const mpz_class& v) {
  std::vector<mpz_class> c(p - 1);
  c[0] = v;
  return PadicCyc(p, N, std::move(c));
}

PadicCyc embed(const CycInt& x, int N) {
  if (N < 1) throw DomainError("embedding needs precision N >= 1");
  return PadicCyc(x.p(), N, x.coords());
}

void PadicCyc::check_level(const PadicCyc& o) const {
  if (p_ != o.p_) throw DomainError("p-adic level mismatch");
}

Valuation PadicCyc::val() const {
  const long c = cert();
  auto v = CycInt(p_, c_).pi_val();
  if (!v || *v >= c) return {c, false};
  return {*v, true};
}

bool PadicCyc::is_unit() const {
  const auto v = val();
  return v.exact && v.value == 0;
}

int PadicCyc::residue() const {
  mpz_class s = 0;
  for (const auto& c : c_) s += c;
  return mod_p(s, p_);
}

PadicCyc PadicCyc::operator+(const PadicCyc& o) const {
  check_level(o);
  const int N = std::min(N_, o.N_);
  std::vector<mpz_class> c(c_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = c_[i] + o.c_[i];
  return PadicCyc(p_, N, std::move(c));
}

PadicCyc PadicCyc::operator-(const PadicCyc& o) const {
  check_level(o);
  const int N = std::min(N_, o.N_);
  std::vector<mpz_class> c(c_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = c_[i] - o.c_[i];
  return PadicCyc(p_, N, std::move(c));
}

PadicCyc PadicCyc::operator-() const {
  std::vector<mpz_class> c(c_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = -c_[i];
  return PadicCyc(p_, N_, std::move(c));
}

PadicCyc PadicCyc::operator*(const PadicCyc& o) const {
  check_level(o);
  // x y - x~ y~ = x~ O(p^{N_y}) + y~ O(p^{N_x}) + O(p^{N_x + N_y})
  const long vx = val().value;
  const long vy = o.val().value;
  const int N = static_cast<int>(std::min<long>(N_ + vy / (p_ - 1), o.N_ + vx / (p_ - 1)));
  CycInt prod = CycInt(p_, c_) * CycInt(p_, o.c_);
  return PadicCyc(p_, N, prod.coords());
}

PadicCyc PadicCyc::pow(unsigned long e) const {
  PadicCyc r = one(p_, N_);
  PadicCyc b = *this;
  while (e > 0) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

PadicCyc PadicCyc::inverse() const {
  const int r = residue();
  if (r == 0) throw DomainError("division by a non-unit p-adic element " + to_string());
  // Newton iteration y <- y(2 - x y), starting from the residue inverse.
  long inv = 1;
  for (long b = r, e = p_ - 2; e > 0; e >>= 1, b = b * b % p_) {
    if (e & 1) inv = inv * b % p_;
  }
  PadicCyc y = from_integer(p_, N_, inv);
  const PadicCyc two = from_integer(p_, N_, 2);
  for (int iter = 0; iter < 128; ++iter) {
    PadicCyc err = cap(one(p_, N_) - cap(*this * y, N_), N_);
    if (!err.val().exact) return y;
    y = cap(y * cap(two - cap(*this * y, N_), N_), N_);
  }
  throw std::logic_error("unit inverse did not converge");
}

PadicCyc PadicCyc::div_p_power(int k) const {
  if (k == 0) return *this;
  if (k > N_ || val().value < static_cast<long>(k) * (p_ - 1)) {
    throw DomainError("element is not certified divisible by p^" + std::to_string(k) + ": " + to_string());
  }
  const mpz_class pk = p_power(p_, k);
  std::vector<mpz_class> c = c_;
  for (auto& x : c) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), pk.get_mpz_t());
  return PadicCyc(p_, N_ - k, std::move(c));
}

PadicCyc PadicCyc::mul_p_power(int k) const {
  const mpz_class pk = p_power(p_, k);
  std::vector<mpz_class> c = c_;
  for (auto& x : c) x *= pk;
  return PadicCyc(p_, N_ + k, std::move(c));
}

PadicCyc PadicCyc::reduce(int N) const {
  if (N > N_) throw DomainError("cannot raise precision from " + std::to_string(N_) + " to " + std::to_string(N));
  return PadicCyc(p_, N, c_);
}

std::optional<mpz_class> PadicCyc::zp_value() const {
  for (std::size_t i = 1; i < c_.size(); ++i) {
    if (c_[i] != 0) return std::nullopt;
  }
  return c_[0];
}

bool PadicCyc::agrees(const PadicCyc& o) const { return !val_difference(o).exact; }

Valuation PadicCyc::val_difference(const PadicCyc& o) const { return (*this - o).val(); }

std::string PadicCyc::to_string() const {
  std::ostringstream os;
  os << CycInt(p_, c_).to_string() << "+O(" << p_ << '^' << N_ << ')';
  return os.str();
}

// ---------------------------------------------------------------- PadicExponent

PadicExponent PadicExponent::integer(int p, const mpz_class& k) {
  if (k < 0) throw DomainError("exact-integer exponents must be non-negative; use base-p digits for κ < 0");
  PadicExponent e;
  e.p_ = p;
  e.kind_ = Kind::ExactInteger;
  mpz_class v = k;
  while (v > 0) {
    e.digits_.push_back(mod_p(v, p));
    v /= p;
  }
  return e;
}

PadicExponent PadicExponent::truncated(int p, std::vector<int> digits) {
  for (int d : digits) {
    if (d < 0 || d >= p) throw ConfigError("base-p digit out of range: " + std::to_string(d));
  }
  if (digits.empty()) throw ConfigError("κ needs at least one base-p digit");
  PadicExponent e;
  e.p_ = p;
  e.kind_ = Kind::Truncated;
  e.digits_ = std::move(digits);
  return e;
}

mpz_class PadicExponent::value() const {
  mpz_class v = 0;
  for (auto it = digits_.rbegin(); it != digits_.rend(); ++it) v = v * p_ + *it;
  return v;
}

std::string PadicExponent::to_string() const {
  if (kind_ == Kind::ExactInteger) return value().get_str();
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    if (i) os << ',';
    os << digits_[i];
  }
  os << ")_" << p_ << "+O(" << p_ << '^' << digits_.size() << ')';
  return os.str();
}

// ---------------------------------------------------------------- roots

PadicCyc unit_root(std::span<const PadicCyc> monic) {
  if (monic.size() < 2) throw DomainError("unit_root needs a polynomial of degree >= 1");
  const int p = monic[0].p();
  const int deg = static_cast<int>(monic.size()) - 1;
  int N = monic[0].N();
  for (const auto& c : monic) N = std::min(N, c.N());
  if (N < 1) throw PrecisionError("no precision left for Hensel lifting", p - 1);

  std::vector<int> bar(monic.size());
  for (std::size_t i = 0; i < monic.size(); ++i) bar[i] = monic[i].residue();
  auto eval_bar = [&](long x, bool derivative) {
    long acc = 0;
    for (int i = 0; i <= deg; ++i) {
      const int power = deg - i;
      if (derivative) {
        if (power == 0) continue;
        acc = (acc * x + static_cast<long>(bar[i]) * power) % p;
      } else {
        acc = (acc * x + bar[i]) % p;
      }
    }
    return acc;
  };
  std::vector<int> roots;
  for (int r = 1; r < p; ++r) {
    if (eval_bar(r, false) == 0) roots.push_back(r);
  }
  if (roots.size() != 1 || eval_bar(roots[0], true) == 0) {
    throw DegenerateFactor("no simple unit root modulo the maximal ideal (" + std::to_string(roots.size()) +
                           " nonzero residue roots)");
  }

  std::vector<PadicCyc> coeffs;
  for (const auto& c : monic) coeffs.push_back(cap(c, N));
  PadicCyc y = PadicCyc::from_integer(p, N, roots[0]);
  for (int iter = 0; iter < 128; ++iter) {
    PadicCyc f = coeffs[0];
    PadicCyc fp = PadicCyc::from_integer(p, N, deg);
    for (int i = 1; i <= deg; ++i) {
      f = cap(cap(f * y, N) + coeffs[i], N);
      if (i < deg) fp = cap(cap(fp * y, N) + cap(coeffs[i] * PadicCyc::from_integer(p, N, deg - i), N), N);
    }
    if (!f.val().exact) return y;
    y = cap(y - cap(f * fp.inverse(), N), N);
  }
  throw std::logic_error("Hensel iteration did not converge");
}

PadicCyc hensel_unit_root(std::span<const CycInt> P, int N) {
  if (P.empty() || P[0] != CycInt::one(P[0].p())) throw DomainError("local factor must have constant term 1");
  std::vector<PadicCyc> monic;
  for (const auto& c : P) monic.push_back(embed(c, N));
  return unit_root(monic);
}

bool has_unit_step_slopes(std::span<const CycInt> P, int slope_unit) {
  if (P.empty()) return false;
  const int p = P[0].p();
  for (std::size_t i = 0; i < P.size(); ++i) {
    const auto v = P[i].pi_val();
    const long expected = static_cast<long>(p - 1) * slope_unit * static_cast<long>(i == 0 ? 0 : i * (i - 1) / 2);
    if (!v || *v != expected) return false;
  }
  return true;
}

namespace {

// One pass at internal precision Nint; returns roots with whatever precision survived.
std::optional<std::vector<PadicCyc>> split_at(std::span<const CycInt> P, int s0, int Nint) {
  const int deg = static_cast<int>(P.size()) - 1;
  std::vector<PadicCyc> g;
  for (const auto& c : P) g.push_back(embed(c, Nint));
  std::vector<PadicCyc> roots;
  for (int j = 0; j < deg; ++j) {
    const int cur = deg - j;
    const int s = s0 * j;
    std::vector<PadicCyc> r;
    for (int i = 0; i <= cur; ++i) {
      if (g[i].N() <= s * i) return std::nullopt;
      if (g[i].val().value < static_cast<long>(s) * i * (g[i].p() - 1)) {
        throw std::logic_error("deflated factor lost the expected slope structure");
      }
      r.push_back(g[i].div_p_power(s * i));
    }
    const PadicCyc pi = unit_root(r).mul_p_power(s);
    std::vector<PadicCyc> h{g[0]};
    for (int i = 1; i < cur; ++i) h.push_back(g[i] + pi * h[i - 1]);
    roots.push_back(pi);
    g = std::move(h);
  }
  return roots;
}

}  // namespace

std::vector<PadicCyc> slope_split(std::span<const CycInt> P, int slope_unit, int N) {
  if (!has_unit_step_slopes(P, slope_unit)) {
    std::ostringstream os;
    os << "local factor violates the slope facts: π-valuations";
    for (const auto& c : P) {
      auto v = c.pi_val();
      os << ' ' << (v ? std::to_string(*v) : std::string("inf"));
    }
    throw SlopeViolation(os.str());
  }
  const int deg = static_cast<int>(P.size()) - 1;
  int Nint = N + slope_unit * deg * deg + 1;
  for (int attempt = 0; attempt < 10; ++attempt) {
    auto roots = split_at(P, slope_unit, Nint);
    if (roots) {
      int worst = Nint;
      for (const auto& r : *roots) worst = std::min(worst, r.N());
      if (worst >= N) {
        for (auto& r : *roots) r = r.reduce(N);
        return std::move(*roots);
      }
      Nint += (N - worst) + 1;
    } else {
      Nint *= 2;
    }
  }
  throw PrecisionError("slope factorization could not reach the requested precision", static_cast<long>(N) * 2);
}

long one_unit_power_limit(const PadicCyc& u, const PadicExponent& kappa, long target) {
  const int p = u.p();
  const PadicCyc w = u - PadicCyc::one(p, u.N());
  const long v = w.val().value;
  long limit = std::min(target, u.cert());
  if (kappa.kind() == PadicExponent::Kind::Truncated) {
    // u^{κ + p^s x} = u^κ (u^{p^s})^x and u^{p^s} ≡ 1 mod π^{(p-1)s + v}
    limit = std::min(limit, static_cast<long>(p - 1) * static_cast<long>(kappa.digits().size()) + v);
  }
  return (limit / (p - 1)) * (p - 1);
}

PadicCyc one_unit_power(const PadicCyc& u, const PadicExponent& kappa, long target) {
  const int p = u.p();
  if (kappa.p() != p) throw DomainError("exponent and base live over different primes");
  const PadicCyc w = u - PadicCyc::one(p, u.N());
  const long v = w.val().value;
  if (v < 1) throw DomainError("one_unit_power needs a 1-unit, got " + u.to_string());
  const long limit = one_unit_power_limit(u, kappa, target);
  const int N = static_cast<int>(limit / (p - 1));
  if (N < 1) {
    throw PrecisionError("target precision below one p-adic digit", p - 1);
  }
  const mpz_class K = kappa.value();
  const PadicCyc wr = cap(w, N);
  PadicCyc sum = PadicCyc::one(p, N);
  PadicCyc wl = PadicCyc::one(p, N);
  mpz_class binom = 1;
  for (long l = 1;; ++l) {
    // Every later term has valuation >= l·v since binom(κ, l) ∈ Z_p.
    if (l * v >= limit) break;
    if (K < l) break;
    binom = binom * (K - (l - 1)) / l;
    wl = cap(wl * wr, N);
    sum = cap(sum + cap(PadicCyc::from_integer(p, N, binom) * wl, N), N);
  }
  return sum;
}

}  // namespace hkl::padic
