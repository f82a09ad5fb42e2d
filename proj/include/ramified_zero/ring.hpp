#pragma once

// Truncated arithmetic in the ring of integers O_K of a totally ramified
// extension K/Q_2 given by an Eisenstein polynomial
//
//   pi^e + c_{e-1} pi^{e-1} + ... + c_0 = 0,   c_i even,  c_0 = 2 (mod 4).
//
// Elements are stored in the power basis 1, pi, ..., pi^{e-1} with 2-adic
// integer coefficients. Because the terms a_j pi^j have valuations
// e*v2(a_j) + j, which are pairwise distinct mod e, the ideal (pi^N) is
// exactly {sum a_j pi^j : v2(a_j) >= ceil((N - j)/e)}. Reducing modulo
// pi^N is therefore a per-coefficient mask, and canonical elements compare
// syntactically.

#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ramified_zero/error.hpp"

namespace ramified_zero {

/// pi-adic valuation, with a distinguished marker for elements that are
/// zero at the working precision. The marker compares above every integer.
class Valuation {
 public:
  static constexpr Valuation at_least_precision() { return Valuation(kInfinite); }
  static constexpr Valuation of(int v) { return Valuation(v); }

  constexpr bool is_finite() const { return v_ != kInfinite; }
  constexpr bool is_at_least_precision() const { return v_ == kInfinite; }

  int value() const {
    if (!is_finite()) {
      throw Error(ErrorKind::PreconditionViolated, "valuation is AtLeastPrecision");
    }
    return v_;
  }

  /// True when the valuation is >= n (always true for the marker).
  constexpr bool reaches(int n) const { return v_ >= n; }

  constexpr auto operator<=>(const Valuation&) const = default;

  std::string str() const { return is_finite() ? std::to_string(v_) : std::string("AtLeastPrecision"); }

 private:
  static constexpr int kInfinite = std::numeric_limits<int>::max();
  constexpr explicit Valuation(int v) : v_(v) {}
  int v_;
};

class RingElement;
class Field;
using FieldPtr = std::shared_ptr<const Field>;

inline int default_precision(int e) { return 8 * e + 16; }

class Field : public std::enable_shared_from_this<Field> {
 public:
  static constexpr int kGuardBits = 2;
  static constexpr int kMaxCoeffBits = 64;

  /// Validates the Eisenstein data and derives u with 2 = u * pi^e.
  static FieldPtr make(int e, std::vector<std::int64_t> eisenstein, int precision);

  /// Same polynomial, different working precision.
  FieldPtr with_precision(int precision) const { return make(e_, eisenstein_, precision); }

  int e() const { return e_; }
  int precision() const { return n_pi_; }
  int coeff_bits() const { return m_coeff_; }
  const std::vector<std::int64_t>& eisenstein() const { return eisenstein_; }

  /// Number of 2-adic bits kept for the coefficient of pi^j.
  int digit_bits(int j) const { return (n_pi_ - j + e_ - 1) / e_; }
  std::uint64_t mask(int j) const { return masks_[static_cast<std::size_t>(j)]; }

  /// Same polynomial and precision.
  bool same_as(const Field& other) const {
    return this == &other || (e_ == other.e_ && n_pi_ == other.n_pi_ && eisenstein_ == other.eisenstein_);
  }
  /// Same polynomial, any precision.
  bool same_polynomial(const Field& other) const { return e_ == other.e_ && eisenstein_ == other.eisenstein_; }

  RingElement zero() const;
  RingElement one() const;
  RingElement pi() const;
  RingElement pi_power(int j) const;
  RingElement from_int(std::int64_t v) const;
  RingElement from_literal(std::span<const std::int64_t> coeffs) const;
  /// The unit u with 2 = u * pi^e.
  RingElement u() const;

  std::string describe() const;

  // Reduces a product of length up to 2e-1 in place, then masks.
  void reduce(std::vector<std::uint64_t>& r) const;

 private:
  friend class RingElement;
  Field() = default;

  int e_ = 1;
  int n_pi_ = 0;
  int m_coeff_ = 0;
  std::vector<std::int64_t> eisenstein_;
  std::vector<std::uint64_t> relation_;  // c_j as residues mod 2^64
  std::vector<std::uint64_t> masks_;
  std::vector<std::uint64_t> u_;
  std::vector<std::uint64_t> u_pi_top_;  // u * pi^{e-1}
};

class RingElement {
 public:
  RingElement(FieldPtr field, std::vector<std::uint64_t> raw) : field_(std::move(field)), c_(std::move(raw)) {
    c_.resize(static_cast<std::size_t>(field_->e()), 0);
    canonicalize();
  }

  const Field& field() const { return *field_; }
  const FieldPtr& field_ptr() const { return field_; }
  std::span<const std::uint64_t> coeffs() const { return c_; }

  bool is_zero() const {
    for (auto v : c_) {
      if (v != 0) return false;
    }
    return true;
  }
  bool is_unit() const { return (c_[0] & 1U) != 0; }

  Valuation valuation() const {
    const int e = field_->e();
    int best = std::numeric_limits<int>::max();
    for (int j = 0; j < e; ++j) {
      const auto v = c_[static_cast<std::size_t>(j)];
      if (v == 0) continue;
      best = std::min(best, e * std::countr_zero(v) + j);
    }
    if (best >= field_->precision()) return Valuation::at_least_precision();
    return Valuation::of(best);
  }

  /// Same element in a field with the same polynomial and another precision.
  RingElement in(const FieldPtr& target) const {
    if (!field_->same_polynomial(*target)) {
      throw Error(ErrorKind::FieldMismatch, "cannot move element between different extensions");
    }
    return RingElement(target, c_);
  }

  RingElement operator-() const {
    std::vector<std::uint64_t> r(c_.size());
    for (std::size_t j = 0; j < c_.size(); ++j) r[j] = 0 - c_[j];
    return RingElement(field_, std::move(r));
  }

  friend RingElement operator+(const RingElement& a, const RingElement& b) {
    a.check_same(b);
    std::vector<std::uint64_t> r(a.c_.size());
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = a.c_[j] + b.c_[j];
    return RingElement(a.field_, std::move(r));
  }

  friend RingElement operator-(const RingElement& a, const RingElement& b) {
    a.check_same(b);
    std::vector<std::uint64_t> r(a.c_.size());
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = a.c_[j] - b.c_[j];
    return RingElement(a.field_, std::move(r));
  }

  friend RingElement operator*(const RingElement& a, const RingElement& b) {
    a.check_same(b);
    const std::size_t e = a.c_.size();
    std::vector<std::uint64_t> r(2 * e - 1, 0);
    for (std::size_t i = 0; i < e; ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; j < e; ++j) r[i + j] += a.c_[i] * b.c_[j];
    }
    a.field_->reduce(r);
    return RingElement(a.field_, std::move(r), Canonical{});
  }

  /// Scalar multiple by an ordinary integer.
  friend RingElement operator*(std::int64_t k, const RingElement& a) {
    std::vector<std::uint64_t> r(a.c_.size());
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = static_cast<std::uint64_t>(k) * a.c_[j];
    return RingElement(a.field_, std::move(r));
  }

  RingElement& operator+=(const RingElement& b) { return *this = *this + b; }
  RingElement& operator-=(const RingElement& b) { return *this = *this - b; }
  RingElement& operator*=(const RingElement& b) { return *this = *this * b; }

  friend bool operator==(const RingElement& a, const RingElement& b) {
    return a.field_->same_as(*b.field_) && a.c_ == b.c_;
  }

  /// a / pi for a with valuation >= 1. The top pi-digit of the result is
  /// not determined by a at this precision.
  RingElement div_pi() const {
    if (c_[0] & 1U) throw Error(ErrorKind::PreconditionViolated, "div_pi of a unit");
    const std::size_t e = c_.size();
    std::vector<std::uint64_t> r(e, 0);
    for (std::size_t j = 0; j + 1 < e; ++j) r[j] = c_[j + 1];
    const std::uint64_t half = c_[0] >> 1;
    for (std::size_t j = 0; j < e; ++j) r[j] += half * field_->u_pi_top_[j];
    return RingElement(field_, std::move(r));
  }

  std::string str() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t j = 0; j < c_.size(); ++j) os << (j ? ", " : "") << c_[j];
    os << ']';
    return os.str();
  }

  std::size_t hash() const {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (auto v : c_) h ^= std::hash<std::uint64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

 private:
  friend class Field;
  struct Canonical {};
  RingElement(FieldPtr field, std::vector<std::uint64_t> reduced, Canonical)
      : field_(std::move(field)), c_(std::move(reduced)) {}

  void canonicalize() {
    for (std::size_t j = 0; j < c_.size(); ++j) c_[j] &= field_->masks_[j];
  }

  void check_same(const RingElement& b) const {
    if (!field_->same_as(*b.field_)) throw Error(ErrorKind::FieldMismatch, "operands live in different fields");
  }

  FieldPtr field_;
  std::vector<std::uint64_t> c_;
};

// ---------------------------------------------------------------------------
// Field

inline void Field::reduce(std::vector<std::uint64_t>& r) const {
  const std::size_t e = static_cast<std::size_t>(e_);
  // pi^k = -pi^{k-e} * sum_j c_j pi^j for k >= e
  for (std::size_t k = r.size(); k-- > e;) {
    const std::uint64_t h = r[k];
    if (h == 0) continue;
    r[k] = 0;
    for (std::size_t j = 0; j < e; ++j) r[k - e + j] -= h * relation_[j];
  }
  r.resize(e);
  for (std::size_t j = 0; j < e; ++j) r[j] &= masks_[j];
}

inline RingElement Field::zero() const {
  return RingElement(shared_from_this(), std::vector<std::uint64_t>(static_cast<std::size_t>(e_), 0));
}

inline RingElement Field::one() const { return from_int(1); }

inline RingElement Field::from_int(std::int64_t v) const {
  std::vector<std::uint64_t> c(static_cast<std::size_t>(e_), 0);
  c[0] = static_cast<std::uint64_t>(v);
  return RingElement(shared_from_this(), std::move(c));
}

inline RingElement Field::from_literal(std::span<const std::int64_t> coeffs) const {
  if (coeffs.size() != static_cast<std::size_t>(e_)) {
    throw Error(ErrorKind::BadInput, "element literal must have exactly e = " + std::to_string(e_) + " entries");
  }
  std::vector<std::uint64_t> c(coeffs.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = static_cast<std::uint64_t>(coeffs[j]);
  return RingElement(shared_from_this(), std::move(c));
}

inline RingElement Field::pi() const {
  std::vector<std::uint64_t> c(static_cast<std::size_t>(e_) + 1, 0);
  c.back() = 1;
  if (e_ == 1) {
    // degree-one case: pi = -c_0
    reduce(c);
    return RingElement(shared_from_this(), std::move(c));
  }
  c.resize(static_cast<std::size_t>(e_));
  c[1] = 1;
  return RingElement(shared_from_this(), std::move(c));
}

inline RingElement Field::pi_power(int j) const {
  if (j < 0) throw Error(ErrorKind::PreconditionViolated, "negative power of pi");
  RingElement acc = one();
  const RingElement p = pi();
  for (int i = 0; i < j; ++i) acc = acc * p;
  return acc;
}

inline RingElement Field::u() const { return RingElement(shared_from_this(), u_, RingElement::Canonical{}); }

inline std::string Field::describe() const {
  std::ostringstream os;
  os << "e=" << e_ << " eisenstein=[";
  for (std::size_t j = 0; j < eisenstein_.size(); ++j) os << (j ? "," : "") << eisenstein_[j];
  os << "] precision=" << n_pi_;
  return os.str();
}

// ---------------------------------------------------------------------------
// Operations

inline RingElement add(const RingElement& a, const RingElement& b) { return a + b; }
inline RingElement neg(const RingElement& a) { return -a; }
inline RingElement mul(const RingElement& a, const RingElement& b) { return a * b; }
inline Valuation valuation(const RingElement& a) { return a.valuation(); }

inline RingElement pow(const RingElement& a, std::uint64_t n) {
  RingElement result = a.field().one();
  RingElement base = a;
  while (n != 0) {
    if (n & 1U) result = result * base;
    n >>= 1;
    if (n != 0) base = base * base;
  }
  return result;
}

/// Inverse of a unit by Newton iteration x <- x (2 - w x), starting at 1
/// (every unit is 1 mod pi since the residue field is F_2).
inline RingElement inverse(const RingElement& w) {
  if (!w.is_unit()) throw Error(ErrorKind::PreconditionViolated, "inverse of a non-unit");
  const Field& f = w.field();
  RingElement x = f.one();
  const RingElement two = f.from_int(2);
  for (int correct = 1; correct < f.precision(); correct *= 2) x = x * (two - w * x);
  return x;
}

/// a = pi^l * w with w a unit. w is exact modulo pi^{n_pi - l}.
inline std::pair<Valuation, RingElement> unit_part(const RingElement& a) {
  const Valuation v = a.valuation();
  if (!v.is_finite()) throw Error(ErrorKind::ZeroElement, "unit_part of an element that is zero at precision");
  const Field& f = a.field();
  const int e = f.e();
  int remaining = v.value();
  RingElement w = a;
  if (remaining >= e) {
    // divide by 2 coefficientwise, then multiply by u (a / pi^e = (a / 2) u)
    const int halvings = remaining / e;
    std::vector<std::uint64_t> c(w.coeffs().begin(), w.coeffs().end());
    for (auto& x : c) x >>= halvings;
    w = RingElement(a.field_ptr(), std::move(c)) * pow(f.u(), static_cast<std::uint64_t>(halvings));
    remaining -= halvings * e;
  }
  for (; remaining > 0; --remaining) w = w.div_pi();
  return {v, w};
}

/// pi-adic digits d_0..d_{n-1} in {0,1} with a = sum d_i pi^i (mod pi^n).
inline std::vector<int> digit_expansion(const RingElement& a, int n) {
  const Field& f = a.field();
  if (n < 0 || n > f.precision()) {
    throw Error(ErrorKind::PrecisionExceeded,
                "requested " + std::to_string(n) + " digits at precision " + std::to_string(f.precision()));
  }
  std::vector<int> digits;
  digits.reserve(static_cast<std::size_t>(n));
  RingElement rest = a;
  const RingElement one = f.one();
  for (int i = 0; i < n; ++i) {
    const int d = static_cast<int>(rest.coeffs()[0] & 1U);
    digits.push_back(d);
    if (i + 1 < n) rest = (d ? rest - one : rest).div_pi();
  }
  return digits;
}

inline RingElement from_digits(const Field& f, std::span<const int> digits) {
  RingElement acc = f.zero();
  RingElement p = f.one();
  const RingElement pi = f.pi();
  for (int d : digits) {
    if (d) acc += p;
    p = p * pi;
  }
  return acc;
}

inline FieldPtr Field::make(int e, std::vector<std::int64_t> eisenstein, int precision) {
  if (e < 1) throw Error(ErrorKind::BadInput, "ramification degree must be >= 1");
  if (eisenstein.size() != static_cast<std::size_t>(e)) {
    throw Error(ErrorKind::BadInput, "expected " + std::to_string(e) + " Eisenstein coefficients");
  }
  for (std::size_t j = 0; j < eisenstein.size(); ++j) {
    if (eisenstein[j] % 2 != 0) {
      throw Error(ErrorKind::NotEisenstein, "coefficient c_" + std::to_string(j) + " is odd");
    }
  }
  if (((eisenstein[0] % 4) + 4) % 4 != 2) throw Error(ErrorKind::NotEisenstein, "c_0 is divisible by 4");
  if (precision < 2 * e + 2) {
    throw Error(ErrorKind::PrecisionTooSmall, "precision " + std::to_string(precision) + " < 2e+2");
  }
  const int m_coeff = (precision + e - 1) / e + kGuardBits;
  if (m_coeff > kMaxCoeffBits) {
    throw Error(ErrorKind::PrecisionTooLarge, "precision " + std::to_string(precision) + " needs more than 64-bit digits");
  }

  auto f = std::shared_ptr<Field>(new Field());
  f->e_ = e;
  f->n_pi_ = precision;
  f->m_coeff_ = m_coeff;
  f->eisenstein_ = std::move(eisenstein);
  f->relation_.resize(static_cast<std::size_t>(e));
  f->masks_.resize(static_cast<std::size_t>(e));
  for (int j = 0; j < e; ++j) {
    f->relation_[static_cast<std::size_t>(j)] = static_cast<std::uint64_t>(f->eisenstein_[static_cast<std::size_t>(j)]);
    const int bits = f->digit_bits(j);
    f->masks_[static_cast<std::size_t>(j)] = bits >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
  }
  // pi^e = 2 g with g = -sum (c_j / 2) pi^j a unit, so u = g^{-1}.
  std::vector<std::uint64_t> g(static_cast<std::size_t>(e));
  for (int j = 0; j < e; ++j) {
    g[static_cast<std::size_t>(j)] = static_cast<std::uint64_t>(-(f->eisenstein_[static_cast<std::size_t>(j)] / 2));
  }
  f->u_.assign(static_cast<std::size_t>(e), 0);
  f->u_pi_top_.assign(static_cast<std::size_t>(e), 0);
  const FieldPtr fp = f;
  const RingElement u = inverse(RingElement(fp, std::move(g)));
  f->u_.assign(u.coeffs().begin(), u.coeffs().end());
  const RingElement top = u * fp->pi_power(e - 1);
  f->u_pi_top_.assign(top.coeffs().begin(), top.coeffs().end());
  return fp;
}

}  // namespace ramified_zero

template <>
struct std::hash<ramified_zero::RingElement> {
  std::size_t operator()(const ramified_zero::RingElement& a) const noexcept { return a.hash(); }
};
