#pragma once

// Additive forms a_1 x_1^d + ... + a_s x_s^d over O_K, level profiles,
// rotation of levels (multiplying the form by pi^r), normalization and zero
// certificates.

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ramified_zero/error.hpp"
#include "ramified_zero/ring.hpp"

namespace ramified_zero {

struct LevelProfile {
  std::vector<int> counts;  // counts[i] = number of variables at level i (mod d)
  int total = 0;

  int d() const { return static_cast<int>(counts.size()); }
  /// counts[i mod d], for any integer i.
  int at(int i) const {
    const int d = this->d();
    return counts[static_cast<std::size_t>(((i % d) + d) % d)];
  }
  /// Profile of the form multiplied by pi^r: level l moves to l + r.
  LevelProfile shifted(int r) const {
    LevelProfile out{std::vector<int>(counts.size(), 0), total};
    for (int i = 0; i < d(); ++i) out.counts[static_cast<std::size_t>(((i + r) % d() + d()) % d())] = at(i);
    return out;
  }
  /// d * (s_0 + ... + s_{k-1}) >= k * s for all k = 1..d.
  bool satisfies_prefix_bounds() const {
    long long prefix = 0;
    for (int k = 1; k <= d(); ++k) {
      prefix += counts[static_cast<std::size_t>(k - 1)];
      if (static_cast<long long>(d()) * prefix < static_cast<long long>(k) * total) return false;
    }
    return true;
  }
  bool operator==(const LevelProfile&) const = default;
};

class AdditiveForm {
 public:
  /// Coefficients are kept as given; levels are their valuations mod d.
  static AdditiveForm make(FieldPtr field, int d, std::vector<RingElement> coeffs) {
    if (d <= 0 || d % 2 != 0) throw Error(ErrorKind::OddDegree, "degree must be a positive even integer");
    AdditiveForm f;
    f.field_ = std::move(field);
    f.d_ = d;
    f.coeffs_.reserve(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      RingElement a = coeffs[i].field().same_as(*f.field_) ? coeffs[i] : coeffs[i].in(f.field_);
      const Valuation v = a.valuation();
      if (!v.is_finite()) {
        throw Error(ErrorKind::ZeroCoefficient, "coefficient " + std::to_string(i) + " is zero at working precision");
      }
      f.absolute_.push_back(v.value());
      f.levels_.push_back(v.value() % d);
      f.coeffs_.push_back(std::move(a));
    }
    return f;
  }

  static AdditiveForm from_literals(FieldPtr field, int d, const std::vector<std::vector<std::int64_t>>& literals) {
    std::vector<RingElement> coeffs;
    coeffs.reserve(literals.size());
    for (const auto& lit : literals) coeffs.push_back(field->from_literal(lit));
    return make(std::move(field), d, std::move(coeffs));
  }

  const Field& field() const { return *field_; }
  const FieldPtr& field_ptr() const { return field_; }
  int d() const { return d_; }
  int m() const { return d_ / 2; }
  std::size_t size() const { return coeffs_.size(); }
  const std::vector<RingElement>& coefficients() const { return coeffs_; }
  const RingElement& coefficient(std::size_t i) const { return coeffs_.at(i); }
  /// Valuation of a_i reduced mod d.
  int level(std::size_t i) const { return levels_.at(i); }
  /// Valuation of a_i.
  int absolute_level(std::size_t i) const { return absolute_.at(i); }
  const std::vector<int>& levels() const { return levels_; }
  RingElement unit_part_of(std::size_t i) const { return unit_part(coeffs_.at(i)).second; }

  /// Same coefficients in a field with the same polynomial and another precision.
  AdditiveForm in(const FieldPtr& target) const {
    std::vector<RingElement> c;
    c.reserve(coeffs_.size());
    for (const auto& a : coeffs_) c.push_back(a.in(target));
    return make(target, d_, std::move(c));
  }

 private:
  AdditiveForm() = default;

  FieldPtr field_;
  int d_ = 0;
  std::vector<RingElement> coeffs_;
  std::vector<int> levels_;
  std::vector<int> absolute_;
};

struct ZeroCertificate {
  std::vector<RingElement> assignment;
  int n_target = 0;
  std::size_t pivot = 0;
};

/// c_i = pi^r a_i / pi^{d * shift_i}. A zero y of the rotated form gives the
/// zero x_i = pi^{Q - shift_i} y_i of the original for any Q keeping x integral.
struct Rotation {
  int r = 0;
  std::vector<int> shifts;
};

struct RotatedForm {
  AdditiveForm form;
  Rotation rotation;
};

inline LevelProfile profile(const AdditiveForm& form) {
  LevelProfile p{std::vector<int>(static_cast<std::size_t>(form.d()), 0), static_cast<int>(form.size())};
  for (int l : form.levels()) ++p.counts[static_cast<std::size_t>(l)];
  return p;
}

/// Multiplies the form by pi^r and brings every level back into [0, d).
/// r = 0 also reduces coefficients whose valuation is >= d.
inline RotatedForm rotate(const AdditiveForm& form, int r) {
  const int d = form.d();
  if (r < 0 || r >= d) throw Error(ErrorKind::PreconditionViolated, "rotation must lie in [0, d)");
  const Field& f = form.field();
  const RingElement pr = f.pi_power(r);
  Rotation rot{r, std::vector<int>(form.size(), 0)};
  std::vector<RingElement> c;
  c.reserve(form.size());
  for (std::size_t i = 0; i < form.size(); ++i) {
    const int shifted = form.absolute_level(i) + r;
    const int shift = shifted / d;
    const int level = shifted % d;
    if (level >= f.precision()) throw Error(ErrorKind::PrecisionExhausted, "rotated level exceeds precision");
    rot.shifts[i] = shift;
    if (shift == 0) {
      c.push_back(pr * form.coefficient(i));
    } else {
      c.push_back(f.pi_power(level) * form.unit_part_of(i));
    }
  }
  return RotatedForm{AdditiveForm::make(form.field_ptr(), d, std::move(c)), std::move(rot)};
}

/// Smallest r whose rotated profile meets d * (s_0 + ... + s_{k-1}) >= k * s.
inline int normalizing_rotation(const LevelProfile& p) {
  for (int r = 0; r < p.d(); ++r) {
    if (p.shifted(r).satisfies_prefix_bounds()) return r;
  }
  throw Error(ErrorKind::NoValidRotation, "no rotation satisfies the prefix bounds");
}

inline std::pair<int, RotatedForm> normalize(const AdditiveForm& form) {
  if (form.size() == 0) throw Error(ErrorKind::PreconditionViolated, "normalize needs at least one variable");
  const int r = normalizing_rotation(profile(form));
  return {r, rotate(form, r)};
}

inline RingElement evaluate(const AdditiveForm& form, std::span<const RingElement> assignment) {
  if (assignment.size() != form.size()) {
    throw Error(ErrorKind::LengthMismatch,
                "assignment has " + std::to_string(assignment.size()) + " entries, form has " + std::to_string(form.size()));
  }
  RingElement sum = form.field().zero();
  const auto d = static_cast<std::uint64_t>(form.d());
  for (std::size_t i = 0; i < form.size(); ++i) {
    const RingElement& b = assignment[i];
    if (b.is_zero()) continue;
    sum += form.coefficient(i) * pow(b.field().same_as(form.field()) ? b : b.in(form.field_ptr()), d);
  }
  return sum;
}

struct Verification {
  Valuation valuation = Valuation::of(0);
  bool pivot_is_unit = false;
  bool passed = false;
};

inline Verification verify_certificate(const AdditiveForm& form, const ZeroCertificate& cert) {
  Verification out;
  if (cert.assignment.size() != form.size()) return out;
  out.valuation = evaluate(form, cert.assignment).valuation();
  out.pivot_is_unit = cert.pivot < cert.assignment.size() && cert.assignment[cert.pivot].is_unit();
  out.passed = out.pivot_is_unit && out.valuation.reaches(cert.n_target);
  return out;
}

/// Maps a zero y of rotate(original, r) back to the original variables:
/// x_i = pi^{Q - shift_i} y_i with Q = max (shift_i - v(y_i)) over the support,
/// so that every x_i is integral and at least one is a unit. Then
/// F(x) = pi^{Qd - r} G(y). Returns the assignment and the index of a unit.
inline std::pair<std::vector<RingElement>, std::size_t> pull_back(const AdditiveForm& original,
                                                                  const Rotation& rotation,
                                                                  std::span<const RingElement> y) {
  if (y.size() != original.size() || rotation.shifts.size() != original.size()) {
    throw Error(ErrorKind::LengthMismatch, "pull_back needs one value per variable");
  }
  const Field& f = original.field();
  bool any = false;
  int q = 0;
  std::vector<Valuation> vy;
  vy.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    vy.push_back(y[i].valuation());
    if (!vy.back().is_finite()) continue;
    const int cand = rotation.shifts[i] - vy.back().value();
    q = any ? std::max(q, cand) : cand;
    any = true;
  }
  std::vector<RingElement> x;
  x.reserve(y.size());
  std::size_t pivot = y.size();
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!vy[i].is_finite()) {
      x.push_back(f.zero());
      continue;
    }
    const int up = q - rotation.shifts[i];
    if (up >= 0) {
      x.push_back(f.pi_power(up) * y[i]);
    } else {
      auto [v, w] = unit_part(y[i]);
      x.push_back(f.pi_power(v.value() + up) * w);
    }
    if (pivot == y.size() && x.back().is_unit()) pivot = i;
  }
  if (pivot == y.size()) throw Error(ErrorKind::PreconditionViolated, "pull_back of the zero assignment");
  return {std::move(x), pivot};
}

}  // namespace ramified_zero
