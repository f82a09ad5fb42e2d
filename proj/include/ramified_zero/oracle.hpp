#pragma once

// Independent checkers. The arithmetic here shares no code with ring.hpp:
// elements are integer polynomials in pi (GMP integers), products are
// schoolbook with explicit division by the monic Eisenstein polynomial, and
// the pi-adic valuation is read off the 2-adic valuation of the norm
// (the determinant of multiplication by the element). For a totally
// ramified extension v_pi(a) = v_2(N(a)).

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ramified_zero/error.hpp"
#include "ramified_zero/form.hpp"
#include "ramified_zero/pairing.hpp"
#include "ramified_zero/ring.hpp"
#include "ramified_zero/solver.hpp"

namespace ramified_zero::oracle {

/// Truncated O_K arithmetic: integer polynomials of degree < e, reduced by
/// the minimal polynomial and then modulo 2^bits.
class NaiveRing {
 public:
  using Poly = std::vector<mpz_class>;

  NaiveRing(int e, const std::vector<std::int64_t>& eisenstein, int precision)
      : e_(e), precision_(precision), bits_((precision + e - 1) / e + 4) {
    if (static_cast<int>(eisenstein.size()) != e) throw Error(ErrorKind::BadInput, "oracle: wrong Eisenstein length");
    for (auto c : eisenstein) minpoly_.emplace_back(static_cast<long>(c));
    modulus_ = 1;
    modulus_ <<= bits_;
  }

  explicit NaiveRing(const Field& f) : NaiveRing(f.e(), f.eisenstein(), f.precision()) {}

  int e() const { return e_; }
  int precision() const { return precision_; }

  /// Reads a canonical element of the main library as an integer polynomial.
  Poly from_element(const RingElement& a) const {
    Poly p(static_cast<std::size_t>(e_));
    for (int j = 0; j < e_; ++j) {
      const std::uint64_t c = a.coeffs()[static_cast<std::size_t>(j)];
      mpz_import(p[static_cast<std::size_t>(j)].get_mpz_t(), 1, 1, sizeof(c), 0, 0, &c);
    }
    return p;
  }

  Poly from_ints(std::span<const std::int64_t> c) const {
    Poly p(static_cast<std::size_t>(e_), 0);
    for (std::size_t j = 0; j < c.size() && j < p.size(); ++j) p[j] = static_cast<long>(c[j]);
    return wrap(p);
  }

  Poly constant(long v) const {
    Poly p(static_cast<std::size_t>(e_), 0);
    p[0] = v;
    return wrap(p);
  }

  Poly add(const Poly& a, const Poly& b) const {
    Poly r(static_cast<std::size_t>(e_));
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = a[j] + b[j];
    return wrap(r);
  }

  Poly sub(const Poly& a, const Poly& b) const {
    Poly r(static_cast<std::size_t>(e_));
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = a[j] - b[j];
    return wrap(r);
  }

  Poly mul(const Poly& a, const Poly& b) const { return wrap(divide_out(schoolbook(a, b))); }

  /// a^n by n - 1 successive multiplications.
  Poly power(const Poly& a, int n) const {
    Poly r = constant(1);
    for (int i = 0; i < n; ++i) r = mul(r, a);
    return r;
  }

  /// pi^j built by repeated multiplication with the polynomial x.
  Poly pi_power(int j) const {
    Poly x(static_cast<std::size_t>(e_), 0);
    if (e_ == 1) {
      x[0] = -minpoly_[0];
    } else {
      x[1] = 1;
    }
    return power(wrap(x), j);
  }

  /// v_pi through v_2 of the norm; nullopt when >= precision.
  std::optional<int> valuation(const Poly& a) const {
    const mpz_class det = norm(a);
    if (det == 0) return std::nullopt;
    const int v = static_cast<int>(mpz_scan1(det.get_mpz_t(), 0));
    if (v >= precision_) return std::nullopt;
    return v;
  }

  bool is_unit(const Poly& a) const { return mpz_odd_p(a[0].get_mpz_t()) != 0; }

  /// a and b agree modulo pi^precision.
  bool agree(const Poly& a, const Poly& b) const { return !valuation(sub(a, b)).has_value(); }

  mpz_class norm(const Poly& a) const {
    // column j = a * pi^j, in the power basis; exact integers
    const std::size_t e = static_cast<std::size_t>(e_);
    std::vector<std::vector<mpz_class>> m(e, std::vector<mpz_class>(e));
    Poly shifted = a;
    for (std::size_t j = 0; j < e; ++j) {
      for (std::size_t i = 0; i < e; ++i) m[i][j] = shifted[i];
      Poly next(e + 1, 0);
      for (std::size_t i = 0; i < e; ++i) next[i + 1] = shifted[i];
      shifted = divide_out(next);
    }
    return bareiss(m);
  }

 private:
  Poly schoolbook(const Poly& a, const Poly& b) const {
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return r;
  }

  // Remainder of division by x^e + c_{e-1} x^{e-1} + ... + c_0 (no 2-adic reduction).
  Poly divide_out(Poly r) const {
    const std::size_t e = static_cast<std::size_t>(e_);
    while (r.size() > e) {
      const mpz_class lead = r.back();
      const std::size_t shift = r.size() - 1 - e;
      for (std::size_t j = 0; j < e; ++j) r[shift + j] -= lead * minpoly_[j];
      r.pop_back();
    }
    r.resize(e, 0);
    return r;
  }

  Poly wrap(Poly r) const {
    for (auto& c : r) {
      mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), modulus_.get_mpz_t());
    }
    return r;
  }

  static mpz_class bareiss(std::vector<std::vector<mpz_class>> m) {
    const std::size_t n = m.size();
    mpz_class prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (m[k][k] == 0) {
        std::size_t swap = k + 1;
        while (swap < n && m[swap][k] == 0) ++swap;
        if (swap == n) return 0;
        std::swap(m[k], m[swap]);
        sign = -sign;
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        for (std::size_t j = k + 1; j < n; ++j) {
          m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]);
          mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
        }
      }
      prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
  }

  int e_;
  int precision_;
  int bits_;
  std::vector<mpz_class> minpoly_;
  mpz_class modulus_;
};

/// sum a_i x_i^d evaluated with the naive arithmetic.
inline NaiveRing::Poly evaluate(const NaiveRing& ring, const AdditiveForm& form, std::span<const RingElement> x) {
  if (x.size() != form.size()) throw Error(ErrorKind::LengthMismatch, "oracle: assignment length");
  NaiveRing::Poly sum = ring.constant(0);
  for (std::size_t i = 0; i < form.size(); ++i) {
    const auto xi = ring.from_element(x[i]);
    sum = ring.add(sum, ring.mul(ring.from_element(form.coefficient(i)), ring.power(xi, form.d())));
  }
  return sum;
}

struct OracleVerdict {
  std::optional<int> valuation;  // nullopt = zero at precision
  bool pivot_is_unit = false;
  bool passed = false;
};

/// Re-checks a certificate with the naive arithmetic only.
inline OracleVerdict check_certificate(const AdditiveForm& form, const ZeroCertificate& cert) {
  OracleVerdict out;
  if (cert.assignment.size() != form.size() || cert.pivot >= cert.assignment.size()) return out;
  const NaiveRing ring(form.field());
  out.valuation = ring.valuation(evaluate(ring, form, cert.assignment));
  out.pivot_is_unit = ring.is_unit(ring.from_element(cert.assignment[cert.pivot]));
  out.passed = out.pivot_is_unit && (!out.valuation || *out.valuation >= cert.n_target);
  return out;
}

// ---------------------------------------------------------------------------
// Brute force

/// Coordinates are coded by their pi-digits: bit j of the code is digit j,
/// so code c stands for sum_j bit_j(c) pi^j.
inline RingElement element_from_code(const Field& f, std::uint32_t code, int n_small) {
  std::vector<int> digits(static_cast<std::size_t>(n_small));
  for (int j = 0; j < n_small; ++j) digits[static_cast<std::size_t>(j)] = static_cast<int>((code >> j) & 1U);
  return from_digits(f, digits);
}

inline std::uint32_t code_of(const RingElement& a, int n_small) {
  std::uint32_t code = 0;
  const auto digits = digit_expansion(a, n_small);
  for (int j = 0; j < n_small; ++j) code |= static_cast<std::uint32_t>(digits[static_cast<std::size_t>(j)]) << j;
  return code;
}

inline constexpr double kBruteForceStateCap = 268435456.0;  // 2^28

/// Assignments counted by brute_force_zero: support <= cap over s variables,
/// 2^n_small - 1 nonzero residues per supported coordinate.
inline double brute_force_states(std::size_t s, int n_small, int support_cap) {
  const double nonzero = std::ldexp(1.0, n_small) - 1.0;
  double total = 0;
  double binom = 1;
  double pw = 1;
  for (int k = 0; k <= support_cap && static_cast<std::size_t>(k) <= s; ++k) {
    total += binom * pw;
    binom = binom * static_cast<double>(s - static_cast<std::size_t>(k)) / static_cast<double>(k + 1);
    pw *= nonzero;
  }
  return total;
}

/// All assignments modulo pi^n_small with support <= support_cap, some unit
/// coordinate, and F = 0 mod pi^n_small, as per-coordinate digit codes.
inline std::vector<std::vector<std::uint32_t>> brute_force_zero(const AdditiveForm& form, int n_small, int support_cap) {
  const Field& f = form.field();
  if (n_small < 1 || n_small > 24 || n_small > f.precision()) {
    throw Error(ErrorKind::PreconditionViolated, "n_small must lie in [1, min(24, precision)]");
  }
  const double states = brute_force_states(form.size(), n_small, support_cap);
  if (states > kBruteForceStateCap) {
    throw Error(ErrorKind::SearchSpaceTooLarge,
                "brute force would visit " + std::to_string(states) + " assignments (cap 2^28)");
  }
  const NaiveRing ring(f);
  const int e = f.e();
  const std::uint32_t residues = 1U << n_small;
  // bits needed for the coefficient of pi^j to decide divisibility by pi^n_small
  std::vector<std::uint64_t> mask(static_cast<std::size_t>(e));
  for (int j = 0; j < e; ++j) {
    const int need = std::max(0, (n_small - j + e - 1) / e);
    mask[static_cast<std::size_t>(j)] = need >= 64 ? ~0ULL : ((1ULL << need) - 1);
  }
  std::vector<NaiveRing::Poly> pi_pows;
  for (int j = 0; j < n_small; ++j) pi_pows.push_back(ring.pi_power(j));
  // term[i][code] = a_i * x(code)^d, low 64 bits of each coefficient
  std::vector<std::vector<std::vector<std::uint64_t>>> term(form.size());
  for (std::size_t i = 0; i < form.size(); ++i) {
    const auto a = ring.from_element(form.coefficient(i));
    term[i].resize(residues);
    for (std::uint32_t code = 0; code < residues; ++code) {
      NaiveRing::Poly x = ring.constant(0);
      for (int j = 0; j < n_small; ++j) {
        if ((code >> j) & 1U) x = ring.add(x, pi_pows[static_cast<std::size_t>(j)]);
      }
      const auto t = ring.mul(a, ring.power(x, form.d()));
      auto& out = term[i][code];
      out.resize(static_cast<std::size_t>(e));
      for (int j = 0; j < e; ++j) {
        out[static_cast<std::size_t>(j)] = mpz_class(t[static_cast<std::size_t>(j)] & mpz_class(~0UL)).get_ui();
      }
    }
  }

  std::vector<std::vector<std::uint32_t>> found;
  std::vector<std::uint32_t> current(form.size(), 0);
  std::vector<std::uint64_t> sum(static_cast<std::size_t>(e), 0);
  const std::size_t s = form.size();
  auto recurse = [&](auto&& self, std::size_t i, int support, bool has_unit) -> void {
    if (i == s) {
      if (!has_unit) return;
      for (int j = 0; j < e; ++j) {
        if (sum[static_cast<std::size_t>(j)] & mask[static_cast<std::size_t>(j)]) return;
      }
      found.push_back(current);
      return;
    }
    self(self, i + 1, support, has_unit);
    if (support >= support_cap) return;
    for (std::uint32_t code = 1; code < residues; ++code) {
      const auto& t = term[i][code];
      for (int j = 0; j < e; ++j) sum[static_cast<std::size_t>(j)] += t[static_cast<std::size_t>(j)];
      current[i] = code;
      self(self, i + 1, support + 1, has_unit || (code & 1U));
      for (int j = 0; j < e; ++j) sum[static_cast<std::size_t>(j)] -= t[static_cast<std::size_t>(j)];
    }
    current[i] = 0;
  };
  recurse(recurse, 0, 0, false);
  return found;
}

// ---------------------------------------------------------------------------
// Bins lemma

/// True when every assignment of pairs of n objects to m bins has two
/// disjoint pairs in one bin.
inline bool exhaustive_bins(int m, int n, unsigned threads = 1) {
  return ramified_zero::exhaustive_bins(m, n, threads).failures == 0;
}

// ---------------------------------------------------------------------------
// Profiles

/// Normalized profiles: compositions of s into d parts with
/// d * (s_0 + ... + s_{k-1}) >= k * s for every k.
inline std::vector<LevelProfile> enumerate_profiles(int d, int s) {
  std::vector<LevelProfile> out;
  std::vector<int> counts(static_cast<std::size_t>(d), 0);
  auto recurse = [&](auto&& self, int k, int prefix) -> void {
    if (k == d - 1) {
      counts[static_cast<std::size_t>(k)] = s - prefix;
      LevelProfile p{counts, s};
      if (p.satisfies_prefix_bounds()) out.push_back(std::move(p));
      return;
    }
    for (int c = 0; c <= s - prefix; ++c) {
      const long long next = prefix + c;
      if (static_cast<long long>(d) * next < static_cast<long long>(k + 1) * s) continue;
      counts[static_cast<std::size_t>(k)] = c;
      self(self, k + 1, prefix + c);
    }
  };
  if (d == 1) {
    out.push_back(LevelProfile{{s}, s});
  } else {
    recurse(recurse, 0, 0);
  }
  return out;
}

struct DispatchCoverage {
  int d = 0, s = 0, m = 0, e = 0;
  std::size_t feasible = 0;
  std::map<std::string, std::size_t> covered_by;
  std::vector<LevelProfile> fallback_profiles;
};

inline DispatchCoverage dispatch_coverage(int d, int s, int m, int e) {
  DispatchCoverage out{d, s, m, e, 0, {}, {}};
  for (const char* tag : {"SingleLevel", "AdjacentBig", "AdjacentFourFour", "Fallback"}) out.covered_by[tag] = 0;
  for (auto& p : enumerate_profiles(d, s)) {
    ++out.feasible;
    const Strategy st = dispatch(p, m, e);
    ++out.covered_by[std::string(to_string(st.kind))];
    if (st.kind == StrategyKind::Fallback) out.fallback_profiles.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random forms

/// Reproducible forms from mt19937_64: each coefficient is pi^level times a
/// unit whose power-basis coefficients are uniform bits (constant term odd).
/// Levels follow `level_profile` (then shuffled) or are uniform in [0, d).
inline AdditiveForm random_form(const FieldPtr& field, int d, int s, const std::optional<LevelProfile>& level_profile,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> levels;
  if (level_profile) {
    if (level_profile->d() != d || level_profile->total != s) {
      throw Error(ErrorKind::PreconditionViolated, "profile does not match d and s");
    }
    for (int l = 0; l < d; ++l) {
      for (int c = 0; c < level_profile->counts[static_cast<std::size_t>(l)]; ++c) levels.push_back(l);
    }
    for (std::size_t i = levels.size(); i > 1; --i) std::swap(levels[i - 1], levels[rng() % i]);
  } else {
    for (int i = 0; i < s; ++i) levels.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(d)));
  }
  std::vector<RingElement> coeffs;
  coeffs.reserve(levels.size());
  for (int level : levels) {
    std::vector<std::uint64_t> raw(static_cast<std::size_t>(field->e()));
    for (auto& c : raw) c = rng();
    raw[0] |= 1U;
    coeffs.push_back(field->pi_power(level) * RingElement(field, std::move(raw)));
  }
  return AdditiveForm::make(field, d, std::move(coeffs));
}

}  // namespace ramified_zero::oracle
