#pragma once

// Finding nontrivial zeros of additive forms of degree d = 2m, m odd >= 3.
//
// After rotating the levels so that the interesting level is 0, three
// constructive strategies build a contraction whose value has valuation at
// least 2e + 1 while containing a level-0 original variable; Newton
// iteration on that variable then produces a zero to any precision.
//
//   SingleLevel       some level holds >= m + 7 variables
//   AdjacentBig       level k holds >= m + 3 and level k + 1 holds >= 2
//   AdjacentFourFour  levels k and k + 1 hold >= 4 each
//
// Profiles matching none of these, and strategy runs that do not close,
// go to a bounded best-first search over contractions.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ramified_zero/contraction.hpp"
#include "ramified_zero/error.hpp"
#include "ramified_zero/form.hpp"
#include "ramified_zero/pairing.hpp"
#include "ramified_zero/ring.hpp"

namespace ramified_zero {

inline constexpr std::uint64_t kDefaultSeed = 20221006;
inline constexpr std::size_t kDefaultBudget = 100000;

/// d^2/4 + 3d + 1 for d = 2m with m odd and m >= 3.
inline int variables_bound(int d) {
  if (d <= 0 || d % 2 != 0 || (d / 2) % 2 == 0 || d / 2 < 3) {
    throw Error(ErrorKind::UnsupportedDegree, "degree " + std::to_string(d) + " is not 2m with m odd and m >= 3");
  }
  return d * d / 4 + 3 * d + 1;
}

enum class StrategyKind { SingleLevel, AdjacentBig, AdjacentFourFour, Fallback };

inline std::string_view to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::SingleLevel: return "SingleLevel";
    case StrategyKind::AdjacentBig: return "AdjacentBig";
    case StrategyKind::AdjacentFourFour: return "AdjacentFourFour";
    case StrategyKind::Fallback: return "Fallback";
  }
  return "Unknown";
}

struct Strategy {
  StrategyKind kind = StrategyKind::Fallback;
  int level = 0;
  bool operator==(const Strategy&) const = default;
};

/// First matching rule in the order SingleLevel, AdjacentBig,
/// AdjacentFourFour; smallest level wins within a rule; levels wrap mod d.
inline Strategy dispatch(const LevelProfile& p, int m, int /*e*/) {
  const int d = p.d();
  for (int k = 0; k < d; ++k) {
    if (p.at(k) >= m + 7) return {StrategyKind::SingleLevel, k};
  }
  for (int k = 0; k < d; ++k) {
    if (p.at(k) >= m + 3 && p.at(k + 1) >= 2) return {StrategyKind::AdjacentBig, k};
  }
  for (int k = 0; k < d; ++k) {
    if (p.at(k) >= 4 && p.at(k + 1) >= 4) return {StrategyKind::AdjacentFourFour, k};
  }
  return {StrategyKind::Fallback, 0};
}

/// A contraction tree reaching the Hensel threshold in `working`, the form
/// rotated so the strategy's level sits at 0.
struct StrategyOutcome {
  RotatedForm working;
  DerivedVariable witness;
};

namespace detail {

// The lemma strategies on a form already rotated so that the strategy level is 0.
class LemmaRunner {
 public:
  explicit LemmaRunner(const AdditiveForm& g) : g_(g), ctx_(g), e_(g.field().e()) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.absolute_level(i) == 0) level0_.push_back(i);
      if (g.absolute_level(i) == 1) level1_.push_back(i);
    }
  }

  std::size_t level0_count() const { return level0_.size(); }
  std::size_t level1_count() const { return level1_.size(); }

  DerivedVariable single_level() {
    DerivedVariable w1 = make_top_from_level0();
    if (done(w1)) return w1;
    DerivedVariable w2 = make_top_from_level0();
    return combine(w1, w2);
  }

  DerivedVariable adjacent_big() {
    DerivedVariable w1 = make_top_from_level0();
    if (done(w1)) return w1;
    DerivedVariable w2 = adjacent_core();
    return combine(w1, w2);
  }

  DerivedVariable adjacent_four_four() {
    DerivedVariable w1 = adjacent_core();
    if (done(w1)) return w1;
    DerivedVariable w2 = adjacent_core();
    return combine(w1, w2);
  }

 private:
  int top() const { return 2 * e_; }
  bool done(const DerivedVariable& v) const { return v.is_liftable(e_); }

  [[noreturn]] void fail(const std::string& why) const { throw Error(ErrorKind::StrategyFailed, why); }

  std::size_t take(std::vector<std::size_t>& pool, std::size_t at) {
    const std::size_t v = pool.at(at);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(at));
    return v;
  }
  void consume(std::vector<std::size_t>& pool, const DerivedVariable& v) {
    std::erase_if(pool, [&](std::size_t i) { return v.uses(i); });
  }

  // Level-0 pair pushed through the even levels below 2e: it lands on an odd
  // level, on 2e, or higher.
  DerivedVariable land_level0_pair(std::size_t i, std::size_t j) const {
    return ctx_.bypass(ctx_.contract_pair(ctx_.lift_original(i), ctx_.lift_original(j)), top());
  }

  // A variable at level >= 2e built from level-0 variables only: a pair that
  // lands on 2e directly, or two disjoint pairs landing on the same odd level
  // (mod d) found by the bins lemma, contracted and pushed up to 2e.
  DerivedVariable make_top_from_level0() {
    auto& pool = level0_;
    if (pool.size() < 2) fail("fewer than two level-0 variables left");
    const int n = static_cast<int>(pool.size());
    const int bins = g_.m();
    BinAssignment assignment(n, bins);
    std::vector<std::optional<DerivedVariable>> landed(assignment.pairs().size());
    for (std::size_t p = 0; p < assignment.pairs().size(); ++p) {
      const auto [a, b] = assignment.pairs()[p];
      DerivedVariable v = land_level0_pair(pool[static_cast<std::size_t>(a)], pool[static_cast<std::size_t>(b)]);
      if (done(v) || v.level().reaches(top())) {
        consume(pool, v);
        return v;
      }
      const int j = v.level().value();
      if (j % 2 == 0) fail("level-0 pair stopped at even level " + std::to_string(j) + " below 2e");
      assignment.assign(p, ((j % g_.d()) - 1) / 2);
      landed[p] = std::move(v);
    }
    const auto hit = find_disjoint_same_bin(assignment);
    if (!hit) fail("no two disjoint level-0 pairs share an odd landing level");
    DerivedVariable p1 = *landed[assignment.index_of(hit->first.first, hit->first.second)];
    DerivedVariable p2 = *landed[assignment.index_of(hit->second.first, hit->second.second)];
    const int j1 = p1.level().value();
    const int j2 = p2.level().value();
    if (j1 < j2) p1 = ctx_.raise(p1, (j2 - j1) / g_.d());
    if (j2 < j1) p2 = ctx_.raise(p2, (j1 - j2) / g_.d());
    DerivedVariable w = ctx_.bypass(ctx_.contract_pair(p1, p2), top());
    consume(pool, w);
    if (!done(w) && !w.level().reaches(top())) {
      fail("paired odd landings stopped at level " + w.level().str() + " below 2e");
    }
    return w;
  }

  // One level-0 pair and level-1 variables give a variable at level >= 2e.
  DerivedVariable adjacent_core() {
    if (level0_.size() < 2) fail("adjacent step needs two level-0 variables");
    if (level1_.empty()) fail("adjacent step needs a level-1 variable");
    const std::size_t a0 = take(level0_, 0);
    const std::size_t a1 = take(level0_, 0);
    DerivedVariable y0 = land_level0_pair(a0, a1);
    if (done(y0) || y0.level().reaches(top())) return y0;
    const int i = y0.level().value();

    DerivedVariable mixed = y0;
    if (i == 1) {
      // y0 sits on level 1 together with the level-1 originals.
      mixed = ctx_.contract_pair(y0, ctx_.lift_original(take(level1_, 0)));
    } else {
      if (level1_.size() < 2) fail("adjacent step needs two level-1 variables");
      const std::size_t b0 = take(level1_, 0);
      const std::size_t b1 = take(level1_, 0);
      DerivedVariable y1 = ctx_.bypass(ctx_.contract_pair(ctx_.lift_original(b0), ctx_.lift_original(b1)), top());
      if (done(y1)) return y1;
      if (!y1.level().is_finite()) fail("level-1 pair cancelled without a usable pivot");
      const int j = y1.level().value();
      if (j == i) fail("level-1 pair landed on odd level " + std::to_string(j));
      std::optional<DerivedVariable> aligned;
      if (j < i) {
        // y0 is free at the even level j < 2e
        aligned = ctx_.steer(y0, j);
        if (!aligned) fail("cannot stop the level-0 pair at level " + std::to_string(j));
        mixed = ctx_.contract_pair(*aligned, y1);
      } else {
        // y1 is free at the odd level i
        aligned = ctx_.steer(y1, i);
        if (!aligned) fail("cannot stop the level-1 pair at level " + std::to_string(i));
        mixed = ctx_.contract_pair(y0, *aligned);
      }
    }
    // Both parities below 2e are now free.
    DerivedVariable w = ctx_.bypass(mixed, top());
    if (!done(w) && !w.level().reaches(top())) fail("mixed contraction stopped at level " + w.level().str());
    return w;
  }

  DerivedVariable combine(const DerivedVariable& w1, const DerivedVariable& w2) const {
    if (done(w1)) return w1;
    if (done(w2)) return w2;
    if (w1.level() != w2.level()) {
      fail("level-2e variables disagree: " + w1.level().str() + " vs " + w2.level().str());
    }
    DerivedVariable w = ctx_.contract_pair(w1, w2);
    if (!done(w)) fail("final contraction reached only level " + w.level().str());
    return w;
  }

  const AdditiveForm& g_;
  Contractor ctx_;
  int e_;
  std::vector<std::size_t> level0_;
  std::vector<std::size_t> level1_;
};

inline RotatedForm bring_to_zero(const AdditiveForm& form, int k) {
  const int d = form.d();
  return rotate(form, ((d - k) % d + d) % d);
}

}  // namespace detail

/// Strategy for a level with at least m + 7 variables.
inline StrategyOutcome solve_single_level(const AdditiveForm& form, int k) {
  RotatedForm working = detail::bring_to_zero(form, k);
  detail::LemmaRunner runner(working.form);
  if (static_cast<int>(runner.level0_count()) < form.m() + 7) {
    throw Error(ErrorKind::PreconditionViolated, "level " + std::to_string(k) + " holds fewer than m+7 variables");
  }
  DerivedVariable w = runner.single_level();
  return StrategyOutcome{std::move(working), std::move(w)};
}

enum class AdjacentVariant { Big, FourFour };

/// Strategy for levels k and k+1 holding (m+3, 2) or (4, 4) variables.
inline StrategyOutcome solve_adjacent(const AdditiveForm& form, int k, AdjacentVariant variant) {
  RotatedForm working = detail::bring_to_zero(form, k);
  detail::LemmaRunner runner(working.form);
  const auto s0 = static_cast<int>(runner.level0_count());
  const auto s1 = static_cast<int>(runner.level1_count());
  if (variant == AdjacentVariant::Big && (s0 < form.m() + 3 || s1 < 2)) {
    throw Error(ErrorKind::PreconditionViolated, "AdjacentBig needs (m+3, 2) variables on levels k, k+1");
  }
  if (variant == AdjacentVariant::FourFour && (s0 < 4 || s1 < 4)) {
    throw Error(ErrorKind::PreconditionViolated, "AdjacentFourFour needs (4, 4) variables on levels k, k+1");
  }
  DerivedVariable w = variant == AdjacentVariant::Big ? runner.adjacent_big() : runner.adjacent_four_four();
  return StrategyOutcome{std::move(working), std::move(w)};
}

struct FallbackResult {
  std::optional<DerivedVariable> witness;
  std::size_t nodes = 0;
};

/// Best-first search over contractions of `form` (levels taken as they are).
/// The pool starts with the originals; the best pending contraction (highest
/// level, then fewest originals) joins the pool and is paired with every
/// disjoint pool member on its level, each pairing contributing one candidate
/// per prefix of its greedy steering chain. Pool entries are deduplicated by
/// (level, value). Succeeds on the first Hensel-liftable variable.
inline FallbackResult generic_fallback(const AdditiveForm& form, std::size_t budget,
                                       std::size_t max_pending = 4'000'000) {
  FallbackResult out;
  if (budget == 0) return out;
  const Contractor ctx(form);
  const int e = ctx.e();

  struct Pending {
    int level;
    std::size_t used;
    std::uint64_t seq;
    std::size_t a, b;  // pool indices; b == npos for an original
    int steps;         // greedy steering moves after the merge
  };
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  auto worse = [](const Pending& x, const Pending& y) {
    if (x.level != y.level) return x.level < y.level;
    if (x.used != y.used) return x.used > y.used;
    return x.seq > y.seq;
  };
  std::priority_queue<Pending, std::vector<Pending>, decltype(worse)> pending(worse);
  std::vector<DerivedVariable> pool;
  std::unordered_map<int, std::vector<std::size_t>> by_level;
  std::unordered_map<std::size_t, std::vector<std::size_t>> seen;
  std::uint64_t seq = 0;

  for (std::size_t i = 0; i < form.size(); ++i) {
    DerivedVariable v = ctx.lift_original(i);
    if (v.is_liftable(e)) {
      out.witness = std::move(v);
      return out;
    }
    pending.push(Pending{v.level().value(), 1, seq++, i, npos, 0});
  }

  auto materialize = [&](const Pending& p) {
    if (p.b == npos) return ctx.lift_original(p.a);
    DerivedVariable v = ctx.contract_pair(pool[p.a], pool[p.b]);
    for (int s = 0; s < p.steps; ++s) ctx.apply(v, *ctx.find_move(v, v.level().value()));
    return v;
  };

  while (!pending.empty() && out.nodes < budget) {
    const Pending top = pending.top();
    pending.pop();
    DerivedVariable v = materialize(top);
    const std::size_t key = v.value().hash() ^ (static_cast<std::size_t>(top.level) * 0x9e3779b97f4a7c15ULL);
    auto& bucket = seen[key];
    const bool duplicate = std::any_of(bucket.begin(), bucket.end(), [&](std::size_t idx) {
      return pool[idx].level() == v.level() && pool[idx].value() == v.value();
    });
    if (duplicate) continue;
    const std::size_t idx = pool.size();
    bucket.push_back(idx);
    pool.push_back(std::move(v));
    ++out.nodes;
    auto& peers = by_level[top.level];
    for (std::size_t other : peers) {
      if (!pool[idx].disjoint_with(pool[other])) continue;
      DerivedVariable c = ctx.contract_pair(pool[idx], pool[other]);
      int steps = 0;
      while (true) {
        if (c.is_liftable(e)) {
          out.witness = std::move(c);
          return out;
        }
        if (!c.level().is_finite()) break;
        if (pending.size() < max_pending) {
          pending.push(Pending{c.level().value(), c.used_count(), seq++, idx, other, steps});
        }
        auto mv = ctx.find_move(c, c.level().value());
        if (!mv) break;
        ctx.apply(c, *mv);
        ++steps;
      }
    }
    peers.push_back(idx);
  }
  return out;
}

struct HenselResult {
  std::vector<RingElement> assignment;
  std::vector<Valuation> residuals;  // valuation of F before the first step and after each step
  int iterations = 0;
};

/// Newton iteration on the pivot coordinate t: t <- t - F / F', with
/// F' = d a_p t^{d-1}. Needs a unit pivot and v(F(b)) >= 2e + 2 l_p + 1,
/// l_p = v(a_p).
inline HenselResult hensel_lift(const AdditiveForm& form, std::vector<RingElement> b, std::size_t pivot, int n_target) {
  const Field& f = form.field();
  if (b.size() != form.size()) throw Error(ErrorKind::LengthMismatch, "assignment length differs from form size");
  if (pivot >= b.size() || !b[pivot].is_unit()) throw Error(ErrorKind::PreconditionViolated, "pivot coordinate is not a unit");
  if (n_target > f.precision()) {
    throw Error(ErrorKind::PrecisionExhausted, "target " + std::to_string(n_target) + " exceeds working precision");
  }
  HenselResult out;
  RingElement value = evaluate(form, b);
  out.residuals.push_back(value.valuation());
  if (value.valuation().reaches(n_target)) {
    out.assignment = std::move(b);
    return out;
  }
  const int lp = form.absolute_level(pivot);
  const int threshold = 2 * f.e() + 2 * lp + 1;
  if (!value.valuation().reaches(threshold)) {
    throw Error(ErrorKind::HenselPreconditionFailed, "residual valuation " + value.valuation().str() + " below " +
                                                         std::to_string(threshold));
  }
  const auto d = static_cast<std::uint64_t>(form.d());
  const RingElement& a = form.coefficient(pivot);
  for (int iter = 0; iter < 64; ++iter) {
    const RingElement& t = b[pivot];
    const RingElement deriv = static_cast<std::int64_t>(d) * (a * pow(t, d - 1));
    const auto [vf, wf] = unit_part(value);
    const auto [vd, wd] = unit_part(deriv);
    const RingElement step = f.pi_power(vf.value() - vd.value()) * wf * inverse(wd);
    b[pivot] = t - step;
    ++out.iterations;
    const Valuation before = value.valuation();
    value = evaluate(form, b);
    out.residuals.push_back(value.valuation());
    if (value.valuation().reaches(n_target)) {
      out.assignment = std::move(b);
      return out;
    }
    if (!(before < value.valuation())) {
      throw Error(ErrorKind::PrecisionExhausted, "Newton residual stopped improving at " + value.valuation().str());
    }
  }
  throw Error(ErrorKind::PrecisionExhausted, "Newton iteration did not reach the target");
}

struct SolveOptions {
  std::optional<int> n_target;  // defaults to the field precision
  std::size_t budget = kDefaultBudget;
  std::uint64_t seed = kDefaultSeed;
  std::optional<StrategyKind> force;  // run this strategy instead of dispatching
};

struct SolveReport {
  int rotation = 0;              // normalizing rotation
  int strategy_rotation = 0;     // rotation the certificate was built in
  Strategy strategy;             // dispatched strategy
  bool used_fallback = false;
  std::string fallback_reason;
  std::size_t fallback_nodes = 0;
  int working_precision = 0;
  std::vector<LogStep> log;
  std::optional<ZeroCertificate> certificate;
  Valuation achieved = Valuation::of(0);
  int hensel_iterations = 0;
  std::vector<Valuation> hensel_residuals;
  bool at_or_above_bound = false;
  double wall_ms = 0;
  std::string note;
};

/// Working precision large enough for rotation, Hensel lifting to
/// n_target + d and pull-back, capped by the 64-bit digit storage.
inline int working_precision(const AdditiveForm& form, int n_target) {
  const Field& f = form.field();
  int max_level = 0;
  for (std::size_t i = 0; i < form.size(); ++i) max_level = std::max(max_level, form.absolute_level(i));
  const int wanted = std::max(f.precision(), max_level + n_target + form.d() + 2 * f.e());
  const int cap = (Field::kMaxCoeffBits - Field::kGuardBits) * f.e();
  return std::min(wanted, cap);
}

inline SolveReport solve(const AdditiveForm& form, const SolveOptions& options = {}) {
  const auto started = std::chrono::steady_clock::now();
  SolveReport report;
  const int bound = variables_bound(form.d());
  report.at_or_above_bound = static_cast<int>(form.size()) >= bound;
  const int n_target = options.n_target.value_or(form.field().precision());
  if (n_target < 1 || n_target > form.field().precision()) {
    throw Error(ErrorKind::PrecisionExhausted, "target precision must lie in [1, field precision]");
  }
  const int d = form.d();
  const int e = form.field().e();
  auto finish = [&]() {
    report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return report;
  };
  if (form.size() == 0) {
    report.note = "empty form";
    return finish();
  }

  const FieldPtr work = form.field().with_precision(working_precision(form, n_target));
  report.working_precision = work->precision();
  const AdditiveForm lifted = form.in(work);
  const LevelProfile prof = profile(lifted);
  report.rotation = normalizing_rotation(prof);
  const LevelProfile normalized = prof.shifted(report.rotation);
  report.strategy = dispatch(normalized, form.m(), e);
  const StrategyKind kind = options.force.value_or(report.strategy.kind);

  std::optional<RotatedForm> working;
  std::optional<DerivedVariable> witness;
  if (kind != StrategyKind::Fallback) {
    // The strategy level counts from the normalized form; move it to 0.
    Strategy s = report.strategy;
    if (options.force && s.kind != kind) s = Strategy{kind, 0};
    const int k_original = ((s.level - report.rotation) % d + d) % d;
    try {
      StrategyOutcome o = kind == StrategyKind::SingleLevel
                              ? solve_single_level(lifted, k_original)
                              : solve_adjacent(lifted, k_original,
                                               kind == StrategyKind::AdjacentBig ? AdjacentVariant::Big
                                                                                 : AdjacentVariant::FourFour);
      working = std::move(o.working);
      witness = std::move(o.witness);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::StrategyFailed && err.kind() != ErrorKind::PreconditionViolated) throw;
      report.fallback_reason = err.what();
    }
  }
  if (!witness) {
    report.used_fallback = true;
    // Try every rotation, normalized first, sharing the node budget.
    std::size_t left = options.budget;
    for (int t = 0; t < d && left > 0 && !witness; ++t) {
      RotatedForm g = rotate(lifted, (report.rotation + t) % d);
      FallbackResult fr = generic_fallback(g.form, left);
      report.fallback_nodes += fr.nodes;
      left -= std::min(left, fr.nodes);
      if (fr.witness) {
        working = std::move(g);
        witness = std::move(fr.witness);
      }
    }
  }
  if (!witness) {
    report.note = report.at_or_above_bound ? "unsolved at or above the variables bound" : "unsolved";
    return finish();
  }

  report.strategy_rotation = working->rotation.r;
  report.log = contraction_log(*witness);
  const DerivedVariable& w = *witness;
  std::vector<RingElement> y = w.expand(working->form);
  const std::size_t hensel_pivot = w.leaves()[*w.pivot_leaf()].index;
  const int lift_target = std::min(work->precision(), n_target + working->rotation.r);
  HenselResult hr = hensel_lift(working->form, std::move(y), hensel_pivot, lift_target);
  report.hensel_iterations = hr.iterations;
  report.hensel_residuals = hr.residuals;
  auto [x, unit_index] = pull_back(lifted, working->rotation, hr.assignment);

  ZeroCertificate cert;
  cert.n_target = n_target;
  cert.pivot = x[hensel_pivot].is_unit() ? hensel_pivot : unit_index;
  for (const auto& xi : x) cert.assignment.push_back(xi.in(form.field_ptr()));
  const Verification check = verify_certificate(form, cert);
  report.achieved = check.valuation;
  if (!check.passed) {
    report.note = "certificate failed verification at valuation " + check.valuation.str();
    return finish();
  }
  report.certificate = std::move(cert);
  return finish();
}

}  // namespace ramified_zero
