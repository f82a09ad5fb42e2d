#pragma once

// Contractions: two variables at the same level are replaced by one new
// variable z through x_i = b_i z, and the new coefficient is the value the
// old terms take. A derived variable remembers its whole history as a
// binary tree over the original variables, so it can always be expanded
// back into an assignment of the original form.
//
// Steering: multiplying the substitution of a subtree N by (1 + pi^k),
// 1 <= k < e, changes the value by contrib(N) * ((1 + pi^k)^d - 1), whose
// valuation is exactly level(N) + 2k. Such a change can push a contraction
// past that level (bypass) or pin it there (stop). Levels are absolute
// valuations in the form the contractor was built from, never reduced mod d.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ramified_zero/error.hpp"
#include "ramified_zero/form.hpp"
#include "ramified_zero/ring.hpp"

namespace ramified_zero {

/// Multiply the substitution of every leaf under `node` by (1 + pi^k).
struct SteerMove {
  int k = 1;
  std::size_t node = 0;
  bool operator==(const SteerMove&) const = default;
};

struct Leaf {
  std::size_t index = 0;     // original variable
  RingElement multiplier;    // unit part of the substitution
  int scale = 0;             // x_index = pi^scale * multiplier * z
  int base_level = 0;        // valuation of the original coefficient
  RingElement term;          // a_index * (pi^scale * multiplier)^d
};

enum class NodeKind { Leaf, Merge, Raise };

struct AppliedMove {
  int k = 1;
  std::vector<std::size_t> originals;  // variables whose substitution was scaled
  Valuation level_after = Valuation::of(0);
};

struct RecordNode {
  NodeKind kind = NodeKind::Leaf;
  std::size_t first = 0, last = 0;   // leaf range [first, last)
  std::size_t left = 0, right = 0;   // children for Merge, child for Raise (left)
  Valuation level = Valuation::of(0);  // level when the node was formed
  std::vector<AppliedMove> moves;      // steering applied while this node was the root
  int raise_by = 0;
};

class DerivedVariable {
 public:
  const RingElement& value() const { return value_; }
  Valuation level() const { return level_; }
  const std::vector<Leaf>& leaves() const { return leaves_; }
  const std::vector<RecordNode>& nodes() const { return nodes_; }
  std::size_t root() const { return nodes_.size() - 1; }

  std::vector<std::size_t> used() const {
    std::vector<std::size_t> out;
    for (const auto& l : leaves_) out.push_back(l.index);
    std::sort(out.begin(), out.end());
    return out;
  }
  std::size_t used_count() const { return leaves_.size(); }
  bool uses(std::size_t i) const {
    const std::size_t w = i / 64;
    return w < used_bits_.size() && ((used_bits_[w] >> (i % 64)) & 1U);
  }
  bool disjoint_with(const DerivedVariable& o) const {
    const std::size_t n = std::min(used_bits_.size(), o.used_bits_.size());
    for (std::size_t w = 0; w < n; ++w) {
      if (used_bits_[w] & o.used_bits_[w]) return false;
    }
    return true;
  }

  RingElement contribution(std::size_t node) const {
    const RecordNode& n = nodes_.at(node);
    RingElement s = leaves_[n.first].term;
    for (std::size_t i = n.first + 1; i < n.last; ++i) s += leaves_[i].term;
    return s;
  }
  Valuation node_level(std::size_t node) const { return contribution(node).valuation(); }

  /// Leaf whose original variable serves as the Hensel pivot: unscaled,
  /// lowest base level, smallest index.
  std::optional<std::size_t> pivot_leaf() const {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < leaves_.size(); ++i) {
      const Leaf& l = leaves_[i];
      if (l.scale != 0) continue;
      if (!best || l.base_level < leaves_[*best].base_level ||
          (l.base_level == leaves_[*best].base_level && l.index < leaves_[*best].index)) {
        best = i;
      }
    }
    return best;
  }

  /// 2e + 2 l_p + 1 for the pivot level l_p.
  std::optional<int> hensel_threshold(int e) const {
    auto p = pivot_leaf();
    if (!p) return std::nullopt;
    return 2 * e + 2 * leaves_[*p].base_level + 1;
  }

  /// Level high enough for Hensel lifting (or an exact zero).
  bool is_liftable(int e) const {
    if (level_.is_at_least_precision()) return pivot_leaf().has_value();
    auto t = hensel_threshold(e);
    return t && level_.reaches(*t);
  }

  /// Assignment of the original variables realizing this variable with z = 1.
  std::vector<RingElement> expand(const AdditiveForm& form) const {
    std::vector<RingElement> x(form.size(), form.field().zero());
    for (const auto& l : leaves_) x.at(l.index) = form.field().pi_power(l.scale) * l.multiplier.in(form.field_ptr());
    return x;
  }

  std::string label() const {
    if (leaves_.size() == 1 && nodes_.size() == 1) return "x" + std::to_string(leaves_[0].index);
    std::ostringstream os;
    os << "{";
    const auto u = used();
    for (std::size_t i = 0; i < u.size(); ++i) os << (i ? "," : "") << "x" << u[i];
    os << "}";
    return os.str();
  }

 private:
  friend class Contractor;
  DerivedVariable(RingElement value) : value_(std::move(value)), level_(value_.valuation()) {}

  RingElement value_;
  Valuation level_;
  std::vector<Leaf> leaves_;
  std::vector<RecordNode> nodes_;
  std::vector<std::uint64_t> used_bits_;
};

struct SteeringOutcome {
  Valuation level;
  std::vector<SteerMove> steering;
};

/// Contraction engine bound to one form.
class Contractor {
 public:
  explicit Contractor(const AdditiveForm& form) : form_(form), e_(form.field().e()) {
    const Field& f = form.field();
    const RingElement one = f.one();
    const RingElement pi = f.pi();
    RingElement pk = one;
    multiplier_.push_back(one);
    gain_.push_back(f.zero());
    for (int k = 1; k < e_; ++k) {
      pk = pk * pi;
      const RingElement mu = one + pk;
      multiplier_.push_back(mu);
      gain_.push_back(pow(mu, static_cast<std::uint64_t>(form.d())));
    }
    pi_d_ = f.pi_power(form.d());
  }

  const AdditiveForm& form() const { return form_; }
  int e() const { return e_; }
  int d() const { return form_.d(); }

  DerivedVariable lift_original(std::size_t i) const {
    if (i >= form_.size()) throw Error(ErrorKind::PreconditionViolated, "variable index out of range");
    const RingElement& a = form_.coefficient(i);
    DerivedVariable v(a);
    v.leaves_.push_back(Leaf{i, form_.field().one(), 0, form_.absolute_level(i), a});
    RecordNode n;
    n.kind = NodeKind::Leaf;
    n.first = 0;
    n.last = 1;
    n.level = v.level_;
    v.nodes_.push_back(std::move(n));
    v.used_bits_.assign(i / 64 + 1, 0);
    v.used_bits_[i / 64] |= std::uint64_t{1} << (i % 64);
    return v;
  }

  /// Merges two variables at the same level, then applies the steering moves
  /// in order. Node indices refer to the merged record: a's nodes, then b's,
  /// then the new root. Node 0 is the left-most leaf of a.
  DerivedVariable contract_pair(const DerivedVariable& a, const DerivedVariable& b,
                                const std::vector<SteerMove>& steering = {}) const {
    DerivedVariable v = merge(a, b);
    for (const auto& mv : steering) apply(v, mv);
    return v;
  }

  /// Every level reachable by steering the subtrees of a and b, with a move
  /// set reproducing it through contract_pair.
  std::vector<SteeringOutcome> achievable_levels(const DerivedVariable& a, const DerivedVariable& b) const {
    const DerivedVariable raw = merge(a, b);
    std::vector<SteerMove> moves;
    std::vector<Valuation> seen;
    for (std::size_t n = 0; n < raw.root(); ++n) {
      const Valuation lv = raw.node_level(n);
      if (!lv.is_finite() || std::find(seen.begin(), seen.end(), lv) != seen.end()) continue;
      seen.push_back(lv);
      for (int k = 1; k < e_; ++k) moves.push_back(SteerMove{k, n});
    }
    if (moves.size() > 20) throw Error(ErrorKind::PreconditionViolated, "too many steering anchors to enumerate");
    std::vector<SteeringOutcome> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << moves.size()); ++mask) {
      DerivedVariable v = raw;
      std::vector<SteerMove> chosen;
      for (std::size_t j = 0; j < moves.size(); ++j) {
        if ((mask >> j) & 1U) {
          apply(v, moves[j]);
          chosen.push_back(moves[j]);
        }
      }
      const bool dup = std::any_of(out.begin(), out.end(), [&](const SteeringOutcome& o) { return o.level == v.level(); });
      if (!dup) out.push_back(SteeringOutcome{v.level(), std::move(chosen)});
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.level < y.level; });
    return out;
  }

  /// Contraction landing exactly at `target`, or nullopt.
  std::optional<DerivedVariable> steer_to(const DerivedVariable& a, const DerivedVariable& b, int target) const {
    return steer(merge(a, b), target);
  }

  /// Contraction landing at `target` or above, or nullopt.
  std::optional<DerivedVariable> steer_at_least(const DerivedVariable& a, const DerivedVariable& b, int target) const {
    DerivedVariable v = bypass(merge(a, b), target);
    if (!v.level().reaches(target)) return std::nullopt;
    return v;
  }

  /// A move whose change has valuation exactly `target`, if any subtree allows it.
  std::optional<SteerMove> find_move(const DerivedVariable& v, int target) const {
    for (std::size_t n = 0; n < v.nodes_.size(); ++n) {
      const Valuation lv = v.node_level(n);
      if (!lv.is_finite()) continue;
      const int gap = target - lv.value();
      if (gap >= 2 && gap <= 2 * e_ - 2 && gap % 2 == 0) return SteerMove{gap / 2, n};
    }
    return std::nullopt;
  }

  /// Levels at which some subtree can stop or bypass the contraction.
  std::vector<int> free_levels(const DerivedVariable& v) const {
    std::vector<int> out;
    for (std::size_t n = 0; n < v.nodes_.size(); ++n) {
      const Valuation lv = v.node_level(n);
      if (!lv.is_finite()) continue;
      for (int k = 1; k < e_; ++k) out.push_back(lv.value() + 2 * k);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Pushes v upward while its level is below `ceiling` and steerable.
  DerivedVariable bypass(DerivedVariable v, int ceiling) const {
    while (v.level().is_finite() && v.level().value() < ceiling) {
      auto mv = find_move(v, v.level().value());
      if (!mv) break;
      apply(v, *mv);
    }
    return v;
  }

  /// Steers v to land exactly at `target`.
  std::optional<DerivedVariable> steer(DerivedVariable v, int target) const {
    for (int guard = 0; guard < 4 * e_ + 8; ++guard) {
      const Valuation lv = v.level();
      if (lv == Valuation::of(target)) return v;
      if (lv.reaches(target + 1)) {
        auto mv = find_move(v, target);
        if (!mv) return std::nullopt;
        apply(v, *mv);
      } else {
        auto mv = find_move(v, lv.value());
        if (!mv) return std::nullopt;
        apply(v, *mv);
      }
    }
    return std::nullopt;
  }

  /// Substitutes x_i -> pi^times x_i for every leaf: the level rises by d * times.
  DerivedVariable raise(const DerivedVariable& a, int times) const {
    if (times < 0) throw Error(ErrorKind::PreconditionViolated, "negative raise");
    if (times == 0) return a;
    DerivedVariable v = a;
    RingElement factor = pow(pi_d_, static_cast<std::uint64_t>(times));
    for (auto& l : v.leaves_) {
      l.scale += times;
      l.term = l.term * factor;
    }
    v.value_ = v.value_ * factor;
    v.level_ = v.value_.valuation();
    RecordNode n;
    n.kind = NodeKind::Raise;
    n.first = 0;
    n.last = v.leaves_.size();
    n.left = v.root();
    n.level = v.level_;
    n.raise_by = times;
    v.nodes_.push_back(std::move(n));
    return v;
  }

  void apply(DerivedVariable& v, const SteerMove& mv) const {
    if (mv.k < 1 || mv.k >= e_) {
      throw Error(ErrorKind::BadSteering, "steering exponent k=" + std::to_string(mv.k) + " outside [1, e)");
    }
    if (mv.node >= v.nodes_.size()) throw Error(ErrorKind::BadSteering, "steering node out of range");
    const RecordNode& n = v.nodes_[mv.node];
    const auto k = static_cast<std::size_t>(mv.k);
    RingElement delta = form_.field().zero();
    AppliedMove record{mv.k, {}, Valuation::of(0)};
    for (std::size_t i = n.first; i < n.last; ++i) {
      Leaf& l = v.leaves_[i];
      const RingElement scaled = l.term * gain_[k];
      delta += scaled - l.term;
      l.term = scaled;
      l.multiplier = l.multiplier * multiplier_[k];
      record.originals.push_back(l.index);
    }
    v.value_ += delta;
    v.level_ = v.value_.valuation();
    record.level_after = v.level_;
    v.nodes_.back().moves.push_back(std::move(record));
  }

 private:
  DerivedVariable merge(const DerivedVariable& a, const DerivedVariable& b) const {
    if (!a.level().is_finite() || a.level() != b.level()) {
      throw Error(ErrorKind::LevelMismatch, "contraction needs two variables at the same finite level (" +
                                                a.level().str() + " vs " + b.level().str() + ")");
    }
    if (!a.disjoint_with(b)) throw Error(ErrorKind::OverlappingSupport, "operands share an original variable");
    DerivedVariable v(a.value_ + b.value_);
    v.leaves_ = a.leaves_;
    v.leaves_.insert(v.leaves_.end(), b.leaves_.begin(), b.leaves_.end());
    v.nodes_ = a.nodes_;
    const std::size_t leaf_offset = a.leaves_.size();
    const std::size_t node_offset = a.nodes_.size();
    for (RecordNode n : b.nodes_) {
      n.first += leaf_offset;
      n.last += leaf_offset;
      if (n.kind != NodeKind::Leaf) {
        n.left += node_offset;
        n.right += node_offset;
      }
      v.nodes_.push_back(std::move(n));
    }
    RecordNode root;
    root.kind = NodeKind::Merge;
    root.first = 0;
    root.last = v.leaves_.size();
    root.left = a.root();
    root.right = node_offset + b.root();
    root.level = v.level_;
    v.nodes_.push_back(std::move(root));
    v.used_bits_ = a.used_bits_;
    if (v.used_bits_.size() < b.used_bits_.size()) v.used_bits_.resize(b.used_bits_.size(), 0);
    for (std::size_t w = 0; w < b.used_bits_.size(); ++w) v.used_bits_[w] |= b.used_bits_[w];
    return v;
  }

  AdditiveForm form_;
  int e_;
  std::vector<RingElement> multiplier_;  // 1 + pi^k
  std::vector<RingElement> gain_;        // (1 + pi^k)^d
  RingElement pi_d_ = form_.field().one();
};

/// One audit line per tree node, in the order the tree was built.
struct LogStep {
  std::string op;
  std::vector<std::string> inputs;
  std::vector<AppliedMove> steering;
  Valuation result_level = Valuation::of(0);
};

inline std::vector<LogStep> contraction_log(const DerivedVariable& v) {
  std::vector<LogStep> out;
  std::vector<std::string> names(v.nodes().size());
  int next = 0;
  for (std::size_t n = 0; n < v.nodes().size(); ++n) {
    const RecordNode& node = v.nodes()[n];
    LogStep step;
    step.result_level = node.level;
    switch (node.kind) {
      case NodeKind::Leaf:
        names[n] = "x" + std::to_string(v.leaves()[node.first].index);
        continue;
      case NodeKind::Merge:
        step.op = "contract";
        step.inputs = {names[node.left], names[node.right]};
        break;
      case NodeKind::Raise:
        step.op = "raise:" + std::to_string(node.raise_by);
        step.inputs = {names[node.left]};
        break;
    }
    names[n] = "y" + std::to_string(next++);
    out.push_back(step);
    if (!node.moves.empty()) {
      LogStep steer;
      steer.op = "steer";
      steer.inputs = {names[n]};
      steer.steering = node.moves;
      steer.result_level = node.moves.back().level_after;
      out.push_back(std::move(steer));
    }
  }
  return out;
}

}  // namespace ramified_zero
