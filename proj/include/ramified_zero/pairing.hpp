#pragma once

// Two disjoint pairs in one bin. With every unordered pair of n objects put
// into one of m bins, n >= m + 3 forces two disjoint pairs to share a bin.
// A bin without disjoint pairs is a star (all pairs through one object) or
// a subset of a triangle.

#include <cstdint>
#include <optional>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "ramified_zero/error.hpp"

namespace ramified_zero {

using ObjectPair = std::pair<int, int>;  // first < second

inline int pair_count(int n) { return n * (n - 1) / 2; }

/// Pairs of [0, n) in lexicographic order.
inline std::vector<ObjectPair> all_pairs(int n) {
  std::vector<ObjectPair> out;
  out.reserve(static_cast<std::size_t>(pair_count(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) out.emplace_back(i, j);
  }
  return out;
}

inline bool disjoint(const ObjectPair& a, const ObjectPair& b) {
  return a.first != b.first && a.first != b.second && a.second != b.first && a.second != b.second;
}

class BinAssignment {
 public:
  BinAssignment(int n, int m) : n_(n), m_(m), pairs_(all_pairs(n)), bin_(pairs_.size(), 0) {
    if (n < 0 || m < 1) throw Error(ErrorKind::PreconditionViolated, "need n >= 0 objects and m >= 1 bins");
  }

  int n() const { return n_; }
  int m() const { return m_; }
  const std::vector<ObjectPair>& pairs() const { return pairs_; }
  const std::vector<int>& bins() const { return bin_; }

  int bin_of(std::size_t pair_index) const { return bin_.at(pair_index); }
  int bin_of(int i, int j) const { return bin_.at(index_of(i, j)); }

  void assign(std::size_t pair_index, int bin) {
    if (bin < 0 || bin >= m_) throw Error(ErrorKind::PreconditionViolated, "bin index out of range");
    bin_.at(pair_index) = bin;
  }
  void assign(int i, int j, int bin) { assign(index_of(i, j), bin); }

  std::size_t index_of(int i, int j) const {
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= n_ || i == j) throw Error(ErrorKind::PreconditionViolated, "not a pair of distinct objects");
    // pairs before row i, then offset in row i
    const int before = i * n_ - i * (i + 1) / 2;
    return static_cast<std::size_t>(before + (j - i - 1));
  }

 private:
  int n_;
  int m_;
  std::vector<ObjectPair> pairs_;
  std::vector<int> bin_;
};

struct DisjointSameBin {
  ObjectPair first;
  ObjectPair second;
  int bin = 0;
  bool operator==(const DisjointSameBin&) const = default;
};

/// Lexicographically smallest (bin, pair, pair) with two disjoint pairs in one bin.
inline std::optional<DisjointSameBin> find_disjoint_same_bin(const BinAssignment& a) {
  std::vector<std::vector<std::size_t>> by_bin(static_cast<std::size_t>(a.m()));
  for (std::size_t p = 0; p < a.pairs().size(); ++p) by_bin[static_cast<std::size_t>(a.bin_of(p))].push_back(p);
  for (int b = 0; b < a.m(); ++b) {
    const auto& members = by_bin[static_cast<std::size_t>(b)];
    for (std::size_t x = 0; x < members.size(); ++x) {
      for (std::size_t y = x + 1; y < members.size(); ++y) {
        const auto& p = a.pairs()[members[x]];
        const auto& q = a.pairs()[members[y]];
        if (disjoint(p, q)) return DisjointSameBin{p, q, b};
      }
    }
  }
  return std::nullopt;
}

/// Stars on objects 0..m-2 followed by a triangle on the last three objects:
/// n = m + 2 objects, no bin holds two disjoint pairs.
inline BinAssignment extremal_assignment(int m) {
  if (m < 1) throw Error(ErrorKind::PreconditionViolated, "need at least one bin");
  const int n = m + 2;
  BinAssignment a(n, m);
  for (std::size_t p = 0; p < a.pairs().size(); ++p) {
    const auto [i, j] = a.pairs()[p];
    a.assign(p, i < m - 1 ? i : m - 1);
  }
  return a;
}

/// (m+2) + (m+1) + ... + 3 = C(m+3, 2) - 3.
inline long long max_pairs_bound(int m) {
  if (m < 1) throw Error(ErrorKind::PreconditionViolated, "need at least one bin");
  const long long t = m + 3;
  return t * (t - 1) / 2 - 3;
}

struct BinsCheck {
  std::uint64_t checked = 0;
  std::uint64_t failures = 0;
  // Largest number of pairs in any assignment without disjoint same-bin pairs
  // (0 when there were none).
  std::uint64_t max_pairs_without_disjoint = 0;
};

namespace detail {

// Depth-first over the pair list. A branch in which some bin already holds two
// disjoint pairs is counted whole (m^remaining completions) without descent.
class BinsSweep {
 public:
  BinsSweep(int m, int n) : m_(m), pairs_(all_pairs(n)), members_(static_cast<std::size_t>(m)) {
    weight_.assign(pairs_.size() + 1, 1);
    for (std::size_t r = 1; r <= pairs_.size(); ++r) weight_[r] = weight_[r - 1] * static_cast<std::uint64_t>(m);
  }

  BinsCheck run_from(std::size_t depth, const std::vector<int>& prefix) {
    BinsCheck out;
    for (std::size_t p = 0; p < prefix.size(); ++p) {
      if (conflicts(p, prefix[p])) {
        // the prefix is already decided
        out.checked = weight_[pairs_.size() - p - 1];
        for (std::size_t q = 0; q < p; ++q) members_[static_cast<std::size_t>(prefix[q])].pop_back();
        return out;
      }
      members_[static_cast<std::size_t>(prefix[p])].push_back(p);
    }
    descend(depth, out);
    for (std::size_t p = prefix.size(); p-- > 0;) members_[static_cast<std::size_t>(prefix[p])].pop_back();
    return out;
  }

 private:
  bool conflicts(std::size_t p, int bin) const {
    for (std::size_t q : members_[static_cast<std::size_t>(bin)]) {
      if (disjoint(pairs_[p], pairs_[q])) return true;
    }
    return false;
  }

  void descend(std::size_t depth, BinsCheck& out) {
    if (depth == pairs_.size()) {
      ++out.checked;
      ++out.failures;
      out.max_pairs_without_disjoint = pairs_.size();
      return;
    }
    for (int b = 0; b < m_; ++b) {
      if (conflicts(depth, b)) {
        out.checked += weight_[pairs_.size() - depth - 1];
        continue;
      }
      members_[static_cast<std::size_t>(b)].push_back(depth);
      descend(depth + 1, out);
      members_[static_cast<std::size_t>(b)].pop_back();
    }
  }

  int m_;
  std::vector<ObjectPair> pairs_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::uint64_t> weight_;
};

}  // namespace detail

/// Checks all m^{C(n,2)} assignments. The first pair is fixed to bin 0 (bins
/// are interchangeable) and the result is scaled by m. Work is split over
/// the bins of the second pair when `threads` > 1.
inline BinsCheck exhaustive_bins(int m, int n, unsigned threads = 1) {
  if (m < 1 || n < 2) throw Error(ErrorKind::PreconditionViolated, "exhaustive_bins needs m >= 1 and n >= 2");
  const std::size_t pairs = static_cast<std::size_t>(pair_count(n));
  long double states = 1;
  for (std::size_t i = 0; i < pairs; ++i) states *= m;
  if (states > 1.8e19L) throw Error(ErrorKind::SearchSpaceTooLarge, "assignment count does not fit 64 bits");

  std::vector<std::vector<int>> prefixes;
  if (pairs == 1) {
    prefixes.push_back({0});
  } else {
    for (int b = 0; b < m; ++b) prefixes.push_back({0, b});
  }
  std::vector<BinsCheck> parts(prefixes.size());
  const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(prefixes.size())));
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < prefixes.size(); i += workers) {
      detail::BinsSweep sweep(m, n);
      parts[i] = sweep.run_from(prefixes[i].size(), prefixes[i]);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  BinsCheck total;
  for (const auto& p : parts) {
    total.checked += p.checked;
    total.failures += p.failures;
    total.max_pairs_without_disjoint = std::max(total.max_pairs_without_disjoint, p.max_pairs_without_disjoint);
  }
  total.checked *= static_cast<std::uint64_t>(m);
  total.failures *= static_cast<std::uint64_t>(m);
  return total;
}

/// Uniformly random assignments; failures are samples with no disjoint
/// same-bin pair.
inline BinsCheck sampled_bins(int m, int n, std::uint64_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  BinsCheck out;
  BinAssignment a(n, m);
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (std::size_t p = 0; p < a.pairs().size(); ++p) a.assign(p, static_cast<int>(rng() % static_cast<std::uint64_t>(m)));
    ++out.checked;
    if (!find_disjoint_same_bin(a)) {
      ++out.failures;
      out.max_pairs_without_disjoint = a.pairs().size();
    }
  }
  return out;
}

}  // namespace ramified_zero
