#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "mmkit/limits.hpp"
#include "mmkit/witness.hpp"

namespace mmkit {

namespace detail {

/// Branch-and-bound search for a minimum-distortion correspondence. A
/// minimal correspondence is the union of the graph of a map K -> L and a
/// partial map covering the L-points missed by it, so the search assigns a
/// partner to every K-point and then to every uncovered L-point, pruning on
/// the running distortion. Candidates are tried in index order, so the first
/// optimum found is deterministic.
class CorrSearch {
 public:
  CorrSearch(const FiniteMetric& k, const FiniteMetric& l) : k_(k), l_(l) {}

  CorrWitness run() {
    best_ = k_.diameter() + l_.diameter() + Rat(1);
    assign_k(0);
    return CorrWitness{best_pairs_, best_};
  }

 private:
  Rat pair_distortion(std::pair<std::size_t, std::size_t> a,
                      std::pair<std::size_t, std::size_t> b) const {
    return abs(k_.dist[a.first][b.first] - l_.dist[a.second][b.second]);
  }

  void push(std::size_t i, std::size_t j, std::vector<Rat>& saved) {
    saved.push_back(current_);
    for (const auto& p : pairs_)
      current_ = max(current_, pair_distortion(p, {i, j}));
    pairs_.emplace_back(i, j);
  }

  void pop(std::vector<Rat>& saved) {
    pairs_.pop_back();
    current_ = saved.back();
    saved.pop_back();
  }

  void assign_k(std::size_t i) {
    if (current_ >= best_) return;
    if (i == k_.size()) {
      std::vector<bool> covered(l_.size(), false);
      for (const auto& p : pairs_) covered[p.second] = true;
      std::vector<std::size_t> missing;
      for (std::size_t j = 0; j < l_.size(); ++j)
        if (!covered[j]) missing.push_back(j);
      assign_l(missing, 0);
      return;
    }
    std::vector<Rat> saved;
    for (std::size_t j = 0; j < l_.size(); ++j) {
      push(i, j, saved);
      if (current_ < best_) assign_k(i + 1);
      pop(saved);
    }
  }

  void assign_l(const std::vector<std::size_t>& missing, std::size_t m) {
    if (current_ >= best_) return;
    if (m == missing.size()) {
      best_ = current_;
      best_pairs_ = pairs_;
      return;
    }
    std::vector<Rat> saved;
    for (std::size_t i = 0; i < k_.size(); ++i) {
      push(i, missing[m], saved);
      if (current_ < best_) assign_l(missing, m + 1);
      pop(saved);
    }
  }

  const FiniteMetric& k_;
  const FiniteMetric& l_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  Rat current_;
  Rat best_;
  std::vector<std::pair<std::size_t, std::size_t>> best_pairs_;
};

}  // namespace detail

/// Exact Gromov-Hausdorff distance: half the minimum correspondence
/// distortion. The returned witness re-verifies with distortion = 2 * value.
inline DistanceResult gh(const FiniteMetric& k, const FiniteMetric& l,
                         const Limits& limits = {}) {
  if (k.size() + l.size() > limits.gh_atoms)
    throw SizeGuardError("gh: " + std::to_string(k.size() + l.size()) +
                         " atoms exceeds guard " +
                         std::to_string(limits.gh_atoms));
  detail::CorrSearch search(k, l);
  CorrWitness w = search.run();
  std::sort(w.pairs.begin(), w.pairs.end());
  w.pairs.erase(std::unique(w.pairs.begin(), w.pairs.end()), w.pairs.end());
  Report rep = verify_witness(k, l, w);
  if (!rep.valid) throw ConstructionFailed("gh witness failed re-verification");
  return DistanceResult{w.distortion / Rat(2), std::move(w), 0};
}

inline Rat gh_value(const FiniteMetric& k, const FiniteMetric& l,
                    const Limits& limits = {}) {
  return gh(k, l, limits).value;
}

// ---------------------------------------------------------------------------
// GH order relaxation: L <_eps K holds when some f: K -> L satisfies
//   (1) d_L(f x, f x') <= d_K(x, x') + eps for all x, x' and
//   (2) every point of L lies within eps of the image.

inline Report verify_gh_eps(const FiniteMetric& k, const FiniteMetric& l,
                            const MapWitness& f, const Rat& eps) {
  if (f.size() != k.size())
    throw DimensionMismatch("gh-eps witness has wrong source size");
  Report rep;
  for (std::size_t i = 0; i < k.size(); ++i)
    for (std::size_t j = i + 1; j < k.size(); ++j)
      rep.record("lipschitz+eps d(f " + k.labels[i] + ", f " + k.labels[j] +
                     ")",
                 l.dist[f(i)][f(j)], "<=", k.dist[i][j] + eps);
  for (std::size_t y = 0; y < l.size(); ++y) {
    Rat nearest = l.diameter() + Rat(1);
    for (std::size_t i = 0; i < k.size(); ++i)
      nearest = min(nearest, l.dist[y][f(i)]);
    rep.record("coverage of " + l.labels[y], nearest, "<=", eps);
  }
  return rep;
}

/// Exhaustive backtracking search for a map realizing L <_eps K. Returns the
/// lexicographically first witness, or nullopt as a proof of non-existence
/// within the exact search.
inline std::optional<MapWitness> gh_eps_check(const FiniteMetric& k,
                                              const FiniteMetric& l,
                                              const Rat& eps,
                                              const Limits& limits = {}) {
  // |L|^|K| leaves, bounded by the map-search guard.
  long double leaves = 1;
  for (std::size_t i = 0; i < k.size(); ++i) {
    leaves *= static_cast<long double>(l.size());
    if (leaves > static_cast<long double>(limits.map_search))
      throw SizeGuardError("gh_eps_check: search space exceeds guard " +
                           std::to_string(limits.map_search));
  }

  std::vector<std::size_t> f(k.size(), 0);

  const auto covered_ok = [&](const std::vector<std::size_t>& img) {
    for (std::size_t y = 0; y < l.size(); ++y) {
      bool ok = false;
      for (std::size_t i = 0; i < img.size() && !ok; ++i)
        ok = l.dist[y][img[i]] <= eps;
      if (!ok) return false;
    }
    return true;
  };

  const std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == k.size()) return covered_ok(f);
    for (std::size_t j = 0; j < l.size(); ++j) {
      bool ok = true;
      for (std::size_t p = 0; p < i && ok; ++p)
        ok = l.dist[j][f[p]] <= k.dist[i][p] + eps;
      if (!ok) continue;
      f[i] = j;
      if (rec(i + 1)) return true;
    }
    return false;
  };
  if (rec(0)) return MapWitness{f};
  return std::nullopt;
}

}  // namespace mmkit
