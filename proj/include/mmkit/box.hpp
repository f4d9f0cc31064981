#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "mmkit/limits.hpp"
#include "mmkit/maxflow.hpp"
#include "mmkit/witness.hpp"

namespace mmkit {

namespace detail {

/// Bron-Kerbosch maximal clique enumeration over at most 64 vertices,
/// lowest-index pivot. Emission order is deterministic.
inline void bron_kerbosch(std::uint64_t r, std::uint64_t p, std::uint64_t x,
                          const std::vector<std::uint64_t>& adj,
                          std::vector<std::uint64_t>& out) {
  if (p == 0 && x == 0) {
    out.push_back(r);
    return;
  }
  const int u = std::countr_zero(p | x);
  std::uint64_t cand = p & ~adj[u];
  while (cand) {
    const int v = std::countr_zero(cand);
    cand &= cand - 1;
    const std::uint64_t bit = std::uint64_t{1} << v;
    bron_kerbosch(r | bit, p & adj[v], x & adj[v], adj, out);
    p &= ~bit;
    x |= bit;
  }
}

inline std::vector<std::uint64_t> maximal_cliques(
    const std::vector<std::uint64_t>& adj) {
  std::vector<std::uint64_t> out;
  const std::uint64_t all = adj.size() == 64
                                ? ~std::uint64_t{0}
                                : (std::uint64_t{1} << adj.size()) - 1;
  bron_kerbosch(0, all, 0, adj, out);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// box distance
//
// Coupling reformulation: box(X, Y) is the least eps admitting a coupling pi
// of (mu_X, mu_Y) and a kept pair set S with pi(S) >= 1 - eps and
// |d_X(i,k) - d_Y(j,l)| <= eps for all (i,j), (k,l) in S. A valid kept set
// is exactly a clique of the compatibility graph on X x Y at threshold eps,
// so the minimum is found by scanning the finite set of distortion values
// in ascending order, enumerating maximal cliques, and maximizing the
// coupled mass on each clique by exact max-flow.

inline DistanceResult box(const MMSpace& x, const MMSpace& y,
                          const Limits& limits = {}) {
  const std::size_t m = x.size(), n = y.size(), nodes = m * n;
  if (nodes > limits.box_nodes || nodes > 64)
    throw SizeGuardError("box: " + std::to_string(nodes) +
                         " coupling cells exceed guard " +
                         std::to_string(std::min<std::size_t>(limits.box_nodes, 64)));

  RatVec thresholds;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = i; k < m; ++k)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = j; l < n; ++l)
          thresholds.push_back(abs(x.dist(i, k) - y.dist(j, l)));
  thresholds.push_back(Rat(0));
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  Rat best_value(2);
  std::vector<std::pair<std::size_t, std::size_t>> best_cells;
  RatMatrix best_pi;
  std::size_t examined = 0;

  for (const Rat& t : thresholds) {
    if (t >= best_value) break;
    ++examined;
    std::vector<std::uint64_t> adj(nodes, 0);
    for (std::size_t a = 0; a < nodes; ++a)
      for (std::size_t b = a + 1; b < nodes; ++b) {
        const std::size_t i = a / n, j = a % n, k = b / n, l = b % n;
        if (abs(x.dist(i, k) - y.dist(j, l)) <= t) {
          adj[a] |= std::uint64_t{1} << b;
          adj[b] |= std::uint64_t{1} << a;
        }
      }
    Rat mass_t(-1);
    std::vector<std::pair<std::size_t, std::size_t>> cells_t;
    RatMatrix pi_t;
    for (std::uint64_t clique : detail::maximal_cliques(adj)) {
      std::vector<std::pair<std::size_t, std::size_t>> cells;
      Rat row_cap, col_cap;
      std::vector<bool> row_seen(m, false), col_seen(n, false);
      for (std::uint64_t c = clique; c;) {
        const int v = std::countr_zero(c);
        c &= c - 1;
        const std::size_t i = v / n, j = v % n;
        cells.emplace_back(i, j);
        if (!row_seen[i]) row_cap += x.mass[i], row_seen[i] = true;
        if (!col_seen[j]) col_cap += y.mass[j], col_seen[j] = true;
      }
      if (min(row_cap, col_cap) <= mass_t) continue;  // cannot improve
      PairMassResult pm = max_pair_mass(x.mass, y.mass, cells);
      if (pm.mass > mass_t) {
        mass_t = pm.mass;
        cells_t = std::move(cells);
        pi_t = std::move(pm.pi);
      }
    }
    Rat candidate = max(t, Rat(1) - mass_t);
    if (candidate < best_value) {
      best_value = candidate;
      best_cells = std::move(cells_t);
      best_pi = std::move(pi_t);
    }
  }

  BoxWitness w;
  w.coupling = complete_coupling(std::move(best_pi), x.mass, y.mass);
  for (auto [i, j] : best_cells)
    if (!w.coupling.pi[i][j].is_zero()) w.kept.emplace_back(i, j);
  w.eps = best_value;
  Report rep = verify_witness(x, y, w);
  if (!rep.valid)
    throw ConstructionFailed("box witness failed re-verification");
  return DistanceResult{best_value, std::move(w), examined};
}

inline Rat box_value(const MMSpace& x, const MMSpace& y,
                     const Limits& limits = {}) {
  return box(x, y, limits).value;
}

// ---------------------------------------------------------------------------
// box oracle
//
// Realizes the parameter definition with atom-aligned parameters: both
// spaces are blown up to D uniform atoms (all masses must have denominators
// dividing D) and the value is minimized over all D! bijections of atoms and
// all kept subsets, by full enumeration. Pruning only skips candidates that
// provably cannot beat the incumbent, so the search stays exhaustive.

inline Rat box_oracle(const MMSpace& x, const MMSpace& y, std::size_t d,
                      const Limits& limits = {}) {
  if (d == 0 || d > limits.box_oracle_denominator)
    throw SizeGuardError("box_oracle: denominator " + std::to_string(d) +
                         " exceeds guard " +
                         std::to_string(limits.box_oracle_denominator));
  const BigInt big_d(static_cast<unsigned>(d));
  std::vector<std::size_t> ax, ay;  // copy -> original atom
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (big_d % x.mass[i].denominator() != 0)
      throw DenominatorMismatch("mass " + x.mass[i].to_string() +
                                " does not divide blow-up denominator " +
                                std::to_string(d));
    const BigInt copies = x.mass[i].numerator() * (big_d / x.mass[i].denominator());
    for (BigInt c = 0; c < copies; ++c) ax.push_back(i);
  }
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (big_d % y.mass[j].denominator() != 0)
      throw DenominatorMismatch("mass " + y.mass[j].to_string() +
                                " does not divide blow-up denominator " +
                                std::to_string(d));
    const BigInt copies = y.mass[j].numerator() * (big_d / y.mass[j].denominator());
    for (BigInt c = 0; c < copies; ++c) ay.push_back(j);
  }

  // Distinct distortion values, then integer ranks so the inner loops
  // compare plain ints.
  const std::size_t pair_count = d * (d - 1) / 2;
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::vector<std::size_t>> pair_id(d, std::vector<std::size_t>(d));
  for (std::size_t p = 0; p < d; ++p)
    for (std::size_t q = p + 1; q < d; ++q) {
      pair_id[p][q] = pairs.size();
      pairs.emplace_back(static_cast<int>(p), static_cast<int>(q));
    }
  const auto xd = [&](std::size_t p, std::size_t q) -> Rat {
    return ax[p] == ax[q] ? Rat(0) : x.dist(ax[p], ax[q]);
  };
  const auto yd = [&](std::size_t p, std::size_t q) -> Rat {
    return ay[p] == ay[q] ? Rat(0) : y.dist(ay[p], ay[q]);
  };
  RatVec values;
  for (std::size_t a = 0; a < pair_count; ++a)
    for (std::size_t b = 0; b < pair_count; ++b)
      values.push_back(abs(xd(pairs[a].first, pairs[a].second) -
                           yd(pairs[b].first, pairs[b].second)));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<std::vector<int>> rank(pair_count, std::vector<int>(pair_count));
  for (std::size_t a = 0; a < pair_count; ++a)
    for (std::size_t b = 0; b < pair_count; ++b) {
      Rat v = abs(xd(pairs[a].first, pairs[a].second) -
                  yd(pairs[b].first, pairs[b].second));
      rank[a][b] = static_cast<int>(
          std::lower_bound(values.begin(), values.end(), v) - values.begin());
    }

  RatVec penalty(d + 1);  // 1 - s/D for kept size s
  for (std::size_t s = 0; s <= d; ++s)
    penalty[s] = Rat(1) - Rat(BigInt(s), big_d);

  std::vector<std::vector<std::uint32_t>> masks_by_size(d + 1);
  for (std::uint32_t mask = 1; mask < (1u << d); ++mask)
    masks_by_size[std::popcount(mask)].push_back(mask);
  std::vector<std::vector<std::pair<int, int>>> pairs_in_mask(1u << d);
  for (std::uint32_t mask = 1; mask < (1u << d); ++mask)
    for (int p = 0; p < static_cast<int>(d); ++p)
      if (mask & (1u << p))
        for (int q = p + 1; q < static_cast<int>(d); ++q)
          if (mask & (1u << q)) pairs_in_mask[mask].emplace_back(p, q);

  Rat best(2);
  // Largest rank whose value is still an improvement over the incumbent.
  int rank_limit = static_cast<int>(values.size()) - 1;
  const auto refresh_limit = [&] {
    rank_limit = static_cast<int>(std::lower_bound(values.begin(),
                                                   values.end(), best) -
                                  values.begin()) -
                 1;
  };

  std::vector<int> sigma(d);
  std::iota(sigma.begin(), sigma.end(), 0);
  do {
    for (std::size_t s = d; s >= 1; --s) {
      if (penalty[s] >= best) break;
      for (std::uint32_t mask : masks_by_size[s]) {
        int worst = -1;
        bool viable = true;
        for (auto [p, q] : pairs_in_mask[mask]) {
          const int r = rank[pair_id[p][q]]
                            [pair_id[std::min(sigma[p], sigma[q])]
                                    [std::max(sigma[p], sigma[q])]];
          if (r > rank_limit) {
            viable = false;
            break;
          }
          worst = std::max(worst, r);
        }
        if (!viable) continue;
        Rat value = max(worst < 0 ? Rat(0) : values[worst], penalty[s]);
        if (value < best) {
          best = value;
          refresh_limit();
          if (best.is_zero()) return best;
        }
      }
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return best;
}

// ---------------------------------------------------------------------------
// upper bound from a fixed coupling

/// With the coupling fixed, finds the best kept set supported on its
/// positive cells (exhaustive maximal-clique search over the support) and
/// returns the resulting valid BoxWitness: an upper bound on box(X, Y), and
/// exactly box(X, Y) when fed the optimal coupling.
inline DistanceResult box_upper_from_coupling(const MMSpace& x,
                                              const MMSpace& y,
                                              const Coupling& coupling) {
  if (coupling.rows() != x.size() || coupling.cols() != y.size())
    throw DimensionMismatch("coupling shape does not match the spaces");
  check_coupling(coupling);
  if (coupling.mu != x.mass || coupling.nu != y.mass)
    throw DimensionMismatch("coupling marginals do not match the spaces");

  std::vector<std::pair<std::size_t, std::size_t>> supp;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      if (!coupling.pi[i][j].is_zero()) supp.emplace_back(i, j);
  if (supp.size() > 64)
    throw SizeGuardError("box_upper_from_coupling: support exceeds 64 cells");

  const auto distortion = [&](std::size_t a, std::size_t b) {
    return abs(x.dist(supp[a].first, supp[b].first) -
               y.dist(supp[a].second, supp[b].second));
  };
  RatVec thresholds{Rat(0)};
  for (std::size_t a = 0; a < supp.size(); ++a)
    for (std::size_t b = a + 1; b < supp.size(); ++b)
      thresholds.push_back(distortion(a, b));
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  Rat best_value(2);
  std::vector<std::pair<std::size_t, std::size_t>> best_cells;
  std::size_t examined = 0;
  for (const Rat& t : thresholds) {
    if (t >= best_value) break;
    ++examined;
    std::vector<std::uint64_t> adj(supp.size(), 0);
    for (std::size_t a = 0; a < supp.size(); ++a)
      for (std::size_t b = a + 1; b < supp.size(); ++b)
        if (distortion(a, b) <= t) {
          adj[a] |= std::uint64_t{1} << b;
          adj[b] |= std::uint64_t{1} << a;
        }
    Rat mass_t(-1);
    std::vector<std::pair<std::size_t, std::size_t>> cells_t;
    for (std::uint64_t clique : detail::maximal_cliques(adj)) {
      Rat mass;
      std::vector<std::pair<std::size_t, std::size_t>> cells;
      for (std::uint64_t c = clique; c;) {
        const int v = std::countr_zero(c);
        c &= c - 1;
        mass += coupling.pi[supp[v].first][supp[v].second];
        cells.push_back(supp[v]);
      }
      if (mass > mass_t) {
        mass_t = mass;
        cells_t = std::move(cells);
      }
    }
    Rat candidate = max(t, Rat(1) - mass_t);
    if (candidate < best_value) {
      best_value = candidate;
      best_cells = std::move(cells_t);
    }
  }

  BoxWitness w{coupling, std::move(best_cells), best_value};
  Report rep = verify_witness(x, y, w);
  if (!rep.valid)
    throw ConstructionFailed(
        "box_upper_from_coupling witness failed re-verification");
  return DistanceResult{best_value, std::move(w), examined};
}

}  // namespace mmkit
