#pragma once

#include <utility>
#include <vector>

#include "mmkit/gh.hpp"
#include "mmkit/kuratowski.hpp"
#include "mmkit/metric.hpp"
#include "mmkit/space.hpp"

namespace mmkit {

// ---------------------------------------------------------------------------
// Net chain limit
//
// Finite truncation of the GH limit construction for chains X_1, ..., X_N
// with maps f_n: X_{n+1} -> X_n satisfying
//   d_{X_{n+1}}(x, x') - eps_n <= d_{X_n}(f_n x, f_n x').
// Nets N_n are chosen by greedy farthest-point selection (lowest-index seed,
// radius eps_n; the last level reuses eps_{N-1}), g_n = pi_n o f_n with
// exact nearest-point projections, and the limit is the compatible-tuple
// space: each tuple is determined by its last coordinate in N_N and carries
// the X_N distance, with zero-distance tuples identified. The certified
// bound is 3 * sum eps_n, never below the exact gh(X_N, limit).

struct NetChainResult {
  FiniteMetric limit;
  Rat bound;
  std::vector<std::vector<std::size_t>> nets;      // per level, atom indices
  std::vector<MapWitness> net_maps;                // g_n : X_{n+1} -> X_n
  std::vector<std::vector<std::size_t>> tuples;    // compatible tuples
};

namespace detail {

inline std::vector<std::size_t> farthest_point_net(const FiniteMetric& m,
                                                   const Rat& radius) {
  std::vector<std::size_t> net{0};
  for (;;) {
    Rat worst(-1);
    std::size_t arg = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      Rat nearest = m.dist[i][net[0]];
      for (std::size_t c : net) nearest = min(nearest, m.dist[i][c]);
      if (nearest > worst) {
        worst = nearest;
        arg = i;
      }
    }
    if (worst < radius || worst.is_zero()) break;
    net.push_back(arg);
  }
  return net;
}

}  // namespace detail

inline NetChainResult net_chain_limit(const std::vector<FiniteMetric>& chain,
                                      const std::vector<MapWitness>& maps,
                                      const RatVec& defects) {
  if (chain.empty()) throw PreconditionFailed("net_chain_limit: empty chain");
  if (maps.size() + 1 != chain.size() || defects.size() != maps.size())
    throw DimensionMismatch("net_chain_limit: need one map and defect per step");
  for (std::size_t n = 0; n < maps.size(); ++n) {
    if (maps[n].size() != chain[n + 1].size())
      throw DimensionMismatch("net_chain_limit: map " + std::to_string(n) +
                              " has wrong source size");
    if (defects[n].sign() < 0)
      throw PreconditionFailed("net_chain_limit: negative defect");
    for (std::size_t x = 0; x < chain[n + 1].size(); ++x)
      for (std::size_t y = x + 1; y < chain[n + 1].size(); ++y)
        if (chain[n + 1].dist[x][y] - defects[n] >
            chain[n].dist[maps[n](x)][maps[n](y)])
          throw PreconditionFailed(
              "net_chain_limit: map " + std::to_string(n) +
              " shrinks a distance by more than its defect");
  }

  NetChainResult r;
  const std::size_t levels = chain.size();
  for (std::size_t n = 0; n < levels; ++n) {
    const Rat radius =
        defects.empty() ? Rat(0)
                        : defects[n < defects.size() ? n : defects.size() - 1];
    r.nets.push_back(detail::farthest_point_net(chain[n], radius));
  }

  // pi_n: exact nearest net point, lowest index on ties; g_n = pi_n o f_n.
  for (std::size_t n = 0; n + 1 < levels; ++n) {
    MapWitness g;
    for (std::size_t x = 0; x < chain[n + 1].size(); ++x) {
      std::size_t fx = maps[n](x);
      std::size_t arg = r.nets[n][0];
      for (std::size_t c : r.nets[n])
        if (chain[n].dist[fx][c] < chain[n].dist[fx][arg]) arg = c;
      g.f.push_back(arg);
    }
    r.net_maps.push_back(std::move(g));
  }

  // Compatible tuples: the last coordinate ranges over the last net and
  // determines the rest through the g maps.
  for (std::size_t last : r.nets.back()) {
    std::vector<std::size_t> tuple(levels);
    tuple[levels - 1] = last;
    for (std::size_t n = levels - 1; n >= 1; --n)
      tuple[n - 1] = r.net_maps[n - 1](tuple[n]);
    r.tuples.push_back(std::move(tuple));
  }

  // Tuple distance = last-coordinate distance in X_N; identify at zero.
  std::vector<std::size_t> keep;
  for (std::size_t a = 0; a < r.tuples.size(); ++a) {
    bool fresh = true;
    for (std::size_t b : keep)
      fresh = fresh &&
              !chain.back().dist[r.tuples[a][levels - 1]][r.tuples[b][levels - 1]]
                   .is_zero();
    if (fresh) keep.push_back(a);
  }
  std::vector<std::string> labels;
  RatMatrix dist(keep.size(), RatVec(keep.size()));
  for (std::size_t a = 0; a < keep.size(); ++a) {
    labels.push_back(chain.back().labels[r.tuples[keep[a]][levels - 1]]);
    for (std::size_t b = 0; b < keep.size(); ++b)
      dist[a][b] = chain.back()
                       .dist[r.tuples[keep[a]][levels - 1]]
                            [r.tuples[keep[b]][levels - 1]];
  }
  r.limit = make_metric(std::move(labels), std::move(dist));

  r.bound = Rat(0);
  for (const Rat& e : defects) r.bound += e;
  r.bound *= Rat(3);
  return r;
}

}  // namespace mmkit
