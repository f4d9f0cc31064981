#pragma once

#include <cstddef>
#include <queue>
#include <utility>
#include <vector>

#include "mmkit/rational.hpp"
#include "mmkit/space.hpp"

namespace mmkit {

/// Strassen feasibility kernel: everything is scaled by the lcm of the
/// marginal denominators so the flow network has integer capacities and the
/// max-flow value is exact. `admissible` lists the (row, column) pairs that
/// may carry mass.
struct FlowInstance {
  std::vector<BigInt> sources;
  std::vector<BigInt> sinks;
  std::vector<std::pair<std::size_t, std::size_t>> admissible;
  BigInt scale;
};

inline FlowInstance make_flow_instance(
    const RatVec& mu, const RatVec& nu,
    std::vector<std::pair<std::size_t, std::size_t>> admissible) {
  FlowInstance fi;
  fi.scale = boost::multiprecision::lcm(common_denominator(mu),
                                        common_denominator(nu));
  for (const Rat& m : mu)
    fi.sources.push_back(m.numerator() * (fi.scale / m.denominator()));
  for (const Rat& m : nu)
    fi.sinks.push_back(m.numerator() * (fi.scale / m.denominator()));
  fi.admissible = std::move(admissible);
  return fi;
}

namespace detail {

/// Dinic's algorithm over arbitrary-precision integer capacities.
/// Deterministic: edges are explored in insertion order.
class Dinic {
 public:
  explicit Dinic(std::size_t n) : adj_(n) {}

  std::size_t add_edge(std::size_t u, std::size_t v, BigInt cap) {
    adj_[u].push_back(edges_.size());
    edges_.push_back({v, std::move(cap)});
    adj_[v].push_back(edges_.size());
    edges_.push_back({u, BigInt(0)});
    return edges_.size() - 2;
  }

  BigInt run(std::size_t s, std::size_t t) {
    BigInt total = 0;
    while (bfs(s, t)) {
      iter_.assign(adj_.size(), 0);
      for (;;) {
        BigInt f = dfs(s, t, BigInt(-1));
        if (f == 0) break;
        total += f;
      }
    }
    return total;
  }

  /// Flow pushed through a forward edge returned by add_edge.
  BigInt flow_on(std::size_t edge_id) const { return edges_[edge_id + 1].cap; }

 private:
  struct Edge {
    std::size_t to;
    BigInt cap;
  };

  bool bfs(std::size_t s, std::size_t t) {
    level_.assign(adj_.size(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop();
      for (std::size_t id : adj_[u]) {
        const Edge& e = edges_[id];
        if (e.cap > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  BigInt dfs(std::size_t u, std::size_t t, BigInt limit) {
    if (u == t) return limit;
    for (std::size_t& i = iter_[u]; i < adj_[u].size(); ++i) {
      std::size_t id = adj_[u][i];
      Edge& e = edges_[id];
      if (e.cap <= 0 || level_[e.to] != level_[u] + 1) continue;
      BigInt pass = (limit < 0 || e.cap < limit) ? e.cap : limit;
      BigInt f = dfs(e.to, t, pass);
      if (f > 0) {
        e.cap -= f;
        edges_[id ^ 1].cap += f;
        return f;
      }
    }
    return 0;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
};

}  // namespace detail

struct PairMassResult {
  Rat mass;          // maximum total mass placeable on the admissible pairs
  RatMatrix pi;      // a partial coupling achieving it (row sums <= mu)
};

/// Maximum sub-coupling mass supported on the admissible pair set, computed
/// by exact integer max-flow and rescaled back to rationals.
inline PairMassResult max_pair_mass(
    const RatVec& mu, const RatVec& nu,
    const std::vector<std::pair<std::size_t, std::size_t>>& admissible) {
  FlowInstance fi = make_flow_instance(mu, nu, admissible);
  const std::size_t m = mu.size(), n = nu.size();
  const std::size_t source = m + n, sink = m + n + 1;
  detail::Dinic dinic(m + n + 2);
  std::vector<std::size_t> mu_edges(m), pair_edges(fi.admissible.size());
  BigInt total = 0;
  for (const BigInt& c : fi.sources) total += c;
  for (std::size_t i = 0; i < m; ++i)
    mu_edges[i] = dinic.add_edge(source, i, fi.sources[i]);
  for (std::size_t j = 0; j < n; ++j)
    dinic.add_edge(m + j, sink, fi.sinks[j]);
  for (std::size_t e = 0; e < fi.admissible.size(); ++e)
    pair_edges[e] = dinic.add_edge(fi.admissible[e].first,
                                   m + fi.admissible[e].second, total);

  BigInt value = dinic.run(source, sink);

  PairMassResult r;
  r.mass = Rat(value, fi.scale);
  r.pi.assign(m, RatVec(n));
  for (std::size_t e = 0; e < fi.admissible.size(); ++e)
    r.pi[fi.admissible[e].first][fi.admissible[e].second] =
        Rat(dinic.flow_on(pair_edges[e]), fi.scale);
  return r;
}

/// Completes a partial coupling (row sums <= mu, column sums <= nu) to a
/// genuine coupling by northwest-corner filling of the residual marginals.
/// Deterministic; the added mass may land anywhere.
inline Coupling complete_coupling(RatMatrix pi, const RatVec& mu,
                                  const RatVec& nu) {
  const std::size_t m = mu.size(), n = nu.size();
  RatVec row_res = mu, col_res = nu;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      row_res[i] -= pi[i][j];
      col_res[j] -= pi[i][j];
    }
  std::size_t j = 0;
  for (std::size_t i = 0; i < m; ++i) {
    while (row_res[i].sign() > 0) {
      while (j < n && col_res[j].is_zero()) ++j;
      if (j == n) throw MassError("coupling completion ran out of demand");
      Rat step = min(row_res[i], col_res[j]);
      pi[i][j] += step;
      row_res[i] -= step;
      col_res[j] -= step;
    }
  }
  Coupling c{std::move(pi), mu, nu};
  check_coupling(c);
  return c;
}

}  // namespace mmkit
