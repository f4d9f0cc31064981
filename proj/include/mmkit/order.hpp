#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "mmkit/box.hpp"
#include "mmkit/limits.hpp"
#include "mmkit/witness.hpp"

namespace mmkit {

// ---------------------------------------------------------------------------
// Exact Lipschitz order: lower < upper iff some 1-Lipschitz map upper ->
// lower pushes mu_upper exactly onto mu_lower.

namespace detail {

class DominationSearch {
 public:
  DominationSearch(const MMSpace& upper, const MMSpace& lower)
      : x_(upper), y_(lower), assigned_(upper.size(), SIZE_MAX),
        residual_(lower.mass) {
    // Source atoms in decreasing mass order (lowest index on ties): heavy
    // atoms constrain the pushforward most, so infeasibility shows early.
    order_.resize(x_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) {
                       return x_.mass[a] > x_.mass[b];
                     });
  }

  std::optional<MapWitness> run() {
    if (search(0)) return MapWitness{assigned_};
    return std::nullopt;
  }

 private:
  bool demand_fillable() const {
    // Every target atom's residual demand must be coverable by the masses
    // of still-unassigned sources that are Lipschitz-compatible with it.
    for (std::size_t j = 0; j < y_.size(); ++j) {
      if (residual_[j].is_zero()) continue;
      Rat reachable;
      for (std::size_t i = 0; i < x_.size(); ++i) {
        if (assigned_[i] != SIZE_MAX) continue;
        bool ok = true;
        for (std::size_t k = 0; k < x_.size() && ok; ++k)
          if (assigned_[k] != SIZE_MAX)
            ok = y_.dist(j, assigned_[k]) <= x_.dist(i, k);
        if (ok) reachable += x_.mass[i];
      }
      if (reachable < residual_[j]) return false;
    }
    return true;
  }

  bool search(std::size_t pos) {
    if (pos == x_.size()) return true;
    const std::size_t i = order_[pos];
    for (std::size_t j = 0; j < y_.size(); ++j) {
      if (residual_[j] < x_.mass[i]) continue;
      bool ok = true;
      for (std::size_t k = 0; k < x_.size() && ok; ++k)
        if (assigned_[k] != SIZE_MAX)
          ok = y_.dist(j, assigned_[k]) <= x_.dist(i, k);
      if (!ok) continue;
      assigned_[i] = j;
      residual_[j] -= x_.mass[i];
      if (demand_fillable() && search(pos + 1)) return true;
      residual_[j] += x_.mass[i];
      assigned_[i] = SIZE_MAX;
    }
    return false;
  }

  const MMSpace& x_;
  const MMSpace& y_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> assigned_;
  RatVec residual_;
};

}  // namespace detail

/// Decides lower < upper by exhaustive backtracking over assignments of
/// upper atoms to lower atoms. A nullopt return is a proof of
/// non-domination: the pruning rules only discard provably infeasible
/// branches. The found witness re-verifies before being returned.
inline std::optional<MapWitness> check_domination(const MMSpace& upper,
                                                  const MMSpace& lower,
                                                  const Limits& limits = {}) {
  if (upper.size() > limits.domination_source)
    throw SizeGuardError("check_domination: source " +
                         std::to_string(upper.size()) + " exceeds guard " +
                         std::to_string(limits.domination_source));
  if (lower.size() > limits.domination_target)
    throw SizeGuardError("check_domination: target " +
                         std::to_string(lower.size()) + " exceeds guard " +
                         std::to_string(limits.domination_target));
  detail::DominationSearch s(upper, lower);
  std::optional<MapWitness> w = s.run();
  if (w && !verify_witness(upper, lower, *w).valid)
    throw ConstructionFailed("domination witness failed re-verification");
  return w;
}

// ---------------------------------------------------------------------------
// eps-relaxed order

namespace detail {

/// Largest domain mass among maximal cliques of the (+eps)-compatibility
/// graph of f. Any valid nonexceptional domain is pairwise compatible, hence
/// extends to a maximal clique with no mass loss, so restricting attention
/// to maximal cliques preserves exhaustiveness.
inline std::pair<Rat, std::vector<bool>> best_domain(const MMSpace& x,
                                                     const MMSpace& y,
                                                     const std::vector<std::size_t>& f,
                                                     const Rat& eps) {
  const std::size_t n = x.size();
  std::vector<std::uint64_t> adj(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k)
      if (y.dist(f[i], f[k]) <= x.dist(i, k) + eps) {
        adj[i] |= std::uint64_t{1} << k;
        adj[k] |= std::uint64_t{1} << i;
      }
  Rat best(-1);
  std::uint64_t best_clique = 0;
  for (std::uint64_t clique : maximal_cliques(adj)) {
    Rat mass;
    for (std::uint64_t c = clique; c;) {
      const int v = std::countr_zero(c);
      c &= c - 1;
      mass += x.mass[v];
    }
    if (mass > best) {
      best = mass;
      best_clique = clique;
    }
  }
  std::vector<bool> domain(n, false);
  for (std::size_t i = 0; i < n; ++i)
    if (best_clique & (std::uint64_t{1} << i)) domain[i] = true;
  return {best, domain};
}

}  // namespace detail

/// Decides lower <_eps upper by exhaustive search over maps (lexicographic
/// order) with the best nonexceptional domain chosen per map. nullopt is a
/// definitive negative within the guard.
inline std::optional<EpsWitness> check_eps_domination(const MMSpace& upper,
                                                      const MMSpace& lower,
                                                      const Rat& eps,
                                                      const Limits& limits = {}) {
  if (eps.sign() < 0) throw PreconditionFailed("eps must be nonnegative");
  if (upper.size() > 64)
    throw SizeGuardError("check_eps_domination: source exceeds 64 atoms");
  long double leaves = 1;
  for (std::size_t i = 0; i < upper.size(); ++i) {
    leaves *= static_cast<long double>(lower.size());
    if (leaves > static_cast<long double>(limits.map_search))
      throw SizeGuardError("check_eps_domination: search space exceeds guard " +
                           std::to_string(limits.map_search));
  }

  const Rat mass_needed = Rat(1) - eps;
  std::vector<std::size_t> f(upper.size(), 0);
  for (;;) {
    auto [mass, domain] = detail::best_domain(upper, lower, f, eps);
    if (mass >= mass_needed) {
      RatVec pushed(lower.size());
      for (std::size_t i = 0; i < upper.size(); ++i)
        pushed[f[i]] += upper.mass[i];
      if (prohorov_value(lower.metric, pushed, lower.mass) <= eps) {
        EpsWitness w{MapWitness{f}, std::move(domain), eps};
        if (!verify_witness(upper, lower, w).valid)
          throw ConstructionFailed("eps witness failed re-verification");
        return w;
      }
    }
    // next map in lexicographic order
    std::size_t i = 0;
    while (i < f.size() && f[i] + 1 == lower.size()) f[i++] = 0;
    if (i == f.size()) return std::nullopt;
    ++f[i];
  }
}

// ---------------------------------------------------------------------------
// From a box witness to an eps-domination witness

/// Smallest eps at which (f, domain) is a valid witness for lower < upper:
/// the maximum of the three exact defects. This is the "smallest candidate
/// passing verification" because each condition is monotone in eps.
inline Rat tight_eps(const MMSpace& upper, const MMSpace& lower,
                     const MapWitness& f, const std::vector<bool>& domain) {
  Rat eps;
  Rat dm;
  for (std::size_t i = 0; i < upper.size(); ++i)
    if (domain[i]) dm += upper.mass[i];
  eps = max(eps, Rat(1) - dm);
  for (std::size_t i = 0; i < upper.size(); ++i) {
    if (!domain[i]) continue;
    for (std::size_t k = i + 1; k < upper.size(); ++k)
      if (domain[k])
        eps = max(eps, lower.dist(f(i), f(k)) - upper.dist(i, k));
  }
  RatVec pushed(lower.size());
  for (std::size_t i = 0; i < upper.size(); ++i) pushed[f(i)] += upper.mass[i];
  eps = max(eps, prohorov_value(lower.metric, pushed, lower.mass));
  return eps;
}

/// Converts a box witness at eps into a domination witness at <= 3 eps:
/// each upper atom goes to the lower atom carrying the largest coupled mass
/// among its kept pairs (lowest index on ties), atoms without kept pairs go
/// to atom 0 and fall outside the domain. The recorded eps is the smallest
/// value passing verification; the 3 eps bound is asserted.
inline EpsWitness eps_from_box(const MMSpace& x, const MMSpace& y,
                               const BoxWitness& bw) {
  if (!verify_witness(x, y, bw).valid)
    throw PreconditionFailed("box witness is not valid at its eps");
  std::vector<std::size_t> f(x.size(), 0);
  std::vector<bool> domain(x.size(), false);
  for (std::size_t i = 0; i < x.size(); ++i) {
    Rat best(-1);
    for (auto [a, j] : bw.kept) {
      if (a != i) continue;
      domain[i] = true;
      if (bw.coupling.pi[a][j] > best) {
        best = bw.coupling.pi[a][j];
        f[i] = j;
      }
    }
  }
  EpsWitness w{MapWitness{std::move(f)}, std::move(domain), Rat(0)};
  w.eps = tight_eps(x, y, w.f, w.domain);
  if (w.eps > Rat(3) * bw.eps)
    throw ConstructionFailed("eps_from_box exceeded the 3 eps bound");
  if (!verify_witness(x, y, w).valid)
    throw ConstructionFailed("eps_from_box witness failed re-verification");
  return w;
}

// ---------------------------------------------------------------------------
// Composition of eps-witnesses
//
// From Z <_delta Y (map g: Y -> Z on domain Yt) and Y <_eps X (map f: X -> Y
// on domain Xt), build h = g o pi o f where pi sends Y to its exact nearest
// point of Yt (lowest index on ties). The composed witness is valid at
// 3 eps + 4 delta; that constant is asserted, while the recorded eps is the
// smallest value passing verification.

inline EpsWitness compose_eps(const MMSpace& x, const MMSpace& y,
                              const MMSpace& z, const EpsWitness& y_from_x,
                              const EpsWitness& z_from_y) {
  if (!verify_witness(x, y, y_from_x).valid)
    throw PreconditionFailed("witness for the upper step is invalid");
  if (!verify_witness(y, z, z_from_y).valid)
    throw PreconditionFailed("witness for the lower step is invalid");
  const Rat eps = y_from_x.eps, delta = z_from_y.eps;
  const Rat bound = Rat(3) * eps + Rat(4) * delta;

  std::vector<std::size_t> yt;  // nonexceptional domain of the lower step
  for (std::size_t j = 0; j < y.size(); ++j)
    if (z_from_y.domain[j]) yt.push_back(j);

  std::vector<std::size_t> h(x.size());
  std::vector<bool> domain(x.size(), false);
  if (yt.empty()) {
    // Degenerate witness (delta >= 1): any map with an empty domain
    // verifies at the bound.
    for (std::size_t i = 0; i < x.size(); ++i) h[i] = 0;
  } else {
    std::vector<std::size_t> nearest(y.size());
    RatVec gap(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
      std::size_t arg = yt[0];
      for (std::size_t c : yt)
        if (y.dist(j, c) < y.dist(j, arg)) arg = c;
      nearest[j] = arg;
      gap[j] = y.dist(j, arg);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      h[i] = z_from_y.f(nearest[y_from_x.f(i)]);
      domain[i] = y_from_x.domain[i] && gap[y_from_x.f(i)] <= eps;
    }
  }

  EpsWitness w{MapWitness{std::move(h)}, std::move(domain), Rat(0)};
  w.eps = tight_eps(x, z, w.f, w.domain);
  if (w.eps > bound)
    throw ConstructionFailed("compose_eps exceeded the 3 eps + 4 delta bound");
  if (!verify_witness(x, z, w).valid)
    throw ConstructionFailed("composed witness failed re-verification");
  return w;
}

}  // namespace mmkit
