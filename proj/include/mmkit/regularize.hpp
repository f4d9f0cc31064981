#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mmkit/box.hpp"
#include "mmkit/gh.hpp"
#include "mmkit/kuratowski.hpp"
#include "mmkit/order.hpp"
#include "mmkit/witness.hpp"

namespace mmkit {

namespace detail {

/// Infimal convolution of the coordinates of iota o f with the source
/// metric: g_n(i) = min over t in the domain of [d_Y(f t, y_n) + d_X(i, t)].
/// Each coordinate is exactly 1-Lipschitz on the source. With an empty
/// domain every vector is zero (the degenerate eps >= 1 case).
inline std::vector<RatVec> inf_convolution(const FiniteMetric& source,
                                           const FiniteMetric& target,
                                           const std::vector<std::size_t>& f,
                                           const std::vector<bool>& domain) {
  std::vector<RatVec> g(source.size(), RatVec(target.size()));
  std::vector<std::size_t> dom;
  for (std::size_t t = 0; t < source.size(); ++t)
    if (domain[t]) dom.push_back(t);
  if (dom.empty()) return g;
  for (std::size_t i = 0; i < source.size(); ++i)
    for (std::size_t n = 0; n < target.size(); ++n) {
      Rat best = target.dist[f[dom[0]]][n] + source.dist[i][dom[0]];
      for (std::size_t t : dom)
        best = min(best, target.dist[f[t]][n] + source.dist[i][t]);
      g[i][n] = best;
    }
  return g;
}

/// Collapses a list of rational vectors to its distinct values under the
/// sup metric, in order of first occurrence. Returns the index map and the
/// resulting metric (labels name the first source atom of each class).
struct VectorSpace {
  FiniteMetric metric;
  std::vector<std::size_t> atom_of;
  std::vector<RatVec> points;
};

inline VectorSpace sup_metric_space(const std::vector<RatVec>& vectors,
                                    const std::vector<std::string>& source_labels) {
  VectorSpace v;
  std::map<RatVec, std::size_t> seen;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    auto [it, fresh] = seen.try_emplace(vectors[i], v.points.size());
    if (fresh) {
      v.points.push_back(vectors[i]);
      v.metric.labels.push_back("g(" + source_labels[i] + ")");
    }
    v.atom_of.push_back(it->second);
  }
  const std::size_t m = v.points.size();
  v.metric.dist.assign(m, RatVec(m));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      v.metric.dist[a][b] = sup_dist(v.points[a], v.points[b]);
  check_metric(v.metric);
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Regularization: from lower <_eps upper produce an exactly dominated space
// box-close to lower.

struct RegularizeResult {
  MMSpace regular;           // Z with Z < X exactly
  MapWitness onto_regular;   // the verified 1-Lipschitz map X -> Z
  Rat box_bound;             // verified upper bound for box(Y, Z), <= 3 eps
  bool box_exact;            // true when box() ran inside its guard
};

inline RegularizeResult regularize(const MMSpace& x, const MMSpace& y,
                                   const EpsWitness& w,
                                   const Limits& limits = {}) {
  if (!verify_witness(x, y, w).valid)
    throw PreconditionFailed("regularize: witness is not valid at its eps");
  const Rat& eps = w.eps;

  std::vector<RatVec> g =
      detail::inf_convolution(x.metric, y.metric, w.f.f, w.domain);

  // Scalar-lemma assertions on the domain: the convolution stays within eps
  // below the embedded coordinates, and coordinate gaps move by at most eps.
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!w.domain[i]) continue;
    for (std::size_t n = 0; n < y.size(); ++n) {
      Rat fn = y.dist(w.f(i), n);
      if (g[i][n] > fn || fn - g[i][n] > eps)
        throw ConstructionFailed("regularize: convolution defect exceeds eps");
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (!w.domain[k]) continue;
      for (std::size_t n = 0; n < y.size(); ++n) {
        Rat fgap = abs(y.dist(w.f(i), n) - y.dist(w.f(k), n));
        Rat ggap = abs(g[i][n] - g[k][n]);
        if (abs(fgap - ggap) > eps)
          throw ConstructionFailed("regularize: coordinate gap moved by more than eps");
      }
    }
  }

  detail::VectorSpace vs = detail::sup_metric_space(g, x.metric.labels);
  RatVec mass(vs.metric.size());
  for (std::size_t i = 0; i < x.size(); ++i) mass[vs.atom_of[i]] += x.mass[i];

  RegularizeResult r;
  r.regular = MMSpace{vs.metric, std::move(mass)};
  check_space(r.regular);
  r.onto_regular = MapWitness{vs.atom_of};
  if (!verify_witness(x, r.regular, r.onto_regular).valid)
    throw ConstructionFailed("regularize: projection is not an exact witness");

  const Rat bound = Rat(3) * eps;
  if (y.size() * r.regular.size() <= limits.box_nodes) {
    r.box_bound = box_value(y, r.regular, limits);
    r.box_exact = true;
  } else {
    // Couple mu_Y with mu_Z through the optimal Prohorov coupling against
    // f_* mu_X, splitting each pushforward atom over its preimages.
    RatVec pushed(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) pushed[w.f(i)] += x.mass[i];
    ProhorovComputation pc = prohorov_compute(y.metric, y.mass, pushed);
    RatMatrix pi(y.size(), RatVec(r.regular.size()));
    for (std::size_t a = 0; a < y.size(); ++a)
      for (std::size_t j = 0; j < y.size(); ++j) {
        if (pc.coupling.pi[a][j].is_zero()) continue;
        for (std::size_t i = 0; i < x.size(); ++i)
          if (w.f(i) == j)
            pi[a][vs.atom_of[i]] +=
                pc.coupling.pi[a][j] * x.mass[i] / pushed[j];
      }
    Coupling c{std::move(pi), y.mass, r.regular.mass};
    check_coupling(c);
    r.box_bound = box_upper_from_coupling(y, r.regular, c).value;
    r.box_exact = false;
  }
  if (r.box_bound > bound)
    throw ConstructionFailed("regularize: box postcondition exceeded 3 eps");
  return r;
}

// ---------------------------------------------------------------------------
// GH regularization: from L <_eps K (GH order) produce a 1-Lipschitz
// surjective image GH-close to L.

struct GhRegularizeResult {
  FiniteMetric regular;     // Z = g(K) with the sup metric
  MapWitness surjection;    // K -> Z, exactly 1-Lipschitz and onto
  Rat gh_bound;             // verified bound on gh(L, Z), <= 2 eps
  bool gh_exact;            // true when gh() ran inside its guard
};

inline GhRegularizeResult regularize_gh(const FiniteMetric& k,
                                        const FiniteMetric& l,
                                        const MapWitness& f, const Rat& eps,
                                        const Limits& limits = {}) {
  if (f.size() != k.size())
    throw DimensionMismatch("regularize_gh: map has wrong source size");
  if (!verify_gh_eps(k, l, f, eps).valid)
    throw PreconditionFailed("regularize_gh: map fails the gh-eps clauses");

  std::vector<RatVec> g = detail::inf_convolution(
      k, l, f.f, std::vector<bool>(k.size(), true));
  detail::VectorSpace vs = detail::sup_metric_space(g, k.labels);

  GhRegularizeResult r;
  r.regular = vs.metric;
  r.surjection = MapWitness{vs.atom_of};
  for (std::size_t i = 0; i < k.size(); ++i)
    for (std::size_t j = 0; j < k.size(); ++j)
      if (r.regular.dist[vs.atom_of[i]][vs.atom_of[j]] > k.dist[i][j])
        throw ConstructionFailed("regularize_gh: image map not 1-Lipschitz");

  const Rat bound = Rat(2) * eps;
  if (l.size() + r.regular.size() <= limits.gh_atoms) {
    r.gh_bound = gh_value(l, r.regular, limits);
    r.gh_exact = true;
  } else {
    // Hausdorff distance between iota(L) and g(K) inside the embedding
    // space; both sets sit isometrically there, so it bounds gh(L, Z).
    KuratowskiTable tl = kuratowski(l);
    Rat haus;
    for (const RatVec& row : tl.rows) {
      Rat nearest = sup_dist(row, vs.points[0]);
      for (const RatVec& p : vs.points) nearest = min(nearest, sup_dist(row, p));
      haus = max(haus, nearest);
    }
    for (const RatVec& p : vs.points) {
      Rat nearest = sup_dist(p, tl.rows[0]);
      for (const RatVec& row : tl.rows) nearest = min(nearest, sup_dist(p, row));
      haus = max(haus, nearest);
    }
    r.gh_bound = haus;
    r.gh_exact = false;
  }
  if (r.gh_bound > bound)
    throw ConstructionFailed("regularize_gh: gh postcondition exceeded 2 eps");
  return r;
}

// ---------------------------------------------------------------------------
// Chain compression: X_1 <_{e_1} X_2 <_{e_2} ... <_{e_{N-1}} X_N composes to
// X_1 <_{5 sum e_i} X_N by cascading infimal convolutions through the
// Kuratowski embeddings and finishing with an exact nearest-point map.

struct ChainCertificate {
  std::vector<MMSpace> spaces;
  std::vector<EpsWitness> steps;  // steps[i]: spaces[i] < spaces[i+1]
  EpsWitness composed;            // spaces[0] < spaces.back()
  Rat step_eps_sum;
};

inline ChainCertificate chain_compress(std::vector<MMSpace> spaces,
                                       std::vector<EpsWitness> steps) {
  if (spaces.empty()) throw PreconditionFailed("chain_compress: empty chain");
  if (steps.size() + 1 != spaces.size())
    throw DimensionMismatch("chain_compress: need one step per adjacent pair");
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (!verify_witness(spaces[i + 1], spaces[i], steps[i]).valid)
      throw PreconditionFailed("chain_compress: step " + std::to_string(i) +
                               " is not valid at its eps");

  ChainCertificate cert;
  cert.step_eps_sum = Rat(0);
  for (const EpsWitness& s : steps) cert.step_eps_sum += s.eps;
  const Rat bound = Rat(5) * cert.step_eps_sum;
  const MMSpace& top = spaces.back();
  const MMSpace& base = spaces.front();

  // A step with an empty nonexceptional domain forces eps >= 1; fall back
  // to the constant map, which verifies at 5 * sum >= 5.
  bool degenerate = false;
  for (const EpsWitness& s : steps) {
    bool empty = true;
    for (bool b : s.domain) empty = empty && !b;
    degenerate = degenerate || empty;
  }

  EpsWitness composed;
  if (spaces.size() == 1) {
    composed = EpsWitness{MapWitness::identity(top.size()),
                          EpsWitness::full_domain(top.size()), Rat(0)};
  } else if (degenerate) {
    composed = EpsWitness{MapWitness{std::vector<std::size_t>(top.size(), 0)},
                          EpsWitness::full_domain(top.size()), Rat(0)};
    composed.eps = tight_eps(top, base, composed.f, composed.domain);
  } else {
    std::vector<KuratowskiTable> tables;
    tables.reserve(spaces.size());
    for (const MMSpace& s : spaces) tables.push_back(kuratowski(s.metric));

    // Cascade each top atom down to a vector over the base space.
    std::vector<RatVec> vectors;
    vectors.reserve(top.size());
    for (std::size_t a = 0; a < top.size(); ++a) {
      RatVec v = tables.back().rows[a];
      for (std::size_t n = spaces.size() - 1; n >= 1; --n) {
        const EpsWitness& step = steps[n - 1];
        const MMSpace& here = spaces[n];
        const MMSpace& down = spaces[n - 1];
        RatVec next(down.size());
        for (std::size_t c = 0; c < down.size(); ++c) {
          Rat best;
          bool first = true;
          for (std::size_t t = 0; t < here.size(); ++t) {
            if (!step.domain[t]) continue;
            Rat cand = down.dist(step.f(t), c) + sup_dist(v, tables[n].rows[t]);
            if (first || cand < best) {
              best = cand;
              first = false;
            }
          }
          next[c] = best;
        }
        v = std::move(next);
      }
      vectors.push_back(std::move(v));
    }

    // Exact nearest point of the base space, lowest index on ties; the
    // domain keeps the atoms landing within 2 * sum of the base image.
    std::vector<std::size_t> h(top.size());
    std::vector<bool> domain(top.size());
    const Rat reach = Rat(2) * cert.step_eps_sum;
    for (std::size_t a = 0; a < top.size(); ++a) {
      std::size_t arg = 0;
      Rat best = sup_dist(vectors[a], tables.front().rows[0]);
      for (std::size_t c = 1; c < base.size(); ++c) {
        Rat cand = sup_dist(vectors[a], tables.front().rows[c]);
        if (cand < best) {
          best = cand;
          arg = c;
        }
      }
      h[a] = arg;
      domain[a] = best <= reach;
    }
    composed = EpsWitness{MapWitness{std::move(h)}, std::move(domain), Rat(0)};
    composed.eps = tight_eps(top, base, composed.f, composed.domain);
  }

  if (composed.eps > bound)
    throw ConstructionFailed("chain_compress exceeded the 5 sum bound");
  if (!verify_witness(top, base, composed).valid)
    throw ConstructionFailed("chain_compress witness failed re-verification");

  cert.spaces = std::move(spaces);
  cert.steps = std::move(steps);
  cert.composed = std::move(composed);
  return cert;
}

}  // namespace mmkit
