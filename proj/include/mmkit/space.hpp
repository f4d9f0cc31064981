#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "mmkit/errors.hpp"
#include "mmkit/limits.hpp"
#include "mmkit/metric.hpp"

namespace mmkit {

/// A map between atom sets, stored as target indices. `f[i]` is the image
/// of source atom i. When presented as a witness for Y < X (X dominates Y)
/// the source is X and the target is Y.
struct MapWitness {
  std::vector<std::size_t> f;

  std::size_t size() const { return f.size(); }
  std::size_t operator()(std::size_t i) const { return f[i]; }

  static MapWitness identity(std::size_t n) {
    MapWitness w;
    w.f.resize(n);
    std::iota(w.f.begin(), w.f.end(), std::size_t{0});
    return w;
  }
};

/// Composition (g after f): source of `f`, target of `g`.
inline MapWitness compose(const MapWitness& g, const MapWitness& f) {
  MapWitness h;
  h.f.reserve(f.size());
  for (std::size_t i : f.f) h.f.push_back(g.f.at(i));
  return h;
}

/// A metric measure space at finite scale: a FiniteMetric plus a strictly
/// positive rational probability mass on every point. The support convention
/// supp(mu) = X is enforced at construction time: zero-mass atoms never
/// survive validate_space.
struct MMSpace {
  FiniteMetric metric;
  RatVec mass;

  std::size_t size() const { return mass.size(); }
  const Rat& dist(std::size_t i, std::size_t j) const {
    return metric.dist[i][j];
  }
  const std::string& label(std::size_t i) const { return metric.labels[i]; }

  Rat max_atom_mass() const {
    Rat m;
    for (const Rat& x : mass) m = max(m, x);
    return m;
  }
};

/// One-point probe space, mass 1.
inline MMSpace one_point_space(const std::string& label = "pt") {
  return MMSpace{FiniteMetric{{label}, {{Rat(0)}}}, {Rat(1)}};
}

inline void check_probability_vector(const RatVec& mass, std::size_t n,
                                     bool allow_zero) {
  if (mass.size() != n)
    throw DimensionMismatch("mass vector has " + std::to_string(mass.size()) +
                            " entries, expected " + std::to_string(n));
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i].sign() < 0)
      throw MassError("mass[" + std::to_string(i) + "] = " +
                      mass[i].to_string() + " is negative");
    if (!allow_zero && mass[i].is_zero())
      throw MassError("mass[" + std::to_string(i) + "] is zero");
  }
  if (sum(mass) != Rat(1))
    throw MassError("mass sums to " + sum(mass).to_string() + ", expected 1");
}

/// Builds an MMSpace from raw data. Zero-mass atoms are dropped first
/// (support normalization), then the metric axioms and the mass invariants
/// are checked exactly on the retained atoms.
inline MMSpace validate_space(const std::vector<std::string>& labels,
                              const RatMatrix& dist, const RatVec& mass) {
  if (dist.size() != labels.size())
    throw DimensionMismatch("distance matrix is not square over the points");
  check_probability_vector(mass, labels.size(), /*allow_zero=*/true);

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < mass.size(); ++i)
    if (!mass[i].is_zero()) keep.push_back(i);

  std::vector<std::string> sub_labels;
  RatMatrix sub_dist(keep.size(), RatVec(keep.size()));
  RatVec sub_mass;
  for (std::size_t a = 0; a < keep.size(); ++a) {
    if (dist[keep[a]].size() != labels.size())
      throw DimensionMismatch("distance matrix is not square");
    sub_labels.push_back(labels[keep[a]]);
    sub_mass.push_back(mass[keep[a]]);
    for (std::size_t b = 0; b < keep.size(); ++b)
      sub_dist[a][b] = dist[keep[a]][keep[b]];
  }
  FiniteMetric m = make_metric(std::move(sub_labels), std::move(sub_dist));
  return MMSpace{std::move(m), std::move(sub_mass)};
}

inline MMSpace validate_space(const FiniteMetric& metric, const RatVec& mass) {
  return validate_space(metric.labels, metric.dist, mass);
}

/// Re-checks every MMSpace invariant; the cheap assertion all constructors
/// funnel through.
inline void check_space(const MMSpace& s) {
  check_metric(s.metric);
  check_probability_vector(s.mass, s.size(), /*allow_zero=*/false);
}

// ---------------------------------------------------------------------------
// Couplings

/// A rational matrix with prescribed marginals; the finite stand-in for the
/// interval parameters and transport plans of the continuum theory.
struct Coupling {
  RatMatrix pi;   // rows indexed by mu-atoms, columns by nu-atoms
  RatVec mu;
  RatVec nu;

  std::size_t rows() const { return mu.size(); }
  std::size_t cols() const { return nu.size(); }
};

inline void check_coupling(const Coupling& c) {
  if (c.pi.size() != c.rows())
    throw DimensionMismatch("coupling has wrong row count");
  for (std::size_t i = 0; i < c.rows(); ++i) {
    if (c.pi[i].size() != c.cols())
      throw DimensionMismatch("coupling row " + std::to_string(i) +
                              " has wrong length");
    for (std::size_t j = 0; j < c.cols(); ++j)
      if (c.pi[i][j].sign() < 0)
        throw MassError("coupling entry (" + std::to_string(i) + "," +
                        std::to_string(j) + ") is negative");
  }
  for (std::size_t i = 0; i < c.rows(); ++i) {
    Rat row = sum(c.pi[i]);
    if (row != c.mu[i])
      throw MassError("coupling row " + std::to_string(i) + " sums to " +
                      row.to_string() + ", expected " + c.mu[i].to_string());
  }
  for (std::size_t j = 0; j < c.cols(); ++j) {
    Rat col;
    for (std::size_t i = 0; i < c.rows(); ++i) col += c.pi[i][j];
    if (col != c.nu[j])
      throw MassError("coupling column " + std::to_string(j) + " sums to " +
                      col.to_string() + ", expected " + c.nu[j].to_string());
  }
}

inline Coupling identity_coupling(const RatVec& mu) {
  Coupling c;
  c.mu = mu;
  c.nu = mu;
  c.pi.assign(mu.size(), RatVec(mu.size()));
  for (std::size_t i = 0; i < mu.size(); ++i) c.pi[i][i] = mu[i];
  return c;
}

inline Coupling product_coupling(const RatVec& mu, const RatVec& nu) {
  Coupling c;
  c.mu = mu;
  c.nu = nu;
  c.pi.assign(mu.size(), RatVec(nu.size()));
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) c.pi[i][j] = mu[i] * nu[j];
  return c;
}

// ---------------------------------------------------------------------------
// Core operations

struct PushforwardResult {
  MMSpace space;
  std::vector<std::size_t> atom_of;  // source atom -> result atom
  std::vector<std::size_t> points;   // result atom -> ambient point
};

/// Pushes X forward along f into the ambient metric M: atoms with equal
/// image merge, masses add, and the result carries M's distances restricted
/// to the image. With M = X.metric this is the plain pushforward f_*X.
inline PushforwardResult pushforward(const MMSpace& x,
                                     const std::vector<std::size_t>& f,
                                     const FiniteMetric& ambient) {
  if (f.size() != x.size())
    throw DimensionMismatch("pushforward map has wrong source size");
  for (std::size_t p : f)
    if (p >= ambient.size())
      throw DimensionMismatch("pushforward map image out of range");

  std::vector<std::size_t> image = f;
  std::sort(image.begin(), image.end());
  image.erase(std::unique(image.begin(), image.end()), image.end());

  std::vector<std::size_t> index_of(ambient.size(), SIZE_MAX);
  for (std::size_t a = 0; a < image.size(); ++a) index_of[image[a]] = a;

  RatVec mass(image.size());
  for (std::size_t i = 0; i < x.size(); ++i) mass[index_of[f[i]]] += x.mass[i];

  std::vector<std::string> labels;
  RatMatrix dist(image.size(), RatVec(image.size()));
  for (std::size_t a = 0; a < image.size(); ++a) {
    labels.push_back(ambient.labels[image[a]]);
    for (std::size_t b = 0; b < image.size(); ++b)
      dist[a][b] = ambient.dist[image[a]][image[b]];
  }

  PushforwardResult r;
  r.space = MMSpace{make_metric(std::move(labels), std::move(dist)),
                    std::move(mass)};
  r.atom_of.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r.atom_of.push_back(index_of[f[i]]);
  r.points = std::move(image);
  check_space(r.space);
  return r;
}

inline PushforwardResult pushforward(const MMSpace& x,
                                     const std::vector<std::size_t>& f) {
  return pushforward(x, f, x.metric);
}

struct QuotientResult {
  MMSpace space;
  MapWitness projection;  // original point -> quotient atom
};

/// Collapses a pseudo-metric to a metric by identifying points at distance
/// zero (union-find over the zero relation). Classes are ordered by their
/// lowest member, class mass is the sum of member masses, and the canonical
/// projection is 1-Lipschitz by construction (asserted).
inline QuotientResult pseudo_to_metric(const FinitePseudoMetric& p,
                                       const RatVec& mass) {
  const std::size_t n = p.size();
  check_pseudo_metric(p);
  check_probability_vector(mass, n, /*allow_zero=*/false);

  std::vector<std::size_t> root(n);
  std::iota(root.begin(), root.end(), std::size_t{0});
  // In a pseudo-metric the zero relation is transitive, so one sweep
  // attaching each point to its lowest zero-distance predecessor suffices.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (p.dist[i][j].is_zero()) {
        root[i] = root[j];
        break;
      }

  std::vector<std::size_t> reps;
  std::vector<std::size_t> class_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (root[i] == i) {
      class_of[i] = reps.size();
      reps.push_back(i);
    } else {
      class_of[i] = class_of[root[i]];
    }
  }

  std::vector<std::string> labels;
  RatMatrix dist(reps.size(), RatVec(reps.size()));
  RatVec qmass(reps.size());
  for (std::size_t a = 0; a < reps.size(); ++a) {
    labels.push_back(p.labels[reps[a]]);
    for (std::size_t b = 0; b < reps.size(); ++b)
      dist[a][b] = p.dist[reps[a]][reps[b]];
  }
  for (std::size_t i = 0; i < n; ++i) qmass[class_of[i]] += mass[i];

  QuotientResult r;
  r.space = MMSpace{make_metric(std::move(labels), std::move(dist)),
                    std::move(qmass)};
  r.projection = MapWitness{class_of};
  // The projection must be exactly 1-Lipschitz: class distance equals the
  // pseudo-distance of any pair of representatives.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (r.space.dist(class_of[i], class_of[j]) > p.dist[i][j])
        throw ConstructionFailed("quotient projection is not 1-Lipschitz");
  check_space(r.space);
  return r;
}

// ---------------------------------------------------------------------------
// mm-isomorphism

namespace detail {

inline RatVec sorted_row(const RatMatrix& d, std::size_t i) {
  RatVec r = d[i];
  std::sort(r.begin(), r.end());
  return r;
}

inline bool iso_backtrack(const MMSpace& x, const MMSpace& y,
                          std::vector<std::size_t>& img,
                          std::vector<bool>& used, std::size_t i) {
  const std::size_t n = x.size();
  if (i == n) return true;
  for (std::size_t j = 0; j < n; ++j) {
    if (used[j] || x.mass[i] != y.mass[j]) continue;
    bool ok = true;
    for (std::size_t k = 0; k < i && ok; ++k)
      ok = x.dist(i, k) == y.dist(j, img[k]);
    if (!ok) continue;
    img[i] = j;
    used[j] = true;
    if (iso_backtrack(x, y, img, used, i + 1)) return true;
    used[j] = false;
  }
  return false;
}

}  // namespace detail

/// Decides mm-isomorphism: a bijection of atoms preserving distances and
/// masses exactly. Backtracking restricted to equal-mass candidates with
/// equal distance multisets.
inline bool mm_isomorphic(const MMSpace& x, const MMSpace& y,
                          const Limits& limits = {}) {
  if (x.size() != y.size()) return false;
  const std::size_t n = x.size();
  if (n > limits.iso_atoms)
    throw SizeGuardError("mm_isomorphic: " + std::to_string(n) +
                         " atoms exceeds guard " +
                         std::to_string(limits.iso_atoms));

  // Cheap invariants first: sorted mass and distance-row multisets.
  {
    RatVec mx = x.mass, my = y.mass;
    std::sort(mx.begin(), mx.end());
    std::sort(my.begin(), my.end());
    if (mx != my) return false;
    std::vector<std::pair<RatVec, Rat>> sx, sy;
    for (std::size_t i = 0; i < n; ++i) {
      sx.push_back({detail::sorted_row(x.metric.dist, i), x.mass[i]});
      sy.push_back({detail::sorted_row(y.metric.dist, i), y.mass[i]});
    }
    std::sort(sx.begin(), sx.end());
    std::sort(sy.begin(), sy.end());
    if (sx != sy) return false;
  }

  std::vector<std::size_t> img(n);
  std::vector<bool> used(n, false);
  return detail::iso_backtrack(x, y, img, used, 0);
}

}  // namespace mmkit
