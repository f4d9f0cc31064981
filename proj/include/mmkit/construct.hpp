#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mmkit/limits.hpp"
#include "mmkit/space.hpp"
#include "mmkit/witness.hpp"

namespace mmkit {

// ---------------------------------------------------------------------------
// Product space
//
// Sup product metric max(d_X, d_Y): it keeps all distances rational, makes
// both projections exactly 1-Lipschitz, and matches the sup norm used by the
// embedding constructions.

struct ProductResult {
  MMSpace space;
  MapWitness proj_first;   // verified witness for X < X x Y
  MapWitness proj_second;  // verified witness for Y < X x Y
};

inline ProductResult product(const MMSpace& x, const MMSpace& y,
                             const Limits& limits = {}) {
  const std::size_t m = x.size(), n = y.size();
  if (m * n > limits.product_atoms)
    throw SizeGuardError("product: " + std::to_string(m * n) +
                         " atoms exceeds guard " +
                         std::to_string(limits.product_atoms));
  std::vector<std::string> labels;
  RatMatrix dist(m * n, RatVec(m * n));
  RatVec mass;
  ProductResult r;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      labels.push_back("(" + x.label(i) + "," + y.label(j) + ")");
      mass.push_back(x.mass[i] * y.mass[j]);
      r.proj_first.f.push_back(i);
      r.proj_second.f.push_back(j);
    }
  for (std::size_t a = 0; a < m * n; ++a)
    for (std::size_t b = 0; b < m * n; ++b)
      dist[a][b] = max(x.dist(a / n, b / n), y.dist(a % n, b % n));
  r.space = MMSpace{make_metric(std::move(labels), std::move(dist)),
                    std::move(mass)};
  check_space(r.space);
  if (!verify_witness(r.space, x, r.proj_first).valid ||
      !verify_witness(r.space, y, r.proj_second).valid)
    throw ConstructionFailed("product projection failed re-verification");
  return r;
}

// ---------------------------------------------------------------------------
// Quotient dominator
//
// Given exact witnesses fY for Y < W and fZ for Z < W, the pseudo-metric
// d'(w, w') = max(d_Y(fY w, fY w'), d_Z(fZ w, fZ w')) quotients to a space X
// with Y, Z < X < W, all three certified.

struct QuotientDominatorResult {
  MMSpace dominator;        // X
  MapWitness onto_first;    // X -> Y
  MapWitness onto_second;   // X -> Z
  MapWitness from_ambient;  // W -> X (the canonical projection)
};

inline QuotientDominatorResult quotient_dominator(const MMSpace& w,
                                                  const MMSpace& y,
                                                  const MMSpace& z,
                                                  const MapWitness& fy,
                                                  const MapWitness& fz) {
  if (!verify_witness(w, y, fy).valid)
    throw PreconditionFailed("quotient_dominator: first witness invalid");
  if (!verify_witness(w, z, fz).valid)
    throw PreconditionFailed("quotient_dominator: second witness invalid");

  FinitePseudoMetric p;
  p.labels = w.metric.labels;
  p.dist.assign(w.size(), RatVec(w.size()));
  for (std::size_t a = 0; a < w.size(); ++a)
    for (std::size_t b = 0; b < w.size(); ++b)
      p.dist[a][b] =
          max(y.dist(fy(a), fy(b)), z.dist(fz(a), fz(b)));
  check_pseudo_metric(p);

  QuotientResult q = pseudo_to_metric(p, w.mass);

  QuotientDominatorResult r;
  r.dominator = std::move(q.space);
  r.from_ambient = std::move(q.projection);
  r.onto_first.f.assign(r.dominator.size(), 0);
  r.onto_second.f.assign(r.dominator.size(), 0);
  std::vector<bool> seen(r.dominator.size(), false);
  for (std::size_t a = 0; a < w.size(); ++a) {
    const std::size_t c = r.from_ambient(a);
    if (seen[c]) {
      // Well-definedness: equal quotient classes must map to equal points.
      if (r.onto_first(c) != fy(a) || r.onto_second(c) != fz(a))
        throw ConstructionFailed(
            "quotient_dominator: class maps are not well-defined");
    } else {
      r.onto_first.f[c] = fy(a);
      r.onto_second.f[c] = fz(a);
      seen[c] = true;
    }
  }
  if (!verify_witness(r.dominator, y, r.onto_first).valid ||
      !verify_witness(r.dominator, z, r.onto_second).valid ||
      !verify_witness(w, r.dominator, r.from_ambient).valid)
    throw ConstructionFailed("quotient_dominator witness failed re-verification");
  return r;
}

}  // namespace mmkit
