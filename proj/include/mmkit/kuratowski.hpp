#pragma once

#include <vector>

#include "mmkit/metric.hpp"

namespace mmkit {

/// Kuratowski embedding table: row y holds the distance vector
/// (d(y, y_1), ..., d(y, y_n)). Sup-norm distance between two rows equals
/// the metric distance exactly, with the maximum attained at the coordinate
/// of the other point; this is asserted at construction.
struct KuratowskiTable {
  std::vector<RatVec> rows;

  std::size_t size() const { return rows.size(); }
};

inline Rat sup_dist(const RatVec& a, const RatVec& b) {
  Rat d;
  for (std::size_t n = 0; n < a.size(); ++n) d = max(d, abs(a[n] - b[n]));
  return d;
}

inline KuratowskiTable kuratowski(const FiniteMetric& k) {
  KuratowskiTable t;
  t.rows = k.dist;
  for (std::size_t i = 0; i < k.size(); ++i)
    for (std::size_t j = 0; j < k.size(); ++j)
      if (sup_dist(t.rows[i], t.rows[j]) != k.dist[i][j])
        throw ConstructionFailed("kuratowski embedding is not isometric");
  return t;
}

}  // namespace mmkit
