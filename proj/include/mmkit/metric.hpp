#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "mmkit/errors.hpp"
#include "mmkit/rational.hpp"

namespace mmkit {

/// A finite metric space: labeled points and an exact rational distance
/// matrix. Off-diagonal entries are strictly positive; use
/// FinitePseudoMetric when identifications are still pending.
struct FiniteMetric {
  std::vector<std::string> labels;
  RatMatrix dist;

  std::size_t size() const { return labels.size(); }
  const Rat& operator()(std::size_t i, std::size_t j) const {
    return dist[i][j];
  }

  Rat diameter() const {
    Rat d;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j) d = max(d, dist[i][j]);
    return d;
  }

  /// Sorted distinct off-diagonal entries (the finite threshold sets all
  /// distance computations minimize over).
  RatVec distinct_distances() const {
    RatVec v;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j) v.push_back(dist[i][j]);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }
};

/// As FiniteMetric but zero distance between distinct points is allowed.
struct FinitePseudoMetric {
  std::vector<std::string> labels;
  RatMatrix dist;

  std::size_t size() const { return labels.size(); }
  const Rat& operator()(std::size_t i, std::size_t j) const {
    return dist[i][j];
  }
};

namespace detail {

inline void check_axioms(const std::vector<std::string>& labels,
                         const RatMatrix& dist, bool allow_zero) {
  const std::size_t n = labels.size();
  if (n == 0) throw DimensionMismatch("metric must have at least one point");
  if (dist.size() != n)
    throw DimensionMismatch("distance matrix has " +
                            std::to_string(dist.size()) + " rows, expected " +
                            std::to_string(n));
  for (std::size_t i = 0; i < n; ++i)
    if (dist[i].size() != n)
      throw DimensionMismatch("distance matrix row " + std::to_string(i) +
                              " has " + std::to_string(dist[i].size()) +
                              " entries, expected " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!dist[i][i].is_zero())
      throw MetricAxiomViolation("zero_diagonal", {labels[i]},
                                 "d(" + labels[i] + ", " + labels[i] +
                                     ") = " + dist[i][i].to_string());
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist[i][j] != dist[j][i])
        throw MetricAxiomViolation(
            "symmetry", {labels[i], labels[j]},
            "d(" + labels[i] + ", " + labels[j] + ") != d(" + labels[j] +
                ", " + labels[i] + ")");
      if (dist[i][j].sign() < 0)
        throw MetricAxiomViolation("nonnegativity", {labels[i], labels[j]},
                                   "d(" + labels[i] + ", " + labels[j] +
                                       ") = " + dist[i][j].to_string());
      if (!allow_zero && dist[i][j].is_zero())
        throw MetricAxiomViolation(
            "positivity", {labels[i], labels[j]},
            "d(" + labels[i] + ", " + labels[j] + ") = 0 between distinct points");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (dist[i][k] > dist[i][j] + dist[j][k])
          throw MetricAxiomViolation(
              "triangle", {labels[i], labels[j], labels[k]},
              "d(" + labels[i] + ", " + labels[k] + ") = " +
                  dist[i][k].to_string() + " > " +
                  (dist[i][j] + dist[j][k]).to_string() + " via " + labels[j]);
}

}  // namespace detail

/// Validates all metric axioms exactly and returns the metric.
inline FiniteMetric make_metric(std::vector<std::string> labels,
                                RatMatrix dist) {
  detail::check_axioms(labels, dist, /*allow_zero=*/false);
  return FiniteMetric{std::move(labels), std::move(dist)};
}

inline FinitePseudoMetric make_pseudo_metric(std::vector<std::string> labels,
                                             RatMatrix dist) {
  detail::check_axioms(labels, dist, /*allow_zero=*/true);
  return FinitePseudoMetric{std::move(labels), std::move(dist)};
}

/// Re-checks an already constructed metric; used by tests and by operations
/// that assemble matrices entry by entry.
inline void check_metric(const FiniteMetric& m) {
  detail::check_axioms(m.labels, m.dist, /*allow_zero=*/false);
}

inline void check_pseudo_metric(const FinitePseudoMetric& m) {
  detail::check_axioms(m.labels, m.dist, /*allow_zero=*/true);
}

}  // namespace mmkit
