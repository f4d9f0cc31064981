#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mmkit/prohorov.hpp"
#include "mmkit/space.hpp"
#include "mmkit/witness.hpp"

namespace mmkit {

// ---------------------------------------------------------------------------
// Gluing along couplings
//
// The disjoint union of the input spaces with bridge distances
//   d(z, z') = min over kept coupled pairs (a, b) of [d_i(z, a) + d_j(b, z')] + eps
// between adjacent blocks, completed by a shortest-path closure. Each block
// must re-embed isometrically after closure (a failure indicates an invalid
// input coupling) and adjacent pushed measures end up within Prohorov
// distance 2 eps. With eps = 0 twin points sit at distance 0, so the glued
// object is a pseudo-metric in general.

struct GlueResult {
  FinitePseudoMetric space;
  std::vector<std::vector<std::size_t>> embeddings;  // block -> union indices
  std::vector<RatVec> masses;                        // pushed measures on the union
  std::vector<Rat> dp_bounds;                        // exact d_P per adjacent pair
};

namespace detail {

inline void check_glue_precondition(
    const MMSpace& a, const MMSpace& b, const Coupling& pi, const Rat& eps,
    const std::vector<std::pair<std::size_t, std::size_t>>& kept) {
  if (eps.sign() < 0) throw PreconditionFailed("glue: eps must be nonnegative");
  if (pi.rows() != a.size() || pi.cols() != b.size())
    throw DimensionMismatch("glue: coupling shape does not match the spaces");
  check_coupling(pi);
  if (pi.mu != a.mass || pi.nu != b.mass)
    throw PreconditionFailed("glue: coupling marginals do not match");
  if (kept.empty())
    throw PreconditionFailed("glue: defect set must contain at least one pair");
  Rat kept_mass;
  for (auto [i, j] : kept) {
    if (i >= a.size() || j >= b.size())
      throw DimensionMismatch("glue: kept pair out of range");
    kept_mass += pi.pi[i][j];
  }
  if (kept_mass < Rat(1) - eps)
    throw PreconditionFailed("glue: kept mass below 1 - eps");
  for (std::size_t p = 0; p < kept.size(); ++p)
    for (std::size_t q = p; q < kept.size(); ++q)
      if (abs(a.dist(kept[p].first, kept[q].first) -
              b.dist(kept[p].second, kept[q].second)) > eps)
        throw PreconditionFailed("glue: kept pair distortion exceeds eps");
}

}  // namespace detail

inline GlueResult glue_chain(
    const std::vector<MMSpace>& spaces, const std::vector<Coupling>& couplings,
    const std::vector<Rat>& epss,
    const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& kept_sets) {
  if (spaces.empty()) throw PreconditionFailed("glue: empty chain");
  if (couplings.size() + 1 != spaces.size() || epss.size() != couplings.size() ||
      kept_sets.size() != couplings.size())
    throw DimensionMismatch("glue: need one coupling, eps, defect set per pair");
  for (std::size_t i = 0; i < couplings.size(); ++i)
    detail::check_glue_precondition(spaces[i], spaces[i + 1], couplings[i],
                                    epss[i], kept_sets[i]);

  std::vector<std::size_t> offset(spaces.size());
  std::size_t total = 0;
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    offset[s] = total;
    total += spaces[s].size();
  }

  // Everything unreachable in one hop starts at a finite sentinel strictly
  // above any genuine distance; closure pulls it down through the bridges.
  Rat big(1);
  for (const MMSpace& s : spaces) big += s.metric.diameter();
  for (const Rat& e : epss) big += e;
  big *= Rat(static_cast<long long>(spaces.size() + 1));

  RatMatrix d(total, RatVec(total, big));
  for (std::size_t s = 0; s < spaces.size(); ++s)
    for (std::size_t i = 0; i < spaces[s].size(); ++i)
      for (std::size_t j = 0; j < spaces[s].size(); ++j)
        d[offset[s] + i][offset[s] + j] = spaces[s].dist(i, j);
  for (std::size_t s = 0; s + 1 < spaces.size(); ++s) {
    const MMSpace& a = spaces[s];
    const MMSpace& b = spaces[s + 1];
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) {
        Rat cross = big;
        for (auto [p, q] : kept_sets[s])
          cross = min(cross, a.dist(i, p) + b.dist(q, j));
        cross += epss[s];
        d[offset[s] + i][offset[s + 1] + j] = cross;
        d[offset[s + 1] + j][offset[s] + i] = cross;
      }
  }
  for (std::size_t k = 0; k < total; ++k)
    for (std::size_t i = 0; i < total; ++i)
      for (std::size_t j = 0; j < total; ++j)
        d[i][j] = min(d[i][j], d[i][k] + d[k][j]);

  for (std::size_t s = 0; s < spaces.size(); ++s)
    for (std::size_t i = 0; i < spaces[s].size(); ++i)
      for (std::size_t j = 0; j < spaces[s].size(); ++j)
        if (d[offset[s] + i][offset[s] + j] != spaces[s].dist(i, j))
          throw ConstructionFailed(
              "glue: closure broke a block isometry (invalid coupling)");

  GlueResult r;
  std::vector<std::string> labels;
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    std::vector<std::size_t> emb;
    RatVec pushed(total);
    for (std::size_t i = 0; i < spaces[s].size(); ++i) {
      labels.push_back("b" + std::to_string(s) + ":" + spaces[s].label(i));
      emb.push_back(offset[s] + i);
      pushed[offset[s] + i] = spaces[s].mass[i];
    }
    r.embeddings.push_back(std::move(emb));
    r.masses.push_back(std::move(pushed));
  }
  r.space = make_pseudo_metric(std::move(labels), std::move(d));

  for (std::size_t s = 0; s + 1 < spaces.size(); ++s) {
    Rat dp = prohorov_value(r.space.dist, r.masses[s], r.masses[s + 1]);
    if (dp > Rat(2) * epss[s])
      throw ConstructionFailed("glue: adjacent Prohorov bound exceeded 2 eps");
    r.dp_bounds.push_back(dp);
  }
  if (spaces.size() >= 2) {
    Rat total_eps;
    for (const Rat& e : epss) total_eps += e;
    Rat ends = prohorov_value(r.space.dist, r.masses.front(), r.masses.back());
    if (ends > Rat(2) * total_eps)
      throw ConstructionFailed("glue: telescoped Prohorov bound exceeded");
  }
  return r;
}

inline GlueResult glue_pair(
    const MMSpace& a, const MMSpace& b, const Coupling& pi, const Rat& eps,
    const std::vector<std::pair<std::size_t, std::size_t>>& kept) {
  return glue_chain({a, b}, {pi}, {eps}, {kept});
}

}  // namespace mmkit
