#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "mmkit/limits.hpp"
#include "mmkit/maxflow.hpp"
#include "mmkit/metric.hpp"

namespace mmkit {

// Convention used throughout: closed balls and closed conditions. The
// Prohorov value is the minimum over the finite candidate threshold set of
// max(t, 1 - m(t)), where m(t) is the largest coupling mass placeable on
// pairs at distance <= t. For finite spaces this minimum coincides with the
// infimum of the open-condition textbook definition.

struct ProhorovComputation {
  Rat value;
  Coupling coupling;            // achieves mass >= 1 - value on pairs <= value
  std::size_t candidates_examined = 0;
};

/// Matrix form, so the same kernel serves genuine metrics and the
/// pseudo-metrics arising from gluing.
inline ProhorovComputation prohorov_compute(const RatMatrix& dist,
                                            const RatVec& mu,
                                            const RatVec& nu) {
  const std::size_t n = dist.size();
  check_probability_vector(mu, n, /*allow_zero=*/true);
  check_probability_vector(nu, n, /*allow_zero=*/true);

  RatVec thresholds{Rat(0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) thresholds.push_back(dist[i][j]);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  ProhorovComputation best;
  best.value = Rat(2);  // above any possible Prohorov value
  RatMatrix best_pi;
  for (const Rat& t : thresholds) {
    if (t >= best.value) break;  // max(t, .) can no longer improve
    std::vector<std::pair<std::size_t, std::size_t>> admissible;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (dist[i][j] <= t) admissible.emplace_back(i, j);
    PairMassResult pm = max_pair_mass(mu, nu, admissible);
    ++best.candidates_examined;
    Rat candidate = max(t, Rat(1) - pm.mass);
    if (candidate < best.value) {
      best.value = candidate;
      best_pi = std::move(pm.pi);
    }
  }
  best.coupling = complete_coupling(std::move(best_pi), mu, nu);
  return best;
}

inline ProhorovComputation prohorov_compute(const FiniteMetric& m,
                                            const RatVec& mu,
                                            const RatVec& nu) {
  return prohorov_compute(m.dist, mu, nu);
}

inline Rat prohorov_value(const FiniteMetric& m, const RatVec& mu,
                          const RatVec& nu) {
  return prohorov_compute(m.dist, mu, nu).value;
}

inline Rat prohorov_value(const RatMatrix& dist, const RatVec& mu,
                          const RatVec& nu) {
  return prohorov_compute(dist, mu, nu).value;
}

/// Independent oracle: decides the Prohorov value by enumerating all 2^n
/// subsets A and both one-sided conditions mu(A) <= nu(B_t(A)) + eps,
/// minimizing max(t, worst mass defect at radius t) over the finite
/// candidate set. Shares no code with the max-flow route.
inline Rat prohorov_oracle(const FiniteMetric& m, const RatVec& mu,
                           const RatVec& nu, const Limits& limits = {}) {
  const std::size_t n = m.size();
  if (n > limits.prohorov_oracle_atoms)
    throw SizeGuardError("prohorov_oracle: " + std::to_string(n) +
                         " atoms exceeds guard " +
                         std::to_string(limits.prohorov_oracle_atoms));
  check_probability_vector(mu, n, /*allow_zero=*/true);
  check_probability_vector(nu, n, /*allow_zero=*/true);

  RatVec thresholds = m.distinct_distances();
  thresholds.insert(thresholds.begin(), Rat(0));

  Rat best(2);
  for (const Rat& t : thresholds) {
    if (t >= best) break;
    Rat worst_defect(0);
    for (std::size_t a = 1; a < (std::size_t{1} << n); ++a) {
      // B_t(A): points within distance t of A (closed ball).
      Rat mu_a, nu_a, mu_ball, nu_ball;
      for (std::size_t i = 0; i < n; ++i) {
        bool in_a = (a >> i) & 1;
        bool in_ball = false;
        for (std::size_t j = 0; j < n && !in_ball; ++j)
          in_ball = ((a >> j) & 1) && m.dist[i][j] <= t;
        if (in_a) {
          mu_a += mu[i];
          nu_a += nu[i];
        }
        if (in_ball) {
          mu_ball += mu[i];
          nu_ball += nu[i];
        }
      }
      worst_defect = max(worst_defect, mu_a - nu_ball);
      worst_defect = max(worst_defect, nu_a - mu_ball);
    }
    best = min(best, max(t, worst_defect));
  }
  return best;
}

}  // namespace mmkit
