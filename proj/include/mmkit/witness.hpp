#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mmkit/prohorov.hpp"
#include "mmkit/space.hpp"

namespace mmkit {

/// Witness for the eps-relaxed Lipschitz order Y <_eps X: a map f from X
/// into Y, a nonexceptional domain of X-atoms, and the defect eps. Valid
/// when the domain carries mass >= 1 - eps, f is (+eps)-Lipschitz on the
/// domain, and the pushforward is within Prohorov distance eps of mu_Y.
struct EpsWitness {
  MapWitness f;
  std::vector<bool> domain;  // over source atoms
  Rat eps;

  Rat domain_mass(const RatVec& mass) const {
    Rat m;
    for (std::size_t i = 0; i < domain.size(); ++i)
      if (domain[i]) m += mass[i];
    return m;
  }

  static std::vector<bool> full_domain(std::size_t n) {
    return std::vector<bool>(n, true);
  }
};

/// Witness for box(X, Y) <= eps in the coupling reformulation: a coupling of
/// (mu_X, mu_Y), the kept pairs (all carrying positive coupled mass), and
/// eps. Valid when the kept mass is >= 1 - eps and every pair of kept pairs
/// has distortion <= eps.
struct BoxWitness {
  Coupling coupling;
  std::vector<std::pair<std::size_t, std::size_t>> kept;
  Rat eps;
};

/// Witness for a Gromov-Hausdorff value: a correspondence covering both
/// sides whose distortion is exactly twice the reported distance.
struct CorrWitness {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  Rat distortion;
};

// ---------------------------------------------------------------------------
// Reports

/// One exactly-decided inequality inside a verification report.
struct Check {
  std::string what;
  std::string lhs;
  std::string relation;  // "<=", "=", ">="
  std::string rhs;
  bool holds = false;
};

struct Report {
  std::vector<Check> checks;
  bool valid = true;

  void record(std::string what, const Rat& lhs, const char* relation,
              const Rat& rhs) {
    bool ok = std::string_view(relation) == "="    ? lhs == rhs
              : std::string_view(relation) == "<=" ? lhs <= rhs
                                                   : lhs >= rhs;
    checks.push_back(Check{std::move(what), lhs.to_string(), relation,
                           rhs.to_string(), ok});
    valid = valid && ok;
  }
};

/// Result of a distance computation together with its machine-checkable
/// witness, which re-verifies exactly at the reported value.
struct DistanceResult {
  Rat value;
  std::variant<Coupling, BoxWitness, CorrWitness> witness;
  std::size_t candidates_examined = 0;
};

// ---------------------------------------------------------------------------
// verify_witness: the single re-verification gate. Every constructive
// operation in the toolkit passes its output through one of these overloads
// before returning it, and the CLI re-runs the same checks on request.

/// Verifies a MapWitness for lower < upper: f maps upper atoms onto lower
/// atoms, is 1-Lipschitz, and pushes mu_upper exactly onto mu_lower.
inline Report verify_witness(const MMSpace& upper, const MMSpace& lower,
                             const MapWitness& w) {
  if (w.size() != upper.size())
    throw DimensionMismatch("map witness has wrong source size");
  for (std::size_t i : w.f)
    if (i >= lower.size())
      throw DimensionMismatch("map witness image out of range");

  Report rep;
  for (std::size_t i = 0; i < upper.size(); ++i)
    for (std::size_t k = i + 1; k < upper.size(); ++k)
      rep.record("lipschitz d(f " + upper.label(i) + ", f " + upper.label(k) +
                     ")",
                 lower.dist(w(i), w(k)), "<=", upper.dist(i, k));
  RatVec pushed(lower.size());
  for (std::size_t i = 0; i < upper.size(); ++i) pushed[w(i)] += upper.mass[i];
  for (std::size_t j = 0; j < lower.size(); ++j)
    rep.record("pushforward mass onto " + lower.label(j), pushed[j], "=",
               lower.mass[j]);
  return rep;
}

/// Verifies an EpsWitness for lower <_eps upper.
inline Report verify_witness(const MMSpace& upper, const MMSpace& lower,
                             const EpsWitness& w) {
  if (w.f.size() != upper.size() || w.domain.size() != upper.size())
    throw DimensionMismatch("eps witness has wrong source size");
  for (std::size_t i : w.f.f)
    if (i >= lower.size())
      throw DimensionMismatch("eps witness image out of range");

  Report rep;
  rep.record("domain mass", w.domain_mass(upper.mass), ">=", Rat(1) - w.eps);
  for (std::size_t i = 0; i < upper.size(); ++i) {
    if (!w.domain[i]) continue;
    for (std::size_t k = i + 1; k < upper.size(); ++k) {
      if (!w.domain[k]) continue;
      rep.record("lipschitz+eps d(f " + upper.label(i) + ", f " +
                     upper.label(k) + ")",
                 lower.dist(w.f(i), w.f(k)), "<=", upper.dist(i, k) + w.eps);
    }
  }
  // Prohorov defect of the pushforward, computed exactly on lower's metric.
  RatVec pushed(lower.size());
  for (std::size_t i = 0; i < upper.size(); ++i)
    pushed[w.f(i)] += upper.mass[i];
  Rat dp = prohorov_value(lower.metric, pushed, lower.mass);
  rep.record("prohorov(f_* mu, mu)", dp, "<=", w.eps);
  return rep;
}

/// Verifies a BoxWitness between x and y.
inline Report verify_witness(const MMSpace& x, const MMSpace& y,
                             const BoxWitness& w) {
  if (w.coupling.rows() != x.size() || w.coupling.cols() != y.size())
    throw DimensionMismatch("box witness coupling has wrong shape");
  check_coupling(w.coupling);
  if (w.coupling.mu != x.mass || w.coupling.nu != y.mass)
    throw DimensionMismatch("box witness marginals do not match the spaces");

  Report rep;
  Rat kept_mass;
  for (auto [i, j] : w.kept) {
    if (i >= x.size() || j >= y.size())
      throw DimensionMismatch("box witness kept pair out of range");
    kept_mass += w.coupling.pi[i][j];
  }
  rep.record("coupling mass on kept pairs", kept_mass, ">=", Rat(1) - w.eps);
  for (std::size_t a = 0; a < w.kept.size(); ++a)
    for (std::size_t b = a; b < w.kept.size(); ++b) {
      auto [i, j] = w.kept[a];
      auto [k, l] = w.kept[b];
      rep.record("distortion (" + x.label(i) + "," + y.label(j) + ")x(" +
                     x.label(k) + "," + y.label(l) + ")",
                 abs(x.dist(i, k) - y.dist(j, l)), "<=", w.eps);
    }
  return rep;
}

/// Verifies a CorrWitness between the metrics k and l.
inline Report verify_witness(const FiniteMetric& k, const FiniteMetric& l,
                             const CorrWitness& w) {
  Report rep;
  std::vector<bool> cov_k(k.size(), false), cov_l(l.size(), false);
  for (auto [i, j] : w.pairs) {
    if (i >= k.size() || j >= l.size())
      throw DimensionMismatch("correspondence pair out of range");
    cov_k[i] = true;
    cov_l[j] = true;
  }
  Rat covered_k, covered_l;
  for (bool b : cov_k) covered_k += b ? 1 : 0;
  for (bool b : cov_l) covered_l += b ? 1 : 0;
  rep.record("covers left", covered_k, "=", Rat(BigInt(k.size())));
  rep.record("covers right", covered_l, "=", Rat(BigInt(l.size())));
  Rat worst;
  for (std::size_t a = 0; a < w.pairs.size(); ++a)
    for (std::size_t b = a; b < w.pairs.size(); ++b) {
      auto [i, j] = w.pairs[a];
      auto [p, q] = w.pairs[b];
      worst = max(worst, abs(k.dist[i][p] - l.dist[j][q]));
    }
  rep.record("distortion", worst, "=", w.distortion);
  return rep;
}

/// Verifies the coupling returned by a Prohorov computation: exact
/// marginals and mass >= 1 - eps on pairs at distance <= eps.
inline Report verify_prohorov_coupling(const FiniteMetric& m, const RatVec& mu,
                                       const RatVec& nu, const Coupling& c,
                                       const Rat& eps) {
  if (c.rows() != m.size() || c.cols() != m.size())
    throw DimensionMismatch("prohorov coupling has wrong shape");
  check_coupling(c);
  if (c.mu != mu || c.nu != nu)
    throw DimensionMismatch("prohorov coupling marginals do not match");
  Report rep;
  Rat close_mass;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (m.dist[i][j] <= eps) close_mass += c.pi[i][j];
  rep.record("coupling mass within eps", close_mass, ">=", Rat(1) - eps);
  return rep;
}

/// Public Prohorov distance: exact value plus a coupling witness that has
/// already passed the verification gate.
inline DistanceResult prohorov(const FiniteMetric& m, const RatVec& mu,
                               const RatVec& nu) {
  ProhorovComputation c = prohorov_compute(m, mu, nu);
  Report rep = verify_prohorov_coupling(m, mu, nu, c.coupling, c.value);
  if (!rep.valid)
    throw ConstructionFailed("prohorov witness failed re-verification");
  return DistanceResult{c.value, std::move(c.coupling),
                        c.candidates_examined};
}

}  // namespace mmkit
