#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mmkit/order.hpp"
#include "mmkit/space.hpp"
#include "mmkit/witness.hpp"

namespace mmkit {

// ---------------------------------------------------------------------------
// The truncated universal space for families of at most N atoms and diameter
// at most D: digit masses p_1 = 1/N, p_{n+1} = (1 - sum_{k<=n} p_k)/N, all
// pairwise distances D, plus one explicit tail atom carrying the remainder
// so the total mass stays exactly 1.

struct UniversalSpaceSpec {
  long long n = 2;      // family cardinality bound N >= 2
  Rat diameter = 1;     // distance D > 0 between all distinct atoms
  std::size_t depth = 4;  // truncation depth K >= 1
  RatVec p;             // p_1 .. p_K
  Rat tail;             // t_K = 1 - sum p
};

inline UniversalSpaceSpec make_universal_spec(long long n, const Rat& diameter,
                                              std::size_t depth) {
  if (n < 2) throw PreconditionFailed("universal space needs N >= 2");
  if (diameter.sign() <= 0)
    throw PreconditionFailed("universal space needs D > 0");
  if (depth == 0) throw PreconditionFailed("universal space needs depth >= 1");
  UniversalSpaceSpec s;
  s.n = n;
  s.diameter = diameter;
  s.depth = depth;
  Rat remaining(1);
  for (std::size_t k = 0; k < depth; ++k) {
    Rat pk = remaining / Rat(n);
    s.p.push_back(pk);
    remaining -= pk;
  }
  s.tail = remaining;
  if (s.tail.sign() <= 0)
    throw ConstructionFailed("universal spec tail mass must stay positive");
  return s;
}

inline MMSpace universal_space(const UniversalSpaceSpec& spec) {
  const std::size_t k = spec.depth;
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= k; ++i) labels.push_back("x" + std::to_string(i));
  labels.push_back("tail");
  RatMatrix dist(k + 1, RatVec(k + 1, spec.diameter));
  for (std::size_t i = 0; i <= k; ++i) dist[i][i] = Rat(0);
  RatVec mass = spec.p;
  mass.push_back(spec.tail);
  MMSpace u{make_metric(std::move(labels), std::move(dist)), std::move(mass)};
  check_space(u);
  return u;
}

/// Digit assignment certifying that the universal space eps-dominates Y:
/// digit n feeds atom digit_to_atom[n], the tail atom feeds tail_to_atom.
/// Column sums are 1 by construction; the pushforward deficit is at most the
/// tail mass.
struct DigitTable {
  std::vector<std::size_t> digit_to_atom;
  std::size_t tail_to_atom = 0;
};

struct UniversalDominateResult {
  EpsWitness witness;  // Y <_eps U with eps <= 2 * tail mass
  DigitTable digits;
};

/// Greedy digit assignment: digit n goes to the atom with the largest
/// residual mass (lowest index on ties). The residual invariant
/// max residual >= p_{n+1} keeps every subtraction nonnegative. All maps
/// from the universal space are automatically 1-Lipschitz because every
/// source distance equals D >= diam Y (asserted).
inline UniversalDominateResult universal_dominate(const UniversalSpaceSpec& spec,
                                                  const MMSpace& u,
                                                  const MMSpace& y) {
  if (y.size() > static_cast<std::size_t>(spec.n))
    throw PreconditionFailed("universal_dominate: |Y| exceeds N");
  if (y.metric.diameter() > spec.diameter)
    throw PreconditionFailed("universal_dominate: diam Y exceeds D");
  if (u.size() != spec.depth + 1)
    throw DimensionMismatch("universal_dominate: space does not match spec");

  RatVec residual = y.mass;
  DigitTable digits;
  for (std::size_t n = 0; n < spec.depth; ++n) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < y.size(); ++k)
      if (residual[k] > residual[arg]) arg = k;
    if (residual[arg] < spec.p[n])
      throw ConstructionFailed("universal_dominate: residual invariant broken");
    residual[arg] -= spec.p[n];
    digits.digit_to_atom.push_back(arg);
  }
  {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < y.size(); ++k)
      if (residual[k] > residual[arg]) arg = k;
    digits.tail_to_atom = arg;
  }

  std::vector<std::size_t> f = digits.digit_to_atom;
  f.push_back(digits.tail_to_atom);
  for (std::size_t a = 0; a < u.size(); ++a)
    for (std::size_t b = a + 1; b < u.size(); ++b)
      if (y.dist(f[a], f[b]) > u.dist(a, b))
        throw ConstructionFailed("universal_dominate: map not 1-Lipschitz");

  // Pushforward deficit: the undersupplied atoms are short exactly the
  // residual not absorbed by the tail, which is at most t_K.
  RatVec pushed(y.size());
  for (std::size_t a = 0; a < u.size(); ++a) pushed[f[a]] += u.mass[a];
  Rat deficit;
  for (std::size_t k = 0; k < y.size(); ++k)
    deficit += max(Rat(0), y.mass[k] - pushed[k]);
  if (deficit > spec.tail)
    throw ConstructionFailed("universal_dominate: deficit exceeds tail mass");

  UniversalDominateResult r;
  r.digits = std::move(digits);
  r.witness = EpsWitness{MapWitness{std::move(f)},
                         EpsWitness::full_domain(u.size()), Rat(0)};
  r.witness.eps = tight_eps(u, y, r.witness.f, r.witness.domain);
  if (r.witness.eps > Rat(2) * spec.tail)
    throw ConstructionFailed("universal_dominate: eps exceeds twice the tail");
  if (!verify_witness(u, y, r.witness).valid)
    throw ConstructionFailed("universal_dominate witness failed re-verification");
  return r;
}

}  // namespace mmkit
