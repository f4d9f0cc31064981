#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmkit/construct.hpp"
#include "mmkit/limits.hpp"
#include "mmkit/order.hpp"
#include "mmkit/regularize.hpp"
#include "mmkit/space.hpp"
#include "mmkit/witness.hpp"

namespace mmkit {

// ---------------------------------------------------------------------------
// Partitions
//
// Per-level decomposition of a space into disjoint blocks of diameter
// strictly below eps, nested inside the previous level's blocks.

struct Partition {
  std::size_t level = 1;
  Rat eps;
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::size_t> representatives;  // block seeds
  std::vector<std::size_t> parent_block;     // block -> parent block index
};

inline void check_partition(const MMSpace& y, const Partition& p,
                            const Partition* parent) {
  std::vector<int> owner(y.size(), -1);
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    if (p.blocks[b].empty())
      throw ConstructionFailed("partition: empty block");
    for (std::size_t i : p.blocks[b]) {
      if (i >= y.size() || owner[i] >= 0)
        throw ConstructionFailed("partition: blocks must disjointly cover");
      owner[i] = static_cast<int>(b);
    }
    for (std::size_t i : p.blocks[b])
      for (std::size_t j : p.blocks[b])
        if (y.dist(i, j) >= p.eps)
          throw ConstructionFailed("partition: block diameter not below eps");
    if (owner[p.representatives[b]] != static_cast<int>(b))
      throw ConstructionFailed("partition: representative outside its block");
  }
  for (int o : owner)
    if (o < 0) throw ConstructionFailed("partition: uncovered atom");
  if (parent) {
    if (p.eps >= parent->eps)
      throw PreconditionFailed("partition: eps must shrink when nesting");
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
      const auto& up = parent->blocks[p.parent_block[b]];
      for (std::size_t i : p.blocks[b]) {
        bool inside = false;
        for (std::size_t j : up) inside = inside || i == j;
        if (!inside)
          throw ConstructionFailed("partition: block escapes its parent");
      }
    }
  }
}

/// Greedy refinement: inside each parent block (or the whole space), seed a
/// block at the lowest-index unassigned atom and absorb unassigned atoms
/// within eps of the seed while the block diameter stays below eps.
inline Partition eps_partition(const MMSpace& y, const Rat& eps,
                               const Partition* parent = nullptr) {
  if (eps.sign() <= 0) throw PreconditionFailed("partition: eps must be positive");
  Partition p;
  p.eps = eps;
  p.level = parent ? parent->level + 1 : 1;

  std::vector<std::vector<std::size_t>> regions;
  if (parent) {
    regions = parent->blocks;
  } else {
    regions.emplace_back(y.size());
    std::iota(regions[0].begin(), regions[0].end(), std::size_t{0});
  }

  for (std::size_t reg = 0; reg < regions.size(); ++reg) {
    std::vector<bool> assigned(y.size(), false);
    for (std::size_t seed : regions[reg]) {
      if (assigned[seed]) continue;
      std::vector<std::size_t> block{seed};
      assigned[seed] = true;
      for (std::size_t j : regions[reg]) {
        if (assigned[j] || y.dist(seed, j) >= eps) continue;
        bool fits = true;
        for (std::size_t member : block)
          fits = fits && y.dist(member, j) < eps;
        if (fits) {
          block.push_back(j);
          assigned[j] = true;
        }
      }
      p.blocks.push_back(std::move(block));
      p.representatives.push_back(seed);
      p.parent_block.push_back(reg);
    }
  }
  check_partition(y, p, parent);
  return p;
}

// ---------------------------------------------------------------------------
// Ambient chains W_1 < W_2 < ... with legs onto each family member.

struct PipelineConfig {
  enum class Mode { free_products, ambient };
  RatVec schedule;  // strictly decreasing positive eps levels
  Mode mode = Mode::free_products;
  std::optional<MMSpace> ambient;
  std::vector<MapWitness> ambient_witnesses;  // one per family member
};

struct AmbientChain {
  std::vector<MMSpace> spaces;           // W_1 .. W_L
  std::vector<MapWitness> step_down;     // W_{l+1} -> W_l
  std::vector<MapWitness> legs;          // W_l -> Y_l
  std::vector<MapWitness> from_ambient;  // W -> W_l (ambient mode)
};

namespace detail {

inline void assert_surjective(const MapWitness& w, std::size_t target_size) {
  std::vector<bool> hit(target_size, false);
  for (std::size_t i : w.f) hit[i] = true;
  for (bool b : hit)
    if (!b)
      throw ConstructionFailed("chain witness is not surjective onto support");
}

}  // namespace detail

inline AmbientChain build_ambient_chain(const std::vector<MMSpace>& family,
                                        const PipelineConfig& config,
                                        const Limits& limits = {}) {
  if (family.empty()) throw PreconditionFailed("empty family");
  AmbientChain chain;
  if (config.mode == PipelineConfig::Mode::free_products) {
    chain.spaces.push_back(family[0]);
    chain.legs.push_back(MapWitness::identity(family[0].size()));
    for (std::size_t l = 1; l < family.size(); ++l) {
      ProductResult pr = product(chain.spaces.back(), family[l], limits);
      chain.step_down.push_back(pr.proj_first);
      chain.legs.push_back(pr.proj_second);
      chain.spaces.push_back(std::move(pr.space));
    }
  } else {
    if (!config.ambient)
      throw PreconditionFailed("ambient mode needs an ambient space");
    if (config.ambient_witnesses.size() != family.size())
      throw PreconditionFailed("ambient mode needs one witness per member");
    const MMSpace& w = *config.ambient;
    for (std::size_t l = 0; l < family.size(); ++l)
      if (!verify_witness(w, family[l], config.ambient_witnesses[l]).valid)
        throw PreconditionFailed("ambient witness " + std::to_string(l) +
                                 " is invalid");
    // W_1 collapses W through the first leg alone, then each level joins
    // the next member inside W's domination cone.
    QuotientDominatorResult first =
        quotient_dominator(w, family[0], family[0], config.ambient_witnesses[0],
                           config.ambient_witnesses[0]);
    chain.spaces.push_back(std::move(first.dominator));
    chain.legs.push_back(std::move(first.onto_first));
    chain.from_ambient.push_back(std::move(first.from_ambient));
    for (std::size_t l = 1; l < family.size(); ++l) {
      QuotientDominatorResult qd =
          quotient_dominator(w, chain.spaces.back(), family[l],
                             chain.from_ambient.back(),
                             config.ambient_witnesses[l]);
      chain.step_down.push_back(std::move(qd.onto_first));
      chain.legs.push_back(std::move(qd.onto_second));
      chain.from_ambient.push_back(std::move(qd.from_ambient));
      chain.spaces.push_back(std::move(qd.dominator));
    }
  }
  for (std::size_t l = 0; l < family.size(); ++l) {
    detail::assert_surjective(chain.legs[l], family[l].size());
    if (l + 1 < family.size())
      detail::assert_surjective(chain.step_down[l], chain.spaces[l].size());
  }
  return chain;
}

/// Composed 1-Lipschitz measure-preserving maps h_Y from the chain top onto
/// every family member, each re-verified.
inline std::vector<MapWitness> chain_top_maps(
    const std::vector<MMSpace>& family, const AmbientChain& chain) {
  std::vector<MapWitness> h(family.size());
  for (std::size_t l = 0; l < family.size(); ++l) {
    MapWitness m = MapWitness::identity(chain.spaces.back().size());
    for (std::size_t s = chain.step_down.size(); s > l; --s)
      m = compose(chain.step_down[s - 1], m);
    h[l] = compose(chain.legs[l], m);
    if (!verify_witness(chain.spaces.back(), family[l], h[l]).valid)
      throw ConstructionFailed("composed chain map failed re-verification");
  }
  return h;
}

// ---------------------------------------------------------------------------
// One level of the common-dominator construction.

struct DominatorStep {
  MMSpace space;  // X_n
  std::vector<std::vector<std::size_t>> atom_block;  // atom -> block per member
  std::vector<EpsWitness> members;   // Y <_{eps_n} X_n per family member
  EpsWitness from_top;               // X_n <_{2 eps_n} W_L
  MapWitness top_to_dominator;       // underlying map W_L -> X_n
};

inline DominatorStep common_dominator_step(
    const std::vector<MMSpace>& family,
    const std::vector<Partition>& partitions, const AmbientChain& chain,
    const std::vector<MapWitness>& top_maps, const Rat& eps) {
  const MMSpace& top = chain.spaces.back();

  // Group top atoms by their block-index vector phi; the groups with
  // positive mass are the dominator atoms (positivity is automatic because
  // every top atom carries positive mass).
  std::vector<std::vector<std::size_t>> block_of(family.size());
  for (std::size_t l = 0; l < family.size(); ++l) {
    block_of[l].assign(family[l].size(), 0);
    for (std::size_t b = 0; b < partitions[l].blocks.size(); ++b)
      for (std::size_t i : partitions[l].blocks[b]) block_of[l][i] = b;
  }
  std::map<std::vector<std::size_t>, std::size_t> index_of;
  std::vector<std::vector<std::size_t>> phis;
  std::vector<std::size_t> group(top.size());
  RatVec group_mass;
  for (std::size_t w = 0; w < top.size(); ++w) {
    std::vector<std::size_t> phi(family.size());
    for (std::size_t l = 0; l < family.size(); ++l)
      phi[l] = block_of[l][top_maps[l](w)];
    auto [it, fresh] = index_of.try_emplace(phi, phis.size());
    if (fresh) {
      phis.push_back(phi);
      group_mass.push_back(Rat(0));
    }
    group[w] = it->second;
    group_mass[it->second] += top.mass[w];
  }

  // Pseudo-metric on the groups; representatives are block seeds, which are
  // pairwise distinct inside each member, so the quotient is typically
  // trivial, but the construction routes through it regardless.
  FinitePseudoMetric pseudo;
  for (std::size_t g = 0; g < phis.size(); ++g)
    pseudo.labels.push_back("phi" + std::to_string(g));
  pseudo.dist.assign(phis.size(), RatVec(phis.size()));
  for (std::size_t a = 0; a < phis.size(); ++a)
    for (std::size_t b = 0; b < phis.size(); ++b) {
      Rat d;
      for (std::size_t l = 0; l < family.size(); ++l)
        d = max(d, family[l].dist(partitions[l].representatives[phis[a][l]],
                                  partitions[l].representatives[phis[b][l]]));
      pseudo.dist[a][b] = d;
    }
  QuotientResult q = pseudo_to_metric(pseudo, group_mass);

  DominatorStep step;
  step.space = std::move(q.space);
  step.atom_block.assign(step.space.size(), {});
  for (std::size_t g = 0; g < phis.size(); ++g) {
    auto& slot = step.atom_block[q.projection(g)];
    if (slot.empty()) slot = phis[g];
  }

  step.top_to_dominator.f.resize(top.size());
  for (std::size_t w = 0; w < top.size(); ++w)
    step.top_to_dominator.f[w] = q.projection(group[w]);

  for (std::size_t l = 0; l < family.size(); ++l) {
    MapWitness psi;
    for (std::size_t a = 0; a < step.space.size(); ++a)
      psi.f.push_back(partitions[l].representatives[step.atom_block[a][l]]);
    EpsWitness w{std::move(psi), EpsWitness::full_domain(step.space.size()),
                 Rat(0)};
    w.eps = tight_eps(step.space, family[l], w.f, w.domain);
    if (w.eps > eps)
      throw ConstructionFailed("dominator member witness exceeded eps");
    if (!verify_witness(step.space, family[l], w).valid)
      throw ConstructionFailed("dominator member witness failed re-verification");
    step.members.push_back(std::move(w));
  }

  step.from_top = EpsWitness{step.top_to_dominator,
                             EpsWitness::full_domain(top.size()), Rat(0)};
  step.from_top.eps = tight_eps(top, step.space, step.from_top.f,
                                step.from_top.domain);
  if (step.from_top.eps > Rat(2) * eps)
    throw ConstructionFailed("dominator ambient witness exceeded 2 eps");
  if (!verify_witness(top, step.space, step.from_top).valid)
    throw ConstructionFailed("dominator ambient witness failed re-verification");
  return step;
}

// ---------------------------------------------------------------------------
// Full pipeline.

struct PipelineLevel {
  Rat eps;
  MMSpace space;
  std::vector<Partition> partitions;
  std::vector<std::vector<std::size_t>> atom_block;  // atom -> block per member
  std::vector<EpsWitness> members;        // Y <_{eps_n} X_n
  EpsWitness from_top;                    // X_n <_{2 eps_n} W_L
  std::optional<EpsWitness> step_to_next; // X_n <_{2 eps_n} X_{n+1}
};

struct PipelineCertificate {
  std::vector<PipelineLevel> levels;
  ChainCertificate compressed;  // composed X_1 < X_final certificate
  Rat cauchy_bound;             // composed eps, <= 5 * sum of step epsilons
};

inline void check_pipeline_config(const PipelineConfig& config) {
  if (config.schedule.empty())
    throw PreconditionFailed("pipeline: schedule must be nonempty");
  for (std::size_t i = 0; i < config.schedule.size(); ++i) {
    if (config.schedule[i].sign() <= 0)
      throw PreconditionFailed("pipeline: schedule entries must be positive");
    if (i > 0 && config.schedule[i] >= config.schedule[i - 1])
      throw PreconditionFailed("pipeline: schedule must strictly decrease");
  }
}

inline PipelineCertificate common_dominator(const std::vector<MMSpace>& family,
                                            const PipelineConfig& config,
                                            const Limits& limits = {}) {
  check_pipeline_config(config);
  AmbientChain chain = build_ambient_chain(family, config, limits);
  std::vector<MapWitness> top_maps = chain_top_maps(family, chain);

  PipelineCertificate cert;
  std::vector<std::vector<Partition>> level_partitions;
  for (std::size_t n = 0; n < config.schedule.size(); ++n) {
    std::vector<Partition> parts;
    for (std::size_t l = 0; l < family.size(); ++l) {
      const Partition* parent =
          n == 0 ? nullptr : &level_partitions[n - 1][l];
      parts.push_back(eps_partition(family[l], config.schedule[n], parent));
    }
    level_partitions.push_back(std::move(parts));

    DominatorStep step = common_dominator_step(
        family, level_partitions[n], chain, top_maps, config.schedule[n]);
    PipelineLevel level;
    level.eps = config.schedule[n];
    level.space = std::move(step.space);
    level.partitions = level_partitions[n];
    level.atom_block = std::move(step.atom_block);
    level.members = std::move(step.members);
    level.from_top = std::move(step.from_top);
    cert.levels.push_back(std::move(level));

    // Refinement step witness X_{n-1} <_{2 eps_{n-1}} X_n via block nesting:
    // each current atom's blocks sit inside unique previous-level blocks,
    // whose phi vector is a previous-level atom of positive mass.
    if (n > 0) {
      PipelineLevel& prev = cert.levels[n - 1];
      const PipelineLevel& cur = cert.levels[n];
      std::map<std::vector<std::size_t>, std::size_t> prev_index;
      for (std::size_t a = 0; a < prev.space.size(); ++a)
        prev_index[prev.atom_block[a]] = a;
      MapWitness refine;
      for (std::size_t a = 0; a < cur.space.size(); ++a) {
        std::vector<std::size_t> parent_phi(family.size());
        for (std::size_t l = 0; l < family.size(); ++l)
          parent_phi[l] =
              level_partitions[n][l].parent_block[cur.atom_block[a][l]];
        refine.f.push_back(prev_index.at(parent_phi));
      }
      EpsWitness w{std::move(refine),
                   EpsWitness::full_domain(cur.space.size()), Rat(0)};
      w.eps = tight_eps(cur.space, prev.space, w.f, w.domain);
      if (w.eps > Rat(2) * prev.eps)
        throw ConstructionFailed("refinement witness exceeded 2 eps");
      if (!verify_witness(cur.space, prev.space, w).valid)
        throw ConstructionFailed("refinement witness failed re-verification");
      prev.step_to_next = std::move(w);
    }
  }

  // Box-Cauchy certificate: compose the refinement steps X_1 < ... < X_N.
  std::vector<MMSpace> spaces;
  std::vector<EpsWitness> steps;
  for (std::size_t n = 0; n < cert.levels.size(); ++n) {
    spaces.push_back(cert.levels[n].space);
    if (cert.levels[n].step_to_next) steps.push_back(*cert.levels[n].step_to_next);
  }
  cert.compressed = chain_compress(std::move(spaces), std::move(steps));
  cert.cauchy_bound = cert.compressed.composed.eps;
  return cert;
}

}  // namespace mmkit
