#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mmkit/gh.hpp"
#include "mmkit/io.hpp"

namespace mmkit {

// Builders for the certificate documents the CLI emits, together with the
// re-verification entry point: recompute_report() rebuilds the exact check
// list from the embedded spaces and payload, so a stored certificate is
// accepted iff re-running verification reproduces its checks byte for byte
// and they all hold.

namespace detail {

inline void append_prefixed(Report& into, const Report& from,
                            const std::string& prefix) {
  for (Check c : from.checks) {
    c.what = prefix + c.what;
    into.checks.push_back(std::move(c));
    into.valid = into.valid && into.checks.back().holds;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Report builders per certificate kind. Each takes parsed spaces + payload
// and recomputes the canonical Report; emitters call them before writing.

inline Report report_map(const MMSpace& upper, const MMSpace& lower,
                         const MapWitness& w) {
  return verify_witness(upper, lower, w);
}

inline Report report_eps(const MMSpace& upper, const MMSpace& lower,
                         const EpsWitness& w) {
  return verify_witness(upper, lower, w);
}

inline Report report_box(const MMSpace& a, const MMSpace& b,
                         const BoxWitness& w, const Rat& value) {
  Report r = verify_witness(a, b, w);
  r.record("value matches witness eps", value, "=", w.eps);
  return r;
}

inline Report report_corr(const FiniteMetric& a, const FiniteMetric& b,
                          const CorrWitness& w, const Rat& value) {
  Report r = verify_witness(a, b, w);
  r.record("twice the value equals the distortion", Rat(2) * value, "=",
           w.distortion);
  return r;
}

inline Report report_gh_eps(const FiniteMetric& a, const FiniteMetric& b,
                            const MapWitness& f, const Rat& eps) {
  return verify_gh_eps(a, b, f, eps);
}

inline Report report_prohorov(const FiniteMetric& m, const RatVec& mu,
                              const RatVec& nu, const Coupling& c,
                              const Rat& value) {
  return verify_prohorov_coupling(m, mu, nu, c, value);
}

inline Report report_chain(const std::vector<MMSpace>& spaces,
                           const std::vector<EpsWitness>& steps,
                           const EpsWitness& composed,
                           const Rat& step_eps_sum) {
  Report r;
  for (std::size_t i = 0; i < steps.size(); ++i)
    detail::append_prefixed(r, verify_witness(spaces[i + 1], spaces[i], steps[i]),
                            "step " + std::to_string(i) + ": ");
  detail::append_prefixed(
      r, verify_witness(spaces.back(), spaces.front(), composed),
      "composed: ");
  r.record("composed eps within five times the step sum", composed.eps,
           "<=", Rat(5) * step_eps_sum);
  return r;
}

// ---------------------------------------------------------------------------
// Certificate document emitters

inline Json certificate_map(const SpaceDocument& upper,
                            const SpaceDocument& lower, const MapWitness& w) {
  Report r = report_map(space_from_document(upper), space_from_document(lower), w);
  return make_certificate("map", {upper, lower}, to_json(w), r);
}

inline Json certificate_eps(const SpaceDocument& upper,
                            const SpaceDocument& lower, const EpsWitness& w) {
  Report r = report_eps(space_from_document(upper), space_from_document(lower), w);
  return make_certificate("eps", {upper, lower}, to_json(w), r);
}

inline Json certificate_box(const SpaceDocument& a, const SpaceDocument& b,
                            const BoxWitness& w, const Rat& value,
                            std::size_t candidates) {
  Report r = report_box(space_from_document(a), space_from_document(b), w, value);
  Json payload = to_json(w);
  payload["value"] = to_json(value);
  payload["candidates_examined"] = candidates;
  return make_certificate("box", {a, b}, std::move(payload), r);
}

inline Json certificate_corr(const SpaceDocument& a, const SpaceDocument& b,
                             const CorrWitness& w, const Rat& value) {
  Report r = report_corr(metric_from_document(a), metric_from_document(b), w,
                         value);
  Json payload = to_json(w);
  payload["value"] = to_json(value);
  return make_certificate("corr", {a, b}, std::move(payload), r);
}

inline Json certificate_gh_eps(const SpaceDocument& a, const SpaceDocument& b,
                               const MapWitness& f, const Rat& eps) {
  Report r = report_gh_eps(metric_from_document(a), metric_from_document(b), f,
                           eps);
  Json payload = to_json(f);
  payload["eps"] = to_json(eps);
  return make_certificate("gh_eps", {a, b}, std::move(payload), r);
}

inline Json certificate_prohorov(const SpaceDocument& space, const RatVec& mu,
                                 const RatVec& nu, const Coupling& c,
                                 const Rat& value,
                                 std::size_t candidates) {
  Report r = report_prohorov(metric_from_document(space), mu, nu, c, value);
  Json payload;
  payload["mu"] = to_json(mu);
  payload["nu"] = to_json(nu);
  payload["coupling"] = to_json(c);
  payload["value"] = to_json(value);
  payload["candidates_examined"] = candidates;
  return make_certificate("prohorov", {space}, std::move(payload), r);
}

inline Json certificate_chain(const std::vector<SpaceDocument>& docs,
                              const ChainCertificate& cert) {
  Report r = report_chain(cert.spaces, cert.steps, cert.composed,
                          cert.step_eps_sum);
  Json payload;
  Json steps = Json::array();
  for (const EpsWitness& s : cert.steps) steps.push_back(to_json(s));
  payload["steps"] = std::move(steps);
  payload["composed"] = to_json(cert.composed);
  payload["step_eps_sum"] = to_json(cert.step_eps_sum);
  return make_certificate("chain", docs, std::move(payload), r);
}

// ---------------------------------------------------------------------------
// Glue certificates re-run the deterministic construction and check that the
// stored glued matrix is reproduced along with every bound.

inline Report report_glue(
    const std::vector<MMSpace>& blocks, const std::vector<Coupling>& couplings,
    const RatVec& epss,
    const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& kepts,
    const RatMatrix& stored_dist, const RatVec& stored_dp) {
  GlueResult g = glue_chain(blocks, couplings, epss, kepts);
  Report r;
  Rat mismatches;
  if (g.space.dist != stored_dist) mismatches = Rat(1);
  r.record("glued metric reproduced", mismatches, "=", Rat(0));
  for (std::size_t s = 0; s < g.dp_bounds.size(); ++s) {
    r.record("prohorov between blocks " + std::to_string(s) + " and " +
                 std::to_string(s + 1),
             g.dp_bounds[s], "<=", Rat(2) * epss[s]);
    r.record("stored bound " + std::to_string(s) + " reproduced",
             g.dp_bounds[s], "=",
             s < stored_dp.size() ? stored_dp[s] : Rat(-1));
  }
  if (blocks.size() >= 2) {
    Rat total;
    for (const Rat& e : epss) total += e;
    r.record("telescoped prohorov between the ends",
             prohorov_value(g.space.dist, g.masses.front(), g.masses.back()),
             "<=", Rat(2) * total);
  }
  return r;
}

inline Json certificate_glue(
    const std::vector<SpaceDocument>& docs,
    const std::vector<Coupling>& couplings, const RatVec& epss,
    const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& kepts,
    const GlueResult& g) {
  std::vector<MMSpace> blocks;
  for (const SpaceDocument& d : docs) blocks.push_back(space_from_document(d));
  Report r = report_glue(blocks, couplings, epss, kepts, g.space.dist,
                         RatVec(g.dp_bounds));
  Json payload;
  Json cj = Json::array();
  for (const Coupling& c : couplings) cj.push_back(to_json(c));
  payload["couplings"] = std::move(cj);
  payload["eps"] = to_json(RatVec(epss));
  Json kj = Json::array();
  for (const auto& kept : kepts) kj.push_back(pairs_json(kept));
  payload["kept"] = std::move(kj);
  Json glued;
  glued["points"] = g.space.labels;
  glued["dist"] = to_json(g.space.dist);
  glued["pseudo"] = true;
  payload["glued"] = std::move(glued);
  Json emb = Json::array();
  for (const auto& e : g.embeddings) emb.push_back(e);
  payload["embeddings"] = std::move(emb);
  Json ms = Json::array();
  for (const RatVec& m : g.masses) ms.push_back(to_json(m));
  payload["masses"] = std::move(ms);
  payload["dp_bounds"] = to_json(RatVec(g.dp_bounds));
  return make_certificate("glue", docs, std::move(payload), r);
}

// ---------------------------------------------------------------------------
// Pipeline certificates embed every level space and witness; verification
// re-checks each stored witness against the stored spaces.

inline Report report_pipeline(const std::vector<MMSpace>& family,
                              const MMSpace& chain_top,
                              const PipelineCertificate& cert) {
  Report r;
  for (std::size_t n = 0; n < cert.levels.size(); ++n) {
    const PipelineLevel& level = cert.levels[n];
    const std::string at = "level " + std::to_string(n) + ": ";
    for (std::size_t l = 0; l < family.size(); ++l) {
      detail::append_prefixed(
          r, verify_witness(level.space, family[l], level.members[l]),
          at + "member " + std::to_string(l) + ": ");
      r.record(at + "member " + std::to_string(l) + " eps within the level",
               level.members[l].eps, "<=", level.eps);
    }
    detail::append_prefixed(r,
                            verify_witness(chain_top, level.space, level.from_top),
                            at + "ambient: ");
    r.record(at + "ambient eps within twice the level", level.from_top.eps,
             "<=", Rat(2) * level.eps);
    if (level.step_to_next) {
      detail::append_prefixed(
          r,
          verify_witness(cert.levels[n + 1].space, level.space,
                         *level.step_to_next),
          at + "refinement: ");
      r.record(at + "refinement eps within twice the level",
               level.step_to_next->eps, "<=", Rat(2) * level.eps);
    }
  }
  detail::append_prefixed(
      r,
      report_chain(cert.compressed.spaces, cert.compressed.steps,
                   cert.compressed.composed, cert.compressed.step_eps_sum),
      "compressed: ");
  r.record("cauchy bound equals the composed eps", cert.cauchy_bound, "=",
           cert.compressed.composed.eps);
  return r;
}

inline Json certificate_pipeline(const std::vector<SpaceDocument>& family_docs,
                                 const SpaceDocument& chain_top_doc,
                                 const RatVec& schedule,
                                 const std::string& mode,
                                 const PipelineCertificate& cert) {
  std::vector<MMSpace> family;
  for (const SpaceDocument& d : family_docs)
    family.push_back(space_from_document(d));
  Report r = report_pipeline(family, space_from_document(chain_top_doc), cert);

  Json payload;
  payload["mode"] = mode;
  payload["schedule"] = to_json(schedule);
  payload["chain_top"] = to_json(chain_top_doc);
  Json levels = Json::array();
  for (const PipelineLevel& level : cert.levels) {
    Json lj;
    lj["eps"] = to_json(level.eps);
    lj["space"] = to_json(document_from_space("X", level.space));
    Json members = Json::array();
    for (const EpsWitness& m : level.members) members.push_back(to_json(m));
    lj["members"] = std::move(members);
    lj["from_top"] = to_json(level.from_top);
    if (level.step_to_next) lj["step_to_next"] = to_json(*level.step_to_next);
    levels.push_back(std::move(lj));
  }
  payload["levels"] = std::move(levels);
  Json chain;
  Json steps = Json::array();
  for (const EpsWitness& s : cert.compressed.steps) steps.push_back(to_json(s));
  chain["steps"] = std::move(steps);
  chain["composed"] = to_json(cert.compressed.composed);
  chain["step_eps_sum"] = to_json(cert.compressed.step_eps_sum);
  payload["compressed"] = std::move(chain);
  payload["cauchy_bound"] = to_json(cert.cauchy_bound);
  return make_certificate("pipeline", family_docs, std::move(payload), r);
}

// ---------------------------------------------------------------------------
// Re-verification of a stored certificate document.

inline Report recompute_report(const Json& cert,
                               const std::vector<SpaceDocument>& spaces) {
  const std::string kind = cert.at("kind").get<std::string>();
  const Json& payload = cert.at("payload");

  if (kind == "map") {
    return report_map(space_from_document(spaces.at(0)),
                      space_from_document(spaces.at(1)),
                      map_witness_from_json(payload));
  }
  if (kind == "eps") {
    MMSpace upper = space_from_document(spaces.at(0));
    return report_eps(upper, space_from_document(spaces.at(1)),
                      eps_witness_from_json(payload, upper.size()));
  }
  if (kind == "box") {
    return report_box(space_from_document(spaces.at(0)),
                      space_from_document(spaces.at(1)),
                      box_witness_from_json(payload),
                      rat_from_json(payload.at("value"), "value"));
  }
  if (kind == "corr") {
    return report_corr(metric_from_document(spaces.at(0)),
                       metric_from_document(spaces.at(1)),
                       corr_witness_from_json(payload),
                       rat_from_json(payload.at("value"), "value"));
  }
  if (kind == "gh_eps") {
    return report_gh_eps(metric_from_document(spaces.at(0)),
                         metric_from_document(spaces.at(1)),
                         map_witness_from_json(payload),
                         rat_from_json(payload.at("eps"), "eps"));
  }
  if (kind == "prohorov") {
    return report_prohorov(metric_from_document(spaces.at(0)),
                           rat_vec_from_json(payload.at("mu"), "mu"),
                           rat_vec_from_json(payload.at("nu"), "nu"),
                           coupling_from_json(payload.at("coupling")),
                           rat_from_json(payload.at("value"), "value"));
  }
  if (kind == "chain") {
    std::vector<MMSpace> chain_spaces;
    for (const SpaceDocument& d : spaces)
      chain_spaces.push_back(space_from_document(d));
    std::vector<EpsWitness> steps;
    for (std::size_t i = 0; i + 1 < chain_spaces.size(); ++i)
      steps.push_back(eps_witness_from_json(payload.at("steps").at(i),
                                            chain_spaces[i + 1].size()));
    EpsWitness composed = eps_witness_from_json(
        payload.at("composed"), chain_spaces.back().size());
    return report_chain(chain_spaces, steps, composed,
                        rat_from_json(payload.at("step_eps_sum"), "sum"));
  }
  if (kind == "glue") {
    std::vector<MMSpace> blocks;
    for (const SpaceDocument& d : spaces) blocks.push_back(space_from_document(d));
    std::vector<Coupling> couplings;
    for (const Json& c : payload.at("couplings"))
      couplings.push_back(coupling_from_json(c));
    RatVec epss = rat_vec_from_json(payload.at("eps"), "eps");
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> kepts;
    for (const Json& k : payload.at("kept")) kepts.push_back(pairs_from_json(k));
    return report_glue(blocks, couplings, epss, kepts,
                       rat_matrix_from_json(payload.at("glued").at("dist"),
                                            "glued.dist"),
                       rat_vec_from_json(payload.at("dp_bounds"), "dp_bounds"));
  }
  if (kind == "pipeline") {
    std::vector<MMSpace> family;
    for (const SpaceDocument& d : spaces) family.push_back(space_from_document(d));
    SpaceDocument top_doc = parse_space_document(payload.at("chain_top"));
    PipelineCertificate cert2;
    const Json& levels = payload.at("levels");
    for (const Json& lj : levels) {
      PipelineLevel level;
      level.eps = rat_from_json(lj.at("eps"), "eps");
      level.space = space_from_document(parse_space_document(lj.at("space")));
      for (std::size_t l = 0; l < family.size(); ++l)
        level.members.push_back(
            eps_witness_from_json(lj.at("members").at(l), level.space.size()));
      level.from_top = eps_witness_from_json(
          lj.at("from_top"), space_from_document(top_doc).size());
      cert2.levels.push_back(std::move(level));
    }
    for (std::size_t n = 0; n + 1 < cert2.levels.size(); ++n)
      if (levels.at(n).contains("step_to_next"))
        cert2.levels[n].step_to_next = eps_witness_from_json(
            levels.at(n).at("step_to_next"), cert2.levels[n + 1].space.size());
    const Json& chain = payload.at("compressed");
    for (const PipelineLevel& level : cert2.levels)
      cert2.compressed.spaces.push_back(level.space);
    for (std::size_t i = 0; i + 1 < cert2.levels.size(); ++i)
      cert2.compressed.steps.push_back(eps_witness_from_json(
          chain.at("steps").at(i), cert2.levels[i + 1].space.size()));
    cert2.compressed.composed = eps_witness_from_json(
        chain.at("composed"), cert2.levels.back().space.size());
    cert2.compressed.step_eps_sum =
        rat_from_json(chain.at("step_eps_sum"), "sum");
    cert2.cauchy_bound = rat_from_json(payload.at("cauchy_bound"), "bound");
    return report_pipeline(family, space_from_document(top_doc), cert2);
  }
  throw ParseError("unknown certificate kind '" + kind + "'");
}

/// Re-runs verification on a certificate document. Accepted iff every check
/// holds and the recomputed check list matches the stored one exactly.
inline bool reverify_certificate(const Json& cert,
                                 const std::vector<SpaceDocument>& spaces) {
  Report r = recompute_report(cert, spaces);
  return r.valid && to_json(r) == cert.at("checks");
}

inline std::vector<SpaceDocument> certificate_spaces(const Json& cert) {
  std::vector<SpaceDocument> spaces;
  for (const Json& s : cert.at("spaces"))
    spaces.push_back(parse_space_document(s));
  return spaces;
}

}  // namespace mmkit
