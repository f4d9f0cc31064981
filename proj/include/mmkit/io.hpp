#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mmkit/glue.hpp"
#include "mmkit/pipeline.hpp"
#include "mmkit/regularize.hpp"
#include "mmkit/space.hpp"
#include "mmkit/witness.hpp"

namespace mmkit {

// Canonical JSON: ordered keys, rationals as strings ("p/q" or "n"), UTF-8,
// LF newlines. Serialization is byte-deterministic for identical inputs.
using Json = nlohmann::ordered_json;

inline Json to_json(const Rat& r) { return r.to_string(); }

inline Rat rat_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer())
    return Rat(static_cast<long long>(j.get<long long>()));
  if (!j.is_string())
    throw ParseError(where + ": rationals must be strings like \"p/q\"");
  std::optional<Rat> r = Rat::parse(j.get<std::string>());
  if (!r) throw ParseError(where + ": bad rational '" + j.get<std::string>() + "'");
  return *r;
}

inline Json to_json(const RatVec& v) {
  Json a = Json::array();
  for (const Rat& r : v) a.push_back(to_json(r));
  return a;
}

inline RatVec rat_vec_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  RatVec v;
  for (const Json& e : j) v.push_back(rat_from_json(e, where));
  return v;
}

inline Json to_json(const RatMatrix& m) {
  Json a = Json::array();
  for (const RatVec& row : m) a.push_back(to_json(row));
  return a;
}

inline RatMatrix rat_matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected a matrix");
  RatMatrix m;
  for (const Json& row : j) m.push_back(rat_vec_from_json(row, where));
  return m;
}

// ---------------------------------------------------------------------------
// Space documents

struct SpaceDocument {
  std::string name;
  std::vector<std::string> points;
  RatMatrix dist;
  std::optional<RatVec> mass;
  std::map<std::string, RatVec> measures;  // extra named measures (optional)
};

inline SpaceDocument parse_space_document(const Json& j) {
  if (!j.is_object()) throw ParseError("space document must be an object");
  SpaceDocument d;
  if (!j.contains("name") || !j["name"].is_string())
    throw ParseError("space document needs a string 'name'");
  d.name = j["name"].get<std::string>();
  if (!j.contains("points") || !j["points"].is_array())
    throw ParseError("space document needs a 'points' array");
  for (const Json& p : j["points"]) {
    if (!p.is_string()) throw ParseError("points must be strings");
    d.points.push_back(p.get<std::string>());
  }
  if (!j.contains("dist")) throw ParseError("space document needs 'dist'");
  d.dist = rat_matrix_from_json(j["dist"], d.name + ".dist");
  if (j.contains("mass"))
    d.mass = rat_vec_from_json(j["mass"], d.name + ".mass");
  if (j.contains("measures")) {
    if (!j["measures"].is_object())
      throw ParseError("'measures' must map names to mass arrays");
    for (const auto& [key, value] : j["measures"].items())
      d.measures[key] = rat_vec_from_json(value, d.name + ".measures." + key);
  }
  return d;
}

inline Json to_json(const SpaceDocument& d) {
  Json j;
  j["name"] = d.name;
  j["points"] = d.points;
  j["dist"] = to_json(d.dist);
  if (d.mass) j["mass"] = to_json(*d.mass);
  if (!d.measures.empty()) {
    Json m;
    for (const auto& [key, value] : d.measures) m[key] = to_json(value);
    j["measures"] = m;
  }
  return j;
}

inline FiniteMetric metric_from_document(const SpaceDocument& d) {
  return make_metric(d.points, d.dist);
}

inline MMSpace space_from_document(const SpaceDocument& d) {
  if (!d.mass)
    throw ParseError("space '" + d.name + "' needs a 'mass' vector");
  return validate_space(d.points, d.dist, *d.mass);
}

inline SpaceDocument document_from_space(const std::string& name,
                                         const MMSpace& s) {
  SpaceDocument d;
  d.name = name;
  d.points = s.metric.labels;
  d.dist = s.metric.dist;
  d.mass = s.mass;
  return d;
}

inline SpaceDocument document_from_metric(const std::string& name,
                                          const FiniteMetric& m) {
  SpaceDocument d;
  d.name = name;
  d.points = m.labels;
  d.dist = m.dist;
  return d;
}

// ---------------------------------------------------------------------------
// Witness payloads

inline Json to_json(const MapWitness& w) {
  Json j;
  j["f"] = w.f;
  return j;
}

inline MapWitness map_witness_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("f") || !j["f"].is_array())
    throw ParseError("map witness needs an index array 'f'");
  MapWitness w;
  for (const Json& e : j["f"]) {
    if (!e.is_number_integer() || e.get<long long>() < 0)
      throw ParseError("map indices must be nonnegative integers");
    w.f.push_back(e.get<std::size_t>());
  }
  return w;
}

inline Json to_json(const EpsWitness& w) {
  Json j;
  j["f"] = w.f.f;
  Json dom = Json::array();
  for (std::size_t i = 0; i < w.domain.size(); ++i)
    if (w.domain[i]) dom.push_back(i);
  j["domain"] = dom;
  j["eps"] = to_json(w.eps);
  return j;
}

inline EpsWitness eps_witness_from_json(const Json& j, std::size_t source_size) {
  if (!j.is_object() || !j.contains("f") || !j.contains("domain") ||
      !j.contains("eps"))
    throw ParseError("eps witness needs 'f', 'domain', 'eps'");
  EpsWitness w;
  w.f = map_witness_from_json(j);
  w.domain.assign(source_size, false);
  for (const Json& e : j["domain"]) {
    std::size_t i = e.get<std::size_t>();
    if (i >= source_size) throw ParseError("domain index out of range");
    w.domain[i] = true;
  }
  w.eps = rat_from_json(j["eps"], "eps");
  return w;
}

inline Json to_json(const Coupling& c) {
  Json j;
  j["pi"] = to_json(c.pi);
  j["mu"] = to_json(c.mu);
  j["nu"] = to_json(c.nu);
  return j;
}

inline Coupling coupling_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("pi") || !j.contains("mu") ||
      !j.contains("nu"))
    throw ParseError("coupling needs 'pi', 'mu', 'nu'");
  Coupling c;
  c.pi = rat_matrix_from_json(j["pi"], "coupling.pi");
  c.mu = rat_vec_from_json(j["mu"], "coupling.mu");
  c.nu = rat_vec_from_json(j["nu"], "coupling.nu");
  check_coupling(c);
  return c;
}

inline Json pairs_json(const std::vector<std::pair<std::size_t, std::size_t>>& ps) {
  Json a = Json::array();
  for (auto [i, j] : ps) a.push_back(Json::array({i, j}));
  return a;
}

inline std::vector<std::pair<std::size_t, std::size_t>> pairs_from_json(
    const Json& j) {
  if (!j.is_array()) throw ParseError("expected an array of index pairs");
  std::vector<std::pair<std::size_t, std::size_t>> ps;
  for (const Json& e : j) {
    if (!e.is_array() || e.size() != 2)
      throw ParseError("pairs must be two-element arrays");
    ps.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
  }
  return ps;
}

inline Json to_json(const BoxWitness& w) {
  Json j;
  j["coupling"] = to_json(w.coupling);
  j["kept"] = pairs_json(w.kept);
  j["eps"] = to_json(w.eps);
  return j;
}

inline BoxWitness box_witness_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("coupling") || !j.contains("kept") ||
      !j.contains("eps"))
    throw ParseError("box witness needs 'coupling', 'kept', 'eps'");
  BoxWitness w;
  w.coupling = coupling_from_json(j["coupling"]);
  w.kept = pairs_from_json(j["kept"]);
  w.eps = rat_from_json(j["eps"], "eps");
  return w;
}

inline Json to_json(const CorrWitness& w) {
  Json j;
  j["pairs"] = pairs_json(w.pairs);
  j["distortion"] = to_json(w.distortion);
  return j;
}

inline CorrWitness corr_witness_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("pairs") || !j.contains("distortion"))
    throw ParseError("correspondence witness needs 'pairs', 'distortion'");
  CorrWitness w;
  w.pairs = pairs_from_json(j["pairs"]);
  w.distortion = rat_from_json(j["distortion"], "distortion");
  return w;
}

inline Json to_json(const Report& r) {
  Json a = Json::array();
  for (const Check& c : r.checks) {
    Json j;
    j["what"] = c.what;
    j["lhs"] = c.lhs;
    j["relation"] = c.relation;
    j["rhs"] = c.rhs;
    j["holds"] = c.holds;
    a.push_back(std::move(j));
  }
  return a;
}

// ---------------------------------------------------------------------------
// Certificate documents
//
// Self-contained: the spaces a certificate refers to are embedded in the
// document, so `mmkit verify CERT.json` re-runs the exact checks without
// extra inputs; `--spaces` supplies replacements to cross-check against.

inline Json make_certificate(const std::string& kind,
                             const std::vector<SpaceDocument>& spaces,
                             Json payload, const Report& report) {
  Json j;
  j["kind"] = kind;
  Json sp = Json::array();
  for (const SpaceDocument& d : spaces) sp.push_back(to_json(d));
  j["spaces"] = sp;
  j["payload"] = std::move(payload);
  j["checks"] = to_json(report);
  j["valid"] = report.valid;
  return j;
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace mmkit
