// mmkit: batch interface over the exact metric-measure toolkit. Subcommands
// parse space documents, run the exact computations, and emit verified
// certificates as canonical JSON on stdout.
//
// Exit codes: 0 = computed / witness found; 1 = decided false or no witness
// (a definitive negative, only after an exhaustive search); 2 = input or
// guard error (machine-readable JSON on stderr). Guard-limited searches
// never exit 1.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmkit/certify.hpp"
#include "mmkit/mmkit.hpp"

namespace {

using mmkit::Json;
using mmkit::Rat;

mmkit::Limits guards() { return mmkit::Limits::from_env(); }

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mmkit::ParseError("cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw mmkit::ParseError("bad JSON in '" + path + "': " + e.what());
  }
  return j;
}

mmkit::SpaceDocument load_space(const std::string& path) {
  return mmkit::parse_space_document(load_json(path));
}

Rat parse_rat_arg(const std::string& s, const std::string& what) {
  std::optional<Rat> r = Rat::parse(s);
  if (!r) throw mmkit::ParseError(what + ": bad rational '" + s + "'");
  return *r;
}

mmkit::RatVec parse_schedule(const std::string& s) {
  mmkit::RatVec schedule;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    schedule.push_back(parse_rat_arg(item, "schedule"));
  return schedule;
}

mmkit::RatVec resolve_measure(const mmkit::SpaceDocument& d,
                              const std::string& name) {
  if (name == "mass") {
    if (!d.mass)
      throw mmkit::ParseError("space '" + d.name + "' has no 'mass' vector");
    return *d.mass;
  }
  auto it = d.measures.find(name);
  if (it == d.measures.end())
    throw mmkit::ParseError("space '" + d.name + "' has no measure named '" +
                            name + "'");
  return it->second;
}

void emit(const Json& j) { std::cout << mmkit::dump_json(j); }

int negative(const std::string& kind, const std::string& detail) {
  Json j;
  j["kind"] = kind;
  j["result"] = "none";
  j["detail"] = detail;
  emit(j);
  return 1;
}

mmkit::MapWitness witness_from_file(const std::string& path) {
  Json j = load_json(path);
  return mmkit::map_witness_from_json(j.contains("payload") ? j["payload"] : j);
}

// ---------------------------------------------------------------------------

int run_prohorov(const std::string& space_path, const std::string& mu_name,
                 const std::string& nu_name, bool oracle) {
  mmkit::SpaceDocument doc = load_space(space_path);
  mmkit::FiniteMetric m = mmkit::metric_from_document(doc);
  mmkit::RatVec mu = resolve_measure(doc, mu_name);
  mmkit::RatVec nu = resolve_measure(doc, nu_name);
  if (oracle) {
    Json j;
    j["kind"] = "prohorov";
    j["oracle"] = true;
    j["value"] = mmkit::to_json(mmkit::prohorov_oracle(m, mu, nu, guards()));
    emit(j);
    return 0;
  }
  mmkit::DistanceResult r = mmkit::prohorov(m, mu, nu);
  emit(mmkit::certificate_prohorov(doc, mu, nu,
                                   std::get<mmkit::Coupling>(r.witness),
                                   r.value, r.candidates_examined));
  return 0;
}

int run_box(const std::string& a_path, const std::string& b_path, bool oracle,
            unsigned denominator) {
  mmkit::SpaceDocument da = load_space(a_path), db = load_space(b_path);
  mmkit::MMSpace a = mmkit::space_from_document(da);
  mmkit::MMSpace b = mmkit::space_from_document(db);
  if (oracle) {
    std::size_t d = denominator;
    if (d == 0) {
      mmkit::BigInt l = boost::multiprecision::lcm(
          mmkit::common_denominator(a.mass), mmkit::common_denominator(b.mass));
      if (l > 64) throw mmkit::SizeGuardError("mass denominators too large");
      d = static_cast<std::size_t>(l);
    }
    Json j;
    j["kind"] = "box";
    j["oracle"] = true;
    j["denominator"] = d;
    j["value"] = mmkit::to_json(mmkit::box_oracle(a, b, d, guards()));
    emit(j);
    return 0;
  }
  mmkit::DistanceResult r = mmkit::box(a, b, guards());
  emit(mmkit::certificate_box(da, db, std::get<mmkit::BoxWitness>(r.witness),
                              r.value, r.candidates_examined));
  return 0;
}

int run_gh(const std::string& a_path, const std::string& b_path) {
  mmkit::SpaceDocument da = load_space(a_path), db = load_space(b_path);
  mmkit::DistanceResult r = mmkit::gh(mmkit::metric_from_document(da),
                                      mmkit::metric_from_document(db), guards());
  emit(mmkit::certificate_corr(da, db, std::get<mmkit::CorrWitness>(r.witness),
                               r.value));
  return 0;
}

int run_gh_eps(const std::string& a_path, const std::string& b_path,
               const std::string& eps_str) {
  mmkit::SpaceDocument da = load_space(a_path), db = load_space(b_path);
  Rat eps = parse_rat_arg(eps_str, "--eps");
  auto w = mmkit::gh_eps_check(mmkit::metric_from_document(da),
                               mmkit::metric_from_document(db), eps, guards());
  if (!w) return negative("gh_eps", "no map satisfies both clauses");
  emit(mmkit::certificate_gh_eps(da, db, *w, eps));
  return 0;
}

int run_order_check(const std::string& upper_path,
                    const std::string& lower_path) {
  mmkit::SpaceDocument du = load_space(upper_path), dl = load_space(lower_path);
  auto w = mmkit::check_domination(mmkit::space_from_document(du),
                                   mmkit::space_from_document(dl), guards());
  if (!w) return negative("map", "no 1-Lipschitz measure-preserving map");
  emit(mmkit::certificate_map(du, dl, *w));
  return 0;
}

int run_order_eps(const std::string& upper_path, const std::string& lower_path,
                  const std::string& eps_str) {
  mmkit::SpaceDocument du = load_space(upper_path), dl = load_space(lower_path);
  Rat eps = parse_rat_arg(eps_str, "--eps");
  auto w = mmkit::check_eps_domination(mmkit::space_from_document(du),
                                       mmkit::space_from_document(dl), eps,
                                       guards());
  if (!w) return negative("eps", "no witness at the requested eps");
  emit(mmkit::certificate_eps(du, dl, *w));
  return 0;
}

// ---------------------------------------------------------------------------
// construct subcommands

Json wrap_construct(const std::string& op, const Json& space, Json witnesses) {
  Json j;
  j["op"] = op;
  j["space"] = space;
  j["witnesses"] = std::move(witnesses);
  return j;
}

int run_product(const std::string& a_path, const std::string& b_path) {
  mmkit::SpaceDocument da = load_space(a_path), db = load_space(b_path);
  mmkit::ProductResult r = mmkit::product(mmkit::space_from_document(da),
                                          mmkit::space_from_document(db),
                                          guards());
  mmkit::SpaceDocument dp =
      mmkit::document_from_space(da.name + "x" + db.name, r.space);
  Json witnesses = Json::array();
  witnesses.push_back(mmkit::certificate_map(dp, da, r.proj_first));
  witnesses.push_back(mmkit::certificate_map(dp, db, r.proj_second));
  emit(wrap_construct("product", mmkit::to_json(dp), std::move(witnesses)));
  return 0;
}

int run_quotient(const std::string& w_path, const std::string& y_path,
                 const std::string& z_path, const std::string& wy_path,
                 const std::string& wz_path) {
  mmkit::SpaceDocument dw = load_space(w_path), dy = load_space(y_path),
                       dz = load_space(z_path);
  mmkit::MMSpace w = mmkit::space_from_document(dw);
  mmkit::MMSpace y = mmkit::space_from_document(dy);
  mmkit::MMSpace z = mmkit::space_from_document(dz);
  std::optional<mmkit::MapWitness> fy, fz;
  if (!wy_path.empty())
    fy = witness_from_file(wy_path);
  else
    fy = mmkit::check_domination(w, y, guards());
  if (!wz_path.empty())
    fz = witness_from_file(wz_path);
  else
    fz = mmkit::check_domination(w, z, guards());
  if (!fy || !fz)
    return negative("map", "the ambient space does not dominate both targets");
  mmkit::QuotientDominatorResult r = mmkit::quotient_dominator(w, y, z, *fy, *fz);
  mmkit::SpaceDocument dx = mmkit::document_from_space("quotient", r.dominator);
  Json witnesses = Json::array();
  witnesses.push_back(mmkit::certificate_map(dx, dy, r.onto_first));
  witnesses.push_back(mmkit::certificate_map(dx, dz, r.onto_second));
  witnesses.push_back(mmkit::certificate_map(dw, dx, r.from_ambient));
  emit(wrap_construct("quotient", mmkit::to_json(dx), std::move(witnesses)));
  return 0;
}

int run_universal(long long n, const std::string& d_str, std::size_t depth,
                  const std::string& dominate_path) {
  mmkit::UniversalSpaceSpec spec =
      mmkit::make_universal_spec(n, parse_rat_arg(d_str, "--d"), depth);
  mmkit::MMSpace u = mmkit::universal_space(spec);
  mmkit::SpaceDocument du = mmkit::document_from_space("universal", u);
  if (dominate_path.empty()) {
    emit(wrap_construct("universal", mmkit::to_json(du), Json::array()));
    return 0;
  }
  mmkit::SpaceDocument dy = load_space(dominate_path);
  mmkit::UniversalDominateResult r =
      mmkit::universal_dominate(spec, u, mmkit::space_from_document(dy));
  Json witnesses = Json::array();
  witnesses.push_back(mmkit::certificate_eps(du, dy, r.witness));
  Json j = wrap_construct("universal", mmkit::to_json(du), std::move(witnesses));
  j["digits"] = r.digits.digit_to_atom;
  j["tail_digit"] = r.digits.tail_to_atom;
  emit(j);
  return 0;
}

int run_glue(const std::string& a_path, const std::string& b_path,
             const std::string& eps_str) {
  mmkit::SpaceDocument da = load_space(a_path), db = load_space(b_path);
  mmkit::MMSpace a = mmkit::space_from_document(da);
  mmkit::MMSpace b = mmkit::space_from_document(db);
  mmkit::DistanceResult r = mmkit::box(a, b, guards());
  const mmkit::BoxWitness& w = std::get<mmkit::BoxWitness>(r.witness);
  Rat eps = w.eps;
  if (!eps_str.empty()) {
    eps = parse_rat_arg(eps_str, "--eps");
    if (eps < w.eps)
      throw mmkit::PreconditionFailed("requested eps " + eps.to_string() +
                                      " is below box = " + w.eps.to_string());
  }
  mmkit::GlueResult g = mmkit::glue_pair(a, b, w.coupling, eps, w.kept);
  emit(mmkit::certificate_glue({da, db}, {w.coupling}, {eps}, {w.kept}, g));
  return 0;
}

int run_regularize(const std::string& x_path, const std::string& y_path,
                   const std::string& eps_str,
                   const std::string& witness_path) {
  mmkit::SpaceDocument dx = load_space(x_path), dy = load_space(y_path);
  mmkit::MMSpace x = mmkit::space_from_document(dx);
  mmkit::MMSpace y = mmkit::space_from_document(dy);
  Rat eps = parse_rat_arg(eps_str, "--eps");
  std::optional<mmkit::EpsWitness> w;
  if (!witness_path.empty()) {
    Json j = load_json(witness_path);
    w = mmkit::eps_witness_from_json(j.contains("payload") ? j["payload"] : j,
                                     x.size());
  } else {
    w = mmkit::check_eps_domination(x, y, eps, guards());
  }
  if (!w) return negative("eps", "no witness at the requested eps");
  mmkit::RegularizeResult r = mmkit::regularize(x, y, *w, guards());
  mmkit::SpaceDocument dz = mmkit::document_from_space("regular", r.regular);
  Json witnesses = Json::array();
  witnesses.push_back(mmkit::certificate_map(dx, dz, r.onto_regular));
  Json j = wrap_construct("regularize", mmkit::to_json(dz), std::move(witnesses));
  j["box_bound"] = mmkit::to_json(r.box_bound);
  j["box_exact"] = r.box_exact;
  emit(j);
  return 0;
}

// ---------------------------------------------------------------------------

int run_pipeline(const std::vector<std::string>& family_paths,
                 const std::string& schedule_str, const std::string& mode_str,
                 const std::string& ambient_path,
                 const std::vector<std::string>& witness_paths) {
  std::vector<mmkit::SpaceDocument> docs;
  std::vector<mmkit::MMSpace> family;
  for (const std::string& p : family_paths) {
    docs.push_back(load_space(p));
    family.push_back(mmkit::space_from_document(docs.back()));
  }
  mmkit::PipelineConfig config;
  config.schedule = parse_schedule(schedule_str);
  if (mode_str == "ambient")
    config.mode = mmkit::PipelineConfig::Mode::ambient;
  else if (mode_str == "free")
    config.mode = mmkit::PipelineConfig::Mode::free_products;
  else
    throw mmkit::ParseError("--mode must be 'ambient' or 'free'");

  if (config.mode == mmkit::PipelineConfig::Mode::ambient) {
    if (ambient_path.empty())
      throw mmkit::ParseError("ambient mode needs --ambient W.json");
    config.ambient = mmkit::space_from_document(load_space(ambient_path));
    if (!witness_paths.empty() && witness_paths.size() != family.size())
      throw mmkit::ParseError("need one --ambient-witness per family member");
    for (std::size_t l = 0; l < family.size(); ++l) {
      if (l < witness_paths.size()) {
        config.ambient_witnesses.push_back(witness_from_file(witness_paths[l]));
      } else {
        auto w = mmkit::check_domination(*config.ambient, family[l], guards());
        if (!w)
          return negative("map", "ambient space does not dominate member " +
                                     std::to_string(l));
        config.ambient_witnesses.push_back(*w);
      }
    }
  }

  mmkit::PipelineCertificate cert =
      mmkit::common_dominator(family, config, guards());
  mmkit::AmbientChain chain =
      mmkit::build_ambient_chain(family, config, guards());
  mmkit::SpaceDocument top_doc =
      mmkit::document_from_space("chain_top", chain.spaces.back());
  emit(mmkit::certificate_pipeline(docs, top_doc, config.schedule, mode_str,
                                   cert));
  return 0;
}

int run_verify(const std::string& cert_path,
               const std::vector<std::string>& space_paths) {
  Json doc = load_json(cert_path);

  // Rejections during re-verification (including shape mismatches against
  // replacement spaces) are definitive negatives, not input errors.
  const auto check = [](const Json& cert,
                        const std::vector<mmkit::SpaceDocument>& spaces) {
    try {
      return mmkit::reverify_certificate(cert, spaces);
    } catch (const mmkit::Error&) {
      return false;
    }
  };

  // Construct-result wrappers carry a list of embedded certificates.
  if (doc.contains("witnesses")) {
    bool ok = true;
    for (const Json& cert : doc["witnesses"])
      ok = ok && check(cert, mmkit::certificate_spaces(cert));
    Json out;
    out["verified"] = ok;
    emit(out);
    return ok ? 0 : 1;
  }

  std::vector<mmkit::SpaceDocument> spaces;
  if (!space_paths.empty()) {
    for (const std::string& p : space_paths) spaces.push_back(load_space(p));
  } else {
    spaces = mmkit::certificate_spaces(doc);
  }
  bool ok = check(doc, spaces);
  Json out;
  out["verified"] = ok;
  emit(out);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact metric-measure-space toolkit"};
  app.require_subcommand(1);
  int exit_code = 0;

  // prohorov
  std::string pro_space, pro_mu = "mass", pro_nu = "mass";
  bool pro_oracle = false;
  auto* pro = app.add_subcommand("prohorov", "Prohorov distance on one metric");
  pro->add_option("space", pro_space)->required();
  pro->add_option("--mu", pro_mu, "measure name ('mass' or a measures key)");
  pro->add_option("--nu", pro_nu, "measure name ('mass' or a measures key)");
  pro->add_flag("--oracle", pro_oracle, "subset-enumeration oracle");
  pro->callback(
      [&] { exit_code = run_prohorov(pro_space, pro_mu, pro_nu, pro_oracle); });

  // box
  std::string box_a, box_b;
  bool box_oracle_flag = false;
  unsigned box_denominator = 0;
  auto* boxc = app.add_subcommand("box", "box distance between mm-spaces");
  boxc->add_option("a", box_a)->required();
  boxc->add_option("b", box_b)->required();
  boxc->add_flag("--oracle", box_oracle_flag, "blow-up enumeration oracle");
  boxc->add_option("--denominator", box_denominator,
                   "blow-up denominator (default: lcm of the masses)");
  boxc->callback([&] {
    exit_code = run_box(box_a, box_b, box_oracle_flag, box_denominator);
  });

  // gh
  std::string gh_a, gh_b;
  auto* ghc = app.add_subcommand("gh", "Gromov-Hausdorff distance");
  ghc->add_option("a", gh_a)->required();
  ghc->add_option("b", gh_b)->required();
  ghc->callback([&] { exit_code = run_gh(gh_a, gh_b); });

  std::string ghe_a, ghe_b, ghe_eps;
  auto* ghec = app.add_subcommand("gh-eps", "GH order relaxation check");
  ghec->add_option("a", ghe_a)->required();
  ghec->add_option("b", ghe_b)->required();
  ghec->add_option("--eps", ghe_eps)->required();
  ghec->callback([&] { exit_code = run_gh_eps(ghe_a, ghe_b, ghe_eps); });

  // order
  auto* order = app.add_subcommand("order", "Lipschitz order decisions");
  order->require_subcommand(1);
  std::string oc_x, oc_y;
  auto* occ = order->add_subcommand("check", "decide lower < upper exactly");
  occ->add_option("upper", oc_x, "dominating space")->required();
  occ->add_option("lower", oc_y, "dominated space")->required();
  occ->callback([&] { exit_code = run_order_check(oc_x, oc_y); });
  std::string oe_x, oe_y, oe_eps;
  auto* oec = order->add_subcommand("eps", "decide the eps-relaxed order");
  oec->add_option("upper", oe_x)->required();
  oec->add_option("lower", oe_y)->required();
  oec->add_option("--eps", oe_eps)->required();
  oec->callback([&] { exit_code = run_order_eps(oe_x, oe_y, oe_eps); });

  // construct
  auto* con = app.add_subcommand("construct", "space constructors");
  con->require_subcommand(1);
  std::string cp_a, cp_b;
  auto* cpc = con->add_subcommand("product", "sup-metric product");
  cpc->add_option("a", cp_a)->required();
  cpc->add_option("b", cp_b)->required();
  cpc->callback([&] { exit_code = run_product(cp_a, cp_b); });
  std::string cq_w, cq_y, cq_z, cq_wy, cq_wz;
  auto* cqc = con->add_subcommand("quotient", "quotient dominator");
  cqc->add_option("ambient", cq_w)->required();
  cqc->add_option("first", cq_y)->required();
  cqc->add_option("second", cq_z)->required();
  cqc->add_option("--witness-y", cq_wy, "map certificate for first < ambient");
  cqc->add_option("--witness-z", cq_wz, "map certificate for second < ambient");
  cqc->callback(
      [&] { exit_code = run_quotient(cq_w, cq_y, cq_z, cq_wy, cq_wz); });
  long long cu_n = 2;
  std::string cu_d = "1", cu_dominate;
  std::size_t cu_depth = 4;
  auto* cuc = con->add_subcommand("universal", "truncated universal space");
  cuc->add_option("--n", cu_n, "family cardinality bound")->required();
  cuc->add_option("--d", cu_d, "diameter bound")->required();
  cuc->add_option("--depth", cu_depth, "truncation depth")->required();
  cuc->add_option("--dominate", cu_dominate, "emit a witness for this space");
  cuc->callback(
      [&] { exit_code = run_universal(cu_n, cu_d, cu_depth, cu_dominate); });
  std::string cg_a, cg_b, cg_eps;
  auto* cgc = con->add_subcommand("glue", "glue along the optimal box coupling");
  cgc->add_option("a", cg_a)->required();
  cgc->add_option("b", cg_b)->required();
  cgc->add_option("--eps", cg_eps, "bridge eps (default: the box value)");
  cgc->callback([&] { exit_code = run_glue(cg_a, cg_b, cg_eps); });
  std::string cr_x, cr_y, cr_eps, cr_witness;
  auto* crc = con->add_subcommand("regularize", "eps-witness regularization");
  crc->add_option("upper", cr_x)->required();
  crc->add_option("lower", cr_y)->required();
  crc->add_option("--eps", cr_eps)->required();
  crc->add_option("--witness", cr_witness, "eps certificate to reuse");
  crc->callback(
      [&] { exit_code = run_regularize(cr_x, cr_y, cr_eps, cr_witness); });

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "common-dominator pipeline");
  pipe->require_subcommand(1);
  std::vector<std::string> pd_family, pd_witnesses;
  std::string pd_schedule, pd_mode = "free", pd_ambient;
  auto* pdc = pipe->add_subcommand("dominate", "run the full certificate");
  pdc->add_option("--family", pd_family, "family space documents")
      ->required()
      ->expected(-1);
  pdc->add_option("--schedule", pd_schedule, "comma-separated eps levels")
      ->required();
  pdc->add_option("--mode", pd_mode, "'ambient' or 'free'");
  pdc->add_option("--ambient", pd_ambient, "ambient space document");
  pdc->add_option("--ambient-witness", pd_witnesses,
                  "map certificates for each member")
      ->expected(-1);
  pdc->callback([&] {
    exit_code = run_pipeline(pd_family, pd_schedule, pd_mode, pd_ambient,
                             pd_witnesses);
  });

  // verify
  std::string v_cert;
  std::vector<std::string> v_spaces;
  auto* ver = app.add_subcommand("verify", "re-run a certificate's checks");
  ver->add_option("certificate", v_cert)->required();
  ver->add_option("--spaces", v_spaces, "replace the embedded spaces")
      ->expected(-1);
  ver->callback([&] { exit_code = run_verify(v_cert, v_spaces); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    Json err;
    err["error"] = "usage";
    err["detail"] = std::string(e.what());
    std::cerr << mmkit::dump_json(err);
    return 2;
  } catch (const mmkit::Error& e) {
    Json err;
    err["error"] = e.code();
    err["detail"] = std::string(e.what());
    std::cerr << mmkit::dump_json(err);
    return 2;
  } catch (const std::exception& e) {
    Json err;
    err["error"] = "internal";
    err["detail"] = std::string(e.what());
    std::cerr << mmkit::dump_json(err);
    return 2;
  }
  return exit_code;
}
