#include "apt_lab/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "apt_lab/apt_core.hpp"
#include "apt_lab/catalog.hpp"
#include "apt_lab/certificate.hpp"
#include "apt_lab/decide.hpp"
#include "apt_lab/density.hpp"
#include "apt_lab/json_util.hpp"
#include "apt_lab/manin.hpp"
#include "apt_lab/symbolic.hpp"

namespace apt_lab::cli {

namespace {

class usage_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Options {
  unsigned jobs = 1;
  std::uint64_t seed = 20240601;

  std::string primes;
  std::string root;
  std::string format = "json";
  std::size_t node_cap = 1'000'000;
  std::size_t depth_cap = 10'000;

  std::size_t depth = 40;
  std::size_t search_nodes = 5'000'000;
  std::size_t pump = 0;
  std::string lift;
  std::string verify_path;

  std::size_t r = 0;
  std::size_t limit = 0;
  std::string survivors_path;
  bool instantiate = false;
  Prime prime_bound = 10000;

  std::string catalog_path;
  std::string certified = "";
  std::size_t catalog_depth = 120;
  Prime cutoff = kDefaultPrimeCutoff;

  unsigned k = 2;
  std::uint64_t level = 0;
  unsigned j = 0;
  std::int64_t u = 0;
  std::int64_t v = 0;
  bool no_memo = false;
  bool check_acyclic = false;
  std::size_t oracle_trials = 0;

  std::string out_path;
};

void emit(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

Json residue_pair_json(const ResiduePair& p) {
  return Json::array({std::to_string(p.first), std::to_string(p.second)});
}

Json sets_json(const std::vector<PrimeSet>& sets) {
  Json a = Json::array();
  for (const auto& s : sets) a.push_back(primes_to_json(s));
  return a;
}

PrimeSet parse_primes(const std::string& text) {
  try {
    return PrimeSet::parse(text);
  } catch (const std::exception& e) {
    throw usage_error(std::string("--primes: ") + e.what());
  }
}

NodePair parse_root(const std::string& text) {
  try {
    return NodePair::parse(text);
  } catch (const std::exception& e) {
    throw usage_error(std::string("--root: ") + e.what());
  }
}

std::string tree_text(const TreeResult& tree) {
  std::string s;
  for (const auto& n : tree.nodes) {
    s.append(2 * n.depth, ' ');
    if (n.via) s += static_cast<char>(*n.via), s += ' ';
    s += n.pair.to_string();
    if (n.l_child == TreeResult::npos && n.r_child == TreeResult::npos) s += " leaf";
    s += '\n';
  }
  return s;
}

int cmd_tree(const Options& o, std::ostream& out, std::ostream& err) {
  auto tree = expand(parse_primes(o.primes), parse_root(o.root), {o.node_cap, o.depth_cap});
  if (o.format == "dot") out << export_dot(tree);
  else if (o.format == "text") out << tree_text(tree);
  else out << Json::parse(export_tree_json(tree)).dump(2) << '\n';
  if (!tree.exhausted()) {
    err << "tree truncated: " << tree.truncation_reason << '\n';
    return kExitInconclusive;
  }
  return kExitOk;
}

int cmd_decide(const Options& o, std::ostream& out, std::ostream& err) {
  PrimeSet primes = parse_primes(o.primes);
  std::size_t cap = memory_cap_from_env();
  auto d = finite_type_decide(primes, cap);
  Json j;
  j["primes"] = primes_to_json(primes);
  if (auto* f = std::get_if<FiniteType>(&d)) {
    j["type"] = "finite";
    j["L"] = f->longest_walk;
    j["C"] = longest_chain(primes, cap);
    emit(out, j);
    return kExitOk;
  }
  if (auto* inf = std::get_if<InfiniteType>(&d)) {
    std::optional<PathCertificate> cert;
    std::string why;
    try {
      cert = certificate_from_residue_cycle(primes, inf->cycle);
      auto report = check_certificate(*cert);
      if (!report.ok) why = report.diagnostic, cert.reset();
    } catch (const std::exception& e) {
      why = e.what();
    }
    if (!cert) {
      err << "residue cycle did not lift to a verifying certificate: " << why << '\n';
      j["type"] = "undecided";
      j["reason"] = "unconfirmed residue cycle";
      emit(out, j);
      return kExitInconclusive;
    }
    j["type"] = "infinite";
    Json cyc = Json::array();
    for (const auto& p : inf->cycle) cyc.push_back(residue_pair_json(p));
    j["cycle"] = std::move(cyc);
    j["certificate"] = certificate_to_json(*cert);
    emit(out, j);
    return kExitOk;
  }
  j["type"] = "undecided";
  j["reason"] = std::get<Undecided>(d).reason;
  emit(out, j);
  return kExitInconclusive;
}

int cmd_certify(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.verify_path.empty()) {
    std::ifstream in(o.verify_path);
    if (!in) throw usage_error("cannot open " + o.verify_path);
    auto cert = certificate_from_json(Json::parse(in));
    auto report = check_certificate(cert);
    Json j;
    j["status"] = report.ok ? "verified" : "rejected";
    if (!report.ok) j["diagnostic"] = report.diagnostic;
    emit(out, j);
    if (!report.ok) err << "certificate rejected: " << report.diagnostic << '\n';
    return report.ok ? kExitOk : kExitUsage;
  }
  if (o.primes.empty() || o.root.empty()) throw usage_error("certify needs --primes and --root (or --verify)");
  PrimeSet primes = parse_primes(o.primes);
  auto search = search_certificate(primes, parse_root(o.root), o.depth, o.search_nodes);
  Json j;
  j["primes"] = primes_to_json(primes);
  j["nodes_visited"] = search.nodes_visited;
  if (!search.certificate) {
    j["status"] = "not_found";
    j["depth_cap_hit"] = search.depth_cap_hit;
    j["node_cap_hit"] = search.node_cap_hit;
    emit(out, j);
    return kExitInconclusive;
  }
  j["status"] = "found";
  j["certificate"] = certificate_to_json(*search.certificate);
  if (o.pump > 0) {
    Json pumped = Json::array();
    for (const auto& p : pump_certificate(*search.certificate, o.pump)) pumped.push_back(pair_to_json(p));
    j["pumped"] = std::move(pumped);
  }
  if (!o.lift.empty()) {
    PrimeSet q = parse_primes(o.lift);
    if (!primes.is_subset_of(q)) throw usage_error("--lift must be a superset of --primes");
    auto lifted = lift_certificate(*search.certificate, q);
    auto report = check_certificate(lifted);
    if (!report.ok) throw integrity_error("lifted certificate rejected: " + report.diagnostic);
    j["lifted"] = certificate_to_json(lifted);
  }
  emit(out, j);
  return kExitOk;
}

int cmd_classify(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.r < 2) throw usage_error("--r must be >= 2");
  std::size_t limit = o.limit ? o.limit : default_classify_limit(o.r);
  auto res = classify(o.r, limit, o.jobs);
  Json j;
  j["r"] = o.r;
  j["limit"] = limit;
  j["l_r"] = res.l_r;
  j["exact"] = res.exact;
  j["survivors"] = res.survivors.size();
  j["infinite_sets"] = sets_json(res.infinite_sets);
  j["states_per_round"] = res.states_per_round;
  j["longest_dead"] = res.longest_dead ? state_to_json(*res.longest_dead) : Json(nullptr);
  if (!o.survivors_path.empty()) {
    std::ofstream f(o.survivors_path, std::ios::binary | std::ios::trunc);
    if (!f) throw usage_error("cannot write " + o.survivors_path);
    for (const auto& s : res.survivors) f << state_to_json(s).dump() << '\n';
  }
  if (o.instantiate) {
    InstantiateOptions opts;
    opts.prime_bound = o.prime_bound;
    std::set<PrimeSet> found;
    for (const auto& s : res.survivors) {
      for (auto& p : instantiate(s, opts)) found.insert(std::move(p));
    }
    j["instantiated"] = sets_json({found.begin(), found.end()});
  }
  emit(out, j);
  if (!res.exact) {
    err << "classification not exact within " << limit << " rounds\n";
    return kExitInconclusive;
  }
  return kExitOk;
}

std::vector<PrimeSet> certified_catalog_sets(const Options& o, std::ostream& err) {
  if (o.catalog_path.empty()) throw usage_error("--catalog is required");
  Catalog c = load_catalog(o.catalog_path);
  auto report = certify_all(c, o.catalog_depth, 5'000'000, o.jobs);
  for (const auto& f : report.failures) err << "excluded uncertified entry " << f.to_string() << '\n';
  std::vector<PrimeSet> sets;
  for (const auto& e : c.entries()) {
    if (e.status == EntryStatus::Certified) sets.push_back(e.primes);
  }
  return sets;
}

int cmd_density(const std::string& which, const Options& o, std::ostream& out, std::ostream& err) {
  if (which == "c") {
    emit(out, density_to_json(c_of(parse_primes(o.primes)), "c"));
    return kExitOk;
  }
  auto sets = certified_catalog_sets(o, err);
  Json j;
  if (which == "upper") {
    j = density_to_json(upper_bound(sets), "upper");
  } else {
    std::set<unsigned> strata;
    std::stringstream ss(o.certified);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      try {
        strata.insert(static_cast<unsigned>(std::stoul(tok)));
      } catch (const std::exception&) {
        throw usage_error("--certified: bad stratum \"" + tok + "\"");
      }
    }
    auto data = classification_from_sets(sets, strata);
    data.cutoff = o.cutoff;
    j = density_to_json(lower_bound(data), "lower");
  }
  j["sets_used"] = sets.size();
  emit(out, j);
  return kExitOk;
}

Json symbol_json(const XiSymbol& s) { return {{"j", s.j}, {"u", s.u}, {"v", s.v}}; }

int cmd_reduce(const Options& o, std::ostream& out, std::ostream& err) {
  PrimeSet primes = parse_primes(o.primes);
  if (o.check_acyclic) {
    auto res = acyclic(o.level, primes, memory_cap_from_env());
    Json j;
    if (std::holds_alternative<Acyclic>(res)) {
      j["result"] = "acyclic";
    } else if (auto* c = std::get_if<ResidueCycle>(&res)) {
      j["result"] = "cycle";
      Json cyc = Json::array();
      for (const auto& p : c->cycle) cyc.push_back(residue_pair_json(p));
      j["cycle"] = std::move(cyc);
    } else {
      j["result"] = "undecided";
      j["reason"] = std::get<Undecided>(res).reason;
      emit(out, j);
      return kExitInconclusive;
    }
    emit(out, j);
    return kExitOk;
  }
  if (o.oracle_trials > 0) {
    OracleOptions opts;
    opts.seed = o.seed;
    auto rep = oracle_report(o.k, o.level, primes, o.oracle_trials, opts);
    Json j;
    j["ok"] = rep.ok;
    j["variables"] = rep.variables;
    j["zero_classes"] = rep.zero_classes;
    j["rank"] = rep.rank;
    j["nullity"] = rep.nullity;
    j["checks"] = rep.checks;
    if (!rep.ok) j["failure"] = rep.failure;
    emit(out, j);
    return rep.ok ? kExitOk : kExitInconclusive;
  }
  ManinContext ctx(o.k, o.level, primes);
  if (o.j > o.k - 2) throw usage_error("--j must lie in [0, k-2]");
  XiSymbol s{o.j, ctx.canon(o.u), ctx.canon(o.v)};
  if (!ctx.in_e_n(s.u, s.v)) throw usage_error("(u, v) is not in E_N");
  try {
    FormalSum sum = o.no_memo ? reduce_unmemoized(ctx, s) : Reducer(ctx).reduce(s);
    emit(out, formal_sum_to_json(sum));
    return kExitOk;
  } catch (const reduce_cycle_error& e) {
    Json j;
    Json cyc = Json::array();
    for (const auto& c : e.cycle()) cyc.push_back(symbol_json(c));
    j["cycle"] = std::move(cyc);
    emit(out, j);
    err << e.what() << '\n';
    return kExitInconclusive;
  }
}

Json catalog_summary(const Catalog& c) {
  std::size_t certified = 0;
  for (const auto& e : c.entries()) certified += e.status == EntryStatus::Certified;
  return {{"entries", c.size()}, {"certified", certified}, {"claimed", c.size() - certified}};
}

int cmd_catalog(const std::string& which, const Options& o, std::ostream& out, std::ostream& err) {
  Catalog c = load_catalog(o.catalog_path);
  if (which == "validate") {
    emit(out, catalog_summary(c));
    return kExitOk;
  }
  if (which == "certify") {
    auto report = certify_all(c, o.catalog_depth, o.search_nodes, o.jobs);
    if (!o.out_path.empty()) save_catalog(c, o.out_path);
    Json j = catalog_summary(c);
    j["newly_certified"] = report.certified;
    j["reverified"] = report.reverified;
    j["failures"] = sets_json(report.failures);
    emit(out, j);
    for (const auto& f : report.failures) err << "not certified: " << f.to_string() << '\n';
    return report.failures.empty() ? kExitOk : kExitInconclusive;
  }
  PrimeSet primes = parse_primes(o.primes);
  if (which == "minimality") {
    Json j;
    j["primes"] = primes_to_json(primes);
    try {
      auto known = c.prime_sets();
      j["minimal"] = minimality_check(primes, known, memory_cap_from_env());
    } catch (const minimality_unresolved& e) {
      err << e.what() << '\n';
      j["minimal"] = nullptr;
      emit(out, j);
      return kExitInconclusive;
    }
    emit(out, j);
    return kExitOk;
  }
  // insert
  NodePair root = parse_root(o.root);
  auto search = search_certificate(primes, root, o.catalog_depth, o.search_nodes);
  if (!search.certificate) {
    err << "no certificate for " << primes.to_string() << " within depth " << o.catalog_depth << '\n';
    emit(out, {{"outcome", "not_certified"}, {"evicted", Json::array()}, {"notice", "no certificate found"}, {"entries", c.size()}});
    return kExitInconclusive;
  }
  CatalogEntry entry{primes, root, EntryStatus::Certified, search.certificate};
  auto report = insert(c, std::move(entry));
  if (!o.out_path.empty()) save_catalog(c, o.out_path);
  static const char* names[] = {"appended", "duplicate", "rejected_superset"};
  Json j;
  j["outcome"] = names[static_cast<int>(report.outcome)];
  j["evicted"] = sets_json(report.evicted);
  j["notice"] = report.notice;
  j["entries"] = c.size();
  emit(out, j);
  if (!report.notice.empty()) err << report.notice << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Additive prime tree laboratory", "apt-lab"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1u, 256u));
  app.add_option("--seed", o.seed, "Seed for randomized checks");

  auto* tree = app.add_subcommand("tree", "Expand APT_P(root)");
  tree->add_option("--primes", o.primes, "Prime set, e.g. 2,3,5")->required();
  tree->add_option("--root", o.root, "Root pair, e.g. 2,3")->required();
  tree->add_option("--format", o.format)->check(CLI::IsMember({"json", "dot", "text"}));
  tree->add_option("--node-cap", o.node_cap);
  tree->add_option("--depth-cap", o.depth_cap);

  auto* decide = app.add_subcommand("decide", "Decide finite or infinite type");
  decide->add_option("--primes", o.primes)->required();

  auto* certify = app.add_subcommand("certify", "Search or verify an infinitude certificate");
  auto* c_primes = certify->add_option("--primes", o.primes);
  auto* c_root = certify->add_option("--root", o.root);
  certify->add_option("--depth", o.depth, "Depth cap");
  certify->add_option("--node-cap", o.search_nodes);
  certify->add_option("--pump", o.pump, "Number of pumped pairs to emit");
  certify->add_option("--lift", o.lift, "Superset to transport the certificate to");
  certify->add_option("--verify", o.verify_path, "Certificate JSON file to check")
      ->excludes(c_primes)
      ->excludes(c_root);

  auto* cls = app.add_subcommand("classify", "Symbolic classification of r-sets");
  cls->add_option("--r", o.r)->required();
  cls->add_option("--limit", o.limit, "Rounds (default per r)");
  cls->add_option("--emit-survivors", o.survivors_path, "JSONL file for surviving states");
  cls->add_flag("--instantiate", o.instantiate, "Instantiate survivors with concrete primes");
  cls->add_option("--prime-bound", o.prime_bound);

  auto* density = app.add_subcommand("density", "Natural density bounds");
  density->require_subcommand(1, 1);
  auto* d_upper = density->add_subcommand("upper", "1 - sum C(P) over catalogued sets");
  auto* d_lower = density->add_subcommand("lower", "Lower bound from certified strata");
  auto* d_c = density->add_subcommand("c", "C(P) for one set");
  for (auto* sub : {d_upper, d_lower}) {
    sub->add_option("--catalog", o.catalog_path)->required();
    sub->add_option("--depth", o.catalog_depth, "Depth cap for certifying claimed entries");
  }
  d_lower->add_option("--certified", o.certified, "Completely classified strata, e.g. 5,6");
  d_lower->add_option("--cutoff", o.cutoff, "Prime cutoff for direct summation");
  d_c->add_option("--primes", o.primes)->required();

  auto* red = app.add_subcommand("reduce", "Manin symbol reduction");
  red->add_option("--k", o.k)->required();
  red->add_option("--N", o.level)->required();
  red->add_option("--primes", o.primes)->required();
  auto* r_j = red->add_option("--j", o.j);
  auto* r_u = red->add_option("--u", o.u);
  auto* r_v = red->add_option("--v", o.v);
  red->add_flag("--no-memo", o.no_memo, "Plain recursion");
  auto* r_acyc = red->add_flag("--acyclic", o.check_acyclic, "Check the eligible residue graph mod N");
  auto* r_oracle = red->add_option("--oracle", o.oracle_trials, "Cross-check against the relation solver");
  for (auto* opt : {r_j, r_u, r_v}) opt->excludes(r_acyc)->excludes(r_oracle);
  r_acyc->excludes(r_oracle);

  auto* cat = app.add_subcommand("catalog", "Primitive-set catalog");
  cat->require_subcommand(1, 1);
  auto* c_validate = cat->add_subcommand("validate", "Load and check a catalog");
  auto* c_certify = cat->add_subcommand("certify", "Certify every entry");
  auto* c_insert = cat->add_subcommand("insert", "Certify and insert a set");
  auto* c_min = cat->add_subcommand("minimality", "Check that no proper subset is of infinite type");
  for (auto* sub : {c_validate, c_certify, c_insert, c_min}) {
    sub->add_option("--file", o.catalog_path)->required();
  }
  for (auto* sub : {c_certify, c_insert}) {
    sub->add_option("--depth", o.catalog_depth);
    sub->add_option("--node-cap", o.search_nodes);
    sub->add_option("--out", o.out_path, "Write the updated catalog here");
  }
  c_insert->add_option("--primes", o.primes)->required();
  c_insert->add_option("--root", o.root)->required();
  c_min->add_option("--primes", o.primes)->required();

  std::vector<std::string> owned{"apt-lab"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : owned) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (*tree) return cmd_tree(o, out, err);
    if (*decide) return cmd_decide(o, out, err);
    if (*certify) return cmd_certify(o, out, err);
    if (*cls) return cmd_classify(o, out, err);
    if (*density) return cmd_density(*d_upper ? "upper" : *d_lower ? "lower" : "c", o, out, err);
    if (*red) {
      if (!o.check_acyclic && o.oracle_trials == 0 && (r_j->count() == 0 || r_u->count() == 0 || r_v->count() == 0)) {
        throw usage_error("reduce needs --j, --u and --v (or --acyclic / --oracle)");
      }
      return cmd_reduce(o, out, err);
    }
    if (*cat) {
      std::string which = *c_validate ? "validate" : *c_certify ? "certify" : *c_insert ? "insert" : "minimality";
      return cmd_catalog(which, o, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace apt_lab::cli
