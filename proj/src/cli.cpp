#include "obdm/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <ostream>
#include <sstream>

#include "obdm/eval.hpp"
#include "obdm/frontend.hpp"
#include "obdm/oracle.hpp"

namespace obdm {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

struct Common {
  std::string spec_path;
  std::string format = "text";
};

json term_json(const Term& t) { return to_string(t); }

json atom_json(const Atom& a) {
  json args = json::array();
  for (const auto& t : a.args) args.push_back(term_json(t));
  return {{"predicate", a.predicate}, {"args", args}};
}

json instance_json(const Instance& inst) {
  json out = json::array();
  for (const auto& a : inst.atoms()) out.push_back(atom_json(a));
  return out;
}

json tuple_json(const Tuple& t) {
  json out = json::array();
  for (const auto& x : t) out.push_back(term_json(x));
  return out;
}

json ucq_json(const UnionQuery& q, const std::string& name) {
  json out = json::array();
  std::istringstream lines(to_string(q, name));
  for (std::string line; std::getline(lines, line);) out.push_back(line);
  return out;
}

Budget parse_budget(const std::string& text) {
  Budget b;
  if (text.empty()) return b;
  std::istringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("budget entries look like key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "pool") {
      b.const_pool.clear();
      std::istringstream vs(value);
      for (std::string c; std::getline(vs, c, '|');)
        if (!c.empty()) b.const_pool.push_back(c);
      continue;
    }
    std::size_t n = 0;
    try {
      std::size_t used = 0;
      n = std::stoul(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw Error("budget value for '" + key + "' must be a non-negative integer");
    }
    if (key == "atoms") {
      b.max_model_atoms = n;
    } else if (key == "extra") {
      b.extra_domain = n;
    } else if (key == "depth") {
      b.canonical_depth = n;
    } else if (key == "source") {
      b.max_source_atoms = n;
    } else {
      throw Error("unknown budget key '" + key + "'");
    }
  }
  b.validate();
  return b;
}

json budget_json(const Budget& b) {
  return {{"const_pool", b.const_pool},
          {"max_model_atoms", b.max_model_atoms},
          {"extra_domain", b.extra_domain},
          {"canonical_depth", b.canonical_depth},
          {"max_source_atoms", b.max_source_atoms}};
}

class Runner {
 public:
  Runner(std::ostream& out) : out_(out) {}

  void emit(const Common& c, const std::string& command, json body, const std::string& text) {
    if (c.format == "json") {
      json doc = {{"format_version", kFormatVersion}, {"command", command}};
      doc.update(body);
      out_ << doc.dump(2) << "\n";
    } else {
      out_ << text;
    }
  }

  int validate(const Common& c) {
    const auto doc = load_spec(c.spec_path);
    doc.spec.validate();
    std::ostringstream text;
    text << "OK " << doc.spec.source.size() << " source relations, " << doc.spec.tbox.assertions().size()
         << " assertions, " << doc.spec.mapping.size() << " mapping rules, " << doc.queries.size() << " queries\n";
    json names = json::array();
    for (const auto& [n, _] : doc.queries) names.push_back(n);
    emit(c, "validate",
         {{"valid", true},
          {"source_relations", doc.spec.source.size()},
          {"assertions", doc.spec.tbox.assertions().size()},
          {"mapping_rules", doc.spec.mapping.size()},
          {"queries", names}},
         text.str());
    return 0;
  }

  int chase(const Common& c, const std::string& query, bool with_trace) {
    const auto doc = load_spec(c.spec_path);
    doc.spec.validate();
    const auto& qs = doc.query(query);
    check_source_query(doc.spec, qs);
    auto reserved = doc.spec.constants();
    const auto qc = qs.constants();
    reserved.insert(qc.begin(), qc.end());
    const auto d = instance_of_query(qs, reserved);
    ChaseTrace trace;
    const auto res = abox_of(d.instance, doc.spec.mapping, doc.spec.tbox, with_trace ? &trace : nullptr, reserved);

    // psi reads back in the source query's variable names.
    std::map<Term, std::string> name_of;
    for (const auto& [v, n] : d.var_to_null.map()) name_of[n] = v.label;
    auto render = [&](const Term& t) {
      auto it = name_of.find(t);
      return it != name_of.end() ? it->second : to_string(t);
    };
    std::vector<std::pair<std::string, std::string>> psi;
    if (res.abox)
      for (const auto& [from, to] : res.psi.map()) psi.emplace_back(render(from), render(to));
    std::sort(psi.begin(), psi.end());

    std::ostringstream text;
    for (const auto& line : trace) text << line << "\n";
    if (res.abox) {
      text << to_string(*res.abox);
      for (const auto& [v, t] : psi) text << "psi: " << v << " -> " << t << "\n";
    } else {
      text << "BOTTOM\n";
    }
    json psi_json = json::array();
    for (const auto& [v, t] : psi) psi_json.push_back({{"from", v}, {"to", t}});
    json body = {{"query", query},
                 {"bottom", !res.abox},
                 {"abox", res.abox ? instance_json(*res.abox) : json(nullptr)},
                 {"psi", psi_json}};
    if (with_trace) body["trace"] = trace;
    emit(c, "chase", body, text.str());
    return 0;
  }

  int qsat(const Common& c) {
    const auto doc = load_spec(c.spec_path);
    doc.spec.validate();
    const auto q = build_qsat(doc.spec.tbox);
    std::string text = to_string(q.without_inequality, "qsat0") + to_string(q.with_inequality, "qsat1");
    emit(c, "qsat",
         {{"qsat0", ucq_json(q.without_inequality, "qsat0")}, {"qsat1", ucq_json(q.with_inequality, "qsat1")}},
         text);
    return 0;
  }

  int perfect_ref(const Common& c, const std::string& query) {
    const auto doc = load_spec(c.spec_path);
    doc.spec.validate();
    const auto& q = doc.query(query);
    check_ontology_query(doc.spec, q);
    const auto pr = perfect_reformulation(doc.spec.tbox, q);
    emit(c, "perfect-ref", {{"query", query}, {"disjuncts", ucq_json(pr, query)}}, to_string(pr, query));
    return 0;
  }

  int cert(const Common& c, const std::string& db_path, const std::string& query) {
    const auto doc = load_spec(c.spec_path);
    doc.spec.validate();
    const auto db = load_db(db_path);
    for (const auto& a : db.atoms()) {
      auto it = doc.spec.source.find(a.predicate);
      if (it == doc.spec.source.end()) throw Error("database uses undeclared source relation '" + a.predicate + "'");
      if (it->second != a.arity()) throw Error("arity mismatch for source relation '" + a.predicate + "'");
    }
    const auto answers = certain_answers(doc.spec, db, doc.query(query));
    std::ostringstream text;
    json tuples = json::array();
    for (const auto& t : answers) {
      text << to_string(t) << "\n";
      tuples.push_back(tuple_json(t));
    }
    emit(c, "cert", {{"query", query}, {"answers", tuples}}, text.str());
    return 0;
  }

  int check_complete(const Common& c, const std::string& source_query, const std::string& onto_query) {
    const auto doc = load_spec(c.spec_path);
    doc.spec.validate();
    CompletenessTrace tr;
    const bool ok = obdm::check_complete(doc.spec, doc.query(source_query), doc.query(onto_query), &tr);
    static const char* reasons[] = {"chase-failed", "qsat-holds", "entailed", "not-entailed"};
    emit(c, "check-complete",
         {{"source_query", source_query},
          {"onto_query", onto_query},
          {"complete", ok},
          {"reason", reasons[static_cast<int>(tr.reason)]}},
         ok ? "COMPLETE\n" : "NOT COMPLETE\n");
    return ok ? 0 : 1;
  }

  int find_complete(const Common& c, const std::string& source_query, const std::string& name, bool minimize) {
    const auto doc = load_spec(c.spec_path);
    doc.spec.validate();
    FindOptions opts;
    opts.minimize = minimize;
    const auto q = find_optimal_complete(doc.spec, doc.query(source_query), opts);
    std::string text;
    std::string form = "normal";
    if (q.form == QueryForm::Bottom) {
      text = "BOTTOM-QUERY\n";
      form = "bottom";
    } else if (q.form == QueryForm::Top) {
      text = "TOP-QUERY\n";
      form = "top";
    } else {
      text = to_string(q, name) + "\n";
    }
    emit(c, "find-complete",
         {{"source_query", source_query}, {"form", form}, {"rewriting", to_string(q, name)}}, text);
    return 0;
  }

  int oracle(const Common& c, const std::string& source_query, const std::string& onto_query,
             const std::string& variant, const std::string& semantics, const std::string& budget_text,
             const std::string& db_path) {
    const auto doc = load_spec(c.spec_path);
    doc.spec.validate();
    Budget budget = parse_budget(budget_text);
    if (!db_path.empty()) budget.source_databases.push_back(load_db(db_path));
    const Variant v = variant == "complete" ? Variant::Complete : variant == "sound" ? Variant::Sound : Variant::Exact;
    const Semantics s = semantics == "model" ? Semantics::Model : Semantics::Cert;
    const auto verdict = oracle_check(doc.spec, doc.query(source_query), doc.query(onto_query), v, s, budget);

    std::ostringstream text;
    text << (verdict.holds ? "HOLDS" : "FAILS") << " " << to_string(v) << " " << to_string(s)
         << (verdict.holds ? (verdict.exhaustive ? " (exhaustive)" : " (within budget)") : "") << "\n";
    text << "budget: " << to_string(budget) << "\n";
    json witness = nullptr;
    if (verdict.witness) {
      const auto& w = *verdict.witness;
      text << "witness: " << w.reason << "\n";
      text << "tuple: " << to_string(w.tuple) << "\n";
      text << "source:\n" << to_string(w.source_db);
      if (w.model) text << "model:\n" << to_string(*w.model);
      witness = {{"reason", w.reason},
                 {"tuple", tuple_json(w.tuple)},
                 {"source_db", instance_json(w.source_db)},
                 {"model", w.model ? instance_json(*w.model) : json(nullptr)}};
    }
    emit(c, "oracle",
         {{"source_query", source_query},
          {"onto_query", onto_query},
          {"variant", to_string(v)},
          {"semantics", to_string(s)},
          {"holds", verdict.holds},
          {"exhaustive", verdict.exhaustive},
          {"databases", verdict.databases},
          {"models", verdict.models},
          {"budget", budget_json(budget)},
          {"witness", witness}},
         text.str());
    return verdict.holds ? 0 : 1;
  }

 private:
  std::ostream& out_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rewriting source queries over ontology-based data management specifications", "obdm"};
  app.require_subcommand(1);
  Common common;
  std::string query, source_query, onto_query, db_path, variant = "complete", semantics = "model", budget, name = "qg";
  bool trace = false;
  bool minimize = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("SPEC", common.spec_path, "specification file")->required();
    sub->add_option("--format", common.format, "output format")->check(CLI::IsMember({"text", "json"}));
  };

  auto* validate = app.add_subcommand("validate", "parse a specification and check its invariants");
  add_common(validate);
  auto* chase = app.add_subcommand("chase", "compute the ABox of a source query's instance");
  add_common(chase);
  chase->add_option("--query", query, "source query name")->required();
  chase->add_flag("--trace", trace, "print the chase steps");
  auto* qsat = app.add_subcommand("qsat", "print the satisfiability queries of the TBox");
  add_common(qsat);
  auto* pref = app.add_subcommand("perfect-ref", "perfect reformulation of an ontology query");
  add_common(pref);
  pref->add_option("--onto-query", onto_query, "ontology query name")->required();
  auto* cert = app.add_subcommand("cert", "certain answers of an ontology query over a source database");
  add_common(cert);
  cert->add_option("--db", db_path, "facts file")->required();
  cert->add_option("--onto-query", onto_query, "ontology query name")->required();
  auto* check = app.add_subcommand("check-complete", "decide whether an ontology query is a complete rewriting");
  add_common(check);
  check->add_option("--source-query", source_query, "source query name")->required();
  check->add_option("--onto-query", onto_query, "ontology query name")->required();
  auto* find = app.add_subcommand("find-complete", "compute the optimal complete rewriting");
  add_common(find);
  find->add_option("--source-query", source_query, "source query name")->required();
  find->add_option("--name", name, "head name of the printed rewriting");
  find->add_flag("--minimize", minimize, "print the core of the rewriting");
  auto* orc = app.add_subcommand("oracle", "bounded brute-force check of a rewriting");
  add_common(orc);
  orc->add_option("--source-query", source_query, "source query name")->required();
  orc->add_option("--onto-query", onto_query, "ontology query name")->required();
  orc->add_option("--variant", variant, "complete, sound or exact")
      ->check(CLI::IsMember({"complete", "sound", "exact"}));
  orc->add_option("--semantics", semantics, "model or cert")->check(CLI::IsMember({"model", "cert"}));
  orc->add_option("--budget", budget, "pool=a|b|c,atoms=N,extra=N,depth=N,source=N");
  orc->add_option("--db", db_path, "check this source database only");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  Runner run(out);
  try {
    if (validate->parsed()) return run.validate(common);
    if (chase->parsed()) return run.chase(common, query, trace);
    if (qsat->parsed()) return run.qsat(common);
    if (pref->parsed()) return run.perfect_ref(common, onto_query);
    if (cert->parsed()) return run.cert(common, db_path, onto_query);
    if (check->parsed()) return run.check_complete(common, source_query, onto_query);
    if (find->parsed()) return run.find_complete(common, source_query, name, minimize);
    if (orc->parsed()) return run.oracle(common, source_query, onto_query, variant, semantics, budget, db_path);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace obdm
