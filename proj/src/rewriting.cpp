#include "obdm/rewriting.hpp"

#include <algorithm>

#include "obdm/eval.hpp"

namespace obdm {

std::map<std::string, std::size_t> ObdmSpec::ontology_predicates() const {
  std::map<std::string, std::size_t> out;
  for (const auto& c : tbox.concept_names()) out[c] = 1;
  for (const auto& r : tbox.role_names()) out[r] = 2;
  for (const auto& tgd : mapping)
    for (const auto& a : tgd.head) out.emplace(a.predicate, a.arity());
  return out;
}

std::set<Term> ObdmSpec::constants() const {
  std::set<Term> out;
  for (const auto& tgd : mapping)
    for (const auto* side : {&tgd.body, &tgd.head})
      for (const auto& a : *side)
        for (const auto& t : a.args)
          if (t.is_const()) out.insert(t);
  return out;
}

namespace {

void check_ontology_atom(const ObdmSpec& spec, const Atom& a) {
  if (a.is_top() || a.is_bottom()) {
    if (a.arity() != 1) throw Error("builtin '" + a.predicate + "' is unary");
    return;
  }
  if (spec.source.count(a.predicate))
    throw Error("source relation '" + a.predicate + "' used over the ontology");
  if (a.arity() != 1 && a.arity() != 2)
    throw Error("ontology predicate '" + a.predicate + "' must be a concept (1) or a role (2)");
  const auto concepts = spec.tbox.concept_names();
  const auto roles = spec.tbox.role_names();
  if (a.arity() == 1 && roles.count(a.predicate))
    throw Error("role '" + a.predicate + "' used as a concept");
  if (a.arity() == 2 && concepts.count(a.predicate))
    throw Error("concept '" + a.predicate + "' used as a role");
}

std::set<Term> reserved_labels(const ObdmSpec& spec, const ConjunctiveQuery& a,
                               const ConjunctiveQuery* b = nullptr) {
  auto out = spec.constants();
  const auto ca = a.constants();
  out.insert(ca.begin(), ca.end());
  if (b) {
    const auto cb = b->constants();
    out.insert(cb.begin(), cb.end());
  }
  return out;
}

std::vector<Egd> functional_egds(const TBox& tbox) {
  return egds_of_negated_ucq(build_qsat(tbox).with_inequality);
}

}  // namespace

void ObdmSpec::validate() const {
  tbox.validate();
  for (const auto& [name, _] : source)
    if (name == kTop || name == kBottom) throw Error("'" + name + "' is a reserved predicate");
  std::map<std::string, std::size_t> heads;
  for (const auto& tgd : mapping) {
    tgd.validate();
    for (const auto& a : tgd.body) {
      auto it = source.find(a.predicate);
      if (it == source.end()) throw Error("mapping body uses undeclared source relation '" + a.predicate + "'");
      if (it->second != a.arity()) throw Error("arity mismatch for source relation '" + a.predicate + "'");
    }
    for (const auto& a : tgd.head) {
      check_ontology_atom(*this, a);
      auto [it, inserted] = heads.emplace(a.predicate, a.arity());
      if (!inserted && it->second != a.arity())
        throw Error("ontology predicate '" + a.predicate + "' used with inconsistent arity");
    }
  }
}

void check_source_query(const ObdmSpec& spec, const ConjunctiveQuery& q) {
  if (q.form != QueryForm::Normal) throw Error("source queries must be normal conjunctive queries");
  if (q.body.empty()) throw Error("source query with an empty body");
  for (const auto& a : q.body) {
    auto it = spec.source.find(a.predicate);
    if (it == spec.source.end()) throw Error("source query uses undeclared relation '" + a.predicate + "'");
    if (it->second != a.arity()) throw Error("arity mismatch for source relation '" + a.predicate + "'");
  }
  q.check_safe();
}

void check_ontology_query(const ObdmSpec& spec, const ConjunctiveQuery& q) {
  for (const auto& a : q.body) check_ontology_atom(spec, a);
  const auto known = spec.ontology_predicates();
  for (const auto& a : q.body) {
    auto it = known.find(a.predicate);
    if (it != known.end() && it->second != a.arity())
      throw Error("arity mismatch for ontology predicate '" + a.predicate + "'");
  }
  q.check_safe();
}

bool check_complete(const ObdmSpec& spec, const ConjunctiveQuery& qs, const ConjunctiveQuery& qg,
                    CompletenessTrace* trace) {
  check_source_query(spec, qs);
  check_ontology_query(spec, qg);
  if (qs.arity() != qg.arity()) throw Error("source and ontology queries differ in arity");

  CompletenessTrace local;
  CompletenessTrace& tr = trace ? *trace : local;
  const auto reserved = reserved_labels(spec, qs, &qg);

  // (1) D := D_{Qs}
  const auto d = instance_of_query(qs, reserved);
  tr.source_instance = d.instance;
  // (2) A_{D,Sigma} with Sigma = M ∪ ¬Qsat^{1≠}
  auto res = abox_of(d.instance, spec.mapping, spec.tbox, nullptr, reserved);
  tr.abox = res.abox;
  tr.psi = res.psi;
  // (3)
  if (!res.abox) {
    tr.reason = CompletenessTrace::Reason::ChaseFailed;
    return true;
  }
  // (4)
  if (ucq_holds(build_qsat(spec.tbox).without_inequality, *res.abox)) {
    tr.reason = CompletenessTrace::Reason::QsatHolds;
    return true;
  }
  // (5) psi(tup(Qs)) in cert(Qg, <O, A>)
  Tuple t;
  for (const auto& term : res.psi.apply(d.head)) t.push_back(freeze(term));
  tr.answer = t;
  const bool ok = kb_entails(spec.tbox, *res.abox, qg, t);
  tr.reason = ok ? CompletenessTrace::Reason::Entailed : CompletenessTrace::Reason::NotEntailed;
  return ok;
}

ConjunctiveQuery find_optimal_complete(const ObdmSpec& spec, const ConjunctiveQuery& qs, const FindOptions& opts) {
  check_source_query(spec, qs);
  const auto reserved = reserved_labels(spec, qs);

  const auto d = instance_of_query(qs, reserved);
  const Instance j_prime = chase_tgds(d.instance, spec.mapping, nullptr, reserved);
  auto outcome = chase_egds(j_prime, functional_egds(spec.tbox));
  if (!outcome) return ConjunctiveQuery::bottom(qs.head);
  const Instance& j = outcome->instance;
  if (ucq_holds(build_qsat(spec.tbox).without_inequality, j)) return ConjunctiveQuery::bottom(qs.head);
  if (j.empty()) return ConjunctiveQuery::top(qs.head);

  // Null_D terms take back the name of the query variable they stand for; chase
  // nulls get fresh names.
  std::map<Term, std::string> names;
  std::set<std::string> used;
  for (const auto& [var, null] : d.var_to_null.map()) {
    names[null] = var.label;
    used.insert(var.label);
  }
  std::size_t next = 1;
  for (const auto& n : j.nulls()) {
    if (names.count(n)) continue;
    std::string name;
    do {
      name = "z" + std::to_string(next++);
    } while (used.count(name));
    used.insert(name);
    names[n] = name;
  }

  const Tuple head = outcome->psi.apply(d.head);
  ConjunctiveQuery q = query_of_instance(j, head, names);
  const auto dom = j.domain();
  std::set<Term> missing;
  for (std::size_t i = 0; i < head.size(); ++i) {
    if (dom.count(head[i]) || !missing.insert(head[i]).second) continue;
    q.body.push_back({kTop, {q.head[i]}});
  }
  return opts.minimize ? minimize(q) : q;
}

bool contained_wrt(const TBox& tbox, const ConjunctiveQuery& q1, const ConjunctiveQuery& q2) {
  if (q1.arity() != q2.arity()) throw Error("containment between queries of different arity");
  if (q1.form == QueryForm::Bottom || q2.form == QueryForm::Top) return true;

  ConjunctiveQuery lhs = q1;
  if (lhs.form == QueryForm::Top) {
    lhs.form = QueryForm::Normal;
    lhs.body.clear();
    for (const auto& t : lhs.head)
      if (t.is_var()) lhs.body.push_back({kTop, {t}});
  }
  auto reserved = lhs.constants();
  const auto c2 = q2.constants();
  reserved.insert(c2.begin(), c2.end());
  const auto d = instance_of_query(lhs, reserved);
  Instance target(SchemaTag::Target, d.instance.atoms());

  auto outcome = chase_egds(target, functional_egds(tbox));
  if (!outcome) return true;  // q1 is empty in every model
  const Instance abox = freeze(outcome->instance);
  if (ucq_holds(build_qsat(tbox).without_inequality, abox)) return true;
  Tuple t;
  for (const auto& term : outcome->psi.apply(d.head)) t.push_back(freeze(term));
  return kb_entails(tbox, abox, minimize(q2), t);
}

bool proper_contained_wrt(const TBox& tbox, const ConjunctiveQuery& q1, const ConjunctiveQuery& q2) {
  return contained_wrt(tbox, q1, q2) && !contained_wrt(tbox, q2, q1);
}

bool equivalent_wrt(const TBox& tbox, const ConjunctiveQuery& q1, const ConjunctiveQuery& q2) {
  return contained_wrt(tbox, q1, q2) && contained_wrt(tbox, q2, q1);
}

std::set<Tuple> certain_answers(const ObdmSpec& spec, const Instance& db, const ConjunctiveQuery& q) {
  check_ontology_query(spec, q);
  if (!db.is_ground()) throw Error("source database must be ground");
  auto named = db.constants();
  const auto qc = q.constants();
  named.insert(qc.begin(), qc.end());
  const auto mc = spec.constants();
  named.insert(mc.begin(), mc.end());

  const auto res = abox_of(db, spec.mapping, spec.tbox, nullptr, named);
  if (!res.abox || ucq_holds(build_qsat(spec.tbox).without_inequality, *res.abox)) return all_tup(q, db);

  std::set<Tuple> out;
  if (q.form == QueryForm::Top) {
    for (const auto& t : tuples_over(q.arity(), named))
      if (has_answer(q, t, *res.abox)) out.insert(t);
    return out;
  }
  for (const auto& t : certain_answers_kb(spec.tbox, *res.abox, q)) {
    // Frozen chase nulls are not answers.
    if (std::all_of(t.begin(), t.end(), [&](const Term& x) { return named.count(x) != 0; })) out.insert(t);
  }
  return out;
}

ConjunctiveQuery minimize(const ConjunctiveQuery& q) {
  if (q.form != QueryForm::Normal) return q;
  ConjunctiveQuery cur = q;
  for (std::size_t i = 0; i < cur.body.size();) {
    ConjunctiveQuery smaller = cur;
    smaller.body.erase(smaller.body.begin() + static_cast<std::ptrdiff_t>(i));
    bool safe = true;
    try {
      smaller.check_safe();
    } catch (const Error&) {
      safe = false;
    }
    if (safe && query_homomorphism(cur, smaller)) {
      cur = std::move(smaller);
    } else {
      ++i;
    }
  }
  return cur;
}

}  // namespace obdm
