#include "obdm/dllite.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "obdm/eval.hpp"

namespace obdm {

Atom Role::atom(const Term& from, const Term& to) const {
  return inverse ? Atom{name, {to, from}} : Atom{name, {from, to}};
}

std::string to_string(const Role& r) { return r.inverse ? "inv(" + r.name + ")" : r.name; }

std::string to_string(const BasicConcept& b) {
  return b.is_atomic() ? b.name : "exists " + to_string(b.role());
}

std::string to_string(const TBoxAssertion& a) {
  struct Printer {
    std::string operator()(const ConceptInclusion& x) const {
      return to_string(x.lhs) + " isa " + to_string(x.rhs) + ".";
    }
    std::string operator()(const ConceptDisjointness& x) const {
      return to_string(x.lhs) + " disjoint " + to_string(x.rhs) + ".";
    }
    std::string operator()(const RoleInclusion& x) const {
      return to_string(x.lhs) + " subrole " + to_string(x.rhs) + ".";
    }
    std::string operator()(const RoleDisjointness& x) const {
      return to_string(x.lhs) + " disjointrole " + to_string(x.rhs) + ".";
    }
    std::string operator()(const Functionality& x) const { return "funct " + to_string(x.role) + "."; }
    std::string operator()(const Identification& x) const {
      std::string out = "id " + to_string(x.basic) + " ";
      for (std::size_t i = 0; i < x.path.size(); ++i) {
        if (i) out += ", ";
        out += to_string(x.path[i]);
      }
      return out + ".";
    }
  };
  return std::visit(Printer{}, a);
}

TBox::TBox(std::vector<TBoxAssertion> assertions) : assertions_(std::move(assertions)) { validate(); }

namespace {

void collect(const BasicConcept& b, std::set<std::string>& concepts, std::set<std::string>& roles) {
  (b.is_atomic() ? concepts : roles).insert(b.name);
}

void collect_names(const std::vector<TBoxAssertion>& as, std::set<std::string>& concepts,
                   std::set<std::string>& roles) {
  for (const auto& a : as) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, ConceptInclusion> || std::is_same_v<T, ConceptDisjointness>) {
            collect(x.lhs, concepts, roles);
            collect(x.rhs, concepts, roles);
          } else if constexpr (std::is_same_v<T, RoleInclusion> || std::is_same_v<T, RoleDisjointness>) {
            roles.insert(x.lhs.name);
            roles.insert(x.rhs.name);
          } else if constexpr (std::is_same_v<T, Functionality>) {
            roles.insert(x.role.name);
          } else {
            collect(x.basic, concepts, roles);
            for (const auto& r : x.path) roles.insert(r.name);
          }
        },
        a);
  }
}

}  // namespace

std::set<std::string> TBox::concept_names() const {
  std::set<std::string> c, r;
  collect_names(assertions_, c, r);
  return c;
}

std::set<std::string> TBox::role_names() const {
  std::set<std::string> c, r;
  collect_names(assertions_, c, r);
  return r;
}

void TBox::validate() const {
  std::set<std::string> concepts, roles;
  collect_names(assertions_, concepts, roles);
  for (const auto& c : concepts)
    if (roles.count(c)) throw Error("name '" + c + "' is used both as a concept and as a role");
  for (const auto& n : concepts)
    if (n == kTop || n == kBottom) throw Error("'" + n + "' is a reserved predicate");
  for (const auto& n : roles)
    if (n == kTop || n == kBottom) throw Error("'" + n + "' is a reserved predicate");

  std::set<std::string> specialized;
  for (const auto& a : assertions_)
    if (const auto* ri = std::get_if<RoleInclusion>(&a)) specialized.insert(ri->rhs.name);
  for (const auto& a : assertions_) {
    if (const auto* f = std::get_if<Functionality>(&a)) {
      if (specialized.count(f->role.name))
        throw Error("functional role '" + f->role.name + "' may not appear on the right of a role inclusion");
    } else if (const auto* id = std::get_if<Identification>(&a)) {
      if (id->path.empty()) throw Error("identification assertion needs at least one role");
      for (const auto& r : id->path)
        if (specialized.count(r.name))
          throw Error("identifying role '" + r.name + "' may not appear on the right of a role inclusion");
    }
  }
}

Atom concept_atom(const BasicConcept& b, const Term& x, const Term& witness) {
  if (b.is_atomic()) return {b.name, {x}};
  return b.role().atom(x, witness);
}

namespace {

// Concept-level positive inclusions, including those induced by role inclusions.
std::vector<std::pair<BasicConcept, BasicConcept>> concept_pis(const TBox& tbox) {
  std::vector<std::pair<BasicConcept, BasicConcept>> out;
  for (const auto& a : tbox.assertions()) {
    if (const auto* ci = std::get_if<ConceptInclusion>(&a)) {
      out.emplace_back(ci->lhs, ci->rhs);
    } else if (const auto* ri = std::get_if<RoleInclusion>(&a)) {
      out.emplace_back(BasicConcept::exists(ri->lhs), BasicConcept::exists(ri->rhs));
      out.emplace_back(BasicConcept::exists(ri->lhs.inv()), BasicConcept::exists(ri->rhs.inv()));
    }
  }
  return out;
}

std::vector<std::pair<Role, Role>> role_pis(const TBox& tbox) {
  std::vector<std::pair<Role, Role>> out;
  for (const auto& a : tbox.assertions()) {
    if (const auto* ri = std::get_if<RoleInclusion>(&a)) {
      out.emplace_back(ri->lhs, ri->rhs);
      out.emplace_back(ri->lhs.inv(), ri->rhs.inv());
    }
  }
  return out;
}

std::pair<BasicConcept, BasicConcept> normalize(BasicConcept a, BasicConcept b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

// {R1, R2} and {inv(R1), inv(R2)} denote the same disjointness.
std::pair<Role, Role> normalize(Role a, Role b) {
  if (b < a) std::swap(a, b);
  Role ia = a.inv(), ib = b.inv();
  if (ib < ia) std::swap(ia, ib);
  if (std::tie(ia, ib) < std::tie(a, b)) return {ia, ib};
  return {a, b};
}

template <typename T>
class OrderedSet {
 public:
  bool add(const T& v) {
    if (!seen_.insert(v).second) return false;
    items_.push_back(v);
    return true;
  }
  bool contains(const T& v) const { return seen_.count(v) != 0; }
  const std::vector<T>& items() const { return items_; }

 private:
  std::set<T> seen_;
  std::vector<T> items_;
};

}  // namespace

NegativeClosure ni_closure(const TBox& tbox) {
  OrderedSet<std::pair<BasicConcept, BasicConcept>> cs;
  OrderedSet<std::pair<Role, Role>> rs;
  for (const auto& a : tbox.assertions()) {
    if (const auto* d = std::get_if<ConceptDisjointness>(&a)) cs.add(normalize(d->lhs, d->rhs));
    if (const auto* d = std::get_if<RoleDisjointness>(&a)) rs.add(normalize(d->lhs, d->rhs));
  }
  const auto cpis = concept_pis(tbox);
  const auto rpis = role_pis(tbox);

  bool changed = true;
  while (changed) {
    changed = false;
    // Snapshot by index: additions during the pass are picked up next round.
    const auto cur_c = cs.items();
    for (const auto& [sub, sup] : cpis) {
      for (const auto& [x, y] : cur_c) {
        if (x == sup) changed |= cs.add(normalize(sub, y));
        if (y == sup) changed |= cs.add(normalize(sub, x));
      }
    }
    const auto cur_r = rs.items();
    for (const auto& [sub, sup] : rpis) {
      for (const auto& [x, y] : cur_r) {
        if (x == sup) changed |= rs.add(normalize(sub, y));
        if (y == sup) changed |= rs.add(normalize(sub, x));
      }
    }
    // An empty role: exists R ⊑ ¬exists R, exists R⁻ ⊑ ¬exists R⁻ and R ⊑ ¬R coincide.
    std::set<std::string> empty_roles;
    for (const auto& [x, y] : cs.items())
      if (x == y && !x.is_atomic()) empty_roles.insert(x.name);
    for (const auto& [x, y] : rs.items())
      if (x.name == y.name && x.inverse == y.inverse) empty_roles.insert(x.name);
    for (const auto& name : empty_roles) {
      const Role r{name, false};
      changed |= cs.add(normalize(BasicConcept::exists(r), BasicConcept::exists(r)));
      changed |= cs.add(normalize(BasicConcept::exists(r.inv()), BasicConcept::exists(r.inv())));
      changed |= rs.add(normalize(r, r));
    }
  }
  return {cs.items(), rs.items()};
}

std::vector<BasicConcept> subsumees(const TBox& tbox, const BasicConcept& b) {
  const auto cpis = concept_pis(tbox);
  OrderedSet<BasicConcept> out;
  out.add(b);
  for (std::size_t i = 0; i < out.items().size(); ++i) {
    const BasicConcept cur = out.items()[i];
    for (const auto& [sub, sup] : cpis)
      if (sup == cur) out.add(sub);
  }
  return out.items();
}

SatisfiabilityQuery build_qsat(const TBox& tbox) {
  SatisfiabilityQuery out;
  const Term x = Term::var("x"), xp = Term::var("x1"), y = Term::var("y");
  const Term y1 = Term::var("y1"), y2 = Term::var("y2");

  const auto closure = ni_closure(tbox);
  for (const auto& [b1, b2] : closure.concepts) {
    ConjunctiveQuery q;
    q.body.push_back(concept_atom(b1, x, y1));
    q.body.push_back(concept_atom(b2, x, y2));
    out.without_inequality.add(std::move(q));
  }
  for (const auto& [r1, r2] : closure.roles) {
    ConjunctiveQuery q;
    q.body.push_back(r1.atom(x, y));
    q.body.push_back(r2.atom(x, y));
    out.without_inequality.add(std::move(q));
  }

  for (const auto& a : tbox.assertions()) {
    if (const auto* f = std::get_if<Functionality>(&a)) {
      ConjunctiveQuery q;
      q.body.push_back(f->role.atom(x, y1));
      q.body.push_back(f->role.atom(x, y2));
      out.with_inequality.add(std::move(q), Inequality{y1, y2});
    } else if (const auto* id = std::get_if<Identification>(&a)) {
      // B(x) may be derived, so each side ranges over the subsumees of B.
      const auto subs = subsumees(tbox, id->basic);
      for (std::size_t i = 0; i < subs.size(); ++i) {
        for (std::size_t j = i; j < subs.size(); ++j) {
          ConjunctiveQuery q;
          q.body.push_back(concept_atom(subs[i], x, Term::var("w")));
          q.body.push_back(concept_atom(subs[j], xp, Term::var("w1")));
          for (std::size_t k = 0; k < id->path.size(); ++k) {
            const Term z = Term::var("z" + std::to_string(k + 1));
            q.body.push_back(id->path[k].atom(x, z));
            q.body.push_back(id->path[k].atom(xp, z));
          }
          out.with_inequality.add(std::move(q), Inequality{x, xp});
        }
      }
    }
  }
  return out;
}

bool kb_satisfiable(const TBox& tbox, const Instance& abox) {
  const auto qsat = build_qsat(tbox);
  return !ucq_holds(qsat.without_inequality, abox) && !ucq_holds(qsat.with_inequality, abox);
}

namespace {

bool is_builtin(const Atom& a) { return a.is_top() || a.is_bottom(); }

// A variable is unbound when it occurs once in the body and not in the head.
std::map<Term, int> occurrences(const ConjunctiveQuery& q) {
  std::map<Term, int> occ;
  for (const auto& t : q.head)
    if (t.is_var()) occ[t] += 2;
  for (const auto& a : q.body)
    for (const auto& t : a.args)
      if (t.is_var()) occ[t] += 1;
  return occ;
}

// Renames body-only variables by first occurrence and sorts the body until stable,
// so that queries equal up to renaming usually share one representative.
ConjunctiveQuery canonical(ConjunctiveQuery q) {
  std::set<std::string> head_names;
  for (const auto& t : q.head)
    if (t.is_var()) head_names.insert(t.label);
  std::string prefix = "_e";
  while (std::any_of(head_names.begin(), head_names.end(),
                     [&](const std::string& n) { return n.rfind(prefix, 0) == 0; }))
    prefix = "_" + prefix;

  for (int round = 0; round < 4; ++round) {
    Substitution ren;
    std::size_t next = 0;
    for (const auto& a : q.body) {
      for (const auto& t : a.args) {
        if (t.is_var() && !head_names.count(t.label) && !ren.contains(t))
          ren.set(t, Term::var(prefix + std::to_string(next++)));
      }
    }
    std::vector<Atom> body;
    for (const auto& a : q.body) body.push_back(ren.apply(a));
    std::sort(body.begin(), body.end());
    body.erase(std::unique(body.begin(), body.end()), body.end());
    if (body == q.body) break;
    q.body = std::move(body);
  }
  return q;
}

std::optional<Substitution> mgu(const Atom& a, const Atom& b) {
  if (a.predicate != b.predicate || a.arity() != b.arity()) return std::nullopt;
  Substitution s;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    const Term l = s.apply(a.args[i]);
    const Term r = s.apply(b.args[i]);
    if (l == r) continue;
    Term from, to;
    if (l.is_var()) {
      from = l;
      to = r;
    } else if (r.is_var()) {
      from = r;
      to = l;
    } else {
      return std::nullopt;
    }
    Substitution step;
    step.set(from, to);
    std::map<Term, Term> composed;
    for (const auto& [k, v] : s.map()) composed[k] = step.apply(v);
    composed[from] = to;
    s = Substitution(std::move(composed));
  }
  return s;
}

ConjunctiveQuery apply(const Substitution& s, const ConjunctiveQuery& q) {
  ConjunctiveQuery out;
  out.form = q.form;
  out.head = s.apply(q.head);
  for (const auto& a : q.body) out.body.push_back(s.apply(a));
  return out;
}

class Reformulator {
 public:
  explicit Reformulator(const TBox& tbox) : cpis_(concept_pis(tbox)), rpis_(role_pis(tbox)) {
    for (const auto& [sub, sup] : cpis_)
      if (!sup.is_atomic()) existential_roles_.insert(sup.name);
  }

  std::vector<ConjunctiveQuery> successors(const ConjunctiveQuery& q) {
    std::vector<ConjunctiveQuery> out;
    const auto occ = occurrences(q);
    auto unbound = [&](const Term& t) { return t.is_var() && occ.at(t) == 1; };

    for (std::size_t i = 0; i < q.body.size(); ++i) {
      const Atom& g = q.body[i];
      if (is_builtin(g)) continue;
      auto replaced = [&](Atom with) {
        ConjunctiveQuery r = q;
        r.body[i] = std::move(with);
        out.push_back(std::move(r));
      };
      if (g.arity() == 1) {
        for (const auto& [sub, sup] : cpis_)
          if (sup.is_atomic() && sup.name == g.predicate) replaced(concept_atom(sub, g.args[0], fresh()));
      } else if (g.arity() == 2) {
        for (const auto& [sub, sup] : cpis_) {
          if (sup.is_atomic() || sup.name != g.predicate) continue;
          if (!sup.inverse && unbound(g.args[1])) replaced(concept_atom(sub, g.args[0], fresh()));
          if (sup.inverse && unbound(g.args[0])) replaced(concept_atom(sub, g.args[1], fresh()));
        }
        for (const auto& [sub, sup] : rpis_) {
          if (sup.name != g.predicate) continue;
          // g = sup(a, b) read through the inverse flag.
          const Term& a = sup.inverse ? g.args[1] : g.args[0];
          const Term& b = sup.inverse ? g.args[0] : g.args[1];
          replaced(sub.atom(a, b));
        }
      }
    }

    for (std::size_t i = 0; i < q.body.size(); ++i) {
      for (std::size_t j = i + 1; j < q.body.size(); ++j) {
        const Atom& a = q.body[i];
        const Atom& b = q.body[j];
        // Reduction only matters when it can expose an unbound position for an
        // existential inclusion.
        if (is_builtin(a) || a.arity() != 2 || !existential_roles_.count(a.predicate)) continue;
        if (auto s = mgu(a, b)) out.push_back(apply(*s, q));
      }
    }
    return out;
  }

 private:
  Term fresh() { return Term::var("_n" + std::to_string(counter_++)); }

  std::vector<std::pair<BasicConcept, BasicConcept>> cpis_;
  std::vector<std::pair<Role, Role>> rpis_;
  std::set<std::string> existential_roles_;
  std::size_t counter_ = 0;
};

}  // namespace

UnionQuery perfect_reformulation(const TBox& tbox, const UnionQuery& q, const ReformulationOptions& opts) {
  std::vector<ConjunctiveQuery> result;
  std::set<std::pair<std::vector<Term>, std::vector<Atom>>> seen;
  auto key = [](const ConjunctiveQuery& c) { return std::make_pair(c.head, c.body); };
  std::deque<ConjunctiveQuery> work;
  for (const auto& d : q.disjuncts()) {
    if (d.inequality) throw Error("perfect reformulation expects queries without inequalities");
    if (d.query.form != QueryForm::Normal) {
      result.push_back(d.query);
      continue;
    }
    auto c = canonical(d.query);
    if (!seen.insert(key(c)).second) continue;
    result.push_back(d.query);
    work.push_back(std::move(c));
  }
  Reformulator ref(tbox);
  while (!work.empty()) {
    ConjunctiveQuery cur = std::move(work.front());
    work.pop_front();
    for (auto& next : ref.successors(cur)) {
      auto c = canonical(std::move(next));
      if (!seen.insert(key(c)).second) continue;
      result.push_back(c);
      work.push_back(std::move(c));
    }
  }
  if (opts.prune_subsumed) {
    std::vector<bool> drop(result.size(), false);
    for (std::size_t i = 0; i < result.size(); ++i) {
      for (std::size_t j = 0; j < result.size() && !drop[i]; ++j) {
        if (i == j || drop[j] || result[i].form != QueryForm::Normal) continue;
        // result[i] is subsumed when result[j] maps into it; keep the earlier of two equivalents.
        if (query_homomorphism(result[j], result[i]) &&
            (!query_homomorphism(result[i], result[j]) || j < i))
          drop[i] = true;
      }
    }
    std::vector<ConjunctiveQuery> kept;
    for (std::size_t i = 0; i < result.size(); ++i)
      if (!drop[i]) kept.push_back(std::move(result[i]));
    result = std::move(kept);
  }
  UnionQuery out;
  for (auto& r : result) out.add(std::move(r));
  return out;
}

UnionQuery perfect_reformulation(const TBox& tbox, const ConjunctiveQuery& q, const ReformulationOptions& opts) {
  UnionQuery u;
  u.add(q);
  return perfect_reformulation(tbox, u, opts);
}

std::set<Tuple> certain_answers_kb(const TBox& tbox, const Instance& abox, const ConjunctiveQuery& q) {
  if (!kb_satisfiable(tbox, abox)) throw Error("certain answers requested over an unsatisfiable knowledge base");
  if (q.form == QueryForm::Bottom) return {};
  if (q.form == QueryForm::Top) return evaluate_cq(q, abox);
  return evaluate_ucq(perfect_reformulation(tbox, q), abox);
}

bool kb_entails(const TBox& tbox, const Instance& abox, const ConjunctiveQuery& q, const Tuple& tuple) {
  if (!kb_satisfiable(tbox, abox)) throw Error("certain answers requested over an unsatisfiable knowledge base");
  if (q.form == QueryForm::Bottom) return false;
  if (q.form == QueryForm::Top) return has_answer(q, tuple, abox);
  const auto pr = perfect_reformulation(tbox, q);
  return std::any_of(pr.disjuncts().begin(), pr.disjuncts().end(),
                     [&](const Disjunct& d) { return has_answer(d.query, tuple, abox); });
}

}  // namespace obdm
