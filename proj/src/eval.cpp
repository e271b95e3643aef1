#include "obdm/eval.hpp"

#include <algorithm>
#include <limits>

namespace obdm {

namespace {

using Relation = std::vector<const Atom*>;
using Index = std::map<std::string, Relation>;

Index build_index(const Instance& target) {
  Index idx;
  for (const auto& a : target.atoms()) idx[a.predicate].push_back(&a);
  return idx;
}

bool is_bound(const Term& t, const Assignment& asg) { return !t.is_var() || asg.count(t); }

class Matcher {
 public:
  Matcher(std::span<const Atom> pattern, const Instance& target, const std::set<Term>& top_domain,
          const HomomorphismVisitor& visit)
      : pattern_(pattern), index_(build_index(target)), top_domain_(top_domain), visit_(visit),
        used_(pattern.size(), false) {}

  // Returns false once the visitor asked to stop.
  bool run(Assignment& asg, std::size_t remaining) {
    if (remaining == 0) return visit_(asg);
    const std::size_t pick = choose(asg);
    const Atom& atom = pattern_[pick];
    if (atom.is_bottom()) return true;
    used_[pick] = true;
    bool keep_going = true;
    if (atom.is_top()) {
      keep_going = match_top(atom, asg, remaining);
    } else if (auto it = index_.find(atom.predicate); it != index_.end()) {
      for (const Atom* cand : it->second) {
        if (cand->args.size() != atom.args.size()) continue;
        std::vector<Term> added;
        if (unify(atom, *cand, asg, added)) keep_going = run(asg, remaining - 1);
        for (const auto& v : added) asg.erase(v);
        if (!keep_going) break;
      }
    }
    used_[pick] = false;
    return keep_going;
  }

 private:
  bool match_top(const Atom& atom, Assignment& asg, std::size_t remaining) {
    const Term& t = atom.args.at(0);
    if (is_bound(t, asg)) {
      const Term image = t.is_var() ? asg.at(t) : t;
      if (!top_domain_.count(image)) return true;
      return run(asg, remaining - 1);
    }
    for (const auto& cand : top_domain_) {
      asg.emplace(t, cand);
      const bool keep_going = run(asg, remaining - 1);
      asg.erase(t);
      if (!keep_going) return false;
    }
    return true;
  }

  static bool unify(const Atom& atom, const Atom& cand, Assignment& asg, std::vector<Term>& added) {
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
      const Term& p = atom.args[i];
      const Term& c = cand.args[i];
      if (!p.is_var()) {
        if (p != c) return false;
        continue;
      }
      auto it = asg.find(p);
      if (it == asg.end()) {
        asg.emplace(p, c);
        added.push_back(p);
      } else if (it->second != c) {
        return false;
      }
    }
    return true;
  }

  // Most bound positions first; ties go to the smaller relation. Unbound `top`
  // atoms are deferred to the end.
  std::size_t choose(const Assignment& asg) const {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    long best_score = std::numeric_limits<long>::min();
    for (std::size_t i = 0; i < pattern_.size(); ++i) {
      if (used_[i]) continue;
      const Atom& a = pattern_[i];
      if (a.is_bottom()) return i;
      long bound = 0;
      for (const auto& t : a.args) bound += is_bound(t, asg) ? 1 : 0;
      long size = 0;
      if (a.is_top()) {
        size = bound ? 0 : static_cast<long>(top_domain_.size()) + (1L << 20);
      } else if (auto it = index_.find(a.predicate); it != index_.end()) {
        size = static_cast<long>(it->second.size());
      }
      const long unbound = static_cast<long>(a.args.size()) - bound;
      const long score = -(unbound * (1L << 24)) - size;
      if (size == 0 && !a.is_top()) return i;  // no candidates: fail fast
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    return best;
  }

  std::span<const Atom> pattern_;
  Index index_;
  const std::set<Term>& top_domain_;
  const HomomorphismVisitor& visit_;
  std::vector<bool> used_;
};

void check_arities(const ConjunctiveQuery& q, const Instance& db) {
  const auto ar = arities_of(db);
  for (const auto& a : q.body) {
    if (a.is_top() || a.is_bottom()) {
      if (a.arity() != 1) throw Error("builtin '" + a.predicate + "' is unary");
      continue;
    }
    auto it = ar.find(a.predicate);
    if (it != ar.end() && it->second != a.arity())
      throw Error("arity mismatch for '" + a.predicate + "': query uses " + std::to_string(a.arity()) +
                  ", database has " + std::to_string(it->second));
  }
}

Tuple head_image(const Tuple& head, const Assignment& asg) {
  Tuple out;
  out.reserve(head.size());
  for (const auto& t : head) {
    auto it = asg.find(t);
    out.push_back(t.is_var() && it != asg.end() ? it->second : t);
  }
  return out;
}

void product(std::size_t arity, const std::vector<Term>& pool, Tuple& cur, std::set<Tuple>& out) {
  if (cur.size() == arity) {
    out.insert(cur);
    return;
  }
  for (const auto& t : pool) {
    cur.push_back(t);
    product(arity, pool, cur, out);
    cur.pop_back();
  }
}

std::set<Tuple> evaluate_disjunct(const Disjunct& d, const Instance& db) {
  const auto& q = d.query;
  check_arities(q, db);
  std::set<Tuple> out;
  const auto dom = top_domain_for(q, db);
  if (q.form == QueryForm::Bottom) return out;
  if (q.form == QueryForm::Top) {
    // Head variables range over the top domain; repeated variables stay equal.
    std::vector<Term> vars;
    for (const auto& t : q.head)
      if (t.is_var() && std::find(vars.begin(), vars.end(), t) == vars.end()) vars.push_back(t);
    std::vector<Term> pool(dom.begin(), dom.end());
    std::set<Tuple> choices;
    Tuple cur;
    product(vars.size(), pool, cur, choices);
    for (const auto& c : choices) {
      Assignment asg;
      for (std::size_t i = 0; i < vars.size(); ++i) asg.emplace(vars[i], c[i]);
      out.insert(head_image(q.head, asg));
    }
    return out;
  }
  for_each_homomorphism(q.body, db, {}, dom, [&](const Assignment& asg) {
    if (d.inequality) {
      const Term l = head_image({d.inequality->lhs}, asg).front();
      const Term r = head_image({d.inequality->rhs}, asg).front();
      if (l == r) return true;
    }
    out.insert(head_image(q.head, asg));
    return true;
  });
  return out;
}

}  // namespace

void for_each_homomorphism(std::span<const Atom> pattern, const Instance& target,
                           const Assignment& initial, const std::set<Term>& top_domain,
                           const HomomorphismVisitor& visit) {
  Matcher m(pattern, target, top_domain, visit);
  Assignment asg = initial;
  m.run(asg, pattern.size());
}

std::optional<Assignment> find_homomorphism(std::span<const Atom> pattern, const Instance& target,
                                            const Assignment& initial,
                                            const std::set<Term>& top_domain) {
  std::optional<Assignment> found;
  for_each_homomorphism(pattern, target, initial, top_domain, [&](const Assignment& a) {
    found = a;
    return false;
  });
  return found;
}

std::set<Term> top_domain_for(const ConjunctiveQuery& q, const Instance& db) {
  auto dom = db.domain();
  const auto consts = q.constants();
  dom.insert(consts.begin(), consts.end());
  return dom;
}

std::set<Tuple> evaluate_cq(const ConjunctiveQuery& q, const Instance& db) {
  return evaluate_disjunct({q, std::nullopt}, db);
}

bool has_answer(const ConjunctiveQuery& q, const Tuple& tuple, const Instance& db,
                const std::set<Term>& extra_domain) {
  if (tuple.size() != q.arity()) throw Error("answer tuple arity differs from query arity");
  if (q.form == QueryForm::Bottom) return false;
  Assignment asg;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    const Term& h = q.head[i];
    if (!h.is_var()) {
      if (h != tuple[i]) return false;
      continue;
    }
    auto [it, inserted] = asg.emplace(h, tuple[i]);
    if (!inserted && it->second != tuple[i]) return false;
  }
  if (q.form == QueryForm::Top) return true;
  check_arities(q, db);
  auto dom = top_domain_for(q, db);
  dom.insert(tuple.begin(), tuple.end());
  dom.insert(extra_domain.begin(), extra_domain.end());
  return find_homomorphism(q.body, db, asg, dom).has_value();
}

std::set<Tuple> evaluate_ucq(const UnionQuery& q, const Instance& db) {
  std::set<Tuple> out;
  for (const auto& d : q.disjuncts()) {
    auto part = evaluate_disjunct(d, db);
    out.insert(part.begin(), part.end());
  }
  return out;
}

bool ucq_holds(const UnionQuery& q, const Instance& db) { return !evaluate_ucq(q, db).empty(); }

std::set<Tuple> tuples_over(std::size_t arity, const std::set<Term>& pool) {
  std::vector<Term> items(pool.begin(), pool.end());
  std::set<Tuple> out;
  Tuple cur;
  product(arity, items, cur, out);
  return out;
}

std::set<Tuple> all_tup(std::size_t arity, const Instance& db) { return tuples_over(arity, db.constants()); }

std::set<Tuple> all_tup(const ConjunctiveQuery& q, const Instance& db) { return all_tup(q.arity(), db); }

QueryInstance instance_of_query(const ConjunctiveQuery& q, const std::set<Term>& reserved) {
  if (q.form != QueryForm::Normal) throw Error("top/bottom queries have no instance representation");
  NullPool pool(TermKind::NullD, "d");
  pool.reserve(q.constants());
  pool.reserve(reserved);
  QueryInstance out;
  out.instance = Instance(SchemaTag::Source);
  auto image = [&](const Term& t) {
    if (!t.is_var()) return t;
    if (!out.var_to_null.contains(t)) out.var_to_null.set(t, pool.fresh());
    return out.var_to_null.apply(t);
  };
  for (const auto& t : q.head) out.head.push_back(image(t));
  for (const auto& a : q.body) {
    Atom mapped{a.predicate, {}};
    for (const auto& t : a.args) mapped.args.push_back(image(t));
    if (!a.is_top()) out.instance.insert(std::move(mapped));
  }
  return out;
}

ConjunctiveQuery query_of_instance(const Instance& inst, const Tuple& free,
                                   const std::map<Term, std::string>& names) {
  auto var_for = [&](const Term& t) {
    if (!t.is_null()) return t;
    auto it = names.find(t);
    return Term::var(it == names.end() ? t.label : it->second);
  };
  ConjunctiveQuery q;
  for (const auto& t : free) q.head.push_back(var_for(t));
  for (const auto& a : inst.atoms()) {
    Atom mapped{a.predicate, {}};
    for (const auto& t : a.args) mapped.args.push_back(var_for(t));
    q.body.push_back(std::move(mapped));
  }
  return q;
}

std::optional<Assignment> query_homomorphism(const ConjunctiveQuery& from, const ConjunctiveQuery& to) {
  if (from.arity() != to.arity()) return std::nullopt;
  Assignment asg;
  for (std::size_t i = 0; i < from.head.size(); ++i) {
    const Term& h = from.head[i];
    if (!h.is_var()) {
      if (h != to.head[i]) return std::nullopt;
      continue;
    }
    auto [it, inserted] = asg.emplace(h, to.head[i]);
    if (!inserted && it->second != to.head[i]) return std::nullopt;
  }
  Instance target(SchemaTag::Target);
  std::set<Term> dom;
  for (const auto& a : to.body) {
    if (a.is_top()) {
      dom.insert(a.args.begin(), a.args.end());
      continue;
    }
    target.insert(a);
  }
  auto tdom = target.domain();
  dom.insert(tdom.begin(), tdom.end());
  dom.insert(to.head.begin(), to.head.end());
  return find_homomorphism(from.body, target, asg, dom);
}

bool homomorphically_equivalent(const ConjunctiveQuery& a, const ConjunctiveQuery& b) {
  return query_homomorphism(a, b).has_value() && query_homomorphism(b, a).has_value();
}

bool isomorphic_up_to_nulls(const Instance& a, const Instance& b) {
  if (a.size() != b.size()) return false;
  if (a.nulls().size() != b.nulls().size()) return false;
  std::vector<Atom> pattern;
  std::map<Term, TermKind> kinds;
  for (const auto& at : a.atoms()) {
    Atom p{at.predicate, {}};
    for (const auto& t : at.args) {
      if (!t.is_null()) {
        p.args.push_back(t);
        continue;
      }
      Term v = Term::var(to_string(t));
      kinds[v] = t.kind;
      p.args.push_back(std::move(v));
    }
    pattern.push_back(std::move(p));
  }
  bool found = false;
  for_each_homomorphism(pattern, b, {}, {}, [&](const Assignment& asg) {
    std::set<Term> images;
    for (const auto& [v, img] : asg) {
      if (img.kind != kinds.at(v)) return true;
      images.insert(img);
    }
    if (images.size() != asg.size()) return true;
    // Injective null renaming with equal sizes maps a onto b exactly.
    found = true;
    return false;
  });
  return found;
}

std::map<std::string, std::size_t> arities_of(const Instance& db) {
  std::map<std::string, std::size_t> out;
  for (const auto& a : db.atoms()) {
    auto [it, inserted] = out.emplace(a.predicate, a.arity());
    if (!inserted && it->second != a.arity())
      throw Error("predicate '" + a.predicate + "' used with inconsistent arity");
  }
  return out;
}

}  // namespace obdm
