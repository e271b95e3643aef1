#include "obdm/oracle.hpp"

#include <algorithm>
#include <sstream>

#include "obdm/eval.hpp"

namespace obdm {

void Budget::validate() const {
  if (const_pool.empty()) throw Error("budget: const_pool must not be empty");
  if (max_model_atoms == 0) throw Error("budget: max_model_atoms must be at least 1");
  if (max_source_atoms == 0) throw Error("budget: max_source_atoms must be at least 1");
}

std::string to_string(const Budget& b) {
  std::ostringstream os;
  os << "pool=";
  for (std::size_t i = 0; i < b.const_pool.size(); ++i) os << (i ? "|" : "") << b.const_pool[i];
  os << ",atoms=" << b.max_model_atoms << ",extra=" << b.extra_domain << ",depth=" << b.canonical_depth
     << ",source=" << b.max_source_atoms;
  return os.str();
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Complete: return "complete";
    case Variant::Sound: return "sound";
    case Variant::Exact: return "exact";
  }
  return "?";
}

std::string to_string(Semantics s) { return s == Semantics::Model ? "model" : "cert"; }

namespace {

using Pair = std::pair<Term, Term>;

std::set<Pair> role_pairs(const Instance& b, const Role& r) {
  std::set<Pair> out;
  for (const auto& a : b.atoms())
    if (a.predicate == r.name && a.arity() == 2)
      out.emplace(r.inverse ? a.args[1] : a.args[0], r.inverse ? a.args[0] : a.args[1]);
  return out;
}

std::set<Term> extension(const Instance& b, const BasicConcept& c) {
  std::set<Term> out;
  if (c.is_atomic()) {
    for (const auto& a : b.atoms())
      if (a.predicate == c.name && a.arity() == 1) out.insert(a.args[0]);
    return out;
  }
  for (const auto& [x, _] : role_pairs(b, c.role())) out.insert(x);
  return out;
}

template <class T>
bool intersects(const std::set<T>& a, const std::set<T>& b) {
  for (const auto& x : a)
    if (b.count(x)) return true;
  return false;
}

bool violates(const Instance& b, const TBoxAssertion& ax) {
  if (const auto* d = std::get_if<ConceptDisjointness>(&ax))
    return intersects(extension(b, d->lhs), extension(b, d->rhs));
  if (const auto* d = std::get_if<RoleDisjointness>(&ax))
    return intersects(role_pairs(b, d->lhs), role_pairs(b, d->rhs));
  if (const auto* f = std::get_if<Functionality>(&ax)) {
    std::map<Term, Term> seen;
    for (const auto& [x, y] : role_pairs(b, f->role)) {
      auto [it, inserted] = seen.emplace(x, y);
      if (!inserted && it->second != y) return true;
    }
    return false;
  }
  if (const auto* id = std::get_if<Identification>(&ax)) {
    const auto ext = extension(b, id->basic);
    std::vector<std::map<Term, std::set<Term>>> succ;
    for (const auto& r : id->path) {
      std::map<Term, std::set<Term>> m;
      for (const auto& [x, y] : role_pairs(b, r)) m[x].insert(y);
      succ.push_back(std::move(m));
    }
    for (auto i = ext.begin(); i != ext.end(); ++i)
      for (auto j = std::next(i); j != ext.end(); ++j) {
        bool agree = true;
        for (auto& m : succ)
          if (!intersects(m[*i], m[*j])) {
            agree = false;
            break;
          }
        if (agree) return true;
      }
    return false;
  }
  if (const auto* ci = std::get_if<ConceptInclusion>(&ax)) {
    const auto rhs = extension(b, ci->rhs);
    for (const auto& x : extension(b, ci->lhs))
      if (!rhs.count(x)) return true;
    return false;
  }
  if (const auto* ri = std::get_if<RoleInclusion>(&ax)) {
    const auto rhs = role_pairs(b, ri->rhs);
    for (const auto& p : role_pairs(b, ri->lhs))
      if (!rhs.count(p)) return true;
    return false;
  }
  return false;
}

bool is_positive(const TBoxAssertion& ax) {
  return std::holds_alternative<ConceptInclusion>(ax) || std::holds_alternative<RoleInclusion>(ax);
}

struct Trigger {
  const StTgd* tgd;
  Assignment frontier;
};

std::vector<Trigger> triggers_of(const std::vector<StTgd>& mapping, const Instance& source) {
  std::vector<Trigger> out;
  for (const auto& tgd : mapping)
    for_each_homomorphism(tgd.body, source, {}, {}, [&](const Assignment& asg) {
      out.push_back({&tgd, asg});
      return true;
    });
  return out;
}

std::vector<Atom> instantiate(const std::vector<Atom>& atoms, const Assignment& asg) {
  std::vector<Atom> out;
  for (const auto& a : atoms) {
    Atom f{a.predicate, {}};
    for (const auto& t : a.args) {
      auto it = asg.find(t);
      f.args.push_back(it == asg.end() ? t : it->second);
    }
    out.push_back(std::move(f));
  }
  return out;
}

// Depth-first repair search. Every branch adds at least one atom, so the atom bound
// keeps it finite. Anonymous elements are introduced in order (e1 before e2), which
// removes most isomorphic duplicates.
class ModelFinder {
 public:
  ModelFinder(const TBox& tbox, std::vector<Trigger> triggers, std::vector<Term> named, std::vector<Term> extras,
              std::size_t max_atoms, ModelScope scope, std::vector<std::pair<std::string, std::size_t>> vocabulary)
      : tbox_(tbox),
        triggers_(std::move(triggers)),
        named_(std::move(named)),
        extras_(std::move(extras)),
        max_atoms_(max_atoms),
        scope_(scope) {
    if (scope_ == ModelScope::All) build_universe(vocabulary);
  }

  ModelSearchStats run(Instance start, const ModelVisitor& visit) {
    visit_ = &visit;
    stopped_ = false;
    if (start.size() > max_atoms_) {
      stats_.truncated = true;
      return stats_;
    }
    dfs(start, 0);
    return stats_;
  }

 private:
  enum class Status { Violated, Repair, Model };

  std::size_t extras_used(const Instance& b) const {
    const auto dom = b.domain();
    std::size_t n = 0;
    while (n < extras_.size() && dom.count(extras_[n])) ++n;
    return n;
  }

  // Witness candidates, fresh first: the next unused element, then used elements,
  // then named ones.
  std::vector<Term> candidates(std::size_t used) {
    std::vector<Term> out;
    if (used < extras_.size()) {
      out.push_back(extras_[used]);
    } else {
      stats_.truncated = true;
    }
    for (std::size_t i = used; i-- > 0;) out.push_back(extras_[i]);
    out.insert(out.end(), named_.begin(), named_.end());
    return out;
  }

  void tgd_options(const Trigger& tr, const Instance& b, std::vector<std::vector<Atom>>& out) {
    const auto existentials = tr.tgd->existential_variables();
    const std::vector<Term> ex(existentials.begin(), existentials.end());
    Assignment asg = tr.frontier;
    const std::size_t used = extras_used(b);
    std::function<void(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t u) {
      if (i == ex.size()) {
        std::vector<Atom> add;
        for (auto& a : instantiate(tr.tgd->head, asg))
          if (!b.contains(a) && std::find(add.begin(), add.end(), a) == add.end()) add.push_back(std::move(a));
        out.push_back(std::move(add));
        return;
      }
      for (const auto& c : candidates(u)) {
        asg[ex[i]] = c;
        const bool fresh = u < extras_.size() && c == extras_[u];
        go(i + 1, fresh ? u + 1 : u);
      }
      asg.erase(ex[i]);
    };
    go(0, used);
  }

  Status inspect(const Instance& b, std::vector<std::vector<Atom>>& options) {
    for (const auto& ax : tbox_.assertions())
      if (!is_positive(ax) && violates(b, ax)) return Status::Violated;

    for (const auto& tr : triggers_) {
      const auto head = instantiate(tr.tgd->head, tr.frontier);
      if (find_homomorphism(head, b, {})) continue;
      tgd_options(tr, b, options);
      return Status::Repair;
    }

    for (const auto& ax : tbox_.assertions()) {
      if (const auto* ci = std::get_if<ConceptInclusion>(&ax)) {
        const auto rhs = extension(b, ci->rhs);
        for (const auto& x : extension(b, ci->lhs)) {
          if (rhs.count(x)) continue;
          if (ci->rhs.is_atomic()) {
            options.push_back({Atom{ci->rhs.name, {x}}});
          } else {
            for (const auto& w : candidates(extras_used(b))) options.push_back({ci->rhs.role().atom(x, w)});
          }
          return Status::Repair;
        }
      } else if (const auto* ri = std::get_if<RoleInclusion>(&ax)) {
        const auto rhs = role_pairs(b, ri->rhs);
        for (const auto& [x, y] : role_pairs(b, ri->lhs)) {
          if (rhs.count({x, y})) continue;
          options.push_back({ri->rhs.atom(x, y)});
          return Status::Repair;
        }
      }
    }
    return Status::Model;
  }

  void emit(const Instance& b) {
    if (!seen_.insert(b).second) return;
    ++stats_.models;
    if (!(*visit_)(b)) stopped_ = true;
  }

  void dfs(Instance& b, std::size_t next_free) {
    if (stopped_) return;
    std::vector<std::vector<Atom>> options;
    switch (inspect(b, options)) {
      case Status::Violated:
        return;
      case Status::Repair:
        for (const auto& add : options) {
          if (stopped_) return;
          if (b.size() + add.size() > max_atoms_) {
            stats_.truncated = true;
            continue;
          }
          Instance next = b;
          for (const auto& a : add) next.insert(a);
          dfs(next, next_free);
        }
        return;
      case Status::Model:
        emit(b);
        if (scope_ == ModelScope::Generating) return;
        for (std::size_t i = next_free; i < universe_.size() && !stopped_; ++i) {
          const Atom& a = universe_[i];
          if (b.contains(a)) continue;
          const std::size_t used = extras_used(b);
          bool ok = true;
          for (const auto& t : a.args) {
            auto it = std::find(extras_.begin(), extras_.end(), t);
            if (it != extras_.end() && static_cast<std::size_t>(it - extras_.begin()) > used) ok = false;
          }
          if (!ok) continue;
          if (b.size() + 1 > max_atoms_) {
            stats_.truncated = true;
            return;
          }
          Instance next = b;
          next.insert(a);
          dfs(next, i + 1);
        }
        return;
    }
  }

  void build_universe(const std::vector<std::pair<std::string, std::size_t>>& vocabulary) {
    std::vector<Term> dom = named_;
    dom.insert(dom.end(), extras_.begin(), extras_.end());
    for (const auto& [pred, arity] : vocabulary) {
      for (const auto& t : tuples_over(arity, std::set<Term>(dom.begin(), dom.end())))
        universe_.push_back({pred, t});
    }
    std::sort(universe_.begin(), universe_.end());
  }

  const TBox& tbox_;
  std::vector<Trigger> triggers_;
  std::vector<Term> named_;
  std::vector<Term> extras_;
  std::size_t max_atoms_;
  ModelScope scope_;
  std::vector<Atom> universe_;
  std::set<Instance> seen_;
  const ModelVisitor* visit_ = nullptr;
  bool stopped_ = false;
  ModelSearchStats stats_;
};

std::vector<Term> fresh_elements(std::size_t n, const std::set<Term>& avoid) {
  std::vector<Term> out;
  for (std::size_t i = 1; out.size() < n; ++i) {
    Term t = Term::constant("e" + std::to_string(i));
    if (!avoid.count(t)) out.push_back(std::move(t));
  }
  return out;
}

std::set<Term> named_of(const ObdmSpec& spec, const Instance& db, const std::set<Term>& named) {
  auto out = db.constants();
  const auto mc = spec.constants();
  out.insert(mc.begin(), mc.end());
  out.insert(named.begin(), named.end());
  return out;
}

// Answers of q in a finite model whose domain is `dom`.
std::set<Tuple> answers_in(const ConjunctiveQuery& q, const Instance& b, const std::set<Term>& dom) {
  std::set<Tuple> out;
  if (q.form == QueryForm::Bottom) return out;
  for (const auto& t : tuples_over(q.arity(), dom))
    if (has_answer(q, t, b, dom)) out.insert(t);
  return out;
}

// Valuations of the nulls of d into named ∪ pool, pool elements used in order.
void for_each_valuation(const std::vector<Term>& nulls, const std::vector<Term>& named,
                        const std::vector<Term>& pool, const std::function<bool(const Valuation&)>& visit) {
  std::map<Term, Term> m;
  bool stop = false;
  std::function<void(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t used) {
    if (stop) return;
    if (i == nulls.size()) {
      if (!visit(Valuation(m))) stop = true;
      return;
    }
    for (std::size_t k = 0; k < used && !stop; ++k) {
      m[nulls[i]] = pool[k];
      go(i + 1, used);
    }
    if (used < pool.size() && !stop) {
      m[nulls[i]] = pool[used];
      go(i + 1, used + 1);
    }
    for (const auto& c : named) {
      if (stop) break;
      m[nulls[i]] = c;
      go(i + 1, used);
    }
    m.erase(nulls[i]);
  };
  go(0, 0);
}

void for_each_source_db(const ObdmSpec& spec, const std::vector<Term>& constants, std::size_t max_atoms,
                        const std::function<bool(const Instance&)>& visit) {
  std::vector<Atom> universe;
  const std::set<Term> pool(constants.begin(), constants.end());
  for (const auto& [name, arity] : spec.source)
    for (const auto& t : tuples_over(arity, pool)) universe.push_back({name, t});
  Instance cur(SchemaTag::Source);
  bool stop = false;
  std::function<void(std::size_t)> go = [&](std::size_t from) {
    if (stop) return;
    if (!cur.empty() && !visit(cur)) {
      stop = true;
      return;
    }
    if (cur.size() == max_atoms) return;
    for (std::size_t i = from; i < universe.size() && !stop; ++i) {
      Instance saved = cur;
      cur.insert(universe[i]);
      go(i + 1);
      cur = std::move(saved);
    }
  };
  go(0);
}

}  // namespace

bool satisfies_tbox(const TBox& tbox, const Instance& b) {
  for (const auto& ax : tbox.assertions())
    if (violates(b, ax)) return false;
  return true;
}

bool satisfies_mapping(const std::vector<StTgd>& mapping, const Instance& source, const Instance& b) {
  for (const auto& tr : triggers_of(mapping, source))
    if (!find_homomorphism(instantiate(tr.tgd->head, tr.frontier), b, {})) return false;
  return true;
}

ModelSearchStats oracle_models(const ObdmSpec& spec, const Instance& db, const Budget& budget,
                               const ModelVisitor& visit, ModelScope scope, const std::set<Term>& named,
                               const std::map<std::string, std::size_t>& vocabulary) {
  budget.validate();
  if (!db.is_ground()) throw Error("source database must be ground");
  const auto known = named_of(spec, db, named);
  auto vocab = spec.ontology_predicates();
  for (const auto& [p, n] : vocabulary)
    if (p != kTop && p != kBottom) vocab.emplace(p, n);
  ModelFinder finder(spec.tbox, triggers_of(spec.mapping, db), {known.begin(), known.end()},
                     fresh_elements(budget.extra_domain, known), budget.max_model_atoms, scope,
                     {vocab.begin(), vocab.end()});
  return finder.run(Instance(SchemaTag::Target), visit);
}

namespace {

std::map<std::string, std::size_t> vocabulary_of(const ConjunctiveQuery& q) {
  std::map<std::string, std::size_t> out;
  for (const auto& a : q.body) out.emplace(a.predicate, a.arity());
  return out;
}

std::set<Term> model_domain(const std::set<Term>& known, std::size_t extras) {
  auto dom = known;
  for (auto& e : fresh_elements(extras, known)) dom.insert(e);
  return dom;
}

struct DbCheck {
  bool holds = true;
  bool exhaustive = true;
  std::size_t models = 0;
  std::optional<Witness> witness;
};

DbCheck check_db(const ObdmSpec& spec, const ConjunctiveQuery& qs, const ConjunctiveQuery& qg, Variant variant,
                 Semantics semantics, const Budget& budget, const Instance& c, const std::set<Term>& named) {
  DbCheck out;
  const auto qs_ans = evaluate_cq(qs, c);
  const bool want_complete = variant != Variant::Sound;
  const bool want_sound = variant != Variant::Complete;
  const auto known = named_of(spec, c, named);
  const auto dom = model_domain(known, budget.extra_domain);

  if (semantics == Semantics::Model) {
    // Completeness failures survive in a generating submodel; soundness ones need all models.
    const ModelScope scope = want_sound ? ModelScope::All : ModelScope::Generating;
    if (want_complete && qs_ans.empty() && !want_sound) return out;
    auto stats = oracle_models(
        spec, c, budget,
        [&](const Instance& b) {
          const auto qg_ans = answers_in(qg, b, dom);
          if (want_complete)
            for (const auto& t : qs_ans)
              if (!qg_ans.count(t)) {
                out.witness = Witness{c, std::nullopt, b, t, "answer of the source query missing in a model"};
                return false;
              }
          if (want_sound)
            for (const auto& t : qg_ans)
              if (!qs_ans.count(t)) {
                out.witness = Witness{c, std::nullopt, b, t, "model answer not produced by the source query"};
                return false;
              }
          return true;
        },
        scope, named, vocabulary_of(qg));
    out.models = stats.models;
    out.exhaustive = !stats.truncated;
    out.holds = !out.witness;
    return out;
  }

  Budget b = budget;
  auto cert = oracle_cert(spec, c, qg, b);
  out.exhaustive = cert.exhaustive;
  if (cert.no_model) return out;  // Definition only constrains databases with models
  if (want_complete)
    for (const auto& t : qs_ans)
      if (!cert.tuples.count(t)) {
        out.witness = Witness{c, std::nullopt, std::nullopt, t, "answer of the source query not certain"};
        break;
      }
  if (!out.witness && want_sound)
    for (const auto& t : cert.tuples)
      if (!qs_ans.count(t)) {
        out.witness = Witness{c, std::nullopt, std::nullopt, t, "certain answer not produced by the source query"};
        break;
      }
  out.holds = !out.witness;
  return out;
}

}  // namespace

RewritingVerdict oracle_check(const ObdmSpec& spec, const ConjunctiveQuery& qs, const ConjunctiveQuery& qg,
                              Variant variant, Semantics semantics, const Budget& budget) {
  budget.validate();
  check_source_query(spec, qs);
  check_ontology_query(spec, qg);
  if (qs.arity() != qg.arity()) throw Error("source and ontology queries differ in arity");

  RewritingVerdict v;
  v.budget = budget;
  auto named = qs.constants();
  const auto qgc = qg.constants();
  named.insert(qgc.begin(), qgc.end());
  const auto mc = spec.constants();
  named.insert(mc.begin(), mc.end());

  auto run = [&](const Instance& c, const std::optional<Valuation>& val) {
    ++v.databases;
    auto r = check_db(spec, qs, qg, variant, semantics, budget, c, named);
    v.models += r.models;
    if (!r.exhaustive) v.exhaustive = false;
    if (r.witness) {
      r.witness->valuation = val;
      v.witness = std::move(r.witness);
      v.holds = false;
      return false;
    }
    return true;
  };

  if (!budget.source_databases.empty()) {
    for (const auto& c : budget.source_databases) {
      if (!c.is_ground()) throw Error("budget source databases must be ground");
      if (!run(Instance(SchemaTag::Source, c.atoms()), std::nullopt)) break;
    }
    return v;
  }

  // Valuations of D_Qs: fresh pool constants are interchangeable, named ones are not.
  std::vector<Term> pool;
  std::vector<Term> pool_named;
  for (const auto& label : budget.const_pool) {
    Term t = Term::constant(label);
    if (named.count(t)) continue;
    if (std::find(pool.begin(), pool.end(), t) == pool.end()) pool.push_back(std::move(t));
  }
  const auto d = instance_of_query(qs, named);
  const auto nulls = d.instance.nulls();
  if (pool.size() < nulls.size()) v.exhaustive = false;
  pool_named.assign(named.begin(), named.end());
  std::set<Instance> done;
  bool go_on = true;
  for_each_valuation({nulls.begin(), nulls.end()}, pool_named, pool, [&](const Valuation& val) {
    Instance c = val.apply(d.instance);
    if (!done.insert(c).second) return true;
    go_on = run(c, val);
    return go_on;
  });
  if (!go_on || variant == Variant::Complete) return v;

  std::vector<Term> consts = pool;
  consts.insert(consts.end(), pool_named.begin(), pool_named.end());
  v.exhaustive = false;  // soundness quantifies over unboundedly many databases
  for_each_source_db(spec, consts, budget.max_source_atoms, [&](const Instance& c) {
    if (!done.insert(c).second) return true;
    return run(c, std::nullopt);
  });
  return v;
}

BoundedAnswers oracle_cert(const ObdmSpec& spec, const Instance& db, const ConjunctiveQuery& q, const Budget& budget) {
  check_ontology_query(spec, q);
  const auto named = q.constants();
  const auto known = named_of(spec, db, named);
  const auto dom = model_domain(known, budget.extra_domain);
  BoundedAnswers out;
  std::optional<std::set<Tuple>> acc;
  const auto stats = oracle_models(
      spec, db, budget,
      [&](const Instance& b) {
        auto ans = answers_in(q, b, dom);
        if (!acc) {
          acc = std::move(ans);
        } else {
          std::set<Tuple> keep;
          for (const auto& t : *acc)
            if (ans.count(t)) keep.insert(t);
          *acc = std::move(keep);
        }
        return true;
      },
      ModelScope::Generating, named);
  out.exhaustive = !stats.truncated;
  if (!acc) {
    out.no_model = true;
    out.tuples = all_tup(q, db);
    return out;
  }
  for (const auto& t : *acc)
    if (std::all_of(t.begin(), t.end(), [&](const Term& x) { return known.count(x) != 0; })) out.tuples.insert(t);
  return out;
}

Instance canonical_model(const TBox& tbox, const Instance& abox, std::size_t depth) {
  if (!abox.is_ground()) throw Error("ABox must be ground");
  Instance b(SchemaTag::Target, abox.atoms());
  std::map<Term, std::size_t> level;
  for (const auto& t : abox.domain()) level[t] = 0;
  NullPool pool(TermKind::NullSigma, "w");
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& ax : tbox.assertions()) {
      if (const auto* ci = std::get_if<ConceptInclusion>(&ax)) {
        const auto rhs = extension(b, ci->rhs);
        for (const auto& x : extension(b, ci->lhs)) {
          if (rhs.count(x)) continue;
          if (ci->rhs.is_atomic()) {
            changed |= b.insert({ci->rhs.name, {x}});
          } else if (level[x] < depth) {
            Term w = pool.fresh();
            level[w] = level[x] + 1;
            changed |= b.insert(ci->rhs.role().atom(x, w));
          }
        }
      } else if (const auto* ri = std::get_if<RoleInclusion>(&ax)) {
        for (const auto& [x, y] : role_pairs(b, ri->lhs)) changed |= b.insert(ri->rhs.atom(x, y));
      }
    }
  }
  return b;
}

std::set<Tuple> oracle_cert_kb(const TBox& tbox, const Instance& abox, const ConjunctiveQuery& q,
                               const Budget& budget) {
  const std::size_t depth = budget.canonical_depth ? budget.canonical_depth : std::max<std::size_t>(q.body.size(), 1);
  const Instance b = canonical_model(tbox, abox, depth);
  // Negative assertions are checked on the truncated model; the levels it omits
  // only repeat the shape of what is already there.
  for (const auto& ax : tbox.assertions())
    if (!is_positive(ax) && violates(b, ax)) throw Error("knowledge base is unsatisfiable");

  std::set<Tuple> out;
  if (q.form == QueryForm::Bottom) return out;
  for (const auto& t : evaluate_cq(q, b))
    if (std::all_of(t.begin(), t.end(), [](const Term& x) { return x.is_const(); })) out.insert(t);
  return out;
}

Satisfiability oracle_kb_satisfiable(const TBox& tbox, const Instance& abox, const Budget& budget) {
  if (!abox.is_ground()) throw Error("ABox must be ground");
  const auto known = abox.constants();
  ModelFinder finder(tbox, {}, {known.begin(), known.end()}, fresh_elements(budget.extra_domain, known),
                     abox.size() + budget.max_model_atoms, ModelScope::Generating, {});
  bool found = false;
  const auto stats = finder.run(Instance(SchemaTag::Target, abox.atoms()), [&](const Instance&) {
    found = true;
    return false;
  });
  if (found) return Satisfiability::Satisfiable;
  return stats.truncated ? Satisfiability::Unknown : Satisfiability::Unsatisfiable;
}

}  // namespace obdm
