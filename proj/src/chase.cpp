#include "obdm/chase.hpp"

#include <algorithm>

#include "obdm/eval.hpp"

namespace obdm {

namespace {

std::string atoms_to_string(const std::vector<Atom>& atoms) {
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out += ", ";
    out += to_string(atoms[i]);
  }
  return out;
}

std::string assignment_to_string(const Assignment& asg) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, t] : asg) {
    if (!first) out += ", ";
    first = false;
    out += to_string(v) + "->" + to_string(t);
  }
  return out + "}";
}

// Constants first, then Null_D, then Null_Sigma; within a pool the smaller label.
bool preferred(const Term& a, const Term& b) { return a < b; }

}  // namespace

std::set<Term> StTgd::body_variables() const {
  std::set<Term> out;
  for (const auto& a : body)
    for (const auto& t : a.args)
      if (t.is_var()) out.insert(t);
  return out;
}

std::set<Term> StTgd::existential_variables() const {
  const auto frontier = body_variables();
  std::set<Term> out;
  for (const auto& a : head)
    for (const auto& t : a.args)
      if (t.is_var() && !frontier.count(t)) out.insert(t);
  return out;
}

void StTgd::validate() const {
  if (body.empty()) throw Error("mapping assertion with an empty body");
  if (head.empty()) throw Error("mapping assertion with an empty head");
  for (const auto* side : {&body, &head})
    for (const auto& a : *side)
      if (a.is_top() || a.is_bottom()) throw Error("builtin '" + a.predicate + "' is not allowed in mappings");
}

std::string to_string(const StTgd& tgd) {
  return atoms_to_string(tgd.body) + " -> " + atoms_to_string(tgd.head) + ".";
}

std::string to_string(const Egd& egd) {
  return atoms_to_string(egd.body) + " -> " + to_string(egd.lhs) + " = " + to_string(egd.rhs) + ".";
}

Term& TermUnifier::parent_of(const Term& t) {
  auto it = parent_.find(t);
  if (it == parent_.end()) it = parent_.emplace(t, t).first;
  return it->second;
}

Term TermUnifier::find(const Term& t) const {
  auto it = parent_.find(t);
  if (it == parent_.end()) return t;
  if (it->second == t) return t;
  Term root = find(it->second);
  it->second = root;
  return root;
}

bool TermUnifier::equate(const Term& a, const Term& b) {
  const Term ra = find(a);
  const Term rb = find(b);
  if (ra == rb) return true;
  if (ra.is_const() && rb.is_const()) return false;
  parent_of(ra);
  parent_of(rb);
  if (preferred(ra, rb)) {
    parent_[rb] = ra;
  } else {
    parent_[ra] = rb;
  }
  return true;
}

Substitution TermUnifier::substitution() const {
  Substitution s;
  for (const auto& [t, _] : parent_) {
    const Term r = find(t);
    if (r != t) s.set(t, r);
  }
  return s;
}

Substitution TermUnifier::psi() const {
  Substitution s;
  const Substitution all = substitution();
  for (const auto& [from, to] : all.map())
    if (from.kind == TermKind::NullD) s.set(from, to);
  return s;
}

Instance chase_tgds(const Instance& source, const std::vector<StTgd>& mapping, ChaseTrace* trace,
                    const std::set<Term>& reserved) {
  NullPool pool(TermKind::NullSigma, "s");
  pool.reserve(source.constants());
  pool.reserve(reserved);
  for (const auto& tgd : mapping)
    for (const auto& a : tgd.head)
      for (const auto& t : a.args)
        if (t.is_const()) pool.reserve(t.label);

  Instance target(SchemaTag::Target);
  std::size_t step = trace ? trace->size() + 1 : 1;
  for (std::size_t i = 0; i < mapping.size(); ++i) {
    const auto& tgd = mapping[i];
    std::vector<Assignment> triggers;
    for_each_homomorphism(tgd.body, source, {}, {}, [&](const Assignment& asg) {
      triggers.push_back(asg);
      return true;
    });
    std::sort(triggers.begin(), triggers.end());
    const auto existentials = tgd.existential_variables();
    for (auto& asg : triggers) {
      for (const auto& z : existentials) asg[z] = pool.fresh();
      for (const auto& a : tgd.head) {
        Atom fact{a.predicate, {}};
        for (const auto& t : a.args) fact.args.push_back(t.is_var() ? asg.at(t) : t);
        target.insert(std::move(fact));
      }
      if (trace)
        trace->push_back("STEP " + std::to_string(step++) + " TGD " + std::to_string(i + 1) + " " +
                         assignment_to_string(asg));
    }
  }
  return target;
}

ChaseOutcome chase_egds(const Instance& instance, const std::vector<Egd>& egds, const EgdChaseOptions& opts) {
  struct Trigger {
    std::size_t egd;
    Assignment asg;
    Term lhs, rhs;
  };
  TermUnifier uf;
  Instance cur = instance;
  std::size_t step = opts.first_step;
  std::optional<std::mt19937_64> rng;
  if (opts.shuffle_seed) rng.emplace(*opts.shuffle_seed);

  for (;;) {
    std::vector<Trigger> triggers;
    for (std::size_t i = 0; i < egds.size(); ++i) {
      const auto& e = egds[i];
      for_each_homomorphism(e.body, cur, {}, {}, [&](const Assignment& asg) {
        const Term l = e.lhs.is_var() ? asg.at(e.lhs) : e.lhs;
        const Term r = e.rhs.is_var() ? asg.at(e.rhs) : e.rhs;
        if (l != r) triggers.push_back({i, asg, l, r});
        return true;
      });
    }
    if (triggers.empty()) break;
    if (rng) {
      std::shuffle(triggers.begin(), triggers.end(), *rng);
    } else {
      std::sort(triggers.begin(), triggers.end(), [](const Trigger& a, const Trigger& b) {
        return std::tie(a.egd, a.asg) < std::tie(b.egd, b.asg);
      });
    }
    for (const auto& t : triggers) {
      const Term ra = uf.find(t.lhs);
      const Term rb = uf.find(t.rhs);
      if (ra == rb) continue;
      if (!uf.equate(ra, rb)) {
        if (opts.trace)
          opts.trace->push_back("STEP " + std::to_string(step) + " EGD " + std::to_string(t.egd + 1) +
                                " FAIL " + to_string(ra) + " != " + to_string(rb));
        return std::nullopt;
      }
      if (opts.trace) {
        const Term winner = uf.find(ra);
        const Term& loser = winner == ra ? rb : ra;
        opts.trace->push_back("STEP " + std::to_string(step++) + " EGD " + std::to_string(t.egd + 1) + " {" +
                              to_string(loser) + "->" + to_string(winner) + "}");
      }
    }
    cur = uf.substitution().apply(cur);
  }
  return ChaseResult{std::move(cur), uf.psi()};
}

std::vector<Egd> egds_of_negated_ucq(const UnionQuery& q) {
  std::vector<Egd> out;
  for (const auto& d : q.disjuncts()) {
    if (!d.inequality) throw Error("every disjunct of the negated UCQ needs exactly one inequality");
    out.push_back({d.query.body, d.inequality->lhs, d.inequality->rhs});
  }
  return out;
}

Term freeze(const Term& t) { return t.is_null() ? Term::constant(t.label) : t; }

Instance freeze(const Instance& inst) {
  Instance out(inst.tag());
  for (const auto& a : inst.atoms()) {
    Atom f{a.predicate, {}};
    for (const auto& t : a.args) f.args.push_back(freeze(t));
    out.insert(std::move(f));
  }
  return out;
}

AboxResult abox_of(const Instance& source, const std::vector<StTgd>& mapping, const TBox& tbox,
                   ChaseTrace* trace, const std::set<Term>& reserved) {
  AboxResult out;
  Instance j = chase_tgds(source, mapping, trace, reserved);
  const auto egds = egds_of_negated_ucq(build_qsat(tbox).with_inequality);
  EgdChaseOptions opts;
  opts.trace = trace;
  opts.first_step = trace ? trace->size() + 1 : 1;
  auto outcome = chase_egds(j, egds, opts);
  if (!outcome) {
    out.chased = std::move(j);
    return out;
  }
  out.chased = std::move(outcome->instance);
  out.psi = std::move(outcome->psi);
  out.abox = freeze(out.chased);
  return out;
}

}  // namespace obdm
