#include "obdm/model.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace obdm {

namespace {

bool is_bare_constant(const std::string& s) {
  if (s.empty()) return false;
  const auto first = static_cast<unsigned char>(s.front());
  if (!std::islower(first) && !std::isdigit(first)) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_';
  });
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

// Constants inside query text are always quoted: bare identifiers there are variables.
std::string query_term(const Term& t) {
  if (t.is_const()) return quote(t.label);
  return to_string(t);
}

std::string join_terms(const Tuple& ts, bool query_syntax) {
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ',';
    out += query_syntax ? query_term(ts[i]) : to_string(ts[i]);
  }
  return out;
}

}  // namespace

std::string query_atom(const Atom& a) { return a.predicate + "(" + join_terms(a.args, true) + ")"; }

std::string to_string(const Term& t) {
  switch (t.kind) {
    case TermKind::Const:
      return is_bare_constant(t.label) ? t.label : quote(t.label);
    case TermKind::NullD:
    case TermKind::NullSigma:
      return "_:" + t.label;
    case TermKind::Var:
      return t.label;
  }
  return t.label;
}

std::string to_string(const Tuple& t) { return "(" + join_terms(t, false) + ")"; }

std::string to_string(const Atom& a) { return a.predicate + "(" + join_terms(a.args, false) + ")"; }

std::set<Term> Instance::domain() const {
  std::set<Term> out;
  for (const auto& a : atoms_) out.insert(a.args.begin(), a.args.end());
  return out;
}

std::set<Term> Instance::nulls() const {
  std::set<Term> out;
  for (const auto& a : atoms_)
    for (const auto& t : a.args)
      if (t.is_null()) out.insert(t);
  return out;
}

std::set<Term> Instance::constants() const {
  std::set<Term> out;
  for (const auto& a : atoms_)
    for (const auto& t : a.args)
      if (t.is_const()) out.insert(t);
  return out;
}

bool Instance::is_ground() const {
  return std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) {
    return std::all_of(a.args.begin(), a.args.end(), [](const Term& t) { return t.is_const(); });
  });
}

std::string to_string(const Instance& inst) {
  std::string out;
  for (const auto& a : inst.atoms()) out += to_string(a) + ".\n";
  return out;
}

ConjunctiveQuery ConjunctiveQuery::top(Tuple head) {
  ConjunctiveQuery q;
  q.head = std::move(head);
  q.form = QueryForm::Top;
  return q;
}

ConjunctiveQuery ConjunctiveQuery::bottom(Tuple head) {
  ConjunctiveQuery q;
  q.head = std::move(head);
  q.form = QueryForm::Bottom;
  return q;
}

std::set<Term> ConjunctiveQuery::variables() const {
  std::set<Term> out;
  for (const auto& t : head)
    if (t.is_var()) out.insert(t);
  for (const auto& a : body)
    for (const auto& t : a.args)
      if (t.is_var()) out.insert(t);
  return out;
}

std::set<Term> ConjunctiveQuery::constants() const {
  std::set<Term> out;
  for (const auto& t : head)
    if (t.is_const()) out.insert(t);
  for (const auto& a : body)
    for (const auto& t : a.args)
      if (t.is_const()) out.insert(t);
  return out;
}

void ConjunctiveQuery::check_safe() const {
  if (form != QueryForm::Normal) return;
  std::set<Term> body_vars;
  for (const auto& a : body)
    for (const auto& t : a.args)
      if (t.is_var()) body_vars.insert(t);
  for (const auto& t : head) {
    if (t.is_var() && !body_vars.count(t))
      throw Error("unsafe query: head variable '" + t.label + "' does not occur in the body");
  }
}

std::string to_string(const ConjunctiveQuery& q, const std::string& name) {
  std::string out = name + "(" + join_terms(q.head, true) + ") :- ";
  switch (q.form) {
    case QueryForm::Top:
      out += "top";
      break;
    case QueryForm::Bottom:
      out += "bottom";
      break;
    case QueryForm::Normal:
      for (std::size_t i = 0; i < q.body.size(); ++i) {
        if (i) out += ", ";
        out += query_atom(q.body[i]);
      }
      break;
  }
  return out + ".";
}

UnionQuery::UnionQuery(std::vector<Disjunct> disjuncts) {
  for (auto& d : disjuncts) add(std::move(d.query), std::move(d.inequality));
}

void UnionQuery::add(ConjunctiveQuery q, std::optional<Inequality> ineq) {
  if (!disjuncts_.empty() && disjuncts_.front().query.arity() != q.arity())
    throw Error("union query disjuncts must share head arity");
  if (ineq) {
    bool lhs = false;
    bool rhs = false;
    for (const auto& a : q.body) {
      for (const auto& t : a.args) {
        lhs = lhs || t == ineq->lhs;
        rhs = rhs || t == ineq->rhs;
      }
    }
    if (!lhs || !rhs) throw Error("inequality terms must occur in the disjunct body");
  }
  disjuncts_.push_back({std::move(q), std::move(ineq)});
}

std::string to_string(const UnionQuery& q, const std::string& name) {
  std::string out;
  for (const auto& d : q.disjuncts()) {
    std::string line = to_string(d.query, name);
    if (d.inequality) {
      line.pop_back();
      line += ", " + query_term(d.inequality->lhs) + " != " + query_term(d.inequality->rhs) + ".";
    }
    out += line + "\n";
  }
  return out;
}

Term Substitution::apply(const Term& t) const {
  auto it = map_.find(t);
  return it == map_.end() ? t : it->second;
}

Tuple Substitution::apply(const Tuple& t) const {
  Tuple out;
  out.reserve(t.size());
  for (const auto& x : t) out.push_back(apply(x));
  return out;
}

Atom Substitution::apply(const Atom& a) const { return {a.predicate, apply(a.args)}; }

Instance Substitution::apply(const Instance& inst) const {
  Instance out(inst.tag());
  for (const auto& a : inst.atoms()) out.insert(apply(a));
  return out;
}

bool Substitution::is_idempotent() const {
  return std::all_of(map_.begin(), map_.end(),
                     [this](const auto& kv) { return apply(kv.second) == kv.second; });
}

Valuation::Valuation(std::map<Term, Term> m) : map_(std::move(m)) {
  for (const auto& [from, to] : map_) {
    if (!from.is_null()) throw Error("valuation domain must consist of labeled nulls: " + to_string(from));
    if (!to.is_const()) throw Error("valuation must map nulls to constants: " + to_string(to));
  }
}

Term Valuation::apply(const Term& t) const {
  if (t.is_const()) return t;
  auto it = map_.find(t);
  return it == map_.end() ? t : it->second;
}

Tuple Valuation::apply(const Tuple& t) const {
  Tuple out;
  out.reserve(t.size());
  for (const auto& x : t) out.push_back(apply(x));
  return out;
}

bool Valuation::is_total_on(const Instance& inst) const {
  for (const auto& n : inst.nulls())
    if (!map_.count(n)) return false;
  return true;
}

Instance Valuation::apply(const Instance& inst) const {
  if (!is_total_on(inst)) throw Error("valuation is not total on the instance's nulls");
  Instance out(inst.tag());
  for (const auto& a : inst.atoms()) out.insert({a.predicate, apply(a.args)});
  return out;
}

void NullPool::reserve(const std::set<Term>& terms) {
  for (const auto& t : terms) reserved_.insert(t.label);
}

Term NullPool::fresh() {
  std::string label;
  do {
    label = prefix_ + std::to_string(next_++);
  } while (reserved_.count(label));
  return {kind_, std::move(label)};
}

}  // namespace obdm
