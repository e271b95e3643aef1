#pragma once

#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "obdm/model.hpp"

namespace obdm {

using Assignment = std::map<Term, Term>;

/// Called once per homomorphism; return false to stop the search.
using HomomorphismVisitor = std::function<bool(const Assignment&)>;

/// Enumerates every extension of `initial` mapping the Var terms of `pattern` into
/// `target` so that each pattern atom lands on a target atom. Non-variable pattern
/// terms must match exactly. `top(t)` atoms accept any t in `top_domain`; `bottom`
/// atoms never match. Atoms are tried most-constrained-first.
void for_each_homomorphism(std::span<const Atom> pattern, const Instance& target,
                           const Assignment& initial, const std::set<Term>& top_domain,
                           const HomomorphismVisitor& visit);

/// Returns the first homomorphism found, if any.
std::optional<Assignment> find_homomorphism(std::span<const Atom> pattern, const Instance& target,
                                            const Assignment& initial,
                                            const std::set<Term>& top_domain = {});

/// Active domain used for `top` atoms: dom(db) plus every constant of q.
std::set<Term> top_domain_for(const ConjunctiveQuery& q, const Instance& db);

/// q^db. Top-form queries range their head variables over the top domain.
std::set<Tuple> evaluate_cq(const ConjunctiveQuery& q, const Instance& db);

/// Decides `tuple in q^db` by binding the head first; constants of `tuple` join the
/// top domain, so `top(t)` holds for every named individual.
bool has_answer(const ConjunctiveQuery& q, const Tuple& tuple, const Instance& db,
                const std::set<Term>& extra_domain = {});

/// Union of disjunct answers; a disjunct with `t1 != t2` only contributes
/// homomorphisms whose images of t1 and t2 differ.
std::set<Tuple> evaluate_ucq(const UnionQuery& q, const Instance& db);

/// Boolean shortcut for evaluate_ucq(q, db) == {()}.
bool ucq_holds(const UnionQuery& q, const Instance& db);

/// AllTup: every `arity`-tuple over the constants of db.
std::set<Tuple> all_tup(std::size_t arity, const Instance& db);
std::set<Tuple> all_tup(const ConjunctiveQuery& q, const Instance& db);
/// Every `arity`-tuple over `pool`.
std::set<Tuple> tuples_over(std::size_t arity, const std::set<Term>& pool);

/// D_q together with the image of tup(q).
struct QueryInstance {
  Instance instance;
  Tuple head;
  /// Var -> NullD
  Substitution var_to_null;
};

/// Each variable of q becomes a fresh NullD term (`d1, d2, ...` in order of first
/// occurrence); constants pass through and `top` atoms contribute no facts.
/// Labels listed in `reserved` are never minted.
QueryInstance instance_of_query(const ConjunctiveQuery& q, const std::set<Term>& reserved = {});

/// q_D(free): nulls of `free` become head variables, every other null an existential
/// variable. Variables are named by `names` when given, else by the null label.
ConjunctiveQuery query_of_instance(const Instance& inst, const Tuple& free,
                                   const std::map<Term, std::string>& names = {});

/// Head-preserving homomorphism from `from` into `to` (variables of `to` act as constants).
std::optional<Assignment> query_homomorphism(const ConjunctiveQuery& from, const ConjunctiveQuery& to);
bool homomorphically_equivalent(const ConjunctiveQuery& a, const ConjunctiveQuery& b);

/// True iff some bijective renaming of labeled nulls maps `a` onto `b`.
bool isomorphic_up_to_nulls(const Instance& a, const Instance& b);

/// Predicate arities of db; throws Error when one predicate is used with two arities.
std::map<std::string, std::size_t> arities_of(const Instance& db);

}  // namespace obdm
