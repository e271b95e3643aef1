#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "obdm/chase.hpp"
#include "obdm/dllite.hpp"
#include "obdm/model.hpp"

namespace obdm {

/// An OBDM specification <O, M, S>.
struct ObdmSpec {
  /// Source relation name -> arity.
  std::map<std::string, std::size_t> source;
  TBox tbox;
  std::vector<StTgd> mapping;

  /// Ontology predicates: TBox names plus mapping head predicates, with arities.
  std::map<std::string, std::size_t> ontology_predicates() const;
  /// Every constant mentioned by a mapping assertion.
  std::set<Term> constants() const;

  /// Mapping bodies use declared source relations at their arities; heads use
  /// ontology predicates only (concepts unary, roles binary).
  void validate() const;
};

/// Throws Error unless q is a normal CQ over the source schema.
void check_source_query(const ObdmSpec& spec, const ConjunctiveQuery& q);
/// Throws Error unless every atom of q is `top`, a concept or a role.
void check_ontology_query(const ObdmSpec& spec, const ConjunctiveQuery& q);

/// Intermediate results of CheckComplete, for diagnostics.
struct CompletenessTrace {
  Instance source_instance;
  std::optional<Instance> abox;
  Substitution psi;
  Tuple answer;
  enum class Reason { ChaseFailed, QsatHolds, Entailed, NotEntailed } reason = Reason::NotEntailed;
};

/// Decides whether qg is a complete s-to-t rewriting of qs w.r.t. spec.
bool check_complete(const ObdmSpec& spec, const ConjunctiveQuery& qs, const ConjunctiveQuery& qg,
                    CompletenessTrace* trace = nullptr);

struct FindOptions {
  /// Replace the rewriting by its core. Off by default.
  bool minimize = false;
};

/// The optimal complete s-to-t rewriting of qs: a bottom-form query when every
/// instance of qs yields an inconsistent KB, a top-form query when the mapping
/// produces no facts, else the chased instance read back as a query.
ConjunctiveQuery find_optimal_complete(const ObdmSpec& spec, const ConjunctiveQuery& qs,
                                       const FindOptions& opts = {});

/// q1 ⊆_O q2. Decided by chasing q1's frozen instance with the functionality and
/// identification egds and then testing certain-answer membership of its head.
bool contained_wrt(const TBox& tbox, const ConjunctiveQuery& q1, const ConjunctiveQuery& q2);
/// q1 ⊂_O q2
bool proper_contained_wrt(const TBox& tbox, const ConjunctiveQuery& q1, const ConjunctiveQuery& q2);
bool equivalent_wrt(const TBox& tbox, const ConjunctiveQuery& q1, const ConjunctiveQuery& q2);

/// cert(q, I, C) for a ground source database C; AllTup(q, C) when no model exists.
std::set<Tuple> certain_answers(const ObdmSpec& spec, const Instance& db, const ConjunctiveQuery& q);

/// The core of q: drops body atoms while a head-preserving endomorphism exists.
ConjunctiveQuery minimize(const ConjunctiveQuery& q);

}  // namespace obdm
