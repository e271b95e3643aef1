#pragma once

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "obdm/model.hpp"

namespace obdm {

/// A role name or its inverse.
struct Role {
  std::string name;
  bool inverse = false;

  Role inv() const { return {name, !inverse}; }
  /// The atom asserting this role between `from` and `to`.
  Atom atom(const Term& from, const Term& to) const;

  auto operator<=>(const Role&) const = default;
  bool operator==(const Role&) const = default;
};

/// Atomic concept `A` or unqualified existential `exists R` / `exists inv(R)`.
struct BasicConcept {
  enum class Kind { Atomic, Exists };
  Kind kind = Kind::Atomic;
  std::string name;
  bool inverse = false;

  static BasicConcept atomic(std::string n) { return {Kind::Atomic, std::move(n), false}; }
  static BasicConcept exists(const Role& r) { return {Kind::Exists, r.name, r.inverse}; }

  bool is_atomic() const { return kind == Kind::Atomic; }
  Role role() const { return {name, inverse}; }

  auto operator<=>(const BasicConcept&) const = default;
  bool operator==(const BasicConcept&) const = default;
};

struct ConceptInclusion { BasicConcept lhs, rhs; };
struct ConceptDisjointness { BasicConcept lhs, rhs; };
struct RoleInclusion { Role lhs, rhs; };
struct RoleDisjointness { Role lhs, rhs; };
struct Functionality { Role role; };
/// id B R1, ..., Rn  with length-1 paths.
struct Identification {
  BasicConcept basic;
  std::vector<Role> path;
};

using TBoxAssertion = std::variant<ConceptInclusion, ConceptDisjointness, RoleInclusion,
                                   RoleDisjointness, Functionality, Identification>;

std::string to_string(const Role& r);
std::string to_string(const BasicConcept& b);
std::string to_string(const TBoxAssertion& a);

class TBox {
 public:
  TBox() = default;
  /// Validates on construction; see validate().
  explicit TBox(std::vector<TBoxAssertion> assertions);

  const std::vector<TBoxAssertion>& assertions() const { return assertions_; }
  bool empty() const { return assertions_.empty(); }

  std::set<std::string> concept_names() const;
  std::set<std::string> role_names() const;

  /// Rejects concept/role name clashes, functionality or identification on a role
  /// that some role inclusion specializes, and empty identification paths.
  void validate() const;

 private:
  std::vector<TBoxAssertion> assertions_;
};

/// gamma(B, x): the atoms expressing B(x), inventing `witness` for existentials.
Atom concept_atom(const BasicConcept& b, const Term& x, const Term& witness);

/// Negative inclusions entailed by the TBox, both concept- and role-level.
/// Pairs are unordered; each is stored once in a canonical orientation.
struct NegativeClosure {
  std::vector<std::pair<BasicConcept, BasicConcept>> concepts;
  std::vector<std::pair<Role, Role>> roles;
};

NegativeClosure ni_closure(const TBox& tbox);

/// Basic concepts B' with B' ⊑* B (reflexive), in discovery order starting at B.
std::vector<BasicConcept> subsumees(const TBox& tbox, const BasicConcept& b);

struct SatisfiabilityQuery {
  UnionQuery without_inequality;  ///< Qsat^{0≠}
  UnionQuery with_inequality;     ///< Qsat^{1≠}
};

SatisfiabilityQuery build_qsat(const TBox& tbox);

bool kb_satisfiable(const TBox& tbox, const Instance& abox);

struct ReformulationOptions {
  /// Remove disjuncts subsumed by another disjunct.
  bool prune_subsumed = false;
};

/// PerfectRef: closes `q` under atom rewriting by positive inclusions and reduction.
/// The input disjuncts come first, verbatim.
UnionQuery perfect_reformulation(const TBox& tbox, const UnionQuery& q,
                                 const ReformulationOptions& opts = {});
UnionQuery perfect_reformulation(const TBox& tbox, const ConjunctiveQuery& q,
                                 const ReformulationOptions& opts = {});

/// cert(q, <O, A>). Throws Error when <O, A> is unsatisfiable.
std::set<Tuple> certain_answers_kb(const TBox& tbox, const Instance& abox, const ConjunctiveQuery& q);

/// Membership test `tuple in cert(q, <O, A>)`; tuple constants absent from A are
/// still individuals of every model.
bool kb_entails(const TBox& tbox, const Instance& abox, const ConjunctiveQuery& q, const Tuple& tuple);

}  // namespace obdm
