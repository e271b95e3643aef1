#pragma once

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "obdm/dllite.hpp"
#include "obdm/model.hpp"

namespace obdm {

/// forall x,y (body(x,y) -> exists z head(x,z)). Head-only variables are existential.
struct StTgd {
  std::vector<Atom> body;
  std::vector<Atom> head;

  std::set<Term> body_variables() const;
  std::set<Term> existential_variables() const;
  /// Throws Error on an empty body or a builtin predicate.
  void validate() const;
};

std::string to_string(const StTgd& tgd);

/// forall x (body(x) -> lhs = rhs)
struct Egd {
  std::vector<Atom> body;
  Term lhs;
  Term rhs;
};

std::string to_string(const Egd& egd);

/// Union-find over chase terms whose representative is always the priority-minimal
/// member of its class: constants, then Null_D, then Null_Sigma, then smaller label.
/// Because the representative depends only on the class, merge order never matters.
class TermUnifier {
 public:
  /// Returns false when the classes hold two distinct constants (chase failure).
  bool equate(const Term& a, const Term& b);
  Term find(const Term& t) const;

  /// Every term mapped to a different representative.
  Substitution substitution() const;
  /// The part of substitution() whose domain is Null_D: the chase's psi.
  Substitution psi() const;

 private:
  Term& parent_of(const Term& t);
  mutable std::map<Term, Term> parent_;
};

/// One line per chase step: `STEP <n> TGD|EGD <id> <substitution>`.
using ChaseTrace = std::vector<std::string>;

/// Oblivious st-tgd chase: every homomorphism of every body fires once, inventing
/// fresh Null_Sigma terms (`s1, s2, ...`) for existential variables. Tgds fire in
/// declaration order, homomorphisms in canonical term order.
Instance chase_tgds(const Instance& source, const std::vector<StTgd>& mapping,
                    ChaseTrace* trace = nullptr, const std::set<Term>& reserved = {});

struct ChaseResult {
  Instance instance;
  Substitution psi;
};

/// Failure is a value: an empty optional.
using ChaseOutcome = std::optional<ChaseResult>;

struct EgdChaseOptions {
  /// Visit triggers in a shuffled order; used to exercise order independence.
  std::optional<std::uint64_t> shuffle_seed;
  ChaseTrace* trace = nullptr;
  /// STEP numbering continues from here.
  std::size_t first_step = 1;
};

ChaseOutcome chase_egds(const Instance& instance, const std::vector<Egd>& egds,
                        const EgdChaseOptions& opts = {});

/// The negation of a UCQ with exactly one inequality per disjunct.
std::vector<Egd> egds_of_negated_ucq(const UnionQuery& q);

/// Reinterprets every labeled null as the constant with the same label.
Instance freeze(const Instance& inst);
Term freeze(const Term& t);

struct AboxResult {
  /// Empty when the egd chase failed (A = bottom).
  std::optional<Instance> abox;
  /// The chased target instance before freezing.
  Instance chased;
  Substitution psi;
};

/// A_{D,Sigma} with Sigma = M ∪ ¬Qsat^{1≠}(O), plus psi.
AboxResult abox_of(const Instance& source, const std::vector<StTgd>& mapping, const TBox& tbox,
                   ChaseTrace* trace = nullptr, const std::set<Term>& reserved = {});

}  // namespace obdm
