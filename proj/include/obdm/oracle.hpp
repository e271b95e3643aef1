#pragma once

// Brute-force reference semantics at desk scale. Nothing in here goes through the
// chase, Qsat or the perfect reformulation: models are searched directly against
// the TBox assertions and mapping assertions, so verdicts can be compared against
// the algorithms in rewriting.hpp.
//
// Bounded verdicts are decisive when they refute (a witness is a real
// counterexample) and only confirmatory otherwise; `exhaustive` reports whether
// the search space covered everything the budget could not rule out.

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "obdm/dllite.hpp"
#include "obdm/model.hpp"
#include "obdm/rewriting.hpp"

namespace obdm {

struct Budget {
  /// Constants that valuations and enumerated source databases draw from.
  std::vector<std::string> const_pool{"k1", "k2", "k3"};
  std::size_t max_model_atoms = 6;
  /// Number of anonymous domain elements a model may use besides named constants.
  std::size_t extra_domain = 2;
  /// Depth of the canonical model in oracle_cert_kb; 0 means the query's atom count.
  std::size_t canonical_depth = 0;
  /// Size bound for enumerated source databases (sound and exact variants only).
  std::size_t max_source_atoms = 2;
  /// When non-empty, the only source databases considered.
  std::vector<Instance> source_databases;

  /// Throws Error unless every bound is at least 1.
  void validate() const;
};

std::string to_string(const Budget& b);

enum class ModelScope {
  /// Every model within the bounds.
  All,
  /// Models reached by repairing obligations only; every model contains one, so
  /// they suffice for monotone queries.
  Generating,
};

struct ModelSearchStats {
  std::size_t models = 0;
  /// Some branch hit the atom bound or ran out of anonymous elements.
  bool truncated = false;
};

using ModelVisitor = std::function<bool(const Instance&)>;

/// B |= O, checked assertion by assertion on a finite instance.
bool satisfies_tbox(const TBox& tbox, const Instance& b);
/// (B, C) |= M
bool satisfies_mapping(const std::vector<StTgd>& mapping, const Instance& source, const Instance& b);

/// Streams bounded sem^C(I): target instances over dom(C) ∪ named ∪ extra elements
/// with at most max_model_atoms atoms that satisfy O and, together with C, M.
/// `vocabulary` adds predicates (beyond the spec's ontology) that All scope may use.
ModelSearchStats oracle_models(const ObdmSpec& spec, const Instance& db, const Budget& budget,
                               const ModelVisitor& visit, ModelScope scope = ModelScope::All,
                               const std::set<Term>& named = {},
                               const std::map<std::string, std::size_t>& vocabulary = {});

enum class Variant { Complete, Sound, Exact };
enum class Semantics { Model, Cert };

std::string to_string(Variant v);
std::string to_string(Semantics s);

struct Witness {
  Instance source_db;
  /// Present when source_db is v(D_Qs).
  std::optional<Valuation> valuation;
  /// Model-based semantics only.
  std::optional<Instance> model;
  Tuple tuple;
  std::string reason;
};

struct RewritingVerdict {
  bool holds = true;
  std::optional<Witness> witness;
  Budget budget;
  bool exhaustive = true;
  std::size_t databases = 0;
  std::size_t models = 0;
};

/// Definitional check of "qg is a complete/sound/exact s-to-t rewriting of qs".
/// Complete variants range over valuations of D_Qs; sound and exact also over
/// every source database of at most max_source_atoms facts.
RewritingVerdict oracle_check(const ObdmSpec& spec, const ConjunctiveQuery& qs, const ConjunctiveQuery& qg,
                              Variant variant, Semantics semantics, const Budget& budget = {});

struct BoundedAnswers {
  std::set<Tuple> tuples;
  bool exhaustive = true;
  /// No model found within the bounds.
  bool no_model = false;
};

/// cert(q, I, C) as an intersection over the bounded models; AllTup when none exist.
BoundedAnswers oracle_cert(const ObdmSpec& spec, const Instance& db, const ConjunctiveQuery& q,
                           const Budget& budget = {});

/// The chase of A by the positive inclusions, inventing Null_Sigma witnesses for
/// elements at most `depth` steps away from an individual.
Instance canonical_model(const TBox& tbox, const Instance& abox, std::size_t depth);

/// Answers over the canonical model of <O, A> grown to canonical_depth, keeping
/// only tuples of constants. Throws Error on an unsatisfiable KB.
std::set<Tuple> oracle_cert_kb(const TBox& tbox, const Instance& abox, const ConjunctiveQuery& q,
                               const Budget& budget = {});

enum class Satisfiability { Satisfiable, Unsatisfiable, Unknown };

/// Finite-model search for <O, A> over A's individuals plus extra_domain elements.
Satisfiability oracle_kb_satisfiable(const TBox& tbox, const Instance& abox, const Budget& budget = {});

}  // namespace obdm
