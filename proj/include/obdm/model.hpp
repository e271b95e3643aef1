#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace obdm {

/// Base class for every error the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kind order doubles as the canonical term order: Const < NullD < NullSigma < Var.
enum class TermKind { Const, NullD, NullSigma, Var };

struct Term {
  TermKind kind = TermKind::Const;
  std::string label;

  static Term constant(std::string l) { return {TermKind::Const, std::move(l)}; }
  static Term null_d(std::string l) { return {TermKind::NullD, std::move(l)}; }
  static Term null_sigma(std::string l) { return {TermKind::NullSigma, std::move(l)}; }
  static Term var(std::string l) { return {TermKind::Var, std::move(l)}; }

  bool is_const() const { return kind == TermKind::Const; }
  bool is_var() const { return kind == TermKind::Var; }
  bool is_null() const { return kind == TermKind::NullD || kind == TermKind::NullSigma; }

  auto operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;
};

using Tuple = std::vector<Term>;

std::string to_string(const Term& t);
std::string to_string(const Tuple& t);

/// Reserved builtin predicates. Both are unary.
inline constexpr const char* kTop = "top";
inline constexpr const char* kBottom = "bottom";

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  std::size_t arity() const { return args.size(); }
  bool is_top() const { return predicate == kTop; }
  bool is_bottom() const { return predicate == kBottom; }

  auto operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
};

std::string to_string(const Atom& a);
/// Query syntax: constants always quoted.
std::string query_atom(const Atom& a);

enum class SchemaTag { Source, Target };

/// A set of atoms, possibly containing labeled nulls.
class Instance {
 public:
  Instance() = default;
  explicit Instance(SchemaTag tag) : tag_(tag) {}
  Instance(SchemaTag tag, std::set<Atom> atoms) : tag_(tag), atoms_(std::move(atoms)) {}

  SchemaTag tag() const { return tag_; }
  const std::set<Atom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }
  std::size_t size() const { return atoms_.size(); }

  bool insert(Atom a) { return atoms_.insert(std::move(a)).second; }
  bool contains(const Atom& a) const { return atoms_.count(a) != 0; }

  /// dom(D): every term occurring in some atom.
  std::set<Term> domain() const;
  /// null(D): the labeled nulls of dom(D).
  std::set<Term> nulls() const;
  std::set<Term> constants() const;
  bool is_ground() const;

  bool operator==(const Instance& o) const { return atoms_ == o.atoms_; }
  bool operator<(const Instance& o) const { return atoms_ < o.atoms_; }

 private:
  SchemaTag tag_ = SchemaTag::Source;
  std::set<Atom> atoms_;
};

std::string to_string(const Instance& inst);

enum class QueryForm { Normal, Top, Bottom };

struct ConjunctiveQuery {
  Tuple head;
  std::vector<Atom> body;
  QueryForm form = QueryForm::Normal;

  std::size_t arity() const { return head.size(); }

  /// {head | top(head)}: every tuple is an answer.
  static ConjunctiveQuery top(Tuple head);
  /// {head | bottom(head)}: no tuple is an answer.
  static ConjunctiveQuery bottom(Tuple head);

  std::set<Term> variables() const;
  std::set<Term> constants() const;

  /// Throws Error when a head variable does not occur in the body.
  void check_safe() const;

  bool operator==(const ConjunctiveQuery&) const = default;
};

/// Prints `name(head) :- body.` with `top` / `bottom` bodies for the degenerate forms.
std::string to_string(const ConjunctiveQuery& q, const std::string& name = "q");

struct Inequality {
  Term lhs;
  Term rhs;
  bool operator==(const Inequality&) const = default;
};

struct Disjunct {
  ConjunctiveQuery query;
  std::optional<Inequality> inequality;
  bool operator==(const Disjunct&) const = default;
};

/// Union of CQs, each disjunct carrying at most one inequality.
class UnionQuery {
 public:
  UnionQuery() = default;
  explicit UnionQuery(std::vector<Disjunct> disjuncts);

  const std::vector<Disjunct>& disjuncts() const { return disjuncts_; }
  bool empty() const { return disjuncts_.empty(); }
  std::size_t size() const { return disjuncts_.size(); }

  void add(ConjunctiveQuery q, std::optional<Inequality> ineq = std::nullopt);

 private:
  std::vector<Disjunct> disjuncts_;
};

std::string to_string(const UnionQuery& q, const std::string& name = "q");

/// A map on terms; terms outside the domain are left unchanged.
class Substitution {
 public:
  Substitution() = default;
  explicit Substitution(std::map<Term, Term> m) : map_(std::move(m)) {}

  Term apply(const Term& t) const;
  Tuple apply(const Tuple& t) const;
  Atom apply(const Atom& a) const;
  Instance apply(const Instance& inst) const;

  void set(const Term& from, const Term& to) { map_[from] = to; }
  bool contains(const Term& t) const { return map_.count(t) != 0; }
  const std::map<Term, Term>& map() const { return map_; }
  bool empty() const { return map_.empty(); }
  bool is_idempotent() const;

  bool operator==(const Substitution&) const = default;

 private:
  std::map<Term, Term> map_;
};

/// A valuation v : null(D) -> Const. Its extension to tuples fixes constants.
class Valuation {
 public:
  Valuation() = default;
  explicit Valuation(std::map<Term, Term> m);

  Term apply(const Term& t) const;
  Tuple apply(const Tuple& t) const;
  /// v(D); throws Error when some null of `inst` is unassigned.
  Instance apply(const Instance& inst) const;

  const std::map<Term, Term>& map() const { return map_; }
  bool is_total_on(const Instance& inst) const;

 private:
  std::map<Term, Term> map_;
};

/// Mints fresh labeled nulls (`d1, d2, ...` or `s1, s2, ...`), skipping reserved labels
/// so that frozen nulls never collide with user constants.
class NullPool {
 public:
  NullPool(TermKind kind, std::string prefix) : kind_(kind), prefix_(std::move(prefix)) {}

  void reserve(const std::string& label) { reserved_.insert(label); }
  void reserve(const std::set<Term>& terms);
  Term fresh();

 private:
  TermKind kind_;
  std::string prefix_;
  std::size_t next_ = 1;
  std::set<std::string> reserved_;
};

}  // namespace obdm
