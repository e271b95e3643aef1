#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "obdm/model.hpp"
#include "obdm/rewriting.hpp"

namespace obdm {

/// A diagnostic anchored at a 1-based line and column.
class ParseError : public Error {
 public:
  ParseError(const std::string& origin, std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A parsed specification file: the OBDM specification plus its named queries in
/// file order.
struct SpecDocument {
  ObdmSpec spec;
  std::vector<std::pair<std::string, ConjunctiveQuery>> queries;

  /// Throws Error when no query has this name.
  const ConjunctiveQuery& query(const std::string& name) const;
};

/// Spec files:
///
///     [source]
///     r1/2.
///     [tbox]
///     A isa exists R.       B disjoint exists inv(R).      R subrole S.
///     R disjointrole S.     funct R.       id A R, S.
///     [mapping]
///     r1(x, y), r2(y) -> T(x, w).
///     [query q]
///     q(x) :- T(x, "c").
///
/// Bare identifiers in atoms are variables; constants are quoted strings or numbers.
/// `#` starts a comment.
SpecDocument parse_spec(std::string_view text, const std::string& origin = "<input>");
SpecDocument load_spec(const std::string& path);

/// Canonical text form; parse_spec(print_spec(d)) yields d again.
std::string print_spec(const SpecDocument& doc);

/// A single query in spec syntax, e.g. `q(x) :- G(x, "b").`, without vocabulary checks.
ConjunctiveQuery parse_query(std::string_view text, const std::string& origin = "<query>");
/// TBox assertions in spec syntax, without the section header.
TBox parse_tbox(std::string_view text, const std::string& origin = "<tbox>");

/// Facts files: one `pred(c1, ..., cn).` per line. Constants are bare lowercase
/// identifiers, numbers or quoted strings; capitalised identifiers are variables
/// and rejected.
Instance parse_db(std::string_view text, const std::string& origin = "<input>");
Instance load_db(const std::string& path);

}  // namespace obdm
