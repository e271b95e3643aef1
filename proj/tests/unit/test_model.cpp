#include <gtest/gtest.h>

#include "testkit.hpp"

using namespace testkit;

TEST(Term, KindOrderIsConstNullDNullSigmaVar) {
  EXPECT_LT(c("z"), nd("a"));
  EXPECT_LT(nd("z"), ns("a"));
  EXPECT_LT(ns("z"), v("a"));
  EXPECT_LT(c("a"), c("b"));
}

TEST(Term, PrintsNullsAndQuotesOddConstants) {
  EXPECT_EQ(to_string(c("ann")), "ann");
  EXPECT_EQ(to_string(c("42")), "42");
  EXPECT_EQ(to_string(c("Ann Lee")), "\"Ann Lee\"");
  EXPECT_EQ(to_string(nd("d1")), "_:d1");
  EXPECT_EQ(to_string(ns("s1")), "_:s1");
  EXPECT_EQ(to_string(Tuple{c("a"), nd("x")}), "(a,_:x)");
  EXPECT_EQ(query_atom({"G", {v("x"), c("b")}}), "G(x,\"b\")");
}

TEST(Instance, DomainNullsConstants) {
  const auto i = target({{"R", {c("a"), nd("x")}}, {"S", {ns("y")}}});
  EXPECT_EQ(i.domain(), (std::set<Term>{c("a"), nd("x"), ns("y")}));
  EXPECT_EQ(i.nulls(), (std::set<Term>{nd("x"), ns("y")}));
  EXPECT_EQ(i.constants(), (std::set<Term>{c("a")}));
  EXPECT_FALSE(i.is_ground());
  EXPECT_TRUE(facts("r(a,b).").is_ground());
}

TEST(Instance, SetSemantics) {
  Instance i;
  EXPECT_TRUE(i.insert({"r", {c("a")}}));
  EXPECT_FALSE(i.insert({"r", {c("a")}}));
  EXPECT_EQ(i.size(), 1u);
}

TEST(ConjunctiveQuery, SafetyAndForms) {
  EXPECT_NO_THROW(q("q(x) :- r(x, y).").check_safe());
  ConjunctiveQuery unsafe;
  unsafe.head = {v("x")};
  unsafe.body = {{"r", {v("y")}}};
  EXPECT_THROW(unsafe.check_safe(), Error);

  EXPECT_EQ(to_string(ConjunctiveQuery::top({v("x")}), "t"), "t(x) :- top.");
  EXPECT_EQ(to_string(ConjunctiveQuery::bottom({v("x")}), "b"), "b(x) :- bottom.");
  EXPECT_EQ(q("q(x) :- r(x, \"c\").").constants(), (std::set<Term>{c("c")}));
}

TEST(Substitution, LeavesOtherTermsAlone) {
  Substitution s;
  s.set(nd("x"), c("a"));
  EXPECT_EQ(s.apply(nd("x")), c("a"));
  EXPECT_EQ(s.apply(nd("y")), nd("y"));
  EXPECT_EQ(s.apply(Atom{"R", {nd("x"), nd("y")}}), (Atom{"R", {c("a"), nd("y")}}));
  EXPECT_TRUE(s.is_idempotent());
  s.set(nd("y"), nd("x"));
  EXPECT_FALSE(s.is_idempotent());
}

TEST(Valuation, FixesConstantsAndRequiresTotality) {
  const Valuation val(std::map<Term, Term>{{nd("x"), c("k")}});
  EXPECT_EQ(val.apply(Tuple{c("a"), nd("x")}), (Tuple{c("a"), c("k")}));
  const auto inst = target({{"R", {nd("x"), nd("y")}}});
  EXPECT_FALSE(val.is_total_on(inst));
  EXPECT_THROW(val.apply(inst), Error);
  EXPECT_THROW(Valuation(std::map<Term, Term>{{nd("x"), nd("y")}}), Error);
}

TEST(NullPool, SkipsReservedLabels) {
  NullPool pool(TermKind::NullSigma, "s");
  pool.reserve("s1");
  pool.reserve(std::set<Term>{c("s2")});
  EXPECT_EQ(pool.fresh(), ns("s3"));
  EXPECT_EQ(pool.fresh(), ns("s4"));
}

TEST(UnionQuery, PrintsOneDisjunctPerLine) {
  UnionQuery u;
  u.add(q("q(x) :- A(x)."));
  u.add(q("q(x) :- R(x, y), R(x, z)."), Inequality{v("y"), v("z")});
  EXPECT_EQ(u.size(), 2u);
  const auto text = to_string(u);
  EXPECT_NE(text.find("A(x)"), std::string::npos);
  EXPECT_NE(text.find("y != z"), std::string::npos);
}
