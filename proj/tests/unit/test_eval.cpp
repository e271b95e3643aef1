#include <gtest/gtest.h>

#include "testkit.hpp"

using namespace testkit;

TEST(Evaluate, JoinsAndConstants) {
  const auto db = facts("r(a,b). r(b,c). r(c,c). s(c).");
  EXPECT_EQ(evaluate_cq(q("q(x, z) :- r(x, y), r(y, z)."), db),
            (std::set<Tuple>{{c("a"), c("c")}, {c("b"), c("c")}, {c("c"), c("c")}}));
  EXPECT_EQ(evaluate_cq(q("q(x) :- r(x, \"c\"), s(x)."), db), (std::set<Tuple>{{c("c")}}));
  EXPECT_EQ(evaluate_cq(q("q() :- r(x, x)."), db), (std::set<Tuple>{{}}));
  EXPECT_TRUE(evaluate_cq(q("q() :- s(\"a\")."), db).empty());
}

TEST(Evaluate, HeadConstantsAndRepeatedVariables) {
  const auto db = facts("r(a,b). r(c,c).");
  EXPECT_EQ(evaluate_cq(q("q(x, x) :- r(x, y)."), db),
            (std::set<Tuple>{{c("a"), c("a")}, {c("c"), c("c")}}));
  EXPECT_EQ(evaluate_cq(q("q(\"k\", y) :- r(\"a\", y)."), db), (std::set<Tuple>{{c("k"), c("b")}}));
}

TEST(Evaluate, TopAndBottomForms) {
  const auto db = facts("r(a,b).");
  EXPECT_TRUE(evaluate_cq(ConjunctiveQuery::bottom({v("x")}), db).empty());
  EXPECT_EQ(evaluate_cq(ConjunctiveQuery::top({v("x")}), db), (std::set<Tuple>{{c("a")}, {c("b")}}));
  EXPECT_EQ(all_tup(2, db).size(), 4u);
}

TEST(Evaluate, UnionWithInequality) {
  const auto db = facts("r(a,b). r(a,c). r(d,d).");
  UnionQuery u;
  u.add(q("q(x) :- r(x, y), r(x, z)."), Inequality{v("y"), v("z")});
  EXPECT_EQ(evaluate_ucq(u, db), (std::set<Tuple>{{c("a")}}));
  EXPECT_TRUE(ucq_holds(u, db));
  EXPECT_FALSE(ucq_holds(u, facts("r(a,b).")));
}

TEST(Homomorphism, QueryContainmentClassics) {
  // q2 maps into q1, so q1 is contained in q2.
  const auto q1 = q("q(x) :- r(x, y), r(y, x).");
  const auto q2 = q("q(x) :- r(x, y).");
  EXPECT_TRUE(query_homomorphism(q2, q1).has_value());
  EXPECT_FALSE(query_homomorphism(q1, q2).has_value());
  EXPECT_TRUE(homomorphically_equivalent(q("q(x) :- r(x, y), r(x, z)."), q2));
}

TEST(Homomorphism, IsomorphismUpToNulls) {
  const auto a = target({{"R", {c("a"), nd("x")}}, {"R", {nd("x"), ns("y")}}});
  const auto b = target({{"R", {c("a"), nd("p")}}, {"R", {nd("p"), ns("q")}}});
  const auto d = target({{"R", {c("a"), nd("p")}}, {"R", {nd("p"), nd("p")}}});
  EXPECT_TRUE(isomorphic_up_to_nulls(a, b));
  EXPECT_FALSE(isomorphic_up_to_nulls(a, d));
}

TEST(QueryInstance, FreezesVariablesAsNullD) {
  const auto d = instance_of_query(q("q(x) :- r(x, y), s(y, \"c\")."));
  EXPECT_EQ(d.instance.size(), 2u);
  EXPECT_EQ(d.instance.constants(), (std::set<Term>{c("c")}));
  ASSERT_EQ(d.head.size(), 1u);
  EXPECT_EQ(d.head[0].kind, TermKind::NullD);
  for (const auto& n : d.instance.nulls()) EXPECT_EQ(n.kind, TermKind::NullD);
}

TEST(EvaluateProperty, AgreesWithBruteForce) {
  Rng rng(11);
  Vocabulary vocab;
  vocab.preds = {{"r", 2}, {"s", 1}, {"t", 3}};
  const std::vector<Term> dom{c("a"), c("b"), c("c")};
  for (int i = 0; i < 300; ++i) {
    const auto db = random_instance(rng, vocab, rng.between(0, 8), dom);
    const auto cq = random_cq(rng, vocab, rng.between(1, 3), 4, rng.between(0, 2), dom, 0.1);
    ASSERT_EQ(evaluate_cq(cq, db), brute_evaluate(cq, db)) << to_string(cq) << "\n" << to_string(db);
  }
}

TEST(EvaluateProperty, MonotoneUnderInsertion) {
  Rng rng(12);
  Vocabulary vocab;
  vocab.preds = {{"r", 2}, {"s", 1}};
  const std::vector<Term> dom{c("a"), c("b"), c("c")};
  for (int i = 0; i < 200; ++i) {
    auto db = random_instance(rng, vocab, rng.between(0, 5), dom);
    const auto cq = random_cq(rng, vocab, rng.between(1, 3), 3, rng.between(0, 2));
    const auto before = evaluate_cq(cq, db);
    const auto extra = random_instance(rng, vocab, 2, dom);
    for (const auto& a : extra.atoms()) db.insert(a);
    const auto after = evaluate_cq(cq, db);
    ASSERT_TRUE(std::includes(after.begin(), after.end(), before.begin(), before.end())) << to_string(cq);
  }
}

TEST(EvaluateProperty, ValuationCommutesOnGroundAnswers) {
  // Answers over D that are free of nulls remain answers over v(D).
  Rng rng(13);
  Vocabulary vocab;
  vocab.preds = {{"r", 2}, {"s", 1}};
  const std::vector<Term> dom{c("a"), c("b"), nd("x"), nd("y")};
  for (int i = 0; i < 200; ++i) {
    const auto db = random_instance(rng, vocab, rng.between(1, 5), dom);
    const auto cq = random_cq(rng, vocab, rng.between(1, 2), 3, 1);
    std::map<Term, Term> m;
    for (const auto& n : db.nulls()) m[n] = rng.chance(0.5) ? c("a") : c("k");
    const Valuation val(m);
    const auto image = val.apply(db);
    for (const auto& t : evaluate_cq(cq, db)) ASSERT_TRUE(evaluate_cq(cq, image).count(val.apply(t)));
  }
}
