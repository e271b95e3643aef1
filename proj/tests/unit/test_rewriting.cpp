#include <gtest/gtest.h>

#include "testkit.hpp"

using namespace testkit;

namespace {

SpecDocument fixture(const std::string& name) { return load_spec(std::string(OBDM_FIXTURES) + "/" + name); }

ObdmSpec spec_of(const std::string& text) { return parse_spec(text).spec; }

}  // namespace

TEST(FindComplete, Example2IsPerson) {
  const auto doc = fixture("example2.obdm");
  const auto out = find_optimal_complete(doc.spec, doc.query("qs"));
  EXPECT_TRUE(homomorphically_equivalent(out, q("q(x) :- Person(x).")));
  EXPECT_TRUE(check_complete(doc.spec, doc.query("qs"), out));
}

TEST(FindComplete, Example1KeepsOnlyTheSourceEdge) {
  const auto doc = fixture("example1.obdm");
  const auto out = find_optimal_complete(doc.spec, doc.query("qs"));
  EXPECT_TRUE(homomorphically_equivalent(out, doc.query("qg")));
}

TEST(FindComplete, FunctionalityMergesWitnesses) {
  const auto spec = spec_of(
      "[source]\nr/2. s/1.\n[tbox]\nfunct G.\n[mapping]\n"
      "r(x, y) -> G(x, y).\ns(x) -> G(x, w), A(w).\n");
  const auto out = find_optimal_complete(spec, q("q(x, y) :- r(x, y), s(x)."));
  EXPECT_TRUE(homomorphically_equivalent(out, q("q(x, y) :- G(x, y), A(y).")));
}

TEST(FindComplete, ConstantClashGivesBottom) {
  const auto spec = spec_of(
      "[source]\nr/2.\n[tbox]\nfunct G.\n[mapping]\n"
      "r(x, y) -> G(x, y).\n");
  const auto out = find_optimal_complete(spec, q("q() :- r(x, \"a\"), r(x, \"b\")."));
  EXPECT_EQ(out.form, QueryForm::Bottom);
  EXPECT_TRUE(check_complete(spec, q("q() :- r(x, \"a\"), r(x, \"b\")."), out));
}

TEST(FindComplete, InconsistentChaseGivesBottom) {
  const auto spec = spec_of("[source]\nr/1. s/1.\n[tbox]\nA disjoint B.\n[mapping]\nr(x) -> A(x).\ns(x) -> B(x).\n");
  EXPECT_EQ(find_optimal_complete(spec, q("q(x) :- r(x), s(x).")).form, QueryForm::Bottom);
  EXPECT_EQ(find_optimal_complete(spec, q("q(x) :- r(x), s(y).")).form, QueryForm::Normal);
}

TEST(FindComplete, NoMappedFactsGivesTop) {
  const auto spec = spec_of("[source]\nr/1. t/1.\n[tbox]\n[mapping]\nr(x) -> A(x).\n");
  const auto out = find_optimal_complete(spec, q("q(x) :- t(x)."));
  EXPECT_EQ(out.form, QueryForm::Top);
  EXPECT_TRUE(check_complete(spec, q("q(x) :- t(x)."), out));
  EXPECT_FALSE(check_complete(spec, q("q(x) :- t(x)."), q("q(x) :- A(x).")));
}

TEST(FindComplete, MinimizeDropsRedundantAtoms) {
  const auto spec = spec_of("[source]\nr/2.\n[tbox]\n[mapping]\nr(x, y) -> G(x, w).\n");
  const auto qs = q("q(x) :- r(x, y), r(x, z).");
  FindOptions opts;
  opts.minimize = true;
  const auto full = find_optimal_complete(spec, qs);
  const auto small = find_optimal_complete(spec, qs, opts);
  EXPECT_EQ(full.body.size(), 2u);
  EXPECT_EQ(small.body.size(), 1u);
  EXPECT_TRUE(equivalent_wrt(spec.tbox, full, small));
}

TEST(CheckComplete, Example2Recognition) {
  const auto doc = fixture("example2.obdm");
  const auto& qs = doc.query("qs");
  EXPECT_TRUE(check_complete(doc.spec, qs, doc.query("person")));
  EXPECT_FALSE(check_complete(doc.spec, qs, doc.query("bottomq")));
  EXPECT_TRUE(check_complete(doc.spec, qs, ConjunctiveQuery::top({v("x")})));
}

TEST(CheckComplete, TraceReportsReason) {
  const auto doc = fixture("example2.obdm");
  CompletenessTrace tr;
  check_complete(doc.spec, doc.query("qs"), doc.query("person"), &tr);
  EXPECT_EQ(tr.reason, CompletenessTrace::Reason::Entailed);
  ASSERT_TRUE(tr.abox);
  EXPECT_EQ(tr.abox->size(), 1u);
  check_complete(doc.spec, doc.query("qs"), doc.query("bottomq"), &tr);
  EXPECT_EQ(tr.reason, CompletenessTrace::Reason::NotEntailed);
}

TEST(CheckComplete, UsesTheOntology) {
  const auto doc = fixture("university.obdm");
  EXPECT_TRUE(check_complete(doc.spec, doc.query("qs"), doc.query("students")));
  EXPECT_TRUE(check_complete(doc.spec, doc.query("qs"), doc.query("takes_coded")));
  EXPECT_FALSE(check_complete(doc.spec, doc.query("qs"), q("q(s) :- Professor(s).")));
}

TEST(CheckComplete, RejectsMalformedQueries) {
  const auto doc = fixture("example2.obdm");
  EXPECT_THROW(check_complete(doc.spec, q("q(x) :- Person(x)."), doc.query("person")), Error);
  EXPECT_THROW(check_complete(doc.spec, doc.query("qs"), q("q(x) :- woman(x).")), Error);
  EXPECT_THROW(check_complete(doc.spec, doc.query("qs"), q("q(x, y) :- Person(x), Person(y).")), Error);
}

TEST(Containment, WithRespectToTBox) {
  const auto t = parse_tbox("A isa B. B isa exists R.");
  EXPECT_TRUE(contained_wrt(t, q("q(x) :- A(x)."), q("q(x) :- R(x, y).")));
  EXPECT_FALSE(contained_wrt(t, q("q(x) :- R(x, y)."), q("q(x) :- A(x).")));
  EXPECT_TRUE(proper_contained_wrt(t, q("q(x) :- A(x)."), q("q(x) :- B(x).")));
  EXPECT_TRUE(equivalent_wrt(TBox{}, q("q(x) :- R(x, y), R(x, z)."), q("q(x) :- R(x, y).")));
  EXPECT_TRUE(contained_wrt(t, ConjunctiveQuery::bottom({v("x")}), q("q(x) :- A(x).")));
  EXPECT_TRUE(contained_wrt(t, q("q(x) :- A(x)."), ConjunctiveQuery::top({v("x")})));
}

TEST(Containment, UnsatisfiableLeftSideIsEmpty) {
  const auto t = parse_tbox("A disjoint B. funct R.");
  EXPECT_TRUE(contained_wrt(t, q("q(x) :- A(x), B(x)."), q("q(x) :- R(x, x).")));
  EXPECT_TRUE(contained_wrt(t, q("q() :- R(\"a\", \"b\"), R(\"a\", \"c\")."), q("q() :- A(\"z\").")));
  // Functionality identifies the two fillers.
  EXPECT_TRUE(contained_wrt(t, q("q(y, z) :- R(x, y), R(x, z)."), q("q(y, y) :- R(x, y).")));
}

TEST(CertainAnswers, OverTheSpecification) {
  const auto doc = fixture("university.obdm");
  const auto db = load_db(std::string(OBDM_FIXTURES) + "/university.db");
  const auto got = certain_answers(doc.spec, db, doc.query("students"));
  const auto expected = certain_answers_kb(doc.spec.tbox, freeze(chase_tgds(db, doc.spec.mapping)), doc.query("students"));
  EXPECT_EQ(got, expected);
  EXPECT_FALSE(got.empty());
}

TEST(RewritingProperty, OptimalOutputIsCompleteAndBelowEveryCompleteQuery) {
  int compared = 0;
  for (const auto& t : corpus(41, 60)) {
    const auto out = find_optimal_complete(t.spec, t.qs);
    ASSERT_TRUE(check_complete(t.spec, t.qs, out)) << to_string(t.qs);
    if (check_complete(t.spec, t.qs, t.qg)) {
      ++compared;
      ASSERT_TRUE(contained_wrt(t.spec.tbox, out, t.qg)) << to_string(t.qs) << " vs " << to_string(t.qg);
    }
  }
  EXPECT_GT(compared, 10);
}

TEST(RewritingProperty, CompletenessIsUpwardClosed) {
  // Dropping a body atom of a complete rewriting keeps it complete.
  for (const auto& t : corpus(42, 60)) {
    const auto out = find_optimal_complete(t.spec, t.qs);
    if (out.form != QueryForm::Normal || out.body.size() < 2) continue;
    for (std::size_t i = 0; i < out.body.size(); ++i) {
      auto weaker = out;
      weaker.body.erase(weaker.body.begin() + static_cast<std::ptrdiff_t>(i));
      try {
        weaker.check_safe();
      } catch (const Error&) {
        continue;
      }
      ASSERT_TRUE(check_complete(t.spec, t.qs, weaker)) << to_string(weaker);
    }
  }
}

TEST(RewritingProperty, MinimizeKeepsEquivalence) {
  Rng rng(43);
  for (int i = 0; i < 200; ++i) {
    const auto cq = random_cq(rng, ontology_vocab(), rng.between(1, 5), 4, rng.between(0, 2));
    const auto m = minimize(cq);
    ASSERT_LE(m.body.size(), cq.body.size());
    ASSERT_TRUE(homomorphically_equivalent(cq, m)) << to_string(cq);
    ASSERT_EQ(minimize(m).body.size(), m.body.size());
  }
}
