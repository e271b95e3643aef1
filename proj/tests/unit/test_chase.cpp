#include <gtest/gtest.h>

#include "testkit.hpp"

using namespace testkit;

namespace {

std::vector<StTgd> mapping_of(const std::string& text) {
  return parse_spec("[source]\nr1/2. r2/1. r3/2.\n[tbox]\n[mapping]\n" + text).spec.mapping;
}

std::vector<Egd> funct_egds(const std::string& tbox) {
  return egds_of_negated_ucq(build_qsat(parse_tbox(tbox)).with_inequality);
}

}  // namespace

TEST(ChaseTgds, InventsOneNullPerTrigger) {
  const auto m = mapping_of("r1(x, y) -> G(x, y). r2(x) -> G(x, y).");
  const auto j = chase_tgds(facts("r1(a,b). r2(c)."), m);
  EXPECT_EQ(j, target({{"G", {c("a"), c("b")}}, {"G", {c("c"), ns("s1")}}}));
  EXPECT_EQ(j.tag(), SchemaTag::Target);
}

TEST(ChaseTgds, ObliviousFiresEveryHomomorphism) {
  const auto m = mapping_of("r1(x, y) -> G(x, w).");
  const auto j = chase_tgds(facts("r1(a,b). r1(a,c)."), m);
  EXPECT_EQ(j.size(), 2u);
  EXPECT_EQ(j.nulls().size(), 2u);
}

TEST(ChaseTgds, NullLabelsAvoidConstants) {
  const auto m = mapping_of("r2(x) -> G(x, y).");
  const auto j = chase_tgds(facts("r2(s1)."), m);
  EXPECT_EQ(j, target({{"G", {c("s1"), ns("s2")}}}));
}

TEST(ChaseTgds, TraceLines) {
  const auto m = mapping_of("r1(x, y) -> G(x, y). r2(x) -> G(x, y).");
  ChaseTrace trace;
  chase_tgds(facts("r1(a,b). r2(c)."), m, &trace);
  ASSERT_EQ(trace.size(), 2u);
  EXPECT_EQ(trace[0], "STEP 1 TGD 1 {x->a, y->b}");
  EXPECT_EQ(trace[1].rfind("STEP 2 TGD 2 {x->c", 0), 0u);
}

TEST(ChaseEgds, PsiIllustration) {
  const std::vector<Egd> eq{{{Atom{"E", {v("u"), v("v")}}}, v("u"), v("v")}};
  const auto j = target({{"E", {nd("x"), nd("y")}}, {"E", {nd("w"), nd("z")}}, {"E", {nd("w"), c("a")}}});
  const auto res = chase_egds(j, eq);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->psi.apply(Tuple{nd("x"), nd("y"), nd("z"), nd("w")}), (Tuple{nd("x"), nd("x"), c("a"), c("a")}));
  EXPECT_EQ(res->instance, target({{"E", {nd("x"), nd("x")}}, {"E", {c("a"), c("a")}}}));
}

TEST(ChaseEgds, ConstantClashFails) {
  const std::vector<Egd> eq{{{Atom{"E", {v("u"), v("v")}}}, v("u"), v("v")}};
  EXPECT_FALSE(chase_egds(target({{"E", {c("a"), c("b")}}}), eq).has_value());
}

TEST(ChaseEgds, PriorityKeepsNullDOverNullSigma) {
  const auto egds = funct_egds("funct R.");
  const auto res = chase_egds(target({{"R", {nd("x"), ns("s1")}}, {"R", {nd("x"), nd("y")}}, {"A", {ns("s1")}}}), egds);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->instance, target({{"R", {nd("x"), nd("y")}}, {"A", {nd("y")}}}));
  EXPECT_TRUE(res->psi.empty());
}

TEST(ChaseEgds, PsiOnlyMentionsNullD) {
  const auto egds = funct_egds("funct R.");
  const auto res = chase_egds(target({{"R", {nd("x"), nd("y")}}, {"R", {nd("x"), c("a")}}, {"R", {nd("x"), ns("s")}}}), egds);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->psi.map(), (std::map<Term, Term>{{nd("y"), c("a")}}));
}

TEST(ChaseEgds, TraceUsesContinuedStepNumbers) {
  const auto egds = funct_egds("funct R.");
  ChaseTrace trace;
  EgdChaseOptions opts;
  opts.trace = &trace;
  opts.first_step = 5;
  chase_egds(target({{"R", {nd("x"), nd("y")}}, {"R", {nd("x"), nd("z")}}}), egds, opts);
  ASSERT_EQ(trace.size(), 1u);
  EXPECT_EQ(trace[0].rfind("STEP 5 EGD", 0), 0u);
}

TEST(TermUnifier, RepresentativeIsPriorityMinimal) {
  TermUnifier u;
  EXPECT_TRUE(u.equate(ns("s2"), ns("s1")));
  EXPECT_TRUE(u.equate(ns("s2"), nd("d9")));
  EXPECT_EQ(u.find(ns("s1")), nd("d9"));
  EXPECT_TRUE(u.equate(nd("d1"), ns("s1")));
  EXPECT_EQ(u.find(ns("s2")), nd("d1"));
  EXPECT_TRUE(u.equate(c("a"), nd("d9")));
  EXPECT_EQ(u.find(ns("s2")), c("a"));
  EXPECT_FALSE(u.equate(c("b"), ns("s1")));
  EXPECT_EQ(u.psi().map(), (std::map<Term, Term>{{nd("d1"), c("a")}, {nd("d9"), c("a")}}));
}

TEST(Freeze, NullsBecomeConstants) {
  EXPECT_EQ(freeze(target({{"R", {nd("x"), ns("y")}}})), target({{"R", {c("x"), c("y")}}}));
}

TEST(AboxOf, ChaseThenFreeze) {
  const auto spec = parse_spec(
                        "[source]\nr/2.\n[tbox]\nfunct G.\n[mapping]\n"
                        "r(x, y) -> G(x, y).\nr(x, y) -> G(x, w).\n")
                        .spec;
  const auto src = Instance(SchemaTag::Source, {{"r", {nd("d1"), nd("d2")}}});
  const auto res = abox_of(src, spec.mapping, spec.tbox);
  ASSERT_TRUE(res.abox);
  EXPECT_EQ(*res.abox, target({{"G", {c("d1"), c("d2")}}}));
  EXPECT_TRUE(res.psi.empty());

  const auto clash = abox_of(facts("r(a,b). r(a,c)."), spec.mapping, spec.tbox);
  EXPECT_FALSE(clash.abox.has_value());
}

TEST(ChaseProperty, TgdChaseSizeBound) {
  Rng rng(31);
  const std::vector<Term> dom{c("a"), c("b"), c("c")};
  for (int i = 0; i < 100; ++i) {
    const auto spec = random_spec(rng);
    Vocabulary src;
    src.preds = spec.source;
    const auto db = random_instance(rng, src, rng.between(0, 5), dom);
    std::size_t bound = 0;
    for (const auto& tgd : spec.mapping) {
      std::size_t triggers = 0;
      for_each_homomorphism(tgd.body, db, {}, {}, [&](const Assignment&) {
        ++triggers;
        return true;
      });
      bound += triggers * tgd.head.size();
    }
    const auto j = chase_tgds(db, spec.mapping);
    ASSERT_LE(j.size(), bound);
    for (const auto& n : j.nulls()) ASSERT_EQ(n.kind, TermKind::NullSigma);
    // Constants come from the source or from the mapping.
    for (const auto& t : j.constants()) ASSERT_TRUE(db.constants().count(t) || spec.constants().count(t));
  }
}

TEST(ChaseProperty, EgdChaseIsOrderIndependent) {
  Rng rng(32);
  Vocabulary vocab;
  vocab.preds = {{"R", 2}, {"S", 2}, {"T", 1}};
  const std::vector<Term> dom{c("a"), c("b"), nd("d1"), nd("d2"), nd("d3"), ns("s1"), ns("s2")};
  for (int i = 0; i < 200; ++i) {
    const auto j = random_instance(rng, vocab, rng.between(1, 7), dom, SchemaTag::Target);
    const auto egds = egds_of_negated_ucq(build_qsat(random_tbox(rng, {"T"}, {"R", "S"}, 3)).with_inequality);
    const auto base = chase_egds(j, egds);
    EgdChaseOptions o;
    o.shuffle_seed = rng.engine()();
    const auto other = chase_egds(j, egds, o);
    ASSERT_EQ(base.has_value(), other.has_value());
    if (!base) continue;
    ASSERT_EQ(base->instance, other->instance);
    ASSERT_EQ(base->psi, other->psi);
  }
}

TEST(ChaseProperty, PsiIsIdempotentOverNullD) {
  Rng rng(33);
  Vocabulary vocab;
  vocab.preds = {{"R", 2}, {"T", 1}};
  const std::vector<Term> dom{c("a"), c("b"), nd("d1"), nd("d2"), nd("d3"), ns("s1"), ns("s2")};
  for (int i = 0; i < 200; ++i) {
    const auto j = random_instance(rng, vocab, rng.between(1, 7), dom, SchemaTag::Target);
    const std::string tbox = rng.chance(0.5) ? "funct R." : "funct inv(R).";
    const auto res = chase_egds(j, funct_egds(tbox));
    if (!res) continue;
    ASSERT_TRUE(res->psi.is_idempotent());
    for (const auto& [from, to] : res->psi.map()) {
      ASSERT_EQ(from.kind, TermKind::NullD);
      ASSERT_NE(to.kind, TermKind::NullSigma);
    }
    // Constants survive, and the result satisfies the dependency it was chased with.
    ASSERT_EQ(res->instance.constants(), j.constants());
    ASSERT_TRUE(kb_satisfiable(parse_tbox(tbox), freeze(res->instance)));
  }
}
