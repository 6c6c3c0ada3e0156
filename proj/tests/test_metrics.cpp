#include <gtest/gtest.h>

#include "srseq/metrics.hpp"
#include "srseq/report.hpp"
#include "srseq/treebank_io.hpp"
#include "support/fixtures.hpp"
#include "support/random_trees.hpp"

using namespace srseq;

namespace {

std::vector<ConstituentTree> one(const std::string& text) { return {parse_tree(text, TreeFormat::Auto)}; }

}  // namespace

TEST(Metrics, HandCountedHalfMatch) {
  EvalOptions opt;
  opt.ignore_root = true;
  const auto s = f1(one("(S (NP a) (VP b))"), one("(S (NP a) (NP b))"), opt);
  EXPECT_DOUBLE_EQ(s.precision, 50.0);
  EXPECT_DOUBLE_EQ(s.recall, 50.0);
  EXPECT_DOUBLE_EQ(s.f1, 50.0);
  EXPECT_EQ(s.totals.gold, 2u);
  EXPECT_EQ(s.totals.matched, 1u);
}

TEST(Metrics, GoldAgainstItselfOnEveryFixture) {
  for (const char* name : {"german.disc", "toy20.disc", "one_tree.disc", "continuous.mrg"}) {
    const auto trees = test_support::load_fixture(name).trees;
    for (bool punct : {false, true}) {
      EvalOptions opt;
      opt.ignore_punctuation = punct;
      EXPECT_DOUBLE_EQ(f1(trees, trees, opt).f1, 100.0) << name;
      EXPECT_DOUBLE_EQ(disc_f1(trees, trees, opt).f1, 100.0) << name;
    }
    EXPECT_DOUBLE_EQ(exact_match(trees, trees), 1.0);
  }
}

TEST(Metrics, DiscontinuousF1) {
  const auto gold = std::vector<ConstituentTree>{test_support::german_example()};
  const auto pred = one("(S 0=Allerdings 1=wird (PP 2=in 3=bestimmten 4=Vierteln) 5=Wasser (PP 6=aus 7=Tankwagen) 8=verteilt)");
  const auto d = disc_f1(gold, pred);
  EXPECT_DOUBLE_EQ(d.f1, 0.0);
  EXPECT_EQ(d.totals.gold, 1u);
  EXPECT_EQ(d.totals.predicted, 0u);
  EXPECT_FALSE(d.zero_denominator);

  const auto cont = test_support::load_fixture("continuous.mrg").trees;
  const auto z = disc_f1(cont, cont);
  EXPECT_TRUE(z.zero_denominator);
  EXPECT_DOUBLE_EQ(z.f1, 100.0);
  EvalOptions zero;
  zero.zero_denominator = ZeroDenominator::Zero;
  EXPECT_DOUBLE_EQ(disc_f1(cont, cont, zero).f1, 0.0);
}

TEST(Metrics, EmptyPredictionHasZeroRecall) {
  // A flat prediction with only the root, scored without the root.
  EvalOptions opt;
  opt.ignore_root = true;
  const auto s = f1(one("(S (NP a) (VP b))"), one("(S a b)"), opt);
  EXPECT_DOUBLE_EQ(s.recall, 0.0);
  EXPECT_DOUBLE_EQ(s.f1, 0.0);
}

TEST(Metrics, PunctuationIsRemovedAndPositionsRenumbered) {
  EvalOptions opt;
  opt.ignore_punctuation = true;
  // Attaching the final period differently does not matter once it is removed.
  const auto gold = one("(S (NP a) (VP b) .)");
  const auto pred = one("(S (NP a) (VP b .))");
  EXPECT_LT(f1(gold, pred).f1, 100.0);
  EXPECT_DOUBLE_EQ(f1(gold, pred, opt).f1, 100.0);
  // A comma between the two parts of a constituent closes the gap.
  const auto gapped = one("(S (X 0=a 2=b) 1=,)");
  EXPECT_EQ(disc_f1(gapped, gapped).totals.gold, 1u);
  EXPECT_TRUE(disc_f1(gapped, gapped, opt).zero_denominator);
}

TEST(Metrics, PunctuationOnlyConstituentsDoNotChangeScores) {
  EvalOptions opt;
  opt.ignore_punctuation = true;
  const auto gold = one("(S (NP a) (VP b) .)");
  const auto with = one("(S (NP a) (NP b) (P .))");
  const auto without = one("(S (NP a) (NP b) .)");
  EXPECT_DOUBLE_EQ(f1(gold, with, opt).f1, f1(gold, without, opt).f1);
}

TEST(Metrics, MultisetMatchingNeedsOnePartnerPerItem) {
  const auto gold = one("(S (NP (NP a)) b)");
  const auto pred = one("(S (NP a) b)");
  const auto s = f1(gold, pred);
  EXPECT_EQ(s.totals.gold, 3u);
  EXPECT_EQ(s.totals.predicted, 2u);
  EXPECT_EQ(s.totals.matched, 2u);
}

TEST(Metrics, ExactMatchAndErrors) {
  const auto a = parse_bracketed("(S a b)");
  const auto b = parse_bracketed("(S (X a) b)");
  EXPECT_DOUBLE_EQ(exact_match({a, b}, {a, a}), 0.5);
  EXPECT_DOUBLE_EQ(exact_match({a}, {b}), 0.0);
  EXPECT_THROW(f1({a}, {}), EvalError);
  EXPECT_THROW(f1({a}, {parse_bracketed("(S a c)")}), EvalError);
  EXPECT_THROW(exact_match({a}, {}), EvalError);
}

TEST(MetricsProperty, PrecisionAndRecallSwapWithArguments) {
  test_support::TreeGenerator gen(7);
  for (int i = 0; i < 200; ++i) {
    auto g = gen.any(10);
    auto p = gen.discontinuous(static_cast<int>(g.size()));
    p = ConstituentTree(g.words(), p.root());
    const auto gp = f1({g}, {p});
    const auto pg = f1({p}, {g});
    EXPECT_DOUBLE_EQ(gp.precision, pg.recall);
    EXPECT_DOUBLE_EQ(gp.recall, pg.precision);
  }
}

TEST(Report, TextAndJsonAgreeWithScores) {
  EvalOptions opt;
  opt.ignore_root = true;
  const auto r = evaluate(one("(S (NP a) (VP b))"), one("(S (NP a) (NP b))"), opt);
  const std::string text = format_report(r);
  EXPECT_NE(text.find("labeled               2       2       1   50.00   50.00   50.00"), std::string::npos) << text;
  EXPECT_NE(text.find("(no items)"), std::string::npos);  // neither tree has a discontinuous constituent
  const auto j = report_json(r);
  EXPECT_EQ(j["labeled"]["f1"], 50.0);
  EXPECT_EQ(j["discontinuous"]["zero_denominator"], true);
  EXPECT_EQ(j["per_sentence"][0]["matched"], 1);
  EXPECT_EQ(j["options"]["ignore_root"], true);
}
