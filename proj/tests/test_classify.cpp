#include <gtest/gtest.h>

#include "qlc/classify.hpp"

using namespace qlc;

TEST(Classify, SmallExamples) {
  const auto d18 = classify_set(parse_set("D18"));
  EXPECT_TRUE(d18.realizable);
  EXPECT_EQ(d18.real_components, 1);
  EXPECT_EQ(d18.complex_pairs, 0);

  const auto a6 = classify_set(parse_set("3A6"));
  EXPECT_TRUE(a6.realizable);
  EXPECT_EQ(a6.real_components, 0);
  EXPECT_EQ(a6.complex_pairs, 1);

  const auto worked = classify_set(parse_set("2A4+2A3+2A2"));
  EXPECT_TRUE(worked.d_perp_surjective);
  EXPECT_EQ(worked.irregular_primes, (std::vector<i64>{2, 3, 5}));

  const auto smooth = classify_set(SingularitySet{});
  EXPECT_TRUE(smooth.realizable);
  EXPECT_EQ(smooth.e_order, 1);
  EXPECT_THROW(classify_set(parse_set("A19")), std::invalid_argument);
}

TEST(Classify, OrderFourSets) {
  for (const char* text : {"D9+A3+3A2", "D7+D5+3A2", "A11+A3+2A2", "A8+2A3+2A2"}) {
    const auto r = classify_set(parse_set(text));
    EXPECT_EQ(r.e_order, 4) << text;
    EXPECT_EQ(r.e_bucket, "order-4") << text;
  }
}

TEST(Classify, LabelsGenerate) {
  const auto r = classify_set(parse_set("2A6+2A3"));
  EXPECT_TRUE(labels_generate(r, {"sym(A6)"}, false));
  EXPECT_FALSE(labels_generate(r, {"sym(A3)"}, false));
  EXPECT_FALSE(labels_generate(r, {"sym(A6)", "swap(A6,A6)"}, true));
  EXPECT_FALSE(labels_generate(r, {"sym(E8)"}, false));
}

TEST(Classify, InvariantsOverCensus) {
  for (const auto& s : enumerate_sets(18)) {
    const auto r = classify_set(s);
    const std::string name = format_set(s);
    if (!r.realizable) {
      EXPECT_TRUE(r.generators.empty()) << name;
      continue;
    }
    ASSERT_EQ(r.real_components + 2 * r.complex_pairs, r.symmetric ? 1 : 2) << name;
    EXPECT_LE(r.e_order, r.e_plus_order) << name;
    EXPECT_EQ(r.e_order == 1, r.e_bucket == "trivial") << name;
    EXPECT_EQ(r.e_order == r.e_plus_order, r.e_plus_bucket == "equal") << name;
    if (r.irregular_primes.empty()) EXPECT_EQ(r.e_order, 1) << name;
    if (r.e_order == r.e_plus_order) EXPECT_TRUE(r.symmetric) << name;
    for (const auto& g : r.generators) {
      EXPECT_LT(g.e, F2Vec{1} << 20) << name;
      if (g.e_plus == 0) EXPECT_EQ(g.e, 0u) << name << " " << g.label;
    }
  }
}
