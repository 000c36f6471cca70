#include <gtest/gtest.h>

#include "lift_oracle.hpp"
#include "qlc/classify.hpp"

using namespace qlc;

namespace {

// A row of signs, written in chosen bit positions of the Gamma layout.
F2Vec signs(std::initializer_list<int> values, std::initializer_list<int> bits) {
  F2Vec v = 0;
  auto b = bits.begin();
  for (int x : values) {
    if (x < 0) v |= F2Vec{1} << *b;
    ++b;
  }
  return v;
}

F2Vec first_labeled(const std::vector<GeneratorImage>& imgs, const std::string& label) {
  for (const auto& im : imgs)
    if (im.label == label) return im.vector;
  ADD_FAILURE() << "no generator " << label;
  return 0;
}

}  // namespace

TEST(MM, LocalBits) {
  EXPECT_EQ(GammaLayout::local_bits(3, -1, 1), 1u);
  EXPECT_EQ(GammaLayout::local_bits(3, 1, 2), 2u);
  EXPECT_EQ(GammaLayout::local_bits(2, 1, 7), 2u);
  EXPECT_EQ(GammaLayout::local_bits(2, 1, 5), 4u);
  EXPECT_EQ(GammaLayout::local_bits(2, -1, 3), 7u);
  EXPECT_THROW(GammaLayout::local_bits(2, 1, 2), MMError);
}

TEST(MM, RegularWhenUnimodularPartIsLarge) {
  const auto d = mm_data(transcendental_genus(parse_set("A4+A2")));
  EXPECT_TRUE(d.irregular_primes().empty());
  EXPECT_EQ(d.e.order(), 1);
  EXPECT_EQ(d.e_plus.order(), 1);
}

// 2A4+2A3+2A2: rows over Gamma_{5,0} x Gamma_{3,0} x Gamma'_{2,0}. Our layout
// keeps the full Gamma_{2,0}; its last bit spans Gamma_{2,2} and is dropped.
TEST(MM, NineRowMatrix) {
  const SingularitySet s = parse_set("2A4+2A3+2A2");
  const MMData d = mm_data(transcendental_genus(s));
  ASSERT_EQ(d.layout.primes(), (std::vector<i64>{2, 3, 5}));
  const int o2 = d.layout.offset(2), o3 = d.layout.offset(3), o5 = d.layout.offset(5);
  const std::initializer_list<int> cols = {o5, o5 + 1, o3, o3 + 1, o2, o2 + 1};
  auto project = [&](F2Vec v) { return v & ~(F2Vec{1} << (o2 + 2)); };

  const auto imgs = generator_images(s, d);
  const std::vector<std::pair<F2Vec, F2Vec>> rows = {
      {d.layout.at(5, d.sigma_at(5).gens.at(0)), signs({-1, -1, 1, 1, 1, 1}, cols)},
      {d.layout.at(3, d.sigma_at(3).gens.at(0)), signs({1, 1, -1, 1, 1, 1}, cols)},
      {d.layout.global(-1, 1), signs({-1, 1, -1, 1, -1, 1}, cols)},
      {d.layout.global(1, -1), signs({1, 1, 1, -1, 1, -1}, cols)},
      {first_labeled(imgs, "sym(A4)"), signs({-1, -1, 1, -1, 1, 1}, cols)},
      {first_labeled(imgs, "swap(A4,A4)"), signs({-1, 1, 1, -1, 1, 1}, cols)},
      {first_labeled(imgs, "sym(A2)"), signs({1, -1, -1, 1, 1, -1}, cols)},
      {first_labeled(imgs, "swap(A2,A2)"), signs({1, -1, -1, -1, 1, -1}, cols)},
  };
  std::vector<F2Vec> ours, expected;
  for (const auto& [v, want] : rows) {
    EXPECT_EQ(project(v), want) << d.layout.str(v);
    ours.push_back(project(v));
    expected.push_back(want);
  }
  // Sigma#_2 lies in Gamma_{2,2}
  for (F2Vec g : d.sigma_at(2).gens) EXPECT_EQ(project(d.layout.at(2, g)), 0u);
  ours.push_back(0);
  expected.push_back(0);
  EXPECT_EQ(ours.size(), 9u);
  EXPECT_EQ(f2_rank(expected), 6);
  EXPECT_EQ(f2_rank(ours), 6);
  EXPECT_EQ(d.sigma_at(5).gens.size(), 1u);
  EXPECT_EQ(d.sigma_at(3).gens.size(), 1u);
}

// 2A7+2A2: E+ rows over Gamma_{3,0} x Gamma_{2,0}.
TEST(MM, EPlusMatrixOfTwoA7TwoA2) {
  const SingularitySet s = parse_set("2A7+2A2");
  const MMData d = mm_data(transcendental_genus(s));
  ASSERT_EQ(d.layout.primes(), (std::vector<i64>{2, 3}));
  const int o2 = d.layout.offset(2), o3 = d.layout.offset(3);
  const std::initializer_list<int> cols = {o3, o3 + 1, o2, o2 + 1, o2 + 2};
  const auto imgs = generator_images(s, d);

  EXPECT_TRUE(d.sigma_at(2).gens.empty());
  EXPECT_FALSE(d.sigma_at(2).contains_gamma22());
  EXPECT_EQ(d.layout.global(-1, -1), signs({-1, -1, -1, -1, 1}, cols));
  EXPECT_EQ(first_labeled(imgs, "sym(A2)"), signs({-1, 1, 1, -1, -1}, cols));
  EXPECT_EQ(first_labeled(imgs, "swap(A2,A2)"), signs({-1, -1, 1, -1, -1}, cols));
  EXPECT_EQ(first_labeled(imgs, "sym(A7)"), signs({1, 1, -1, -1, 1}, cols));
  EXPECT_EQ(first_labeled(imgs, "swap(A7,A7)"), signs({1, -1, -1, -1, 1}, cols));
  // The 3-adic data coincide with those of 2A4+2A3+2A2, so Sigma#_3 is (-1,1)
  // here too; a (-1,-1) row gives the same rank.
  ASSERT_EQ(d.sigma_at(3).gens.size(), 1u);
  EXPECT_EQ(d.layout.at(3, d.sigma_at(3).gens[0]), signs({-1, 1, 1, 1, 1}, cols));

  std::vector<F2Vec> rows{d.layout.at(3, d.sigma_at(3).gens[0]), d.layout.global(-1, -1)};
  for (const char* l : {"sym(A2)", "swap(A2,A2)", "sym(A7)", "swap(A7,A7)"}) rows.push_back(first_labeled(imgs, l));
  EXPECT_EQ(d.layout.dim(), 5);
  EXPECT_EQ(f2_rank(rows), 4);
  rows[0] = signs({-1, -1, 1, 1, 1}, cols);
  EXPECT_EQ(f2_rank(rows), 4);

  std::vector<F2Vec> gens;
  for (const auto& im : imgs) gens.push_back(im.vector);
  EXPECT_TRUE(d.e.spanned_by(gens));
  EXPECT_FALSE(d.e_plus.spanned_by(gens));
}

TEST(MM, TwoA6TwoA3) {
  const auto r = classify_set(parse_set("2A6+2A3"));
  EXPECT_EQ(r.e_order, 2);
  EXPECT_EQ(r.e_plus_order, 4);
  EXPECT_EQ(r.irregular_primes, (std::vector<i64>{2, 7}));
  EXPECT_TRUE(r.d_perp_surjective);
  EXPECT_FALSE(r.symmetric);
}

TEST(MM, OrderFormulaAndLemmaOverCensus) {
  int checked = 0;
  for (const auto& s : enumerate_sets(18)) {
    const GenusDescriptor g = transcendental_genus(s);
    if (!exists_even_lattice(g)) continue;
    const MMData d = mm_data(g);
    ASSERT_EQ(d.e.order(), e_order_by_index(d)) << format_set(s);
    const i64 ratio = d.e_plus.order() / d.e.order();
    ASSERT_TRUE(ratio == 1 || ratio == 2) << format_set(s);
    const auto r = classify_set(s);
    ASSERT_TRUE(r.lemma_agrees) << format_set(s);
    checked += r.lemma_checked;
  }
  EXPECT_GT(checked, 2000);
}

// Independent check of which generators act trivially on E(T): build a
// lattice in the genus, close the action of its small isometries and
// reflections on the discriminant, and compare.
class LiftOracleTest : public ::testing::TestWithParam<std::string> {};

TEST_P(LiftOracleTest, MatchesGeneratorImages) {
  const SingularitySet s = parse_set(GetParam());
  const GenusDescriptor g = transcendental_genus(s);
  ASSERT_EQ(g.rank(), 3);
  const MMData d = mm_data(g);
  const oracle::LiftOracle lo(g.form, 12, 3, 12);
  ASSERT_TRUE(lo.found_lattice());
  const i64 aut = static_cast<i64>(g.form.aut_group().size());
  // the oracle image is a subgroup of the true image, of index |E| in Aut
  EXPECT_EQ(aut / lo.image_order(), d.e.order());
  const auto imgs = generator_images(s, d);
  const auto maps = polarized_generator_maps(s, g.form);
  ASSERT_EQ(imgs.size(), maps.size());
  for (std::size_t k = 0; k < imgs.size(); ++k)
    EXPECT_EQ(lo.lifts(maps[k]), d.e.reduce(imgs[k].vector) == 0) << imgs[k].label;
}

INSTANTIATE_TEST_SUITE_P(OrderTwo, LiftOracleTest,
                         ::testing::Values("E8+2A3+2A2", "2E6+2A3", "D11+A3+2A2", "2D7+2A2", "2D5+2A4",
                                           "D5+A6+A3+2A2", "A7+A4+A3+2A2", "2A6+2A3", "2A6+3A2"));
INSTANTIATE_TEST_SUITE_P(OtherTwoPrime, LiftOracleTest,
                         ::testing::Values("D7+A4+A3+2A2", "D7+A7+2A2", "E6+2D5+A2", "2E6+D4+A2", "D12+3A2",
                                           "E8+D4+3A2"));
INSTANTIATE_TEST_SUITE_P(OrderFour, LiftOracleTest,
                         ::testing::Values("D9+A3+3A2", "D7+D5+3A2", "A11+A3+2A2", "A8+2A3+2A2"));
