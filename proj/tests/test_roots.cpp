#include <gtest/gtest.h>

#include <map>
#include <set>

#include "qlc/roots.hpp"

using namespace qlc;

namespace {

std::vector<RootType> all_types(int max_rank) {
  std::vector<RootType> out;
  for (int n = 1; n <= max_rank; ++n) {
    out.push_back({'A', n});
    if (n >= 4) out.push_back({'D', n});
    if (n >= 6 && n <= 8) out.push_back({'E', n});
  }
  return out;
}

// Number of nonempty multisets of root types with total rank <= mu, by the
// product formula prod_t 1/(1 - x^rank(t)).
std::size_t multiset_count(int mu) {
  std::vector<std::size_t> coef(mu + 1, 0);
  coef[0] = 1;
  for (const auto& t : all_types(mu))
    for (int m = t.rank(); m <= mu; ++m) coef[m] += coef[m - t.rank()];
  std::size_t total = 0;
  for (int m = 1; m <= mu; ++m) total += coef[m];
  return total;
}

// Induced subgraphs of a path on n vertices: sets of A_k with sum (k + 1) <= n + 1.
std::set<SingularitySet> chain_pieces(int n) {
  std::set<SingularitySet> out;
  std::vector<RootType> cur;
  auto rec = [&](auto&& self, int max_k, int budget) -> void {
    if (!cur.empty()) out.insert(SingularitySet(cur));
    for (int k = std::min(max_k, budget - 1); k >= 1; --k) {
      cur.push_back({'A', k});
      self(self, k, budget - k - 1);
      cur.pop_back();
    }
  };
  rec(rec, n, n + 1);
  return out;
}

}  // namespace

TEST(Roots, VanDerBlijOnAllComponents) {
  for (const auto& t : all_types(40)) EXPECT_EQ(disc_form(t).brown(), mod(-t.rank(), 8)) << t.str();
}

TEST(Roots, DiscriminantOrders) {
  for (const auto& t : all_types(30)) {
    const i64 want = t.family == 'A' ? t.index + 1 : t.family == 'D' ? 4 : 9 - t.index;
    EXPECT_EQ(disc_form(t).order(), want) << t.str();
  }
}

TEST(Roots, ParseAndFormat) {
  EXPECT_EQ(format_set(parse_set("A2 + 2A4+E6+A2")), "E6+2A4+2A2");
  EXPECT_EQ(parse_set("2D7+2A2").mu(), 18);
  for (const auto& s : enumerate_sets(8)) EXPECT_EQ(parse_set(format_set(s)).components(), s.components());
  for (const char* bad : {"A0", "D3", "E9", "2", "A", "A1++A2", "0A1", ""})
    EXPECT_THROW(parse_set(bad), ParseError) << bad;
}

TEST(Roots, EnumerationCounts) {
  EXPECT_EQ(enumerate_sets(1).size(), 1u);
  EXPECT_EQ(enumerate_sets(2).size(), 3u);
  for (int mu : {5, 10, 19}) {
    const auto sets = enumerate_sets(mu);
    EXPECT_EQ(sets.size(), multiset_count(mu)) << mu;
    std::set<SingularitySet> unique(sets.begin(), sets.end());
    EXPECT_EQ(unique.size(), sets.size());
  }
}

TEST(Roots, PerturbationsOfSmallDiagrams) {
  EXPECT_EQ(perturbations(parse_set("A2")), (std::set<SingularitySet>{parse_set("A2"), parse_set("A1")}));
  const auto d4 = perturbations(parse_set("D4"));
  EXPECT_TRUE(d4.count(parse_set("3A1")));
  EXPECT_TRUE(d4.count(parse_set("A3")));
  EXPECT_FALSE(d4.count(parse_set("4A1")));
  const auto e6 = perturbations(parse_set("E6"));
  EXPECT_TRUE(e6.count(parse_set("D5")));
  EXPECT_TRUE(e6.count(parse_set("A5")));
  EXPECT_TRUE(e6.count(parse_set("2A2+A1")));
  EXPECT_FALSE(e6.count(parse_set("D4+A1")));
}

TEST(Roots, PerturbationsOfChains) {
  for (int n = 1; n <= 10; ++n) EXPECT_EQ(perturbations(SingularitySet({{'A', n}})), chain_pieces(n)) << n;
}

TEST(Roots, PerturbationIsTransitive) {
  for (const char* text : {"E7+A2", "D6+A3", "E8"}) {
    const auto top = perturbations(parse_set(text));
    for (const auto& s : top) {
      EXPECT_LE(s.mu(), parse_set(text).mu());
      for (const auto& t : perturbations(s)) EXPECT_TRUE(top.count(t)) << text << " " << format_set(t);
    }
  }
}

TEST(Roots, GeneratorsAreAutomorphisms) {
  for (const auto& s : enumerate_sets(9)) {
    const Fqf f = disc_form(s);
    if (f.order() > 5000) continue;
    for (const auto& g : osg_images(s))
      for (const auto& x : f.elements()) ASSERT_EQ(f.value(f.apply(g.map, x, f)), f.value(x)) << g.label;
  }
}

TEST(Roots, SymmetryOfCyclicComponentIsMinusOne) {
  const SingularitySet s = parse_set("A4+A2+D5");
  const SetDisc sd = set_disc(s);
  for (const auto& g : osg_images(s)) {
    if (g.kind != DiscGenerator::Kind::Symmetry) continue;
    const auto& coords = sd.coords[g.components[0]];
    for (int i = 0; i < sd.form.num_generators(); ++i) {
      FqfElement want = sd.form.generator(i);
      if (std::find(coords.begin(), coords.end(), i) != coords.end()) want = sd.form.scale(-1, want);
      EXPECT_EQ(g.map.images[i], want) << g.label;
    }
  }
}

TEST(Roots, GeneratorSets) {
  EXPECT_TRUE(osg_images(parse_set("E8")).empty());
  const auto two_a1 = osg_images(parse_set("2A1"));
  ASSERT_EQ(two_a1.size(), 1u);
  EXPECT_EQ(two_a1[0].kind, DiscGenerator::Kind::Transposition);
  EXPECT_EQ(osg_images(parse_set("D4")).size(), 2u);
  EXPECT_EQ(osg_images(parse_set("2A3+E7")).size(), 3u);
}
