#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "qlc/dataset.hpp"

using namespace qlc;

#ifndef QLC_DATA_DIR
#define QLC_DATA_DIR "data"
#endif

namespace {

std::string dump_all(const std::vector<ClassificationRecord>& rs) {
  std::string out;
  for (const auto& r : rs) out += to_json(r).dump() + "\n";
  return out;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("qlc-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

const std::filesystem::path kData = QLC_DATA_DIR;

}  // namespace

TEST(Dataset, JsonRoundTrip) {
  std::vector<ClassificationRecord> rs = run_all(7, 1);
  rs.push_back(classify_any(parse_set("2A6+2A3")));
  rs.push_back(classify_any(parse_set("E7+A12")));
  rs.push_back(classify_any(parse_set("A19")));
  for (const auto& r : rs) {
    const auto back = record_from_json(Json::parse(to_json(r).dump()));
    EXPECT_EQ(to_json(back).dump(), to_json(r).dump());
    EXPECT_EQ(back.lemma_checked, r.lemma_checked) << format_set(r.set);
  }
}

TEST(Dataset, CsvShape) {
  const auto commas = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  const auto header = commas(csv_header());
  for (const char* text : {"A1", "A19", "E7+A12", "2A6+2A3"})
    EXPECT_EQ(commas(to_csv(classify_any(parse_set(text)))), header) << text;
}

TEST(Dataset, ThreadCountDoesNotChangeOutput) {
  EXPECT_EQ(dump_all(run_all(12, 1)), dump_all(run_all(12, 4)));
}

TEST(Dataset, CacheRoundTrip) {
  const auto dir = scratch_dir("cache");
  EXPECT_TRUE(load_cache(dir).empty());
  RunStats cold;
  const auto first = run_all(9, 2, nullptr, &cold);
  EXPECT_EQ(cold.cached, 0);
  store_cache(dir, first);
  const auto cache = load_cache(dir);
  EXPECT_EQ(cache.size(), first.size());
  RunStats warm;
  const auto second = run_all(10, 2, &cache, &warm);
  EXPECT_EQ(warm.cached, static_cast<int>(first.size()));
  EXPECT_EQ(dump_all(second), dump_all(run_all(10, 1)));

  // a damaged cache is ignored
  std::ofstream(dir / kCacheFile, std::ios::app) << "{not json\n";
  EXPECT_TRUE(load_cache(dir).empty());
  std::filesystem::remove_all(dir);
}

TEST(Dataset, RunAllRejectsRange) {
  EXPECT_THROW(run_all(0), std::invalid_argument);
  EXPECT_THROW(run_all(20), std::invalid_argument);
}

TEST(Dataset, TableFiles) {
  EXPECT_EQ(load_table1(kData / "table1.txt").size(), 59u);
  EXPECT_EQ(load_table2(kData / "table2.txt").size(), 19u);
  EXPECT_EQ(load_table3(kData / "table3.txt").size(), 9u);
  const auto t4 = load_table4(kData / "table4.txt");
  EXPECT_EQ(t4.size(), 17u);
  EXPECT_EQ(std::count_if(t4.begin(), t4.end(), [](const Table4Row& r) { return r.generators.empty(); }), 1);
  const auto errata = load_errata(kData / "errata.txt");
  ASSERT_EQ(errata.size(), 2u);
  for (const auto& e : errata) {
    EXPECT_NE(e.printed, e.corrected);
    EXPECT_FALSE(e.reason.empty());
  }
  EXPECT_THROW(load_table1(kData / "missing.txt"), DataError);
}

TEST(Dataset, ErrataRewriteOnlyTheirTable) {
  std::vector<Table4Row> rows{{"2A4+4A2", {2, 3}, 2, {}}, {"2A9", {2}, 2, {}}};
  const std::vector<Erratum> errata{{"table4", "2A4+4A2", "2D4+4A2", "r"}, {"table2", "2A9", "D9+A9", "r"}};
  const auto notes = apply_errata(rows, errata, "table4");
  EXPECT_EQ(notes.size(), 1u);
  EXPECT_EQ(rows[0].set, "2D4+4A2");
  EXPECT_EQ(rows[1].set, "2A9");
}

TEST(Dataset, TableCheckReportsMismatch) {
  ClassificationRecord r;
  r.set = parse_set("E7+A12");
  r.mu = 19;
  r.realizable = true;
  r.real_components = 2;
  const auto rep = check_table1({r}, {{"E7+A12", 1, 1}});
  EXPECT_FALSE(rep.ok);
  const auto good = check_table1({classify_any(parse_set("E7+A12"))}, {{"E7+A12", 1, 1}});
  EXPECT_TRUE(good.ok);
}

TEST(Dataset, PerturbationClosure) {
  const auto c = perturbation_closure({parse_set("A3")});
  EXPECT_EQ(c, (std::set<SingularitySet>{parse_set("A3"), parse_set("A2"), parse_set("2A1"), parse_set("A1")}));
}
