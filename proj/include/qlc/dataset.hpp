#pragma once

// Census over all sets up to a given Milnor number: parallel evaluation,
// aggregate counts, a record cache, and comparison with the published tables.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "qlc/binform.hpp"
#include "qlc/classify.hpp"

namespace qlc {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

/// classify_set for mu <= 18, the binary-form count for mu = 19.
inline ClassificationRecord classify_any(const SingularitySet& s) {
  if (s.mu() <= 18) return classify_set(s);
  ClassificationRecord rec;
  rec.set = s;
  rec.mu = s.mu();
  rec.realizable = realizable_nonspecial(s);
  if (!rec.realizable) return rec;
  const auto cc = count_components_maximizing(s);
  rec.real_components = cc.real;
  rec.complex_pairs = cc.complex_pairs;
  rec.methods = {"binform"};
  return rec;
}

// ---------------------------------------------------------------------------
// Records

inline Json to_json(const ClassificationRecord& r) {
  Json j;
  j["set"] = format_set(r.set);
  j["mu"] = r.mu;
  j["realizable"] = r.realizable;
  if (!r.realizable) return j;
  if (r.mu <= 18) {
    j["E_order"] = r.e_order;
    j["E_plus_order"] = r.e_plus_order;
    j["irregular_primes"] = r.irregular_primes;
    j["d_perp_surjective"] = r.d_perp_surjective;
    j["symmetric"] = r.symmetric;
  }
  j["r"] = r.real_components;
  j["c"] = r.complex_pairs;
  if (r.mu <= 18) {
    j["E_bucket"] = r.e_bucket;
    j["E_plus_bucket"] = r.e_plus_bucket;
    j["sigma_rules"] = r.sigma_rules;
    Json gens = Json::array();
    for (const auto& g : r.generators) gens.push_back({{"label", g.label}, {"e", g.e}, {"e_plus", g.e_plus}});
    j["generators"] = gens;
  }
  j["methods"] = r.methods;
  return j;
}

inline ClassificationRecord record_from_json(const Json& j) {
  ClassificationRecord r;
  r.set = parse_set(j.at("set").get<std::string>());
  r.mu = j.at("mu").get<int>();
  r.realizable = j.at("realizable").get<bool>();
  if (!r.realizable) return r;
  r.real_components = j.at("r").get<int>();
  r.complex_pairs = j.at("c").get<int>();
  r.methods = j.at("methods").get<std::vector<std::string>>();
  if (r.mu > 18) return r;
  r.e_order = j.at("E_order").get<i64>();
  r.e_plus_order = j.at("E_plus_order").get<i64>();
  r.irregular_primes = j.at("irregular_primes").get<std::vector<i64>>();
  r.d_perp_surjective = j.at("d_perp_surjective").get<bool>();
  r.symmetric = j.at("symmetric").get<bool>();
  r.e_bucket = j.at("E_bucket").get<std::string>();
  r.e_plus_bucket = j.at("E_plus_bucket").get<std::string>();
  r.sigma_rules = j.at("sigma_rules").get<std::vector<std::string>>();
  for (const auto& g : j.at("generators"))
    r.generators.push_back({g.at("label").get<std::string>(), g.at("e").get<F2Vec>(), g.at("e_plus").get<F2Vec>()});
  r.lemma_checked = std::any_of(r.methods.begin(), r.methods.end(),
                                [](const std::string& m) { return m.rfind("lemma:", 0) == 0; });
  r.lemma_agrees = std::none_of(r.methods.begin(), r.methods.end(), [](const std::string& m) {
    return m.find("mismatch") != std::string::npos || m == "lemma:disagree";
  });
  return r;
}

inline std::string csv_header() { return "set,mu,realizable,E_order,E_plus_order,irregular_primes,r,c,methods"; }

inline std::string to_csv(const ClassificationRecord& r) {
  auto join = [](const auto& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ";" : "") << v[i];
    return os.str();
  };
  std::ostringstream os;
  os << format_set(r.set) << ',' << r.mu << ',' << (r.realizable ? 1 : 0) << ',';
  if (r.realizable && r.mu <= 18) os << r.e_order << ',' << r.e_plus_order << ',' << join(r.irregular_primes);
  else os << ",,";
  os << ',';
  if (r.realizable) os << r.real_components << ',' << r.complex_pairs;
  else os << ',';
  os << ',' << join(r.methods);
  return os.str();
}

/// Canonical order: by Milnor number, then by set string.
inline bool canonical_less(const ClassificationRecord& a, const ClassificationRecord& b) {
  if (a.mu != b.mu) return a.mu < b.mu;
  return format_set(a.set) < format_set(b.set);
}

// ---------------------------------------------------------------------------
// Cache

inline constexpr const char* kCacheFile = "records-v1.jsonl";

inline std::map<std::string, ClassificationRecord> load_cache(const std::filesystem::path& dir) {
  std::map<std::string, ClassificationRecord> out;
  std::ifstream in(dir / kCacheFile);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      auto r = record_from_json(Json::parse(line));
      out.emplace(format_set(r.set), std::move(r));
    } catch (const std::exception&) {
      return {};  // unreadable cache: recompute everything
    }
  }
  return out;
}

/// Merges `records` into the cache, writing a temporary file and renaming it.
inline void store_cache(const std::filesystem::path& dir, const std::vector<ClassificationRecord>& records) {
  auto all = load_cache(dir);
  for (const auto& r : records) all[format_set(r.set)] = r;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create cache directory " + dir.string() + ": " + ec.message());
  const auto tmp = dir / (std::string(kCacheFile) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    std::vector<const ClassificationRecord*> sorted;
    for (const auto& [k, r] : all) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return canonical_less(*a, *b); });
    for (const auto* r : sorted) out << to_json(*r).dump() << '\n';
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, dir / kCacheFile, ec);
  if (ec) throw DataError("cannot rename cache file: " + ec.message());
}

// ---------------------------------------------------------------------------
// Census

struct RunStats {
  int computed = 0;
  int cached = 0;
};

/// Records for every nonempty set with mu <= mu_max, in canonical order.
inline std::vector<ClassificationRecord> run_all(int mu_max, int jobs = 1,
                                                 const std::map<std::string, ClassificationRecord>* cache = nullptr,
                                                 RunStats* stats = nullptr) {
  if (mu_max < 1 || mu_max > 19) throw std::invalid_argument("mu_max must lie in [1, 19]");
  const auto sets = enumerate_sets(mu_max);
  std::vector<ClassificationRecord> out(sets.size());
  std::vector<char> done(sets.size(), 0);
  int hits = 0;
  if (cache)
    for (std::size_t i = 0; i < sets.size(); ++i) {
      auto it = cache->find(format_set(sets[i]));
      if (it != cache->end()) {
        out[i] = it->second;
        done[i] = 1;
        ++hits;
      }
    }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < sets.size() && !failed; i = next++) {
      if (done[i]) continue;
      try {
        out[i] = classify_any(sets[i]);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!failed.exchange(true)) error = format_set(sets[i]) + ": " + e.what();
      }
    }
  };
  const int n = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failed) throw ComputationError(error);

  std::sort(out.begin(), out.end(), canonical_less);
  if (stats) *stats = {static_cast<int>(sets.size()) - hits, hits};
  return out;
}

/// Union of the perturbations of the given sets (each set included).
inline std::set<SingularitySet> perturbation_closure(const std::vector<SingularitySet>& tops) {
  std::set<SingularitySet> out;
  for (const auto& t : tops) {
    auto p = perturbations(t);
    out.insert(p.begin(), p.end());
  }
  return out;
}

/// Realizable mu = 18 sets that are not perturbations of a realizable mu = 19 set.
inline std::vector<SingularitySet> extremal_mu18(const std::vector<ClassificationRecord>& records) {
  std::vector<SingularitySet> top;
  for (const auto& r : records)
    if (r.realizable && r.mu == 19) top.push_back(r.set);
  const auto closure = perturbation_closure(top);
  std::vector<SingularitySet> out;
  for (const auto& r : records)
    if (r.realizable && r.mu == 18 && !closure.count(r.set)) out.push_back(r.set);
  return out;
}

struct Summary {
  int mu_max = 0;
  int candidates = 0;
  int realizable_max = 0;
  int realizable_nonmax = 0;  // includes the smooth case (empty set)
  int e_trivial = 0;
  int e_nontrivial = 0;
  std::map<std::string, int> e_buckets;
  std::map<std::string, int> e_plus_buckets;
  int e_equal = 0;
  int e_less = 0;
  int nonsurjective = 0;
  int lemma_checked = 0;
  int lemma_disagree = 0;
  std::vector<std::string> exceptional;
  std::vector<std::string> extremal;  // filled when mu_max = 19
};

inline Summary summarize(const std::vector<ClassificationRecord>& records, int mu_max) {
  Summary s;
  s.mu_max = mu_max;
  s.candidates = static_cast<int>(records.size());
  std::vector<const ClassificationRecord*> all;
  const ClassificationRecord smooth = classify_set(SingularitySet{});
  all.push_back(&smooth);
  for (const auto& r : records) all.push_back(&r);
  for (const auto* rp : all) {
    const auto& r = *rp;
    if (!r.realizable) continue;
    if (r.mu == 19) {
      ++s.realizable_max;
      continue;
    }
    ++s.realizable_nonmax;
    (r.e_order == 1 ? s.e_trivial : s.e_nontrivial)++;
    ++s.e_buckets[r.e_bucket];
    ++s.e_plus_buckets[r.e_plus_bucket];
    (r.e_order == r.e_plus_order ? s.e_equal : s.e_less)++;
    if (!r.d_perp_surjective) ++s.nonsurjective;
    if (r.lemma_checked) ++s.lemma_checked;
    if (!r.lemma_agrees) ++s.lemma_disagree;
    if (!r.symmetric) s.exceptional.push_back(format_set(r.set));
  }
  if (mu_max == 19)
    for (const auto& e : extremal_mu18(records)) s.extremal.push_back(format_set(e));
  return s;
}

inline Json to_json(const Summary& s) {
  Json j;
  j["mu_max"] = s.mu_max;
  j["candidates"] = s.candidates;
  j["realizable_max"] = s.realizable_max;
  j["realizable_nonmax"] = s.realizable_nonmax;
  j["E_trivial"] = s.e_trivial;
  j["E_nontrivial"] = s.e_nontrivial;
  j["E_buckets"] = s.e_buckets;
  j["E_equal_E_plus"] = s.e_equal;
  j["E_less_E_plus"] = s.e_less;
  j["E_plus_buckets"] = s.e_plus_buckets;
  j["d_perp_nonsurjective"] = s.nonsurjective;
  j["lemma_checked"] = s.lemma_checked;
  j["lemma_disagree"] = s.lemma_disagree;
  j["exceptional"] = s.exceptional;
  j["extremal_mu18"] = s.extremal;
  return j;
}

// ---------------------------------------------------------------------------
// Published tables

struct Table1Row {
  std::string set;
  int r = 0;
  int c = 0;
};

struct Table3Row {
  std::string set;
  std::vector<i64> primes;
  std::string generator;
};

struct Table4Row {
  std::string set;
  std::vector<i64> primes;
  i64 e_plus = 0;
  std::vector<std::string> generators;  // empty for the exceptional row
};

struct Erratum {
  std::string table;
  std::string printed;
  std::string corrected;
  std::string reason;
};

namespace detail {

inline std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  return out;
}

inline std::vector<i64> parse_primes(const std::string& s) {
  std::vector<i64> out;
  for (const auto& p : split(s, ',')) out.push_back(std::stoll(p));
  return out;
}

inline void need_cells(const std::vector<std::string>& row, std::size_t n, const std::filesystem::path& path) {
  if (row.size() < n) throw DataError("malformed row in " + path.string());
}

}  // namespace detail

/// Canonical form of a set string (e.g. "E8 + 2A3" -> "E8+2A3").
inline std::string canonical_set(const std::string& s) { return format_set(parse_set(s)); }

inline std::vector<Table1Row> load_table1(const std::filesystem::path& path) {
  std::vector<Table1Row> out;
  for (const auto& row : detail::read_tsv(path)) {
    detail::need_cells(row, 3, path);
    out.push_back({canonical_set(row[0]), std::stoi(row[1]), std::stoi(row[2])});
  }
  return out;
}

inline std::vector<std::string> load_table2(const std::filesystem::path& path) {
  std::vector<std::string> out;
  for (const auto& row : detail::read_tsv(path)) out.push_back(canonical_set(row.at(0)));
  return out;
}

inline std::vector<Table3Row> load_table3(const std::filesystem::path& path) {
  std::vector<Table3Row> out;
  for (const auto& row : detail::read_tsv(path)) {
    detail::need_cells(row, 3, path);
    out.push_back({canonical_set(row[0]), detail::parse_primes(row[1]), row[2]});
  }
  return out;
}

inline std::vector<Table4Row> load_table4(const std::filesystem::path& path) {
  std::vector<Table4Row> out;
  for (const auto& row : detail::read_tsv(path)) {
    detail::need_cells(row, 4, path);
    Table4Row t{canonical_set(row[0]), detail::parse_primes(row[1]), std::stoll(row[2]), {}};
    if (row[3] != "-") t.generators = detail::split(row[3], ';');
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<Erratum> load_errata(const std::filesystem::path& path) {
  std::vector<Erratum> out;
  for (const auto& row : detail::read_tsv(path)) {
    detail::need_cells(row, 4, path);
    out.push_back({row[0], canonical_set(row[1]), canonical_set(row[2]), row[3]});
  }
  return out;
}

/// Replaces printed set names by their corrections for the given table.
template <class Row>
std::vector<std::string> apply_errata(std::vector<Row>& rows, const std::vector<Erratum>& errata,
                                      const std::string& table) {
  std::vector<std::string> notes;
  for (auto& row : rows)
    for (const auto& e : errata)
      if (e.table == table && e.printed == row.set) {
        notes.push_back(e.printed + " -> " + e.corrected + " (" + e.reason + ")");
        row.set = e.corrected;
      }
  return notes;
}

struct TableReport {
  bool ok = true;
  std::vector<std::string> lines;
  void fail(const std::string& line) {
    ok = false;
    lines.push_back("FAIL " + line);
  }
  void note(const std::string& line) { lines.push_back("note " + line); }
};

namespace detail {

inline std::map<std::string, const ClassificationRecord*> index_records(const std::vector<ClassificationRecord>& rs) {
  std::map<std::string, const ClassificationRecord*> out;
  for (const auto& r : rs) out[format_set(r.set)] = &r;
  return out;
}

inline std::string join_primes(const std::vector<i64>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace detail

inline TableReport check_table1(const std::vector<ClassificationRecord>& records, const std::vector<Table1Row>& rows) {
  TableReport rep;
  std::set<std::string> computed, printed;
  for (const auto& r : records)
    if (r.realizable && r.mu == 19) computed.insert(format_set(r.set));
  const auto idx = detail::index_records(records);
  for (const auto& row : rows) {
    printed.insert(row.set);
    auto it = idx.find(row.set);
    if (it == idx.end() || !it->second->realizable) {
      rep.fail(row.set + ": not realizable");
      continue;
    }
    const auto& r = *it->second;
    if (r.real_components != row.r || r.complex_pairs != row.c)
      rep.fail(row.set + ": (r,c) = (" + std::to_string(r.real_components) + "," + std::to_string(r.complex_pairs) +
               "), table (" + std::to_string(row.r) + "," + std::to_string(row.c) + ")");
  }
  for (const auto& s : computed)
    if (!printed.count(s)) rep.fail(s + ": realizable but not in the table");
  rep.note(std::to_string(rows.size()) + " rows, " + std::to_string(computed.size()) + " computed");
  return rep;
}

inline TableReport check_table2(const std::vector<ClassificationRecord>& records, std::vector<std::string> rows,
                                const std::vector<Erratum>& errata) {
  TableReport rep;
  for (auto& row : rows)
    for (const auto& e : errata)
      if (e.table == "table2" && e.printed == row) {
        rep.note("erratum " + e.printed + " -> " + e.corrected + " (" + e.reason + ")");
        row = e.corrected;
      }
  std::set<std::string> computed, printed(rows.begin(), rows.end());
  for (const auto& s : extremal_mu18(records)) computed.insert(format_set(s));
  for (const auto& s : printed)
    if (!computed.count(s)) rep.fail(s + ": listed but not computed as extremal");
  for (const auto& s : computed)
    if (!printed.count(s)) rep.fail(s + ": computed as extremal but not listed");
  rep.note(std::to_string(rows.size()) + " rows, " + std::to_string(computed.size()) + " computed");
  return rep;
}

inline TableReport check_table3(const std::vector<ClassificationRecord>& records, const std::vector<Table3Row>& rows) {
  TableReport rep;
  const auto idx = detail::index_records(records);
  for (const auto& row : rows) {
    auto it = idx.find(row.set);
    if (it == idx.end() || !it->second->realizable) {
      rep.fail(row.set + ": not realizable");
      continue;
    }
    const auto& r = *it->second;
    if (r.irregular_primes != row.primes)
      rep.fail(row.set + ": irregular primes " + detail::join_primes(r.irregular_primes) + ", table " +
               detail::join_primes(row.primes));
    if (r.e_order != 2) rep.fail(row.set + ": |E| = " + std::to_string(r.e_order));
    if (!labels_generate(r, {row.generator}, false)) {
      std::string gens;
      for (const auto& g : r.generators)
        if (g.e && gens.find(g.label) == std::string::npos) gens += (gens.empty() ? "" : " ") + g.label;
      rep.fail(row.set + ": " + row.generator + " is trivial in E(T); generating: " + gens);
    }
  }
  return rep;
}

inline TableReport check_table4(const std::vector<ClassificationRecord>& records, std::vector<Table4Row> rows,
                                const std::vector<Erratum>& errata) {
  TableReport rep;
  for (const auto& n : apply_errata(rows, errata, "table4")) rep.note("erratum " + n);
  const auto idx = detail::index_records(records);
  std::set<std::string> printed;
  for (const auto& row : rows) {
    printed.insert(row.set);
    auto it = idx.find(row.set);
    if (it == idx.end() || !it->second->realizable) {
      rep.fail(row.set + ": not realizable");
      continue;
    }
    const auto& r = *it->second;
    if (r.irregular_primes != row.primes)
      rep.fail(row.set + ": irregular primes " + detail::join_primes(r.irregular_primes) + ", table " +
               detail::join_primes(row.primes));
    if (r.e_plus_order != row.e_plus)
      rep.fail(row.set + ": |E+| = " + std::to_string(r.e_plus_order) + ", table " + std::to_string(row.e_plus));
    if (!row.generators.empty() && !labels_generate(r, row.generators, true))
      rep.note(row.set + ": listed isometries do not generate E+(T)");
  }
  for (const auto& r : records)
    if (r.realizable && r.mu <= 18 && r.e_plus_bucket == "two-prime" && !printed.count(format_set(r.set)))
      rep.fail(format_set(r.set) + ": two-prime E+ case missing from the table");
  return rep;
}

}  // namespace qlc
