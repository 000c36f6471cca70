// qlc: classification of non-special simple quartics by their singularity sets.
//
//   qlc classify SET
//   qlc enumerate [--mu-max N] [--out PATH] [--format jsonl|csv] [--jobs N] [--cache-dir DIR] [--check T]
//   qlc check-tables [--check table1|table2|table3|table4|all] [--data-dir DIR] [--jobs N] [--cache-dir DIR]
//
// Exit codes: 0 ok, 1 table mismatch, 2 usage or parse error, 3 computation error, 4 IO error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "qlc/dataset.hpp"

#ifndef QLC_DATA_DIR
#define QLC_DATA_DIR "data"
#endif

namespace {

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kUsage = 2;
constexpr int kComputation = 3;
constexpr int kIo = 4;

struct RunConfig {
  int mu_max = 19;
  std::string out;
  std::string format = "jsonl";
  int jobs = 0;
  std::string cache_dir;
  std::string check;
  std::string data_dir = QLC_DATA_DIR;
};

std::string effective_cache_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("QLC_CACHE"); env && *env) return env;
  return cfg.cache_dir;
}

int effective_jobs(const RunConfig& cfg) {
  if (cfg.jobs > 0) return cfg.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<qlc::ClassificationRecord> census(const RunConfig& cfg) {
  const std::string dir = effective_cache_dir(cfg);
  std::map<std::string, qlc::ClassificationRecord> cache;
  if (!dir.empty()) cache = qlc::load_cache(dir);
  qlc::RunStats stats;
  auto records = qlc::run_all(cfg.mu_max, effective_jobs(cfg), dir.empty() ? nullptr : &cache, &stats);
  if (!dir.empty() && stats.computed > 0) qlc::store_cache(dir, records);
  std::cerr << "records: " << records.size() << " (" << stats.computed << " computed, " << stats.cached
            << " cached)\n";
  return records;
}

void print_record(const qlc::ClassificationRecord& r) {
  std::cout << "set          " << qlc::format_set(r.set) << "\n"
            << "mu           " << r.mu << "\n"
            << "realizable   " << (r.realizable ? "yes" : "no") << "\n";
  if (r.realizable) {
    if (r.mu <= 18) {
      std::cout << "|E(T)|       " << r.e_order << "\n"
                << "|E+(T)|      " << r.e_plus_order << "\n"
                << "irregular    " << qlc::detail::join_primes(r.irregular_primes) << "\n"
                << "d_perp onto  " << (r.d_perp_surjective ? "yes" : "no") << "\n";
    }
    std::cout << "components   (" << r.real_components << "," << r.complex_pairs << ")\n";
  }
  std::cout << qlc::to_json(r).dump() << "\n";
}

int cmd_classify(const std::string& text) {
  qlc::SingularitySet s;
  try {
    s = qlc::parse_set(text);
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  }
  if (s.mu() > 19) {
    std::cerr << "parse error: total Milnor number " << s.mu() << " exceeds 19\n";
    return kUsage;
  }
  try {
    print_record(qlc::classify_any(s));
  } catch (const std::exception& e) {
    std::cerr << "computation error for " << qlc::format_set(s) << ": " << e.what() << "\n";
    return kComputation;
  }
  return kOk;
}

bool run_checks(const RunConfig& cfg, const std::vector<qlc::ClassificationRecord>& records) {
  const std::filesystem::path dir = cfg.data_dir;
  const auto errata = qlc::load_errata(dir / "errata.txt");
  bool ok = true;
  auto report = [&](const std::string& name, const qlc::TableReport& rep) {
    std::cout << name << ": " << (rep.ok ? "match" : "MISMATCH") << "\n";
    for (const auto& l : rep.lines) std::cout << "  " << l << "\n";
    ok = ok && rep.ok;
  };
  const bool all = cfg.check == "all";
  if (all || cfg.check == "table1") report("table1", qlc::check_table1(records, qlc::load_table1(dir / "table1.txt")));
  if (all || cfg.check == "table2")
    report("table2", qlc::check_table2(records, qlc::load_table2(dir / "table2.txt"), errata));
  if (all || cfg.check == "table3") report("table3", qlc::check_table3(records, qlc::load_table3(dir / "table3.txt")));
  if (all || cfg.check == "table4")
    report("table4", qlc::check_table4(records, qlc::load_table4(dir / "table4.txt"), errata));
  return ok;
}

int cmd_enumerate(const RunConfig& cfg) {
  std::vector<qlc::ClassificationRecord> records;
  try {
    records = census(cfg);
  } catch (const qlc::DataError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "computation error: " << e.what() << "\n";
    return kComputation;
  }
  try {
    std::ofstream file;
    if (!cfg.out.empty()) {
      file.open(cfg.out, std::ios::trunc);
      if (!file) throw qlc::DataError("cannot open " + cfg.out);
    }
    std::ostream& out = cfg.out.empty() ? std::cout : file;
    if (cfg.format == "csv") out << qlc::csv_header() << "\n";
    for (const auto& r : records) out << (cfg.format == "csv" ? qlc::to_csv(r) : qlc::to_json(r).dump()) << "\n";
    if (!out) throw qlc::DataError("write failed");
    // the summary goes to stderr when the dataset occupies stdout
    (cfg.out.empty() ? std::cerr : std::cout) << qlc::to_json(qlc::summarize(records, cfg.mu_max)).dump(2) << "\n";
    if (!cfg.check.empty()) return run_checks(cfg, records) ? kOk : kMismatch;
  } catch (const qlc::DataError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}

int cmd_check_tables(RunConfig cfg) {
  cfg.mu_max = 19;
  try {
    const auto records = census(cfg);
    return run_checks(cfg, records) ? kOk : kMismatch;
  } catch (const qlc::DataError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "computation error: " << e.what() << "\n";
    return kComputation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strata of non-special simple quartics by singularity set"};
  app.require_subcommand(1);
  RunConfig cfg;
  const std::vector<std::string> tables{"table1", "table2", "table3", "table4", "all"};

  std::string set_text;
  auto* classify = app.add_subcommand("classify", "Classify one singularity set, e.g. \"2A6+2A3\"");
  classify->add_option("set", set_text, "Singularity set")->required();

  auto* enumerate = app.add_subcommand("enumerate", "Classify every set up to a Milnor number");
  enumerate->add_option("--mu-max", cfg.mu_max, "Largest total Milnor number")->check(CLI::Range(1, 19));
  enumerate->add_option("--out", cfg.out, "Dataset path (default: stdout)");
  enumerate->add_option("--format", cfg.format, "Dataset format")->check(CLI::IsMember({"jsonl", "csv"}));
  enumerate->add_option("--jobs", cfg.jobs, "Worker threads (default: hardware threads)")->check(CLI::PositiveNumber);
  enumerate->add_option("--cache-dir", cfg.cache_dir, "Record cache directory (QLC_CACHE overrides)");
  enumerate->add_option("--check", cfg.check, "Compare with a published table afterwards")
      ->check(CLI::IsMember(tables));
  enumerate->add_option("--data-dir", cfg.data_dir, "Directory of the transcribed tables");

  auto* check = app.add_subcommand("check-tables", "Compare the census with the published tables");
  cfg.check = "all";
  check->add_option("--check", cfg.check, "Table to compare")->check(CLI::IsMember(tables));
  check->add_option("--data-dir", cfg.data_dir, "Directory of the transcribed tables");
  check->add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
  check->add_option("--cache-dir", cfg.cache_dir, "Record cache directory (QLC_CACHE overrides)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (classify->parsed()) return cmd_classify(set_text);
  if (enumerate->parsed()) {
    if (!enumerate->count("--check")) cfg.check.clear();
    if (!cfg.check.empty() && cfg.mu_max != 19) {
      std::cerr << "--check needs --mu-max 19\n";
      return kUsage;
    }
    return cmd_enumerate(cfg);
  }
  return cmd_check_tables(cfg);
}
