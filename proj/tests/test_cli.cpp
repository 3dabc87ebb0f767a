#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "sparsebench/csv.hpp"
#include "sparsebench/datagen.hpp"
#include "sparsebench/lasso.hpp"

using namespace sparsebench;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* env = std::getenv("SPARSEBENCH_CLI");
  REQUIRE_MESSAGE(env != nullptr, "SPARSEBENCH_CLI must point at the binary");
  return env;
}

std::string scenarios_dir() {
  const char* env = std::getenv("SPARSEBENCH_SCENARIOS");
  REQUIRE_MESSAGE(env != nullptr, "SPARSEBENCH_SCENARIOS must be set");
  return env;
}

struct TempDir {
  fs::path path;
  TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("sparsebench_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("simulate smoke run emits the documented files" *
          doctest::timeout(300)) {
  TempDir dir("simulate");
  const std::string out = (dir.path / "run").string();
  const int code = run("simulate --scenario " + scenarios_dir() +
                       "/tiny.json --out " + out + " --budget-seconds 2");
  CHECK(code == 0);
  csv::Table long_table = csv::read_table(out + "/long.csv");
  csv::Table summary = csv::read_table(out + "/summary.csv");
  csv::Table timing = csv::read_table(out + "/timing.csv");

  const std::vector<std::string> expect_long = {
      "setting", "n",      "p",           "s",   "beta_type", "rho",
      "snr",     "method", "tuning_rule", "rep", "metric",    "value"};
  CHECK(long_table.header == expect_long);
  // tiny.json: 4 reps x 4 methods x 4 metrics x 1 rule
  CHECK(long_table.rows.size() == 4 * 4 * 4);
  CHECK(summary.rows.size() == 4 * 4);
  CHECK(timing.rows.size() == 4);

  SUBCASE("rerunning without --force is refused, --force overwrites") {
    CHECK(run("simulate --scenario " + scenarios_dir() +
              "/tiny.json --out " + out + " --budget-seconds 2") != 0);
    CHECK(run("simulate --scenario " + scenarios_dir() + "/tiny.json --out " +
              out + " --budget-seconds 2 --force") == 0);
  }
}

TEST_CASE("simulate is byte-identical across runs and thread caps" *
          doctest::timeout(600)) {
  TempDir dir("determinism");
  const std::string a = (dir.path / "a").string();
  const std::string b = (dir.path / "b").string();
  const std::string base = "simulate --scenario " + scenarios_dir() +
                           "/tiny.json --seed 123 --budget-seconds 2 --out ";
  const std::string cli = cli_path();
  int code1 = std::system(
      ("SPARSEBENCH_THREADS=1 " + cli + " " + base + a + " >/dev/null 2>&1")
          .c_str());
  int code2 = std::system(
      ("SPARSEBENCH_THREADS=4 " + cli + " " + base + b + " >/dev/null 2>&1")
          .c_str());
  REQUIRE(WEXITSTATUS(code1) == 0);
  REQUIRE(WEXITSTATUS(code2) == 0);
  CHECK(slurp(a + "/long.csv") == slurp(b + "/long.csv"));
  CHECK(slurp(a + "/summary.csv") == slurp(b + "/summary.csv"));
  CHECK_FALSE(slurp(a + "/long.csv").empty());
}

TEST_CASE("fit round-trips datasets through the file format" *
          doctest::timeout(300)) {
  TempDir dir("fit");
  // export a sampled dataset, fit through the CLI, re-read the path
  datagen::ScenarioSpec spec;
  spec.setting = "custom";
  spec.n = 60, spec.p = 10, spec.s = 4;
  spec.rho = 0.35;
  spec.snr = 1.5;
  datagen::GroundTruth truth = datagen::make_ground_truth(spec);
  RngStream stream(5);
  Dataset train = datagen::sample_dataset(60, truth, stream);
  Dataset val = datagen::sample_dataset(60, truth, stream);
  const fs::path data_csv = dir.path / "data.csv";
  const fs::path val_csv = dir.path / "val.csv";
  csv::write_dataset(data_csv, train);
  csv::write_dataset(val_csv, val);

  SUBCASE("lasso path passes the optimality check after re-reading") {
    const std::string out = (dir.path / "lasso").string();
    CHECK(run("fit --method lasso --data " + data_csv.string() + " --val " +
              val_csv.string() + " --out " + out) == 0);
    csv::Table path = csv::read_table(out + "/lasso_path.csv");
    csv::Table support = csv::read_table(out + "/lasso_support.csv");
    REQUIRE(support.rows.size() == 100);  // custom setting: 100 lambdas

    // rebuild each solution from the sparse triplets and re-check it
    const int c_lambda = path.require_column("lambda");
    const int c_index = path.require_column("coef_index");
    const int c_value = path.require_column("value");
    std::map<std::string, Vector> betas;
    for (const auto& row : support.rows) betas[row[0]] = Vector::Zero(10);
    long rownum = 1;
    for (const auto& row : path.rows) {
      ++rownum;
      betas.at(row[c_lambda])[csv::parse_long(row[c_index], rownum)] =
          csv::parse_double(row[c_value], rownum);
    }
    int checked = 0;
    for (const auto& [lambda_cell, beta] : betas) {
      const double lambda = csv::parse_double(lambda_cell, 0);
      CHECK(lasso::kkt_check(train.X, train.Y, beta, lambda).ok(lambda));
      ++checked;
    }
    CHECK(checked == 100);
    CHECK(fs::exists(out + "/lasso_tuned.csv"));
  }

  SUBCASE("best subset at trivial scale certifies everything") {
    const std::string out = (dir.path / "bs").string();
    CHECK(run("fit --method bs --data " + data_csv.string() +
              " --budget-seconds 1 --out " + out) == 0);
    csv::Table path = csv::read_table(out + "/bs_path.csv");
    REQUIRE(path.rows.size() == 11);  // k = 0..10
    const int c_certified = path.require_column("certified");
    const int c_rss = path.require_column("rss");
    const int c_k = path.require_column("k");
    double prev_rss = 1e300;
    for (const auto& row : path.rows) {
      CHECK(row[c_certified] == "1");
      const double rss = csv::parse_double(row[c_rss], 0);
      CHECK(rss <= prev_rss + 1e-10);
      prev_rss = rss;
      // verify against the exhaustive oracle
      const int k = static_cast<int>(csv::parse_long(row[c_k], 0));
      if (k > 0 && k <= 4) {
        const double best = testutil::enumerate_best_rss(train.X, train.Y, k);
        CHECK(rss == doctest::Approx(best).epsilon(1e-8));
      }
    }
  }

  SUBCASE("stepwise path export carries steps and coefficients") {
    const std::string out = (dir.path / "fs").string();
    CHECK(run("fit --method fs --data " + data_csv.string() + " --out " +
              out) == 0);
    csv::Table path = csv::read_table(out + "/fs_path.csv");
    CHECK(path.rows[0][0] == "0");
    CHECK(path.rows.size() > 10);
  }

  SUBCASE("missing files exit with the usage code") {
    CHECK(run("fit --method lasso --data /nonexistent.csv") == 2);
  }

  SUBCASE("ragged and non-numeric rows exit with the usage code") {
    const fs::path bad1 = dir.path / "ragged.csv";
    std::ofstream(bad1) << "x1,x2,y\n1,2,3\n4,5\n";
    CHECK(run("fit --method lasso --data " + bad1.string()) == 2);
    const fs::path bad2 = dir.path / "nonnum.csv";
    std::ofstream(bad2) << "x1,x2,y\n1,2,3\n4,cat,6\n";
    CHECK(run("fit --method lasso --data " + bad2.string()) == 2);
  }
}

TEST_CASE("df command emits curves with the documented defaults trimmed" *
          doctest::timeout(600)) {
  TempDir dir("df");
  const std::string out = (dir.path / "df").string();
  // small n/p/reps keep this a smoke test; the acceptance suite runs the
  // full-size check
  CHECK(run("df --methods null,ols,lasso --n 30 --p 6 --s 3 --reps 80 "
            "--lambda-points 4 --out " +
            out) == 0);
  csv::Table null_curve = csv::read_table(out + "/df_null.csv");
  csv::Table ols_curve = csv::read_table(out + "/df_ols.csv");
  csv::Table lasso_curve = csv::read_table(out + "/df_lasso.csv");
  REQUIRE(null_curve.rows.size() == 1);
  REQUIRE(ols_curve.rows.size() == 1);
  REQUIRE(lasso_curve.rows.size() == 4);

  const int c_df = ols_curve.require_column("df");
  const int c_se = ols_curve.require_column("se");
  const double null_df = csv::parse_double(null_curve.rows[0][c_df], 0);
  CHECK(std::abs(null_df) <=
        3.0 * std::max(csv::parse_double(null_curve.rows[0][c_se], 0), 1e-12));
  const double ols_df = csv::parse_double(ols_curve.rows[0][c_df], 0);
  const double ols_se = csv::parse_double(ols_curve.rows[0][c_se], 0);
  CHECK(std::abs(ols_df - 6.0) <= 3.0 * ols_se);
}

TEST_CASE("report merges runs and recomputes summaries" *
          doctest::timeout(300)) {
  TempDir dir("report");
  const std::string run_a = (dir.path / "a").string();
  const std::string run_b = (dir.path / "b").string();
  REQUIRE(run("simulate --scenario " + scenarios_dir() +
              "/tiny.json --seed 1 --methods lasso,fs --budget-seconds 2 "
              "--out " + run_a) == 0);
  REQUIRE(run("simulate --scenario " + scenarios_dir() +
              "/tiny.json --seed 2 --methods lasso,fs --budget-seconds 2 "
              "--out " + run_b) == 0);

  const std::string merged = (dir.path / "merged").string();
  CHECK(run("report " + run_a + "/long.csv " + run_b + "/long.csv --out " +
            merged) == 0);

  csv::Table sum_a = csv::read_table(run_a + "/summary.csv");
  csv::Table sum_m = csv::read_table(merged + "/summary.csv");
  const int c_reps_a = sum_a.require_column("reps");
  const int c_reps_m = sum_m.require_column("reps");
  REQUIRE(sum_a.rows.size() == sum_m.rows.size());
  for (size_t i = 0; i < sum_m.rows.size(); ++i) {
    // disjoint-seed runs double the repetition counts
    CHECK(csv::parse_long(sum_m.rows[i][c_reps_m], 0) ==
          2 * csv::parse_long(sum_a.rows[i][c_reps_a], 0));
  }

  SUBCASE("report over a single run reproduces the harness summary") {
    const std::string again = (dir.path / "again").string();
    CHECK(run("report " + run_a + "/long.csv --out " + again) == 0);
    csv::Table sum_re = csv::read_table(again + "/summary.csv");
    REQUIRE(sum_re.rows.size() == sum_a.rows.size());
    const int c_mean_a = sum_a.require_column("mean");
    const int c_mean_r = sum_re.require_column("mean");
    const int c_se_a = sum_a.require_column("se");
    const int c_se_r = sum_re.require_column("se");
    for (size_t i = 0; i < sum_re.rows.size(); ++i) {
      const double ma = csv::parse_double(sum_a.rows[i][c_mean_a], 0);
      const double mr = csv::parse_double(sum_re.rows[i][c_mean_r], 0);
      CHECK(std::abs(ma - mr) <= 1e-12 * (1.0 + std::abs(ma)));
      const double sa = csv::parse_double(sum_a.rows[i][c_se_a], 0);
      const double sr = csv::parse_double(sum_re.rows[i][c_se_r], 0);
      CHECK(std::abs(sa - sr) <= 1e-12 * (1.0 + std::abs(sa)));
    }
  }

  SUBCASE("panel tables exist with reference columns") {
    csv::Table panel =
        csv::read_table(merged + "/fig_custom_rte_val.csv");
    CHECK(panel.require_column("reference") >= 0);
    CHECK(panel.require_column("lasso_mean") >= 0);
    CHECK(panel.require_column("fs_se") >= 0);
    REQUIRE(panel.rows.size() == 1);
    // null reference for rte is snr + 1 = 2
    CHECK(csv::parse_double(
              panel.rows[0][panel.require_column("reference")], 0) ==
          doctest::Approx(2.0));
  }

  SUBCASE("schema mismatches name the offending column") {
    const fs::path bad = dir.path / "bad.csv";
    std::ofstream(bad) << "setting,value\nlow,1\n";
    CHECK(run("report " + bad.string() + " --out " +
              (dir.path / "badout").string()) == 2);
  }
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("simulate") == 2);                      // missing --scenario
  CHECK(run("simulate --scenario /nonexistent.json --out /tmp/sb_x") == 2);
  CHECK(run("bogus-subcommand") == 2);
  TempDir dir("badjson");
  const fs::path bad = dir.path / "bad.json";
  std::ofstream(bad) << "{\"setting\": \"low\"";
  CHECK(run("simulate --scenario " + bad.string() + " --out " +
            (dir.path / "out").string()) == 2);
}
