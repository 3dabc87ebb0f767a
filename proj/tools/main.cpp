// Command-line front end: simulate benchmark scenarios, fit single datasets,
// estimate effective degrees of freedom, and merge/report result CSVs.

#include <CLI11.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sparsebench/csv.hpp"
#include "sparsebench/datagen.hpp"
#include "sparsebench/harness.hpp"
#include "sparsebench/lasso.hpp"
#include "sparsebench/metrics.hpp"
#include "sparsebench/scenario_io.hpp"
#include "sparsebench/stepwise.hpp"
#include "sparsebench/subset.hpp"

namespace fs = std::filesystem;
using namespace sparsebench;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitUsage = 2;

struct CommonFlags {
  std::string out_dir = "out";
  bool force = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  double budget_seconds = 180.0;
  std::string methods = "lasso,relaxo,fs,bs";
  std::string tuning = "val";
};

void ensure_out_dir(const std::string& out_dir) {
  fs::create_directories(out_dir);
}

void refuse_overwrite(const fs::path& file, bool force) {
  if (!force && fs::exists(file))
    throw std::runtime_error("refusing to overwrite '" + file.string() +
                             "' (use --force)");
}

std::string spec_setting_cell(const datagen::ScenarioSpec& spec) {
  return spec.setting.empty() ? "custom" : spec.setting;
}

void append_scenario_cells(std::vector<std::string>& row,
                           const datagen::ScenarioSpec& spec) {
  row.push_back(spec_setting_cell(spec));
  row.push_back(std::to_string(spec.n));
  row.push_back(std::to_string(spec.p));
  row.push_back(std::to_string(spec.s));
  row.push_back(std::to_string(spec.beta_type));
  row.push_back(csv::format_double(spec.rho));
  row.push_back(csv::format_double(spec.snr));
}

const std::vector<std::string> kScenarioColumns = {
    "setting", "n", "p", "s", "beta_type", "rho", "snr"};

std::string rule_name(harness::TuningRule rule) {
  return rule == harness::TuningRule::kValidation ? "val" : "oracle";
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const std::string& scenario_file, const CommonFlags& flags) {
  auto specs = scenario_io::load_scenarios(scenario_file);
  for (auto& spec : specs) {
    if (flags.seed) spec.seed = *flags.seed;
    if (flags.reps) spec.reps = *flags.reps;
  }
  const auto methods = harness::parse_method_list(flags.methods);

  harness::HarnessOptions opts;
  opts.validation = flags.tuning == "val" || flags.tuning == "both";
  opts.oracle = flags.tuning == "oracle" || flags.tuning == "both";
  if (!opts.validation && !opts.oracle)
    throw std::invalid_argument("--tuning must be val, oracle or both");
  opts.bs_budget_per_k = flags.budget_seconds;

  ensure_out_dir(flags.out_dir);
  const fs::path long_path = fs::path(flags.out_dir) / "long.csv";
  const fs::path summary_path = fs::path(flags.out_dir) / "summary.csv";
  const fs::path timing_path = fs::path(flags.out_dir) / "timing.csv";
  refuse_overwrite(long_path, flags.force);
  refuse_overwrite(summary_path, flags.force);
  refuse_overwrite(timing_path, flags.force);

  csv::Table long_table, summary_table, timing_table;
  long_table.header = kScenarioColumns;
  for (const char* c : {"method", "tuning_rule", "rep", "metric", "value"})
    long_table.header.push_back(c);
  summary_table.header = kScenarioColumns;
  for (const char* c :
       {"method", "tuning_rule", "metric", "mean", "se", "reps", "reference"})
    summary_table.header.push_back(c);
  timing_table.header = kScenarioColumns;
  for (const char* c :
       {"method", "mean_path_seconds", "se_path_seconds", "certified_mean"})
    timing_table.header.push_back(c);

  bool partial = false;
  for (const auto& spec : specs) {
    const auto t0 = std::chrono::steady_clock::now();
    harness::ScenarioResult result = harness::run_scenario(spec, methods, opts);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    for (const auto& rec : result.records) {
      const std::pair<const char*, double> metric_values[] = {
          {"rr", rec.rr},
          {"rte", rec.rte},
          {"pve", rec.pve},
          {"nnz", static_cast<double>(rec.nnz)}};
      for (const auto& [metric, value] : metric_values) {
        std::vector<std::string> row;
        append_scenario_cells(row, spec);
        row.push_back(rec.method);
        row.push_back(rec.tuning_rule);
        row.push_back(std::to_string(rec.rep));
        row.push_back(metric);
        row.push_back(csv::format_double(value));
        long_table.rows.push_back(std::move(row));
      }
    }
    for (const auto& s : result.summaries) {
      std::vector<std::string> row;
      append_scenario_cells(row, spec);
      row.push_back(harness::method_name(s.method));
      row.push_back(rule_name(s.rule));
      row.push_back(s.metric);
      row.push_back(csv::format_double(s.mean));
      row.push_back(s.reps >= 2 ? csv::format_double(s.se) : "");
      row.push_back(std::to_string(s.reps));
      row.push_back(csv::format_double(s.reference));
      summary_table.rows.push_back(std::move(row));
    }
    for (const auto& t : result.timings) {
      std::vector<std::string> row;
      append_scenario_cells(row, spec);
      row.push_back(harness::method_name(t.method));
      row.push_back(csv::format_double(t.mean_path_seconds));
      row.push_back(csv::format_double(t.se_path_seconds));
      row.push_back(t.certified_mean ? csv::format_double(*t.certified_mean)
                                     : "");
      timing_table.rows.push_back(std::move(row));
    }

    std::cout << spec.id() << ": reps=" << spec.reps
              << " records=" << result.records.size()
              << " failures=" << result.failures.size() << " ("
              << csv::format_double(elapsed) << "s)\n";
    if (!result.failures.empty()) {
      partial = true;
      for (const auto& f : result.failures)
        std::cerr << "  failure: " << harness::method_name(f.method) << " rep "
                  << f.rep << ": " << f.message << "\n";
    }
  }

  csv::write_table(long_path, long_table);
  csv::write_table(summary_path, summary_table);
  csv::write_table(timing_path, timing_table);
  return partial ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------------------
// fit

void write_penalized_path_csv(const fs::path& coef_file,
                              const fs::path& support_file, const Matrix& x,
                              const Vector& y, const lasso::LassoPath& base,
                              const lasso::RelaxedPath* relaxed) {
  csv::Table coefs;
  coefs.header = {"lambda", "gamma", "coef_index", "value"};
  csv::Table supp;
  supp.header = {"lambda", "gamma", "support_size", "objective"};

  auto emit = [&](double lambda, const std::string& gamma_cell,
                  const Vector& beta) {
    int nz = 0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
      if (beta[j] == 0.0) continue;
      ++nz;
      coefs.rows.push_back({csv::format_double(lambda), gamma_cell,
                            std::to_string(j), csv::format_double(beta[j])});
    }
    supp.rows.push_back({csv::format_double(lambda), gamma_cell,
                         std::to_string(nz),
                         csv::format_double(lasso::objective(
                             x, y, beta, lambda))});
  };

  if (relaxed) {
    for (size_t i = 0; i < relaxed->betas.size(); ++i)
      for (Eigen::Index g = 0; g < relaxed->gammas.size(); ++g)
        emit(base.lambdas[i], csv::format_double(relaxed->gammas[g]),
             relaxed->betas[i].col(g));
  } else {
    for (size_t i = 0; i < base.betas.size(); ++i)
      emit(base.lambdas[i], "", base.betas[i]);
  }
  csv::write_table(coef_file, coefs);
  csv::write_table(support_file, supp);
}

void write_stepwise_path_csv(const fs::path& file,
                             const stepwise::StepwisePath& path) {
  csv::Table t;
  t.header = {"step", "selected", "score", "rss", "coef_index", "coef_value"};
  t.rows.push_back({"0", "", "", csv::format_double(path.rss[0]), "", ""});
  for (int k = 1; k <= path.steps(); ++k) {
    const Vector& beta = path.betas[k];
    bool first = true;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
      if (beta[j] == 0.0) continue;
      t.rows.push_back({std::to_string(k),
                        first ? std::to_string(path.order[k - 1]) : "",
                        first ? csv::format_double(path.scores[k - 1]) : "",
                        first ? csv::format_double(path.rss[k]) : "",
                        std::to_string(j), csv::format_double(beta[j])});
      first = false;
    }
    if (first)  // every coefficient cancelled exactly; keep the step row
      t.rows.push_back({std::to_string(k), std::to_string(path.order[k - 1]),
                        csv::format_double(path.scores[k - 1]),
                        csv::format_double(path.rss[k]), "", ""});
  }
  csv::write_table(file, t);
}

void write_subset_path_csv(const fs::path& file,
                           const std::vector<subset::SubsetSolution>& path) {
  csv::Table t;
  t.header = {"k", "support", "rss", "certified", "nodes_explored",
              "wall_time"};
  for (size_t k = 0; k < path.size(); ++k) {
    std::ostringstream support;
    for (size_t i = 0; i < path[k].support.size(); ++i)
      support << (i ? " " : "") << path[k].support[i];
    t.rows.push_back({std::to_string(k), support.str(),
                      csv::format_double(path[k].rss),
                      path[k].certified ? "1" : "0",
                      std::to_string(path[k].nodes_explored),
                      csv::format_double(path[k].wall_time)});
  }
  csv::write_table(file, t);
}

void write_coefficients_csv(const fs::path& file, const Vector& beta,
                            const std::string& label) {
  csv::Table t;
  t.header = {"coef_index", "value", "tuning"};
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    t.rows.push_back({std::to_string(j), csv::format_double(beta[j]),
                      j == 0 ? label : ""});
  csv::write_table(file, t);
}

int cmd_fit(const std::string& data_file, const std::string& val_file,
            const std::string& method_token, const CommonFlags& flags) {
  const Dataset train = csv::read_dataset(data_file);
  std::optional<Dataset> val;
  if (!val_file.empty()) {
    val = csv::read_dataset(val_file);
    if (val->p() != train.p())
      throw csv::CsvError("validation set has different predictor count", 1);
  }
  const harness::Method method = harness::method_from_name(method_token);

  ensure_out_dir(flags.out_dir);
  const std::string base_name = harness::method_name(method);
  const fs::path path_file =
      fs::path(flags.out_dir) / (base_name + "_path.csv");
  refuse_overwrite(path_file, flags.force);

  datagen::ScenarioSpec grid_spec;
  grid_spec.setting = "custom";
  grid_spec.n = static_cast<int>(train.n());
  grid_spec.p = static_cast<int>(train.p());
  grid_spec.s = 1;
  const harness::GridPolicy grid = harness::GridPolicy::for_spec(grid_spec);
  const std::uint64_t seed = flags.seed.value_or(1);

  harness::CoefficientPath flat;
  switch (method) {
    case harness::Method::kLasso: {
      auto g = lasso::lambda_grid(train.X, train.Y, grid.lambda_count,
                                  grid.lambda_eps);
      auto path = lasso::lasso_path(train.X, train.Y, g.values);
      write_penalized_path_csv(path_file,
                               fs::path(flags.out_dir) / "lasso_support.csv",
                               train.X, train.Y, path, nullptr);
      flat.betas.resize(train.p(), path.betas.size());
      for (size_t i = 0; i < path.betas.size(); ++i) {
        flat.betas.col(i) = path.betas[i];
        flat.labels.push_back("lambda=" + csv::format_double(path.lambdas[i]));
      }
      break;
    }
    case harness::Method::kRelaxo: {
      auto g = lasso::lambda_grid(train.X, train.Y, grid.lambda_count,
                                  grid.lambda_eps);
      auto base = lasso::lasso_path(train.X, train.Y, g.values);
      auto rel =
          lasso::relaxed_path(train.X, train.Y, base, lasso::default_gammas());
      write_penalized_path_csv(path_file,
                               fs::path(flags.out_dir) / "relaxo_support.csv",
                               train.X, train.Y, base, &rel);
      const Eigen::Index gcount = rel.gammas.size();
      flat.betas.resize(train.p(), base.betas.size() * gcount);
      for (size_t i = 0; i < base.betas.size(); ++i)
        for (Eigen::Index g2 = 0; g2 < gcount; ++g2) {
          flat.betas.col(i * gcount + g2) = rel.betas[i].col(g2);
          flat.labels.push_back(
              "lambda=" + csv::format_double(base.lambdas[i]) +
              ";gamma=" + csv::format_double(rel.gammas[g2]));
        }
      break;
    }
    case harness::Method::kFs: {
      auto path = stepwise::fs_path(train.X, train.Y, grid.kmax);
      write_stepwise_path_csv(path_file, path);
      flat.betas.resize(train.p(), path.betas.size());
      for (size_t i = 0; i < path.betas.size(); ++i) {
        flat.betas.col(i) = path.betas[i];
        flat.labels.push_back("k=" + std::to_string(i));
      }
      break;
    }
    case harness::Method::kBs: {
      auto path = subset::bs_path(train.X, train.Y, grid.kmax,
                                  flags.budget_seconds, RngStream(seed));
      write_subset_path_csv(path_file, path);
      flat.betas.resize(train.p(), path.size());
      for (size_t i = 0; i < path.size(); ++i) {
        flat.betas.col(i) = path[i].beta;
        flat.labels.push_back("k=" + std::to_string(i));
      }
      break;
    }
  }

  if (val) {
    const Eigen::Index t = harness::tune_validation(flat, *val);
    const fs::path coef_file =
        fs::path(flags.out_dir) / (base_name + "_tuned.csv");
    refuse_overwrite(coef_file, flags.force);
    write_coefficients_csv(coef_file, flat.betas.col(t), flat.labels[t]);
  }
  std::cout << base_name << ": path with " << flat.size() << " grid points -> "
            << path_file.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// df

int cmd_df(const CommonFlags& flags, int n, int p, int s, int beta_type,
           double rho, double snr, int lambda_points, int df_kmax) {
  datagen::ScenarioSpec spec;
  spec.setting = "custom";
  spec.n = n, spec.p = p, spec.s = s;
  spec.beta_type = beta_type;
  spec.rho = rho;
  spec.snr = snr;
  spec.reps = flags.reps.value_or(300);
  spec.seed = flags.seed.value_or(1);
  spec.validate();
  if (lambda_points < 2)
    throw std::invalid_argument("--lambda-points must be >= 2");
  const datagen::GroundTruth truth = datagen::make_ground_truth(spec);

  RngStream root(spec.seed);
  RngStream xs = root.child(0);
  Matrix x(spec.n, spec.p);
  for (int i = 0; i < spec.n; ++i) x.row(i) = truth.sigma.sample(xs).transpose();

  const int kmax = std::min({df_kmax, spec.n, spec.p});
  // A fixed penalty grid shared by every repetition, anchored at the
  // noiseless signal so it does not depend on any single noise draw.
  const double ref =
      (x.transpose() * (x * truth.beta0)).lpNorm<Eigen::Infinity>();
  Vector lgrid(lambda_points);
  for (int i = 0; i < lambda_points; ++i)
    lgrid[i] =
        ref * std::pow(0.01, static_cast<double>(i) / (lambda_points - 1));

  std::set<std::string> wanted;
  {
    std::istringstream in(flags.methods);
    std::string token;
    while (std::getline(in, token, ','))
      if (!token.empty()) wanted.insert(token);
  }

  std::vector<metrics::DfFitter> fitters;
  if (wanted.count("null"))
    fitters.push_back({"null",
                       {"null"},
                       [](const Matrix& xx, const Vector&) {
                         return Matrix(Matrix::Zero(xx.rows(), 1));
                       }});
  if (wanted.count("ols"))
    fitters.push_back({"ols", {"ols"}, [](const Matrix& xx, const Vector& yy) {
                         Vector b = xx.colPivHouseholderQr().solve(yy);
                         Matrix out(xx.rows(), 1);
                         out.col(0) = xx * b;
                         return out;
                       }});
  if (wanted.count("lasso")) {
    std::vector<std::string> labels;
    for (int i = 0; i < lambda_points; ++i)
      labels.push_back("lambda=" + csv::format_double(lgrid[i]));
    fitters.push_back(
        {"lasso", labels, [lgrid](const Matrix& xx, const Vector& yy) {
           auto path = lasso::lasso_path(xx, yy, lgrid);
           Matrix out(xx.rows(), path.betas.size());
           for (size_t i = 0; i < path.betas.size(); ++i)
             out.col(i) = xx * path.betas[i];
           return out;
         }});
  }
  if (wanted.count("relaxo")) {
    const Vector gammas = lasso::default_gammas();
    std::vector<std::string> labels;
    for (int i = 0; i < lambda_points; ++i)
      for (Eigen::Index g = 0; g < gammas.size(); ++g)
        labels.push_back("lambda=" + csv::format_double(lgrid[i]) +
                         ";gamma=" + csv::format_double(gammas[g]));
    fitters.push_back(
        {"relaxo", labels, [lgrid, gammas](const Matrix& xx, const Vector& yy) {
           auto base = lasso::lasso_path(xx, yy, lgrid);
           auto rel = lasso::relaxed_path(xx, yy, base, gammas);
           Matrix out(xx.rows(), lgrid.size() * gammas.size());
           for (Eigen::Index i = 0; i < lgrid.size(); ++i)
             for (Eigen::Index g = 0; g < gammas.size(); ++g)
               out.col(i * gammas.size() + g) = xx * rel.betas[i].col(g);
           return out;
         }});
  }
  if (wanted.count("fs")) {
    std::vector<std::string> labels;
    for (int k = 0; k <= kmax; ++k) labels.push_back("k=" + std::to_string(k));
    fitters.push_back(
        {"fs", labels, [kmax](const Matrix& xx, const Vector& yy) {
           auto path = stepwise::fs_path(xx, yy, kmax);
           Matrix out(xx.rows(), kmax + 1);
           for (int k = 0; k <= kmax; ++k) {
             const int idx = std::min<int>(k, path.steps());
             out.col(k) = xx * path.betas[idx];
           }
           return out;
         }});
  }
  if (wanted.count("bs")) {
    std::vector<std::string> labels;
    for (int k = 0; k <= kmax; ++k) labels.push_back("k=" + std::to_string(k));
    const double budget = flags.budget_seconds;
    const std::uint64_t seed = spec.seed;
    fitters.push_back(
        {"bs", labels,
         [kmax, budget, seed](const Matrix& xx, const Vector& yy) {
           subset::SubsetOptions sopts;
           sopts.restarts = 10;
           auto path = subset::bs_path(xx, yy, kmax, budget,
                                       RngStream(seed).child(0xdf), sopts);
           Matrix out(xx.rows(), kmax + 1);
           for (int k = 0; k <= kmax; ++k) out.col(k) = xx * path[k].beta;
           return out;
         }});
  }
  if (fitters.empty())
    throw std::invalid_argument(
        "--methods must name at least one of null, ols, lasso, relaxo, fs, bs");

  ensure_out_dir(flags.out_dir);
  for (const auto& fitter : fitters) {
    const fs::path file =
        fs::path(flags.out_dir) / ("df_" + fitter.method + ".csv");
    refuse_overwrite(file, flags.force);
    metrics::DfCurve curve =
        metrics::df_montecarlo(fitter, x, truth, spec.reps, root.child(1));
    csv::Table t;
    t.header = {"index", "label", "df", "se", "reps"};
    for (size_t i = 0; i < curve.labels.size(); ++i)
      t.rows.push_back({std::to_string(i), curve.labels[i],
                        csv::format_double(curve.df[i]),
                        csv::format_double(curve.se[i]),
                        std::to_string(curve.reps_used)});
    csv::write_table(file, t);
    std::cout << "df " << fitter.method << ": " << curve.labels.size()
              << " grid points, " << curve.reps_used << " reps -> "
              << file.string() << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report

struct LongKey {
  std::vector<std::string> scenario;  // setting..snr cells
  std::string method, rule, metric;
  bool operator<(const LongKey& o) const {
    return std::tie(scenario, method, rule, metric) <
           std::tie(o.scenario, o.method, o.rule, o.metric);
  }
};

int cmd_report(const std::vector<std::string>& inputs,
               const CommonFlags& flags) {
  csv::Table merged;
  for (const auto& input : inputs) {
    csv::Table t = csv::read_table(input);
    for (const char* col :
         {"setting", "n", "p", "s", "beta_type", "rho", "snr", "method",
          "tuning_rule", "rep", "metric", "value"})
      t.require_column(col);
    if (merged.header.empty()) {
      merged = t;
      continue;
    }
    if (t.header != merged.header)
      throw csv::CsvError("'" + input + "': header differs from first input",
                          1);
    for (auto& row : t.rows) merged.rows.push_back(std::move(row));
  }
  if (merged.header.empty()) throw csv::CsvError("no input files", 0);

  ensure_out_dir(flags.out_dir);
  const fs::path merged_path = fs::path(flags.out_dir) / "long.csv";
  const fs::path summary_path = fs::path(flags.out_dir) / "summary.csv";
  refuse_overwrite(merged_path, flags.force);
  refuse_overwrite(summary_path, flags.force);

  const int c_method = merged.require_column("method");
  const int c_rule = merged.require_column("tuning_rule");
  const int c_metric = merged.require_column("metric");
  const int c_value = merged.require_column("value");
  std::vector<int> c_scenario;
  for (const auto& name : kScenarioColumns)
    c_scenario.push_back(merged.require_column(name));

  std::map<LongKey, std::vector<double>> groups;
  long rownum = 1;
  for (const auto& row : merged.rows) {
    ++rownum;
    LongKey key;
    for (int c : c_scenario) key.scenario.push_back(row[c]);
    key.method = row[c_method];
    key.rule = row[c_rule];
    key.metric = row[c_metric];
    groups[key].push_back(csv::parse_double(row[c_value], rownum));
  }

  csv::Table summary;
  summary.header = kScenarioColumns;
  for (const char* c :
       {"method", "tuning_rule", "metric", "mean", "se", "reps", "reference"})
    summary.header.push_back(c);
  for (const auto& [key, values] : groups) {
    const int reps = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / reps;
    double se = 0.0;
    if (reps >= 2) {
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      se = std::sqrt(ss / (reps - 1)) / std::sqrt(reps);
    }
    const double snr = csv::parse_double(key.scenario[6], 0);
    const double sparsity = csv::parse_double(key.scenario[3], 0);
    double reference = 0.0;
    if (key.metric == "rr")
      reference = 1.0;
    else if (key.metric == "rte")
      reference = snr + 1.0;
    else if (key.metric == "pve")
      reference = metrics::population_pve(snr);
    else if (key.metric == "nnz")
      reference = sparsity;
    else
      throw csv::CsvError("unknown metric '" + key.metric + "'", 0);

    std::vector<std::string> row = key.scenario;
    row.push_back(key.method);
    row.push_back(key.rule);
    row.push_back(key.metric);
    row.push_back(csv::format_double(mean));
    row.push_back(reps >= 2 ? csv::format_double(se) : "");
    row.push_back(std::to_string(reps));
    row.push_back(csv::format_double(reference));
    summary.rows.push_back(std::move(row));
  }
  csv::write_table(merged_path, merged);
  csv::write_table(summary_path, summary);

  // plot-ready tables: one file per (setting, metric, rule), rows indexed by
  // SNR, one mean/se column pair per method, plus the reference column
  struct PanelKey {
    std::string setting, metric, rule;
    bool operator<(const PanelKey& o) const {
      return std::tie(setting, metric, rule) <
             std::tie(o.setting, o.metric, o.rule);
    }
  };
  struct PanelRow {
    std::map<std::string, std::pair<double, double>> by_method;  // mean, se
    double reference = 0.0;
  };
  std::map<PanelKey, std::map<double, PanelRow>> panels;
  std::map<PanelKey, std::set<std::string>> panel_methods;
  for (const auto& srow : summary.rows) {
    PanelKey pk{srow[0], srow[9], srow[8]};
    const double snr = csv::parse_double(srow[6], 0);
    PanelRow& prow = panels[pk][snr];
    const double mean = csv::parse_double(srow[10], 0);
    const double se = srow[11].empty() ? 0.0 : csv::parse_double(srow[11], 0);
    prow.by_method[srow[7]] = {mean, se};
    prow.reference = csv::parse_double(srow[13], 0);
    panel_methods[pk].insert(srow[7]);
  }
  for (const auto& [pk, rows] : panels) {
    csv::Table t;
    t.header = {"snr"};
    for (const auto& m : panel_methods[pk]) {
      t.header.push_back(m + "_mean");
      t.header.push_back(m + "_se");
    }
    t.header.push_back("reference");
    for (const auto& [snr, prow] : rows) {
      std::vector<std::string> row{csv::format_double(snr)};
      for (const auto& m : panel_methods[pk]) {
        auto it = prow.by_method.find(m);
        if (it == prow.by_method.end()) {
          row.push_back("");
          row.push_back("");
        } else {
          row.push_back(csv::format_double(it->second.first));
          row.push_back(csv::format_double(it->second.second));
        }
      }
      row.push_back(csv::format_double(prow.reference));
      t.rows.push_back(std::move(row));
    }
    const fs::path file =
        fs::path(flags.out_dir) /
        ("fig_" + pk.setting + "_" + pk.metric + "_" + pk.rule + ".csv");
    refuse_overwrite(file, flags.force);
    csv::write_table(file, t);
  }

  std::cout << "report: " << merged.rows.size() << " rows, "
            << summary.rows.size() << " summary groups, " << panels.size()
            << " panel tables -> " << flags.out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse linear-regression benchmark"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string scenario_file, data_file, val_file, method_token;
  std::vector<std::string> report_inputs;
  int df_n = 70, df_p = 30, df_s = 5, df_beta_type = 2;
  double df_rho = 0.35, df_snr = 0.7;
  int df_lambda_points = 10, df_kmax = 10;

  auto add_common = [&](CLI::App* cmd, bool with_budget = true) {
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_flag("--force", flags.force, "overwrite existing output files");
    cmd->add_option("--seed", flags.seed, "seed override");
    if (with_budget)
      cmd->add_option("--budget-seconds", flags.budget_seconds,
                      "best-subset time budget per subset size");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run a scenario file");
  simulate->add_option("--scenario", scenario_file, "scenario JSON file")
      ->required();
  simulate->add_option("--methods", flags.methods,
                       "comma list of lasso,relaxo,fs,bs");
  simulate->add_option("--tuning", flags.tuning, "val, oracle or both");
  simulate->add_option("--reps", flags.reps, "repetition override");
  add_common(simulate);

  CLI::App* fit = app.add_subcommand("fit", "fit one dataset from CSV");
  fit->add_option("--data", data_file, "dataset CSV (x1..xp and y columns)")
      ->required();
  fit->add_option("--val", val_file, "validation dataset CSV for tuning");
  fit->add_option("--method", method_token, "lasso, relaxo, fs or bs")
      ->required();
  add_common(fit);

  CLI::App* df = app.add_subcommand("df", "Monte Carlo degrees of freedom");
  df->add_option("--methods", flags.methods,
                 "comma list of null,ols,lasso,relaxo,fs,bs");
  df->add_option("--reps", flags.reps, "Monte Carlo repetitions");
  df->add_option("--n", df_n, "rows");
  df->add_option("--p", df_p, "columns");
  df->add_option("--s", df_s, "true support size");
  df->add_option("--beta-type", df_beta_type, "coefficient pattern");
  df->add_option("--rho", df_rho, "predictor autocorrelation");
  df->add_option("--snr", df_snr, "signal-to-noise ratio");
  df->add_option("--lambda-points", df_lambda_points, "penalty grid size");
  df->add_option("--kmax", df_kmax, "largest subset size");
  add_common(df);

  CLI::App* report = app.add_subcommand("report", "merge long-format CSVs");
  report->add_option("inputs", report_inputs, "long-format CSV files")
      ->required();
  add_common(report, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(scenario_file, flags);
    if (fit->parsed())
      return cmd_fit(data_file, val_file, method_token, flags);
    if (df->parsed()) {
      if (!df->count("--methods")) flags.methods = "null,ols,lasso,fs,bs";
      if (!df->count("--budget-seconds")) flags.budget_seconds = 0.05;
      return cmd_df(flags, df_n, df_p, df_s, df_beta_type, df_rho, df_snr,
                    df_lambda_points, df_kmax);
    }
    if (report->parsed()) return cmd_report(report_inputs, flags);
  } catch (const scenario_io::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const csv::CsvError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
