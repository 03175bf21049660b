// Batch experiment harness for partial-label clustering.
//
// Subcommands:
//   synthesize  generate candidate-label sets for a labeled dataset
//   run         execute a (method x rho x trial) experiment grid
//   sweep       grid search over k / alpha / beta
//   report      re-aggregate previously written record files

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "plc/plc.hpp"

namespace {

void apply_overrides(plc::ExperimentConfig& cfg, const std::string& features,
                     const std::string& labels, const std::string& candidates,
                     const std::string& name, const std::vector<double>& rhos,
                     const std::vector<std::string>& methods, int trials, long long base_seed,
                     int r, int k, double alpha, double beta, double gamma, int max_outer,
                     const std::string& out, bool no_standardize) {
  if (!features.empty()) cfg.features_path = features;
  if (!labels.empty()) cfg.labels_path = labels;
  if (!candidates.empty()) cfg.candidates_path = candidates;
  if (!name.empty()) cfg.name = name;
  if (!rhos.empty()) cfg.protocol.rhos = rhos;
  if (!methods.empty()) cfg.methods = methods;
  if (trials > 0) cfg.protocol.trials = trials;
  if (base_seed >= 0) cfg.protocol.base_seed = static_cast<std::uint64_t>(base_seed);
  if (r > 0) cfg.protocol.r = r;
  if (k > 0) cfg.plc.k = k;
  if (alpha >= 0.0) cfg.plc.alpha = alpha;
  if (beta >= 0.0) cfg.plc.beta = beta;
  if (gamma >= 0.0) cfg.plc.gamma = gamma;
  if (max_outer > 0) cfg.plc.max_outer = max_outer;
  if (!out.empty()) cfg.out_dir = out;
  if (no_standardize) cfg.standardize = false;
}

int count_failures(const std::vector<plc::ResultRecord>& records) {
  int failures = 0;
  for (const auto& r : records) {
    if (!r.ok) {
      ++failures;
      std::cerr << "cell failed: " << r.method << " rho=" << r.rho << " trial=" << r.trial
                << ": " << r.error << '\n';
    }
  }
  return failures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partial-label clustering experiment harness"};
  app.require_subcommand(1);

  // --- synthesize ---
  auto* synth = app.add_subcommand("synthesize", "generate candidate label sets");
  std::string s_features, s_labels, s_out = "candidates.csv";
  int s_r = 1;
  long long s_seed = 1;
  bool s_no_std = false;
  synth->add_option("--features", s_features, "feature CSV")->required();
  synth->add_option("--labels", s_labels, "1-based label CSV")->required();
  synth->add_option("-r,--false-positives", s_r, "false-positive labels per row");
  synth->add_option("--seed", s_seed, "RNG seed");
  synth->add_option("--out", s_out, "output candidate CSV");
  synth->add_flag("--no-standardize", s_no_std, "skip z-score standardization");

  // --- shared run/sweep options ---
  std::string cfg_path, features, labels, candidates, name, out;
  std::vector<double> rhos;
  std::vector<std::string> methods;
  int trials = 0, r = 0, k = 0, max_outer = 0;
  long long base_seed = -1;
  double alpha = -1.0, beta = -1.0, gamma = -1.0;
  bool no_std = false;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", cfg_path, "experiment config file");
    cmd->add_option("--features", features, "feature CSV");
    cmd->add_option("--labels", labels, "1-based label CSV");
    cmd->add_option("--candidates", candidates, "candidate-set CSV (real partial-label data)");
    cmd->add_option("--name", name, "dataset name for the output layout");
    cmd->add_option("--rho", rhos, "labeled proportions");
    cmd->add_option("--methods", methods, "subset of PLC,PLC-CW,PLC-LD,PLC-SD,KMEANS,SC");
    cmd->add_option("--trials", trials, "trials per cell");
    cmd->add_option("--base-seed", base_seed, "base seed (cell seed = base + trial)");
    cmd->add_option("-r,--false-positives", r, "false-positive labels per row");
    cmd->add_option("-k", k, "neighbor count");
    cmd->add_option("--alpha", alpha, "dissimilarity propagation weight");
    cmd->add_option("--beta", beta, "similarity propagation weight");
    cmd->add_option("--gamma", gamma, "constraint clamp weight");
    cmd->add_option("--max-outer", max_outer, "outer iteration cap");
    cmd->add_option("--out", out, "output directory");
    cmd->add_flag("--no-standardize", no_std, "skip z-score standardization");
  };

  auto* run = app.add_subcommand("run", "run an experiment grid");
  add_common(run);

  auto* sw = app.add_subcommand("sweep", "hyperparameter sweep over k/alpha/beta");
  add_common(sw);
  std::vector<int> k_grid;
  std::vector<double> alpha_grid, beta_grid;
  sw->add_option("--k-grid", k_grid, "k values");
  sw->add_option("--alpha-grid", alpha_grid, "alpha values");
  sw->add_option("--beta-grid", beta_grid, "beta values");

  auto* rep = app.add_subcommand("report", "re-aggregate record files");
  std::vector<std::string> record_files;
  std::string rep_out = "out", rep_name = "dataset";
  rep->add_option("--records", record_files, "records.json files")->required();
  rep->add_option("--out", rep_out, "output directory");
  rep->add_option("--name", rep_name, "dataset name for the output layout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      const plc::Dataset ds = plc::load_dataset(s_features, s_labels, !s_no_std);
      const plc::Matrix Y = plc::synthesize_candidates(
          ds.truth, ds.class_count, s_r, static_cast<std::uint64_t>(s_seed));
      plc::save_candidates(s_out, Y);
      std::cout << "wrote " << Y.rows() << " candidate rows (q=" << ds.class_count
                << ", r=" << s_r << ") to " << s_out << '\n';
      return 0;
    }

    plc::ExperimentConfig cfg;
    if (run->parsed() || sw->parsed()) {
      if (!cfg_path.empty()) cfg = plc::load_experiment_config(cfg_path);
      apply_overrides(cfg, features, labels, candidates, name, rhos, methods, trials, base_seed,
                      r, k, alpha, beta, gamma, max_outer, out, no_std);
      if (cfg.features_path.empty() || cfg.labels_path.empty()) {
        std::cerr << "error: --features and --labels (or a config file) are required\n";
        return 2;
      }
    }

    if (run->parsed()) {
      const auto records = plc::run_experiment(cfg);
      plc::emit_report(records, cfg.out_dir, cfg.name);
      for (const auto& row : plc::aggregate(records)) {
        std::cout << row.method << " rho=" << row.rho << "  acc=" << row.acc_mean << "±"
                  << row.acc_std << "  nmi=" << row.nmi_mean << "±" << row.nmi_std << '\n';
      }
      const int failures = count_failures(records);
      std::cout << "records written to " << cfg.out_dir << '/' << cfg.name << '\n';
      return failures == 0 ? 0 : 1;
    }

    if (sw->parsed()) {
      plc::SweepGrid grid;
      grid.ks = k_grid.empty() ? std::vector<int>{cfg.plc.k} : k_grid;
      grid.alphas = alpha_grid.empty() ? std::vector<double>{cfg.plc.alpha} : alpha_grid;
      grid.betas = beta_grid.empty() ? std::vector<double>{cfg.plc.beta} : beta_grid;
      const auto rows = plc::sweep(cfg, grid);
      std::filesystem::create_directories(std::filesystem::path(cfg.out_dir) / cfg.name);
      const auto path =
          (std::filesystem::path(cfg.out_dir) / cfg.name / "sweep.csv").string();
      plc::emit_sweep(rows, path);
      std::cout << rows.size() << " sweep rows written to " << path << '\n';
      return 0;
    }

    if (rep->parsed()) {
      std::vector<plc::ResultRecord> records;
      for (const auto& file : record_files) {
        std::ifstream in(file);
        if (!in) throw std::runtime_error("cannot open " + file);
        plc::Json arr = plc::Json::parse(in);
        for (const auto& j : arr) records.push_back(plc::record_from_json(j));
      }
      plc::emit_report(records, rep_out, rep_name);
      std::cout << "re-aggregated " << records.size() << " records into " << rep_out << '/'
                << rep_name << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
