#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "plc/clustering.hpp"
#include "plc/dataset.hpp"
#include "plc/metrics.hpp"
#include "plc/solver.hpp"

namespace plc {

struct Protocol {
  int r = 1;
  std::vector<double> rhos = {0.1};
  int trials = 10;
  std::uint64_t base_seed = 1;
};

struct ExperimentConfig {
  std::string name = "dataset";
  std::string features_path;
  std::string labels_path;
  std::string candidates_path;  // optional: real-world candidate sets
  bool standardize = true;
  Protocol protocol;
  PLCConfig plc;
  std::vector<std::string> methods = {"PLC", "KMEANS", "SC"};
  std::string out_dir = "out";

  // clusters == 0 means "use the class count of the dataset".
  ExperimentConfig() { plc.clusters = 0; }
};

struct ResultRecord {
  std::string method;
  double rho = 0.0;
  int r = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double acc_all = 0.0, acc_test = 0.0;
  double nmi_all = 0.0, nmi_test = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;
  bool ok = true;
  std::string error;
  double wall_seconds = 0.0;  // kept out of the canonical JSON (not reproducible)

  friend bool operator==(const ResultRecord& a, const ResultRecord& b) {
    return a.method == b.method && a.rho == b.rho && a.r == b.r && a.trial == b.trial &&
           a.seed == b.seed && a.acc_all == b.acc_all && a.acc_test == b.acc_test &&
           a.nmi_all == b.nmi_all && a.nmi_test == b.nmi_test &&
           a.iterations == b.iterations && a.objective_trace == b.objective_trace &&
           a.ok == b.ok && a.error == b.error;
  }
};

using Json = nlohmann::ordered_json;

inline Json record_to_json(const ResultRecord& r) {
  Json j;
  j["method"] = r.method;
  j["rho"] = r.rho;
  j["r"] = r.r;
  j["trial"] = r.trial;
  j["seed"] = r.seed;
  j["acc_all"] = r.acc_all;
  j["acc_test"] = r.acc_test;
  j["nmi_all"] = r.nmi_all;
  j["nmi_test"] = r.nmi_test;
  j["iterations"] = r.iterations;
  j["objective_trace"] = r.objective_trace;
  j["ok"] = r.ok;
  j["error"] = r.error;
  return j;
}

inline ResultRecord record_from_json(const Json& j) {
  ResultRecord r;
  r.method = j.at("method").get<std::string>();
  r.rho = j.at("rho").get<double>();
  r.r = j.at("r").get<int>();
  r.trial = j.at("trial").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.acc_all = j.at("acc_all").get<double>();
  r.acc_test = j.at("acc_test").get<double>();
  r.nmi_all = j.at("nmi_all").get<double>();
  r.nmi_test = j.at("nmi_test").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.objective_trace = j.at("objective_trace").get<std::vector<double>>();
  r.ok = j.at("ok").get<bool>();
  r.error = j.at("error").get<std::string>();
  return r;
}

namespace detail {

inline std::vector<int> restrict_to(const std::vector<int>& v, const std::vector<char>& mask,
                                    bool keep_train) {
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (static_cast<bool>(mask[i]) == keep_train) out.push_back(v[i]);
  }
  return out;
}

inline ResultRecord run_cell(const Dataset& ds, const Matrix* fixed_candidates,
                             const ExperimentConfig& cfg, const std::string& method,
                             double rho, int trial) {
  ResultRecord rec;
  rec.method = method;
  rec.rho = rho;
  rec.r = cfg.protocol.r;
  rec.trial = trial;
  rec.seed = cfg.protocol.base_seed + static_cast<std::uint64_t>(trial);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const int q = ds.class_count;
    const Matrix Y = fixed_candidates != nullptr
                         ? *fixed_candidates
                         : synthesize_candidates(ds.truth, q, cfg.protocol.r, rec.seed);
    const PartialLabelProblem prob = split_transductive(ds, Y, rho, rec.seed);

    std::vector<int> assignment;
    if (method == "KMEANS") {
      assignment = kmeans_baseline(ds.features, q, rec.seed);
    } else if (method == "SC") {
      assignment = sc_baseline(ds.features, cfg.plc.k, q, rec.seed);
    } else {
      PLCConfig pc = cfg.plc;
      pc.clusters = pc.clusters > 0 ? pc.clusters : q;
      pc.seed = rec.seed;
      if (method == "PLC") {
        pc.variant = Variant::Full;
      } else if (method == "PLC-CW") {
        pc.variant = Variant::CW;
      } else if (method == "PLC-LD") {
        pc.variant = Variant::LD;
      } else if (method == "PLC-SD") {
        pc.variant = Variant::SD;
      } else {
        throw std::invalid_argument("unknown method: " + method);
      }
      const PLCState state = run_plc(prob, pc);
      rec.iterations = state.iterations_run;
      rec.objective_trace = state.objective_trace;
      assignment = finalize(state, pc);
    }

    rec.acc_all = clustering_accuracy(assignment, ds.truth);
    rec.nmi_all = normalized_mutual_information(assignment, ds.truth);
    const auto pred_test = restrict_to(assignment, prob.train_mask, false);
    const auto truth_test = restrict_to(ds.truth, prob.train_mask, false);
    rec.acc_test = clustering_accuracy(pred_test, truth_test);
    rec.nmi_test = normalized_mutual_information(pred_test, truth_test);
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

inline int worker_count() {
  if (const char* env = std::getenv("PLC_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return 1;
}

}  // namespace detail

/// One record per (method, rho, trial); cells are independent and may run on
/// PLC_WORKERS threads. Output order is deterministic regardless of timing.
inline std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg) {
  require(cfg.protocol.trials >= 1, "run_experiment: trials must be >= 1");
  for (const double rho : cfg.protocol.rhos) {
    require(rho > 0.0 && rho < 1.0, "run_experiment: rho values must lie in (0,1)");
  }
  const Dataset ds = load_dataset(cfg.features_path, cfg.labels_path, cfg.standardize);
  Matrix fixed;
  const bool have_fixed = !cfg.candidates_path.empty();
  if (have_fixed) fixed = load_candidates(cfg.candidates_path, ds.class_count);

  struct Cell {
    std::string method;
    double rho;
    int trial;
  };
  std::vector<Cell> cells;
  for (const auto& method : cfg.methods) {
    for (const double rho : cfg.protocol.rhos) {
      for (int t = 0; t < cfg.protocol.trials; ++t) cells.push_back({method, rho, t});
    }
  }

  std::vector<ResultRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
      records[i] = detail::run_cell(ds, have_fixed ? &fixed : nullptr, cfg, cells[i].method,
                                    cells[i].rho, cells[i].trial);
    }
  };
  const int workers = detail::worker_count();
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return records;
}

struct AggregateRow {
  std::string method;
  double rho = 0.0;
  int count = 0;
  double acc_mean = 0.0, acc_std = 0.0;
  double nmi_mean = 0.0, nmi_std = 0.0;
  double acc_test_mean = 0.0, acc_test_std = 0.0;
  double nmi_test_mean = 0.0, nmi_test_std = 0.0;
};

inline std::vector<AggregateRow> aggregate(const std::vector<ResultRecord>& records) {
  std::map<std::pair<std::string, double>, std::vector<const ResultRecord*>> groups;
  for (const auto& r : records) {
    if (r.ok) groups[{r.method, r.rho}].push_back(&r);
  }
  auto mean_std = [](const std::vector<double>& v, double& mean, double& sd) {
    mean = 0.0;
    for (const double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    sd = 0.0;
    if (v.size() > 1) {
      for (const double x : v) sd += (x - mean) * (x - mean);
      sd = std::sqrt(sd / static_cast<double>(v.size() - 1));
    }
  };
  std::vector<AggregateRow> rows;
  for (const auto& [key, members] : groups) {
    AggregateRow row;
    row.method = key.first;
    row.rho = key.second;
    row.count = static_cast<int>(members.size());
    std::vector<double> acc, nmi, acc_t, nmi_t;
    for (const auto* r : members) {
      acc.push_back(r->acc_all);
      nmi.push_back(r->nmi_all);
      acc_t.push_back(r->acc_test);
      nmi_t.push_back(r->nmi_test);
    }
    mean_std(acc, row.acc_mean, row.acc_std);
    mean_std(nmi, row.nmi_mean, row.nmi_std);
    mean_std(acc_t, row.acc_test_mean, row.acc_test_std);
    mean_std(nmi_t, row.nmi_test_mean, row.nmi_test_std);
    rows.push_back(row);
  }
  return rows;
}

/// Layout: <out>/<dataset>/<method>/records.json, <out>/<dataset>/tables/*.csv.
/// records.json is canonical (byte-identical across reruns of the same seed);
/// wall-clock timings go to a separate non-canonical CSV.
inline void emit_report(const std::vector<ResultRecord>& records, const std::string& out_dir,
                        const std::string& dataset_name) {
  if (records.empty()) throw std::runtime_error("emit_report: no records");
  namespace fs = std::filesystem;
  const fs::path root = fs::path(out_dir) / dataset_name;

  std::map<std::string, std::vector<const ResultRecord*>> by_method;
  for (const auto& r : records) by_method[r.method].push_back(&r);
  for (auto& [method, members] : by_method) {
    std::sort(members.begin(), members.end(), [](const ResultRecord* a, const ResultRecord* b) {
      return std::tie(a->rho, a->trial) < std::tie(b->rho, b->trial);
    });
    fs::create_directories(root / method);
    Json arr = Json::array();
    for (const auto* r : members) arr.push_back(record_to_json(*r));
    std::ofstream out(root / method / "records.json");
    if (!out) throw std::runtime_error("cannot write records under " + (root / method).string());
    out << arr.dump(2) << '\n';
  }

  fs::create_directories(root / "tables");
  const auto rows = aggregate(records);
  {
    std::ofstream out(root / "tables" / "summary.csv");
    out << "method,rho,acc_mean,acc_std,nmi_mean,nmi_std\n";
    for (const auto& row : rows) {
      out << row.method << ',' << row.rho << ',' << row.acc_mean << ',' << row.acc_std << ','
          << row.nmi_mean << ',' << row.nmi_std << '\n';
    }
  }
  {
    std::ofstream out(root / "tables" / "summary_test_scope.csv");
    out << "method,rho,acc_mean,acc_std,nmi_mean,nmi_std\n";
    for (const auto& row : rows) {
      out << row.method << ',' << row.rho << ',' << row.acc_test_mean << ','
          << row.acc_test_std << ',' << row.nmi_test_mean << ',' << row.nmi_test_std << '\n';
    }
  }
  for (const char* metric : {"acc", "nmi"}) {
    std::ofstream out(root / "tables" / (std::string("series_") + metric + ".csv"));
    out << "method,rho,mean,std\n";
    for (const auto& row : rows) {
      const bool is_acc = std::string(metric) == "acc";
      out << row.method << ',' << row.rho << ',' << (is_acc ? row.acc_mean : row.nmi_mean)
          << ',' << (is_acc ? row.acc_std : row.nmi_std) << '\n';
    }
  }
  {
    std::ofstream out(root / "tables" / "timings.csv");
    out << "method,rho,trial,wall_seconds\n";
    for (const auto& r : records) {
      out << r.method << ',' << r.rho << ',' << r.trial << ',' << r.wall_seconds << '\n';
    }
  }
}

struct SweepGrid {
  std::vector<int> ks;
  std::vector<double> alphas;
  std::vector<double> betas;
};

struct SweepRow {
  int k = 0;
  double alpha = 0.0, beta = 0.0;
  AggregateRow aggregate;
};

/// Cartesian product over {k, alpha, beta}; one aggregate row per grid point
/// per (method, rho) cell.
inline std::vector<SweepRow> sweep(const ExperimentConfig& base, const SweepGrid& grid) {
  require(!grid.ks.empty() && !grid.alphas.empty() && !grid.betas.empty(),
          "sweep: empty grid axis");
  std::vector<SweepRow> rows;
  for (const int k : grid.ks) {
    for (const double alpha : grid.alphas) {
      for (const double beta : grid.betas) {
        ExperimentConfig cfg = base;
        cfg.plc.k = k;
        cfg.plc.alpha = alpha;
        cfg.plc.beta = beta;
        const auto records = run_experiment(cfg);
        for (const auto& agg : aggregate(records)) {
          rows.push_back({k, alpha, beta, agg});
        }
      }
    }
  }
  return rows;
}

inline void emit_sweep(const std::vector<SweepRow>& rows, const std::string& path) {
  if (rows.empty()) throw std::runtime_error("emit_sweep: no rows");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "k,alpha,beta,method,rho,acc_mean,acc_std,nmi_mean,nmi_std\n";
  for (const auto& r : rows) {
    out << r.k << ',' << r.alpha << ',' << r.beta << ',' << r.aggregate.method << ','
        << r.aggregate.rho << ',' << r.aggregate.acc_mean << ',' << r.aggregate.acc_std << ','
        << r.aggregate.nmi_mean << ',' << r.aggregate.nmi_std << '\n';
  }
}

// --- configuration file -----------------------------------------------------
// Flat INI-style text: `key = value` lines grouped under `[section]` headers,
// `#` comments, lists comma-separated.

inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::map<std::string, std::string> kv;
  std::string line, section;
  while (std::getline(in, line)) {
    line = detail::strip(line);
    if (const auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = detail::strip(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = detail::strip(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad config line: " + line);
    const std::string key = detail::strip(line.substr(0, eq));
    const std::string value = detail::strip(line.substr(eq + 1));
    kv[section.empty() ? key : section + "." + key] = value;
  }
  return kv;
}

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& f : split(s, ',')) {
    const auto v = strip(f);
    if (!v.empty()) out.push_back(v);
  }
  return out;
}

inline bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::runtime_error("bad boolean value: " + s);
}

}  // namespace detail

inline ExperimentConfig load_experiment_config(const std::string& path) {
  const auto kv = parse_config_file(path);
  ExperimentConfig cfg;
  auto get = [&](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (const auto* v = get("name")) cfg.name = *v;
  if (const auto* v = get("features")) cfg.features_path = *v;
  if (const auto* v = get("labels")) cfg.labels_path = *v;
  if (const auto* v = get("candidates")) cfg.candidates_path = *v;
  if (const auto* v = get("standardize")) cfg.standardize = detail::parse_bool(*v);
  if (const auto* v = get("protocol.r")) cfg.protocol.r = std::stoi(*v);
  if (const auto* v = get("protocol.rho")) {
    cfg.protocol.rhos.clear();
    for (const auto& f : detail::split_list(*v)) cfg.protocol.rhos.push_back(std::stod(f));
  }
  if (const auto* v = get("protocol.trials")) cfg.protocol.trials = std::stoi(*v);
  if (const auto* v = get("protocol.base_seed")) cfg.protocol.base_seed = std::stoull(*v);
  if (const auto* v = get("plc.k")) cfg.plc.k = std::stoi(*v);
  if (const auto* v = get("plc.alpha")) cfg.plc.alpha = std::stod(*v);
  if (const auto* v = get("plc.beta")) cfg.plc.beta = std::stod(*v);
  if (const auto* v = get("plc.gamma")) cfg.plc.gamma = std::stod(*v);
  if (const auto* v = get("plc.clusters")) cfg.plc.clusters = std::stoi(*v);
  if (const auto* v = get("plc.max_outer")) cfg.plc.max_outer = std::stoi(*v);
  if (const auto* v = get("plc.rel_tol")) cfg.plc.rel_tol = std::stod(*v);
  if (const auto* v = get("plc.refresh_constraints"))
    cfg.plc.refresh_constraints = detail::parse_bool(*v);
  if (const auto* v = get("plc.constraints_train_only"))
    cfg.plc.constraints_train_only = detail::parse_bool(*v);
  if (const auto* v = get("plc.sd_iterations")) cfg.plc.sd_iterations = std::stoi(*v);
  if (const auto* v = get("run.methods")) cfg.methods = detail::split_list(*v);
  if (const auto* v = get("run.out")) cfg.out_dir = *v;
  return cfg;
}

}  // namespace plc
