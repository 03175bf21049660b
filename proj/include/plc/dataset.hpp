#pragma once

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "plc/common.hpp"

namespace plc {

struct Dataset {
  Matrix features;         // n x d
  std::vector<int> truth;  // 0-based class ids; empty when unknown
  int class_count = 0;
};

/// Transductive partial-label problem: train rows keep their candidate sets,
/// test rows carry the full label set.
struct PartialLabelProblem {
  Dataset dataset;
  Matrix candidates;             // n x q binary
  std::vector<char> train_mask;  // n
  double rho = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline double parse_real(const std::string& field, int row, int col) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::runtime_error("parse error at row " + std::to_string(row + 1) + ", column " +
                             std::to_string(col + 1) + ": '" + field + "'");
  }
  return value;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && s[b] == ' ') ++b;
  return s.substr(b);
}

}  // namespace detail

/// Headerless CSV of reals -> matrix. All rows must have equal width.
inline Matrix load_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    line = detail::strip(line);
    if (line.empty()) continue;
    const auto fields = detail::split(line, ',');
    std::vector<double> values;
    values.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      values.push_back(detail::parse_real(detail::strip(fields[c]), row, static_cast<int>(c)));
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw std::runtime_error("ragged CSV row " + std::to_string(row + 1) + " in " + path);
    }
    rows.push_back(std::move(values));
    ++row;
  }
  if (rows.empty()) throw std::runtime_error("parse error: empty file " + path);
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.front().size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

/// Single-column CSV of 1-based class indices -> 0-based labels.
inline std::vector<int> load_labels(const std::string& path) {
  const Matrix m = load_csv_matrix(path);
  if (m.cols() != 1) throw std::runtime_error("label file must have one column: " + path);
  std::vector<int> labels(m.rows());
  for (int i = 0; i < m.rows(); ++i) {
    const int v = static_cast<int>(std::llround(m(i, 0)));
    if (v < 1 || std::abs(m(i, 0) - v) > 1e-9) {
      throw std::runtime_error("label at row " + std::to_string(i + 1) +
                               " is not a positive integer");
    }
    labels[i] = v - 1;
  }
  return labels;
}

/// Z-score each feature dimension in place; constant dimensions untouched.
inline void standardize_features(Matrix& X) {
  const int n = static_cast<int>(X.rows());
  for (int j = 0; j < X.cols(); ++j) {
    const double mean = X.col(j).mean();
    const double var = (X.col(j).array() - mean).square().sum() / n;
    if (var > 1e-24) {
      X.col(j) = (X.col(j).array() - mean) / std::sqrt(var);
    }
  }
}

inline Dataset load_dataset(const std::string& features_path, const std::string& labels_path,
                            bool standardize = true) {
  Dataset ds;
  ds.features = load_csv_matrix(features_path);
  ds.truth = load_labels(labels_path);
  if (static_cast<int>(ds.truth.size()) != ds.features.rows()) {
    throw std::runtime_error("row-count mismatch: " + std::to_string(ds.features.rows()) +
                             " feature rows vs " + std::to_string(ds.truth.size()) + " labels");
  }
  require(ds.features.rows() >= 2, "load_dataset: need at least 2 examples");
  ds.class_count = 0;
  for (const int t : ds.truth) ds.class_count = std::max(ds.class_count, t + 1);
  if (standardize) standardize_features(ds.features);
  return ds;
}

/// Candidate sets as CSV rows of semicolon-separated 1-based label indices.
inline Matrix load_candidates(const std::string& path, int q) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<std::vector<int>> rows;
  std::string line;
  while (std::getline(in, line)) {
    line = detail::strip(line);
    if (line.empty()) continue;
    std::vector<int> cand;
    for (const auto& f : detail::split(line, ';')) {
      const double v = detail::parse_real(detail::strip(f), static_cast<int>(rows.size()), 0);
      cand.push_back(static_cast<int>(std::llround(v)) - 1);
    }
    rows.push_back(std::move(cand));
  }
  if (rows.empty()) throw std::runtime_error("parse error: empty file " + path);
  Matrix Y = Matrix::Zero(rows.size(), q);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const int c : rows[i]) {
      if (c < 0 || c >= q) {
        throw std::runtime_error("candidate label out of range at row " + std::to_string(i + 1));
      }
      Y(static_cast<int>(i), c) = 1.0;
    }
    if (rows[i].empty()) {
      throw std::runtime_error("empty candidate set at row " + std::to_string(i + 1));
    }
  }
  return Y;
}

inline void save_candidates(const std::string& path, const Matrix& Y) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (int i = 0; i < Y.rows(); ++i) {
    bool first = true;
    for (int j = 0; j < Y.cols(); ++j) {
      if (Y(i, j) > 0.5) {
        if (!first) out << ';';
        out << (j + 1);
        first = false;
      }
    }
    out << '\n';
  }
}

/// Controlled partial-label generation: each row keeps its ground truth and
/// gains r false-positive labels sampled uniformly without replacement.
inline Matrix synthesize_candidates(const std::vector<int>& truth, int q, int r,
                                    std::uint64_t seed) {
  if (r < 1 || r >= q) {
    throw std::runtime_error("synthesize_candidates: r must satisfy 1 <= r <= q-1");
  }
  for (const int t : truth) require(t >= 0 && t < q, "synthesize_candidates: truth out of range");
  const int n = static_cast<int>(truth.size());
  Rng rng(seed);
  Matrix Y = Matrix::Zero(n, q);
  for (int i = 0; i < n; ++i) {
    Y(i, truth[i]) = 1.0;
    const auto picks = rng.sample_without_replacement(q - 1, r);
    for (const int p : picks) {
      const int label = p < truth[i] ? p : p + 1;  // skip the truth slot
      Y(i, label) = 1.0;
    }
  }
  return Y;
}

/// Sample round(rho*n) train rows; test rows get all-ones candidate sets.
inline PartialLabelProblem split_transductive(const Dataset& dataset, const Matrix& candidates,
                                              double rho, std::uint64_t seed) {
  require(rho > 0.0 && rho < 1.0, "split_transductive: rho must lie in (0,1)");
  const int n = static_cast<int>(dataset.features.rows());
  require(candidates.rows() == n, "split_transductive: candidate rows mismatch");
  const int n_train = static_cast<int>(std::floor(rho * n + 0.5));
  if (n_train < dataset.class_count) {
    std::cerr << "warning: only " << n_train << " labeled rows for " << dataset.class_count
              << " classes\n";
  }
  Rng rng(seed);
  const auto picks = rng.sample_without_replacement(n, n_train);
  PartialLabelProblem prob;
  prob.dataset = dataset;
  prob.candidates = Matrix::Ones(n, candidates.cols());
  prob.train_mask.assign(n, 0);
  for (const int i : picks) {
    prob.train_mask[i] = 1;
    prob.candidates.row(i) = candidates.row(i);
  }
  prob.rho = rho;
  prob.seed = seed;
  return prob;
}

}  // namespace plc
