#include "hmc/dataset.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string_view>

#include "hmc/csv.hpp"
#include "hmc/rng.hpp"

namespace hmc {

namespace {

std::string location(int row, int column) {
  std::string out = " (row " + std::to_string(row);
  if (column > 0) out += ", column " + std::to_string(column);
  return out + ")";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view text, int row, int column) {
  const auto t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) {
    throw DatasetError("not a finite real number: '" + std::string(text) + "'", row, column);
  }
  return value;
}

}  // namespace

DatasetError::DatasetError(const std::string& what, int row, int column)
    : std::runtime_error(what + (row > 0 ? location(row, column) : std::string())),
      row_(row),
      column_(column) {}

Dataset parse_dataset(std::istream& in, std::string name) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = csv::split_record(line);
    } catch (const std::runtime_error& e) {
      throw DatasetError(e.what(), line_no, 0);
    }
    if (header.empty()) {
      if (fields.size() < 2) {
        throw DatasetError("header needs at least one covariate and a label", line_no, 0);
      }
      header = std::move(fields);
      continue;
    }
    if (fields.size() != header.size()) {
      throw DatasetError("expected " + std::to_string(header.size()) + " fields, found " +
                             std::to_string(fields.size()),
                         line_no, 0);
    }
    std::vector<double> values(fields.size() - 1);
    for (std::size_t j = 0; j + 1 < fields.size(); ++j) {
      values[j] = parse_real(fields[j], line_no, static_cast<int>(j) + 1);
    }
    const int label_col = static_cast<int>(fields.size());
    const double label = parse_real(fields.back(), line_no, label_col);
    if (label != 0.0 && label != 1.0) {
      throw DatasetError("label must be 0 or 1, found '" + fields.back() + "'", line_no,
                         label_col);
    }
    rows.push_back(std::move(values));
    labels.push_back(label);
  }
  if (header.empty()) throw DatasetError("empty file", 0, 0);
  if (rows.empty()) throw DatasetError("no data rows", 0, 0);

  Dataset data;
  data.name = std::move(name);
  data.covariate_names.assign(header.begin(), header.end() - 1);
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(header.size() - 1);
  data.covariates.resize(n, p);
  data.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) data.covariates(i, j) = rows[i][j];
    data.labels[i] = labels[i];
  }
  return data;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path.string(), 0, 0);
  try {
    return parse_dataset(in, path.stem().string());
  } catch (const DatasetError& e) {
    throw DatasetError(path.string() + ": " + e.what(), e.row(), e.column());
  }
}

void write_dataset(const Dataset& data, std::ostream& out) {
  std::vector<std::string> header = data.covariate_names;
  header.push_back("label");
  out << csv::join_record(header) << '\n';
  for (Eigen::Index i = 0; i < data.covariates.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.covariates.cols(); ++j) {
      out << csv::format_number(data.covariates(i, j), 17) << ',';
    }
    out << static_cast<int>(data.labels[i]) << '\n';
  }
}

Dataset standardize_covariates(const Dataset& data) {
  if (data.n() < 2) throw DatasetError("standardisation needs at least two rows", 0, 0);
  Dataset out = data;
  const double n = static_cast<double>(data.n());
  for (Eigen::Index j = 0; j < data.covariates.cols(); ++j) {
    auto col = out.covariates.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / n);
    if (!(sd > 0.0) || sd < 1e-300) {
      const auto& label = j < static_cast<Eigen::Index>(data.covariate_names.size())
                              ? data.covariate_names[j]
                              : std::to_string(j + 1);
      throw DatasetError("covariate '" + label + "' has zero variance", 0,
                         static_cast<int>(j) + 1);
    }
    col /= sd;
  }
  return out;
}

Eigen::MatrixXd standardized_design_matrix(const Dataset& data) {
  const Dataset scaled = standardize_covariates(data);
  Eigen::MatrixXd design(scaled.n(), scaled.d());
  design.col(0).setOnes();
  design.rightCols(scaled.covariates.cols()) = scaled.covariates;
  return design;
}

std::unique_ptr<LogisticRegressionModel> standardize_design(const Dataset& data) {
  return std::make_unique<LogisticRegressionModel>(standardized_design_matrix(data), data.labels,
                                                   LogisticRegressionModel::kDefaultPriorVariance);
}

Dataset synthetic_logistic_dataset(int n, int covariates, std::uint64_t seed, std::string name) {
  if (n < 2 || covariates < 1) {
    throw std::invalid_argument("synthetic_logistic_dataset: need n >= 2 and covariates >= 1");
  }
  Rng rng(seed);
  constexpr double kShared = 0.3;  // pairwise correlation between covariates
  Dataset data;
  data.name = std::move(name);
  for (int j = 0; j < covariates; ++j) data.covariate_names.push_back("x" + std::to_string(j + 1));
  data.covariates.resize(n, covariates);
  data.labels.resize(n);
  Vector coef(covariates);
  for (int j = 0; j < covariates; ++j) coef[j] = (j % 2 == 0 ? 1.0 : -1.0) * 1.2 / (1.0 + 0.4 * j);
  const double intercept = -0.6;
  for (int i = 0; i < n; ++i) {
    const double factor = rng.normal();
    double eta = intercept;
    for (int j = 0; j < covariates; ++j) {
      const double x = std::sqrt(1.0 - kShared) * rng.normal() + std::sqrt(kShared) * factor;
      data.covariates(i, j) = x;
      eta += coef[j] * x;
    }
    data.labels[i] = rng.uniform() < logistic_sigmoid(eta) ? 1.0 : 0.0;
  }
  return data;
}

}  // namespace hmc
