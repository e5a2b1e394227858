#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmc/models.hpp"

namespace hmc {

/// Binary-classification data: real covariates plus 0/1 labels.
struct Dataset {
  std::string name;
  std::vector<std::string> covariate_names;
  Eigen::MatrixXd covariates;  // n x (d - 1)
  Eigen::VectorXd labels;      // n, entries in {0, 1}

  int n() const { return static_cast<int>(covariates.rows()); }
  /// Parameter count once the intercept is added.
  int d() const { return static_cast<int>(covariates.cols()) + 1; }
};

/// Load/validation failure. row is 1-based counting the header as row 1,
/// column is 1-based; 0 means "not tied to a specific row/column".
class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::string& what, int row, int column);
  int row() const { return row_; }
  int column() const { return column_; }

 private:
  int row_;
  int column_;
};

/// CSV with a header row, comma separated, label in the last column.
Dataset parse_dataset(std::istream& in, std::string name);
Dataset load_dataset(const std::filesystem::path& path);

void write_dataset(const Dataset& data, std::ostream& out);

/// Centre each covariate and scale it to unit variance (denominator n).
/// Throws DatasetError naming a zero-variance column.
Dataset standardize_covariates(const Dataset& data);

/// Standardised covariates with a leading column of ones.
Eigen::MatrixXd standardized_design_matrix(const Dataset& data);

/// Logistic model on the standardised design, prior N(0, 100 I).
std::unique_ptr<LogisticRegressionModel> standardize_design(const Dataset& data);

/// Reproducible stand-in for a real benchmark set: iid N(0,1) covariates with
/// a fixed pairwise correlation and labels drawn from a logistic model with
/// moderate coefficients.
Dataset synthetic_logistic_dataset(int n, int covariates, std::uint64_t seed,
                                   std::string name = "synthetic");

}  // namespace hmc
