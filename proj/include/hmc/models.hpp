#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <utility>

#include "hmc/core.hpp"

namespace hmc {

/// U(q) = q'q / 2.
class StdGaussianModel final : public TargetModel {
 public:
  explicit StdGaussianModel(int d);
  int dim() const override { return d_; }
  double potential(const Vector& q) const override;

 protected:
  void compute_gradient(const Vector& q, Vector& out) const override;

 private:
  int d_;
};

/// Bayesian logistic regression with a N(0, prior_variance I) prior.
///
/// U(b) = sum_i [softplus(x_i'b) - y_i x_i'b] + b'b / (2 prior_variance),
/// with softplus(z) = log(1 + e^z) evaluated without overflow.
class LogisticRegressionModel final : public TargetModel {
 public:
  static constexpr double kDefaultPriorVariance = 100.0;

  LogisticRegressionModel(Eigen::MatrixXd design, Eigen::VectorXd labels,
                          double prior_variance = kDefaultPriorVariance);

  int dim() const override { return static_cast<int>(design_.cols()); }
  double potential(const Vector& beta) const override;

  const Eigen::MatrixXd& design() const { return design_; }
  const Eigen::VectorXd& labels() const { return labels_; }
  double prior_variance() const { return prior_variance_; }

 protected:
  void compute_gradient(const Vector& beta, Vector& out) const override;

 private:
  Eigen::MatrixXd design_;
  Eigen::VectorXd labels_;
  double prior_variance_;
};

/// U and grad U; the gradient goes through TargetModel::gradient and is counted.
std::pair<double, Vector> logistic_potential_and_gradient(const LogisticRegressionModel& model,
                                                          const Vector& beta);

/// log(1 + e^z) without overflow or loss of precision for large |z|.
double softplus(double z);
/// 1 / (1 + e^-z) without overflow.
double logistic_sigmoid(double z);

/// Multivariate student-t kernel (1 + x'Qx / nu)^(-(nu + d) / 2):
/// U(x) = (nu + d)/2 log(1 + x'Qx / nu), grad U = (nu + d) Qx / (nu + x'Qx).
///
/// A tridiagonal Q (e.g. from ar1_precision) is detected at construction and
/// multiplied in O(d).
class StudentTModel final : public TargetModel {
 public:
  static constexpr double kDefaultDof = 5.0;

  StudentTModel(double dof, Eigen::MatrixXd precision);

  /// nu-dof model with the AR(1) precision of ar1_precision(d, rho).
  static std::unique_ptr<StudentTModel> ar1(int d, double rho, double dof = kDefaultDof);

  int dim() const override { return static_cast<int>(precision_.rows()); }
  double potential(const Vector& x) const override;

  double dof() const { return dof_; }
  const Eigen::MatrixXd& precision() const { return precision_; }
  bool tridiagonal() const { return tridiagonal_; }

 protected:
  void compute_gradient(const Vector& x, Vector& out) const override;

 private:
  Vector apply_precision(const Vector& x) const;

  double dof_;
  Eigen::MatrixXd precision_;
  bool tridiagonal_ = false;
  Vector diag_;
  Vector off_diag_;
};

std::pair<double, Vector> student_t_potential_and_gradient(const StudentTModel& model,
                                                           const Vector& x);

/// Precision of a unit-innovation AR(1) chain with autocorrelation rho:
/// tridiagonal with corner diagonals 1, interior diagonals 1 + rho^2 and
/// off-diagonals -rho. Requires d >= 2 and |rho| < 1.
Eigen::MatrixXd ar1_precision(int d, double rho);

/// Stationary AR(1) covariance rho^|i-j| / (1 - rho^2).
Eigen::MatrixXd ar1_covariance(int d, double rho);

}  // namespace hmc
