#include "hmc/models.hpp"

#include <cmath>
#include <stdexcept>

namespace hmc {

StdGaussianModel::StdGaussianModel(int d) : d_(d) {
  if (d < 1) throw std::invalid_argument("StdGaussianModel: d must be positive");
}

double StdGaussianModel::potential(const Vector& q) const { return 0.5 * q.squaredNorm(); }

void StdGaussianModel::compute_gradient(const Vector& q, Vector& out) const { out = q; }

double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double logistic_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LogisticRegressionModel::LogisticRegressionModel(Eigen::MatrixXd design, Eigen::VectorXd labels,
                                                 double prior_variance)
    : design_(std::move(design)), labels_(std::move(labels)), prior_variance_(prior_variance) {
  if (design_.rows() != labels_.size()) {
    throw std::invalid_argument("LogisticRegressionModel: design rows and labels differ");
  }
  if (design_.cols() < 1 || design_.rows() < 1) {
    throw std::invalid_argument("LogisticRegressionModel: empty design");
  }
  if (!(prior_variance_ > 0.0)) {
    throw std::invalid_argument("LogisticRegressionModel: prior variance must be positive");
  }
  for (Eigen::Index i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 0.0 && labels_[i] != 1.0) {
      throw std::invalid_argument("LogisticRegressionModel: labels must be 0 or 1");
    }
  }
}

double LogisticRegressionModel::potential(const Vector& beta) const {
  if (beta.size() != dim()) {
    throw std::invalid_argument("LogisticRegressionModel: beta has wrong length");
  }
  const Vector eta = design_ * beta;
  double u = 0.0;
  // softplus(eta) - y eta rewritten per label so saturated terms stay exact.
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    u += labels_[i] == 1.0 ? softplus(-eta[i]) : softplus(eta[i]);
  }
  return u + beta.squaredNorm() / (2.0 * prior_variance_);
}

void LogisticRegressionModel::compute_gradient(const Vector& beta, Vector& out) const {
  if (beta.size() != dim()) {
    throw std::invalid_argument("LogisticRegressionModel: beta has wrong length");
  }
  Vector residual = design_ * beta;
  for (Eigen::Index i = 0; i < residual.size(); ++i) {
    residual[i] = labels_[i] == 1.0 ? -logistic_sigmoid(-residual[i]) : logistic_sigmoid(residual[i]);
  }
  out.noalias() = design_.transpose() * residual;
  out += beta / prior_variance_;
}

std::pair<double, Vector> logistic_potential_and_gradient(const LogisticRegressionModel& model,
                                                          const Vector& beta) {
  // Route through gradient() so the evaluation is counted.
  Vector g = model.gradient(beta);
  return {model.potential(beta), std::move(g)};
}

StudentTModel::StudentTModel(double dof, Eigen::MatrixXd precision)
    : dof_(dof), precision_(std::move(precision)) {
  if (!(dof_ > 0.0)) throw std::invalid_argument("StudentTModel: dof must be positive");
  const auto d = precision_.rows();
  if (d < 1 || precision_.cols() != d) {
    throw std::invalid_argument("StudentTModel: precision must be square");
  }
  if (!precision_.isApprox(precision_.transpose(), 1e-12)) {
    throw std::invalid_argument("StudentTModel: precision must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(precision_);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("StudentTModel: precision must be positive definite");
  }
  tridiagonal_ = true;
  for (Eigen::Index i = 0; i < d && tridiagonal_; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (std::abs(i - j) > 1 && precision_(i, j) != 0.0) {
        tridiagonal_ = false;
        break;
      }
    }
  }
  if (tridiagonal_) {
    diag_ = precision_.diagonal();
    off_diag_ = d > 1 ? Vector(precision_.diagonal(1)) : Vector();
  }
}

std::unique_ptr<StudentTModel> StudentTModel::ar1(int d, double rho, double dof) {
  return std::make_unique<StudentTModel>(dof, ar1_precision(d, rho));
}

Vector StudentTModel::apply_precision(const Vector& x) const {
  if (!tridiagonal_) return precision_ * x;
  const auto d = x.size();
  Vector out = diag_.cwiseProduct(x);
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    out[i] += off_diag_[i] * x[i + 1];
    out[i + 1] += off_diag_[i] * x[i];
  }
  return out;
}

double StudentTModel::potential(const Vector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("StudentTModel: x has wrong length");
  const double quad = x.dot(apply_precision(x));
  return 0.5 * (dof_ + static_cast<double>(dim())) * std::log1p(quad / dof_);
}

void StudentTModel::compute_gradient(const Vector& x, Vector& out) const {
  if (x.size() != dim()) throw std::invalid_argument("StudentTModel: x has wrong length");
  const Vector qx = apply_precision(x);
  out = ((dof_ + static_cast<double>(dim())) / (dof_ + x.dot(qx))) * qx;
}

std::pair<double, Vector> student_t_potential_and_gradient(const StudentTModel& model,
                                                           const Vector& x) {
  Vector g = model.gradient(x);
  return {model.potential(x), std::move(g)};
}

Eigen::MatrixXd ar1_precision(int d, double rho) {
  if (d < 2) throw std::invalid_argument("ar1_precision: d must be >= 2");
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("ar1_precision: |rho| must be < 1");
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    q(i, i) = (i == 0 || i == d - 1) ? 1.0 : 1.0 + rho * rho;
    if (i + 1 < d) {
      q(i, i + 1) = -rho;
      q(i + 1, i) = -rho;
    }
  }
  return q;
}

Eigen::MatrixXd ar1_covariance(int d, double rho) {
  if (d < 1) throw std::invalid_argument("ar1_covariance: d must be positive");
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("ar1_covariance: |rho| must be < 1");
  Eigen::MatrixXd s(d, d);
  const double scale = 1.0 / (1.0 - rho * rho);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) s(i, j) = std::pow(rho, std::abs(i - j)) * scale;
  }
  return s;
}

}  // namespace hmc
