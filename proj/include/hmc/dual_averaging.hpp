#pragma once

namespace hmc {

struct DualAveragingParams {
  double target_accept = 0.8;  // delta
  double gamma = 0.05;
  double t0 = 10.0;
  double kappa = 0.75;
};

/// Step-size adaptation state. Starts with log_eps_bar = 0, h_bar = 0 and
/// shrinkage point mu = log(10 eps0).
struct AdaptState {
  DualAveragingParams params;
  double mu = 0.0;
  double h_bar = 0.0;
  double log_eps = 0.0;
  double log_eps_bar = 0.0;
  int iteration = 0;

  static AdaptState start(double eps0, DualAveragingParams params = {});
  double eps() const;      // current iterate, used while adapting
  double eps_bar() const;  // averaged iterate, frozen after adaptation
};

/// One update with the accept statistic of iteration m (m >= 1):
///   h_bar   <- (1 - 1/(m + t0)) h_bar + (delta - accept_stat) / (m + t0)
///   log eps <- mu - sqrt(m) / gamma * h_bar
///   log eps_bar <- m^-kappa log eps + (1 - m^-kappa) log eps_bar
AdaptState dual_averaging_update(const AdaptState& state, double accept_stat, int m);

}  // namespace hmc
