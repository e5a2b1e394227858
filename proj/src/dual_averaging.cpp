#include "hmc/dual_averaging.hpp"

#include <cmath>
#include <stdexcept>

namespace hmc {

AdaptState AdaptState::start(double eps0, DualAveragingParams params) {
  if (!(eps0 > 0.0)) throw std::invalid_argument("AdaptState: eps0 must be positive");
  AdaptState s;
  s.params = params;
  s.mu = std::log(10.0 * eps0);
  s.log_eps = std::log(eps0);
  return s;
}

double AdaptState::eps() const { return std::exp(log_eps); }
double AdaptState::eps_bar() const { return std::exp(log_eps_bar); }

AdaptState dual_averaging_update(const AdaptState& state, double accept_stat, int m) {
  if (m < 1) throw std::invalid_argument("dual_averaging_update: m must be >= 1");
  const auto& p = state.params;
  AdaptState next = state;
  const double md = static_cast<double>(m);
  const double w = 1.0 / (md + p.t0);
  next.h_bar = (1.0 - w) * state.h_bar + w * (p.target_accept - accept_stat);
  next.log_eps = state.mu - std::sqrt(md) / p.gamma * next.h_bar;
  const double eta = std::pow(md, -p.kappa);
  next.log_eps_bar = eta * next.log_eps + (1.0 - eta) * state.log_eps_bar;
  next.iteration = m;
  return next;
}

}  // namespace hmc
