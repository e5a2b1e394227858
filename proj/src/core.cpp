#include "hmc/core.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hmc {

Vector TargetModel::gradient(const Vector& q) const {
  gradient_evaluations_.fetch_add(1, std::memory_order_relaxed);
  Vector out(q.size());
  compute_gradient(q, out);
  return out;
}

PhasePoint::PhasePoint(Vector q, Vector p) : position(std::move(q)), momentum(std::move(p)) {
  if (position.size() != momentum.size() || position.size() < 1) {
    throw std::invalid_argument("PhasePoint: position and momentum must share a length >= 1");
  }
}

bool PhasePoint::finite() const { return position.allFinite() && momentum.allFinite(); }

double kinetic_energy(const Vector& p) { return 0.5 * p.squaredNorm(); }

double total_energy(const TargetModel& model, const PhasePoint& state) {
  if (state.dim() != model.dim()) {
    throw std::invalid_argument("total_energy: state dimension does not match model");
  }
  const double u = model.potential(state.position);
  if (!std::isfinite(u)) return std::numeric_limits<double>::infinity();
  return u + kinetic_energy(state.momentum);
}

EnergyDelta energy_delta(double h_current, double h_proposal) {
  if (!std::isfinite(h_current) || !std::isfinite(h_proposal)) {
    return {-std::numeric_limits<double>::infinity()};
  }
  return {h_current - h_proposal};
}

Vector sample_momentum(Rng& rng, int d) {
  if (d < 1) throw std::invalid_argument("sample_momentum: d must be positive");
  Vector p(d);
  for (int i = 0; i < d; ++i) p[i] = rng.normal();
  return p;
}

double accept_probability(EnergyDelta delta) {
  if (std::isnan(delta.value)) return 0.0;
  if (delta.value >= 0.0) return 1.0;
  return std::exp(delta.value);  // exp(-inf) == 0
}

}  // namespace hmc
