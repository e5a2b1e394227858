#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cstdint>

#include "hmc/rng.hpp"

namespace hmc {

using Vector = Eigen::VectorXd;

/// Target density pi(q) described through its potential U(q) = -log pi(q).
///
/// Potentials only need to be correct up to an additive constant. Every call
/// to gradient() bumps an atomic counter so that concurrent chains sharing a
/// model still get an exact total.
class TargetModel {
 public:
  TargetModel() = default;
  TargetModel(const TargetModel&) = delete;
  TargetModel& operator=(const TargetModel&) = delete;
  virtual ~TargetModel() = default;

  virtual int dim() const = 0;
  virtual double potential(const Vector& q) const = 0;

  Vector gradient(const Vector& q) const;

  std::uint64_t gradient_evaluations() const {
    return gradient_evaluations_.load(std::memory_order_relaxed);
  }
  void reset_gradient_counter() const { gradient_evaluations_.store(0, std::memory_order_relaxed); }

 protected:
  virtual void compute_gradient(const Vector& q, Vector& out) const = 0;

 private:
  mutable std::atomic<std::uint64_t> gradient_evaluations_{0};
};

/// Point (q, p) in phase space.
///
/// `gradient` optionally caches grad U(position). It is empty unless an
/// integrator filled it, and must be cleared whenever position changes.
struct PhasePoint {
  Vector position;
  Vector momentum;
  Vector gradient;

  PhasePoint() = default;
  PhasePoint(Vector q, Vector p);

  int dim() const { return static_cast<int>(position.size()); }
  bool has_gradient() const { return gradient.size() == position.size() && gradient.size() > 0; }
  void flip_momentum() { momentum = -momentum; }
  bool finite() const;
};

/// Delta = H(q, p) - H(q*, p*): positive when the proposal lowers the energy.
struct EnergyDelta {
  double value = 0.0;
};

double kinetic_energy(const Vector& p);

/// U(q) + p'p / 2. Returns +inf when the potential is not finite.
double total_energy(const TargetModel& model, const PhasePoint& state);

EnergyDelta energy_delta(double h_current, double h_proposal);

/// d iid standard normal draws.
Vector sample_momentum(Rng& rng, int d);

/// min(1, exp(delta)); non-finite deltas (divergences) give 0.
double accept_probability(EnergyDelta delta);

}  // namespace hmc
