#pragma once

#include <cstdint>
#include <functional>

#include "hmc/integrators.hpp"

namespace hmc {

inline constexpr double kDefaultDeltaMax = 1000.0;
inline constexpr int kMaxTreeDepthLimit = 15;

/// True while the trajectory has not turned back on itself:
/// (q+ - q-) . p- >= 0 and (q+ - q-) . p+ >= 0.
bool no_u_turn(const Vector& q_minus, const Vector& q_plus, const Vector& p_minus,
               const Vector& p_plus);

struct NutsDraw {
  Vector position;
  double accept_stat = 0.0;  // mean min(1, e^Delta) over the last doubling
  int tree_depth = 0;
  bool divergent = false;
  std::uint64_t gradient_increment = 0;
  int num_steps = 0;  // integrator steps taken
};

struct NutsOptions {
  int max_tree_depth = 10;
  double delta_max = kDefaultDeltaMax;
  /// Called after every integrator step with the new state and direction
  /// (+1 forward, -1 backward). Used by tests to replay trajectories.
  std::function<void(const PhasePoint&, int)> on_step;
};

/// One slice-sampling NUTS transition (doubling tree with recursive uniform
/// selection) from `position` with the given initial momentum. Each tree
/// step is one full step of `kind`; backward steps use momentum reversal.
NutsDraw nuts_transition(const TargetModel& model, const Vector& position, const Vector& momentum,
                         double eps, Scheme kind, Rng& rng, const NutsOptions& options = {});

/// Draws the momentum from rng, then calls nuts_transition.
NutsDraw nuts_draw(const TargetModel& model, const Vector& position, double eps, Scheme kind,
                   int max_depth, Rng& rng);

}  // namespace hmc
