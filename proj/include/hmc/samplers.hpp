#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "hmc/dual_averaging.hpp"
#include "hmc/integrators.hpp"
#include "hmc/nuts.hpp"

namespace hmc {

struct HmcConfig {
  Scheme scheme = Scheme::Leapfrog;
  double eps = 0.1;
  int num_steps = 10;
  std::uint64_t seed = 0;
};

struct NutsConfig {
  Scheme scheme = Scheme::Leapfrog;
  double target_accept = 0.8;
  int max_tree_depth = 10;
  /// Adaptation window; negative means "the whole burn-in".
  int adapt_iterations = -1;
  double gamma = 0.05;
  double t0 = 10.0;
  double kappa = 0.75;
  double delta_max = kDefaultDeltaMax;
  std::uint64_t seed = 0;
};

using SamplerConfig = std::variant<HmcConfig, NutsConfig>;

void validate(const HmcConfig& cfg);
void validate(const NutsConfig& cfg);

struct HmcTransition {
  Vector position;
  bool accepted = false;
  bool divergent = false;
  EnergyDelta delta;
  double accept_prob = 0.0;
};

/// Fresh N(0, I) momentum, L steps of the scheme, Metropolis accept with
/// probability min(1, e^Delta). The final momentum is discarded.
HmcTransition hmc_iteration(const TargetModel& model, const Vector& current, const HmcConfig& cfg,
                            Rng& rng);

class InitializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxEpsilonAdjustments = 100;

/// Starting step size: from eps = 1, doubles (or halves) until the
/// one-step acceptance ratio crosses 1/2. Throws InitializationError after
/// kMaxEpsilonAdjustments without a crossing.
double find_reasonable_epsilon(const TargetModel& model, const Vector& q0, const Vector& p0,
                               Scheme kind);
double find_reasonable_epsilon(const TargetModel& model, const Vector& q0, Scheme kind, Rng& rng);

/// How `iterations` relates to `burn_in`.
enum class BurnIn {
  Additional,  // burn_in warm-up draws, then `iterations` retained draws
  Included,    // `iterations` total, the first burn_in discarded
};

struct ChainSettings {
  int iterations = 5000;
  int burn_in = 1000;
  BurnIn convention = BurnIn::Additional;
  std::optional<Vector> initial_position;  // zeros when unset
};

struct ChainOutput {
  Eigen::MatrixXd samples;                // retained draws x d
  std::vector<double> accept_stat_trace;  // one per retained draw
  std::vector<double> warmup_accept_stat_trace;  // one per warm-up draw
  std::vector<int> tree_depth_trace;      // NUTS only
  double adapted_eps = 0.0;
  std::uint64_t gradient_count = 0;  // whole run, warm-up included
  double wall_time = 0.0;            // seconds, whole run, warm-up included
  int divergence_count = 0;
};

/// Runs one chain, seeded from the config. NUTS adapts eps by dual averaging
/// during burn-in and freezes it at the averaged iterate afterwards. The
/// gradient count is the change in the model's counter, so the model should
/// not be shared with concurrently running chains.
ChainOutput run_chain(const TargetModel& model, const SamplerConfig& config,
                      const ChainSettings& settings);

}  // namespace hmc
