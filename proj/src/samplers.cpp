#include "hmc/samplers.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace hmc {

void validate(const HmcConfig& cfg) {
  if (!(cfg.eps > 0.0)) throw std::invalid_argument("HmcConfig: eps must be positive");
  if (cfg.num_steps < 1) throw std::invalid_argument("HmcConfig: L must be >= 1");
}

void validate(const NutsConfig& cfg) {
  if (!(cfg.target_accept > 0.0 && cfg.target_accept < 1.0)) {
    throw std::invalid_argument("NutsConfig: target acceptance must lie in (0, 1)");
  }
  if (cfg.max_tree_depth < 1 || cfg.max_tree_depth > kMaxTreeDepthLimit) {
    throw std::invalid_argument("NutsConfig: max_tree_depth must be in [1, 15]");
  }
  if (!(cfg.gamma > 0.0 && cfg.t0 > 0.0 && cfg.kappa > 0.0)) {
    throw std::invalid_argument("NutsConfig: dual-averaging constants must be positive");
  }
}

HmcTransition hmc_iteration(const TargetModel& model, const Vector& current, const HmcConfig& cfg,
                            Rng& rng) {
  validate(cfg);
  const PhasePoint start(current, sample_momentum(rng, model.dim()));
  const double h0 = total_energy(model, start);
  const StepResult end = integrate(cfg.scheme, model, start, cfg.eps, cfg.num_steps);
  HmcTransition out;
  out.divergent = end.divergent;
  out.delta = end.divergent ? EnergyDelta{-std::numeric_limits<double>::infinity()}
                            : energy_delta(h0, total_energy(model, end.state));
  out.accept_prob = accept_probability(out.delta);
  out.accepted = !end.divergent && rng.uniform() < out.accept_prob;
  out.position = out.accepted ? end.state.position : current;
  return out;
}

double find_reasonable_epsilon(const TargetModel& model, const Vector& q0, const Vector& p0,
                               Scheme kind) {
  if (!q0.allFinite()) throw std::invalid_argument("find_reasonable_epsilon: q0 not finite");
  const PhasePoint start(q0, p0);
  const double h0 = total_energy(model, start);
  auto log_ratio = [&](double eps) {
    const StepResult r = step(kind, model, start, eps);
    if (r.divergent) return -std::numeric_limits<double>::infinity();
    return energy_delta(h0, total_energy(model, r.state)).value;
  };
  double eps = 1.0;
  double lr = log_ratio(eps);
  const double log_half = std::log(0.5);
  const int a = lr > log_half ? 1 : -1;
  int adjustments = 0;
  while (a * lr > -a * std::log(2.0)) {
    if (++adjustments > kMaxEpsilonAdjustments) {
      throw InitializationError("find_reasonable_epsilon: no acceptance crossing after " +
                                std::to_string(kMaxEpsilonAdjustments) + " adjustments");
    }
    eps = a > 0 ? 2.0 * eps : 0.5 * eps;
    lr = log_ratio(eps);
  }
  return eps;
}

double find_reasonable_epsilon(const TargetModel& model, const Vector& q0, Scheme kind, Rng& rng) {
  return find_reasonable_epsilon(model, q0, sample_momentum(rng, model.dim()), kind);
}

namespace {

struct Plan {
  int warmup;
  int retained;
};

Plan plan_for(const ChainSettings& s) {
  if (s.burn_in < 0) throw std::invalid_argument("run_chain: burn_in must be >= 0");
  if (s.convention == BurnIn::Included) {
    if (s.iterations <= s.burn_in) {
      throw std::invalid_argument("run_chain: iterations must exceed burn_in");
    }
    return {s.burn_in, s.iterations - s.burn_in};
  }
  if (s.iterations < 1) throw std::invalid_argument("run_chain: iterations must be >= 1");
  return {s.burn_in, s.iterations};
}

Vector initial_position(const TargetModel& model, const ChainSettings& s) {
  if (!s.initial_position) return Vector::Zero(model.dim());
  if (s.initial_position->size() != model.dim()) {
    throw std::invalid_argument("run_chain: initial position has wrong dimension");
  }
  return *s.initial_position;
}

ChainOutput run_hmc(const TargetModel& model, const HmcConfig& cfg, const Plan& plan, Vector q) {
  validate(cfg);
  ChainOutput out;
  out.samples.resize(plan.retained, model.dim());
  out.accept_stat_trace.reserve(plan.retained);
  out.adapted_eps = cfg.eps;
  Rng rng(cfg.seed);
  for (int it = 0; it < plan.warmup + plan.retained; ++it) {
    const HmcTransition t = hmc_iteration(model, q, cfg, rng);
    q = t.position;
    if (t.divergent) ++out.divergence_count;
    if (it < plan.warmup) out.warmup_accept_stat_trace.push_back(t.accept_prob);
    if (it >= plan.warmup) {
      out.samples.row(it - plan.warmup) = q.transpose();
      out.accept_stat_trace.push_back(t.accept_prob);
    }
  }
  return out;
}

ChainOutput run_nuts(const TargetModel& model, const NutsConfig& cfg, const Plan& plan, Vector q) {
  validate(cfg);
  ChainOutput out;
  out.samples.resize(plan.retained, model.dim());
  out.accept_stat_trace.reserve(plan.retained);
  out.tree_depth_trace.reserve(plan.retained);
  Rng rng(cfg.seed);
  const double eps0 = find_reasonable_epsilon(model, q, cfg.scheme, rng);
  AdaptState adapt = AdaptState::start(
      eps0, DualAveragingParams{cfg.target_accept, cfg.gamma, cfg.t0, cfg.kappa});
  const int adapt_window = cfg.adapt_iterations < 0 ? plan.warmup : cfg.adapt_iterations;
  double frozen_eps = eps0;
  NutsOptions options;
  options.max_tree_depth = cfg.max_tree_depth;
  options.delta_max = cfg.delta_max;
  const int total = plan.warmup + plan.retained;
  for (int m = 1; m <= total; ++m) {
    const bool adapting = m <= adapt_window;
    const double eps = adapting ? adapt.eps() : frozen_eps;
    const Vector p = sample_momentum(rng, model.dim());
    const NutsDraw draw = nuts_transition(model, q, p, eps, cfg.scheme, rng, options);
    q = draw.position;
    if (draw.divergent) ++out.divergence_count;
    if (m <= plan.warmup) out.warmup_accept_stat_trace.push_back(draw.accept_stat);
    if (adapting) {
      adapt = dual_averaging_update(adapt, draw.accept_stat, m);
      if (m == adapt_window) frozen_eps = adapt.eps_bar();
    }
    const int retained_index = m - 1 - plan.warmup;
    if (retained_index >= 0) {
      out.samples.row(retained_index) = q.transpose();
      out.accept_stat_trace.push_back(draw.accept_stat);
      out.tree_depth_trace.push_back(draw.tree_depth);
    }
  }
  if (adapt_window > total) frozen_eps = adapt.eps_bar();
  out.adapted_eps = frozen_eps;
  return out;
}

}  // namespace

ChainOutput run_chain(const TargetModel& model, const SamplerConfig& config,
                      const ChainSettings& settings) {
  const Plan plan = plan_for(settings);
  Vector q = initial_position(model, settings);
  const std::uint64_t gradients_before = model.gradient_evaluations();
  const auto t0 = std::chrono::steady_clock::now();
  ChainOutput out = std::visit(
      [&](const auto& cfg) {
        using T = std::decay_t<decltype(cfg)>;
        if constexpr (std::is_same_v<T, HmcConfig>) {
          return run_hmc(model, cfg, plan, std::move(q));
        } else {
          return run_nuts(model, cfg, plan, std::move(q));
        }
      },
      config);
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.gradient_count = model.gradient_evaluations() - gradients_before;
  return out;
}

}  // namespace hmc
