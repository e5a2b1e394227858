#include "hmc/nuts.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hmc {

namespace {

struct TreeContext {
  const TargetModel& model;
  Scheme kind;
  double eps;
  double log_slice;  // log u, with u ~ Uniform(0, exp(-H0))
  double h0;
  double delta_max;
  Rng& rng;
  const NutsOptions& options;
  int steps = 0;
  bool divergent = false;
};

struct Subtree {
  PhasePoint minus;
  PhasePoint plus;
  Vector proposal;
  std::uint64_t n_valid = 0;
  bool keep_going = true;
  double alpha_sum = 0.0;
  int n_alpha = 0;
};

Subtree build_tree(TreeContext& ctx, const PhasePoint& start, int direction, int depth) {
  if (depth == 0) {
    StepResult r = direction > 0 ? step(ctx.kind, ctx.model, start, ctx.eps)
                                 : step_backward(ctx.kind, ctx.model, start, ctx.eps);
    ++ctx.steps;
    if (ctx.options.on_step) ctx.options.on_step(r.state, direction);
    double h = r.divergent ? std::numeric_limits<double>::infinity()
                           : total_energy(ctx.model, r.state);
    if (!std::isfinite(h)) h = std::numeric_limits<double>::infinity();
    Subtree t;
    t.proposal = r.state.position;
    t.n_valid = ctx.log_slice <= -h ? 1 : 0;
    t.keep_going = ctx.log_slice < ctx.delta_max - h;
    if (!t.keep_going) ctx.divergent = true;
    t.alpha_sum = accept_probability(energy_delta(ctx.h0, h));
    t.n_alpha = 1;
    t.minus = r.state;
    t.plus = std::move(r.state);
    return t;
  }
  Subtree t = build_tree(ctx, start, direction, depth - 1);
  if (!t.keep_going) return t;
  Subtree inner = build_tree(ctx, direction > 0 ? t.plus : t.minus, direction, depth - 1);
  if (direction > 0) {
    t.plus = std::move(inner.plus);
  } else {
    t.minus = std::move(inner.minus);
  }
  const std::uint64_t total = t.n_valid + inner.n_valid;
  if (total > 0 &&
      ctx.rng.uniform() * static_cast<double>(total) < static_cast<double>(inner.n_valid)) {
    t.proposal = std::move(inner.proposal);
  }
  t.alpha_sum += inner.alpha_sum;
  t.n_alpha += inner.n_alpha;
  t.keep_going = inner.keep_going && no_u_turn(t.minus.position, t.plus.position,
                                               t.minus.momentum, t.plus.momentum);
  t.n_valid = total;
  return t;
}

}  // namespace

bool no_u_turn(const Vector& q_minus, const Vector& q_plus, const Vector& p_minus,
               const Vector& p_plus) {
  const Vector span = q_plus - q_minus;
  return span.dot(p_minus) >= 0.0 && span.dot(p_plus) >= 0.0;
}

NutsDraw nuts_transition(const TargetModel& model, const Vector& position, const Vector& momentum,
                         double eps, Scheme kind, Rng& rng, const NutsOptions& options) {
  if (!(eps > 0.0)) throw std::invalid_argument("nuts: eps must be positive");
  if (options.max_tree_depth < 1 || options.max_tree_depth > kMaxTreeDepthLimit) {
    throw std::invalid_argument("nuts: max_tree_depth must be in [1, 15]");
  }
  const std::uint64_t gradients_before = model.gradient_evaluations();
  PhasePoint z(position, momentum);
  // Leapfrog steps reuse the cached gradient, so seed it once at the root;
  // both directions then start from a cached state.
  if (kind == Scheme::Leapfrog) z.gradient = model.gradient(z.position);
  const double h0 = total_energy(model, z);
  if (!std::isfinite(h0)) throw std::invalid_argument("nuts: initial energy is not finite");

  TreeContext ctx{model, kind, eps, std::log(rng.uniform()) - h0, h0, options.delta_max, rng,
                  options};
  PhasePoint minus = z;
  PhasePoint plus = z;
  NutsDraw out;
  out.position = position;
  std::uint64_t n_valid = 1;
  bool keep_going = true;
  while (keep_going && out.tree_depth < options.max_tree_depth) {
    const int direction = rng.uniform() < 0.5 ? -1 : 1;
    Subtree t = build_tree(ctx, direction < 0 ? minus : plus, direction, out.tree_depth);
    if (direction < 0) {
      minus = std::move(t.minus);
    } else {
      plus = std::move(t.plus);
    }
    if (t.keep_going && rng.uniform() * static_cast<double>(n_valid) <
                            static_cast<double>(t.n_valid)) {
      out.position = std::move(t.proposal);
    }
    n_valid += t.n_valid;
    keep_going =
        t.keep_going && no_u_turn(minus.position, plus.position, minus.momentum, plus.momentum);
    out.accept_stat = t.alpha_sum / static_cast<double>(t.n_alpha);
    ++out.tree_depth;
  }
  out.divergent = ctx.divergent;
  out.num_steps = ctx.steps;
  out.gradient_increment = model.gradient_evaluations() - gradients_before;
  return out;
}

NutsDraw nuts_draw(const TargetModel& model, const Vector& position, double eps, Scheme kind,
                   int max_depth, Rng& rng) {
  const Vector momentum = sample_momentum(rng, model.dim());
  NutsOptions options;
  options.max_tree_depth = max_depth;
  return nuts_transition(model, position, momentum, eps, kind, rng, options);
}

}  // namespace hmc
