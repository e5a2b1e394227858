#include "hmc/integrators.hpp"

#include <boost/multiprecision/float128.hpp>

#include <stdexcept>

#include "scheme_constants.hpp"

namespace hmc {

namespace {

using boost::multiprecision::float128;

SchemeCoefficients make_coefficients(Scheme kind) {
  SchemeCoefficients c;
  c.a1 = static_cast<double>(detail::stage_a1<float128>(kind));
  if (kind == Scheme::ThreeStage) c.b1 = static_cast<double>(detail::stage_b1<float128>(kind));
  switch (kind) {
    case Scheme::Leapfrog:
      c.gradient_cost_per_step = 1;
      break;
    case Scheme::TwoStage:
    case Scheme::NewTwoStage:
      c.gradient_cost_per_step = 2;
      break;
    case Scheme::ThreeStage:
      c.gradient_cost_per_step = 3;
      break;
  }
  return c;
}

// Momentum update p -= h * grad U(q). Returns false on a non-finite gradient.
bool kick(const TargetModel& model, PhasePoint& x, double h) {
  const Vector g = model.gradient(x.position);
  if (!g.allFinite()) return false;
  x.momentum -= h * g;
  return true;
}

void drift(PhasePoint& x, double h) { x.position += h * x.momentum; }

StepResult diverged(PhasePoint x) {
  x.gradient.resize(0);
  return {std::move(x), true};
}

StepResult leapfrog(const TargetModel& model, PhasePoint x, double eps) {
  if (!x.has_gradient()) {
    x.gradient = model.gradient(x.position);
    if (!x.gradient.allFinite()) return diverged(std::move(x));
  }
  x.momentum -= 0.5 * eps * x.gradient;
  drift(x, eps);
  x.gradient = model.gradient(x.position);
  if (!x.gradient.allFinite()) return diverged(std::move(x));
  x.momentum -= 0.5 * eps * x.gradient;
  const bool bad = !x.finite();
  return {std::move(x), bad};
}

StepResult two_stage(const TargetModel& model, PhasePoint x, double eps, double a1) {
  x.gradient.resize(0);
  drift(x, a1 * eps);
  if (!kick(model, x, 0.5 * eps)) return diverged(std::move(x));
  drift(x, (1.0 - 2.0 * a1) * eps);
  if (!kick(model, x, 0.5 * eps)) return diverged(std::move(x));
  drift(x, a1 * eps);
  const bool bad = !x.finite();
  return {std::move(x), bad};
}

StepResult three_stage(const TargetModel& model, PhasePoint x, double eps, double a1, double b1) {
  x.gradient.resize(0);
  drift(x, a1 * eps);
  if (!kick(model, x, b1 * eps)) return diverged(std::move(x));
  drift(x, (0.5 - a1) * eps);
  if (!kick(model, x, (1.0 - 2.0 * b1) * eps)) return diverged(std::move(x));
  drift(x, (0.5 - a1) * eps);
  if (!kick(model, x, b1 * eps)) return diverged(std::move(x));
  drift(x, a1 * eps);
  const bool bad = !x.finite();
  return {std::move(x), bad};
}

}  // namespace

std::string_view scheme_name(Scheme kind) {
  switch (kind) {
    case Scheme::Leapfrog:
      return "leapfrog";
    case Scheme::TwoStage:
      return "two-stage";
    case Scheme::NewTwoStage:
      return "new-two-stage";
    case Scheme::ThreeStage:
      return "three-stage";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (auto kind : kAllSchemes) {
    if (scheme_name(kind) == name) return kind;
  }
  return std::nullopt;
}

const SchemeCoefficients& coefficients(Scheme kind) {
  static const std::array<SchemeCoefficients, 4> table = {
      make_coefficients(Scheme::Leapfrog), make_coefficients(Scheme::TwoStage),
      make_coefficients(Scheme::NewTwoStage), make_coefficients(Scheme::ThreeStage)};
  return table[scheme_index(kind)];
}

StepResult step(Scheme kind, const TargetModel& model, const PhasePoint& state, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("step: eps must be positive");
  if (state.dim() != model.dim()) throw std::invalid_argument("step: dimension mismatch");
  const auto& c = coefficients(kind);
  switch (kind) {
    case Scheme::Leapfrog:
      return leapfrog(model, state, eps);
    case Scheme::TwoStage:
    case Scheme::NewTwoStage:
      return two_stage(model, state, eps, c.a1);
    case Scheme::ThreeStage:
      return three_stage(model, state, eps, c.a1, *c.b1);
  }
  throw std::logic_error("step: unknown scheme");
}

StepResult step_backward(Scheme kind, const TargetModel& model, const PhasePoint& state,
                         double eps) {
  PhasePoint flipped = state;
  flipped.flip_momentum();
  StepResult out = step(kind, model, flipped, eps);
  out.state.flip_momentum();
  return out;
}

StepResult integrate(Scheme kind, const TargetModel& model, const PhasePoint& state, double eps,
                     int num_steps) {
  if (num_steps < 1) throw std::invalid_argument("integrate: L must be >= 1");
  StepResult out{state, false};
  for (int i = 0; i < num_steps; ++i) {
    out = step(kind, model, out.state, eps);
    if (out.divergent) break;
  }
  return out;
}

std::uint64_t trajectory_gradient_cost(Scheme kind, int num_steps) {
  const auto n = static_cast<std::uint64_t>(num_steps);
  if (kind == Scheme::Leapfrog) return n + 1;
  return n * static_cast<std::uint64_t>(coefficients(kind).gradient_cost_per_step);
}

}  // namespace hmc
