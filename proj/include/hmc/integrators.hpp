#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "hmc/core.hpp"

namespace hmc {

enum class Scheme { Leapfrog, TwoStage, NewTwoStage, ThreeStage };

inline constexpr std::array<Scheme, 4> kAllSchemes = {Scheme::Leapfrog, Scheme::TwoStage,
                                                      Scheme::NewTwoStage, Scheme::ThreeStage};

std::string_view scheme_name(Scheme kind);
std::optional<Scheme> parse_scheme(std::string_view name);
inline int scheme_index(Scheme kind) { return static_cast<int>(kind); }

struct SchemeCoefficients {
  double a1 = 0.0;           // position-stage coefficient; unused by leapfrog
  std::optional<double> b1;  // momentum-stage coefficient, three-stage only
  int gradient_cost_per_step = 1;
};

/// Stage constants, evaluated once in quad precision and rounded to double.
///
///   two-stage      a1 = (3 - sqrt 3) / 6
///   new two-stage  a1 = (3 - sqrt 5) / 4
///   three-stage    a1 = 12127897 / 102017882,  b1 = 4271554 / 14421423
const SchemeCoefficients& coefficients(Scheme kind);

struct StepResult {
  PhasePoint state;
  bool divergent = false;
};

/// One step of length eps.
///
/// Leapfrog is momentum-first (kick/drift/kick) and leaves grad U at the new
/// position in `state.gradient`, so a following leapfrog step reuses it and
/// costs one gradient instead of two. The multi-stage schemes are
/// position-first and never need the cache. A non-finite gradient or state
/// stops the step and sets `divergent`.
StepResult step(Scheme kind, const TargetModel& model, const PhasePoint& state, double eps);

/// Step backwards in time: flip momentum, step, flip back. Bitwise equal to a
/// step with -eps for these palindromic schemes.
StepResult step_backward(Scheme kind, const TargetModel& model, const PhasePoint& state,
                         double eps);

/// L consecutive steps, stopping at the first divergent one.
StepResult integrate(Scheme kind, const TargetModel& model, const PhasePoint& state, double eps,
                     int num_steps);

/// Gradient evaluations charged by integrate() from a state with no cached
/// gradient: L + 1 for leapfrog, cost * L otherwise.
std::uint64_t trajectory_gradient_cost(Scheme kind, int num_steps);

}  // namespace hmc
