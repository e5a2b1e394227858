#pragma once

#include <cmath>

#include "hmc/integrators.hpp"

namespace hmc::detail {

// Exact stage constants in whatever precision Real offers. Shared between
// the integrators (rounded to double) and the Gaussian analysis (quad).
template <class Real>
Real stage_a1(Scheme kind) {
  using std::sqrt;
  switch (kind) {
    case Scheme::Leapfrog:
      return Real(0);
    case Scheme::TwoStage:
      return (Real(3) - sqrt(Real(3))) / Real(6);
    case Scheme::NewTwoStage:
      return (Real(3) - sqrt(Real(5))) / Real(4);
    case Scheme::ThreeStage:
      return Real(12127897) / Real(102017882);
  }
  return Real(0);
}

template <class Real>
Real stage_b1(Scheme kind) {
  return kind == Scheme::ThreeStage ? Real(4271554) / Real(14421423) : Real(0);
}

}  // namespace hmc::detail
