#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hmc {

struct ChainOutput;

/// Biased (1/N) sample autocovariances at lags 0..max_lag.
/// Requires N >= 10 and max_lag < N. A constant series yields all zeros.
std::vector<double> autocovariance(std::span<const double> series, int max_lag);

struct EssOptions {
  bool cap_at_n = true;  // clamp the estimate to the number of draws
};

/// N / tau with tau = -1 + 2 sum_k Gamma_k, Gamma_k = rho_2k + rho_2k+1,
/// truncated at the first non-positive Gamma_k and made monotone
/// (initial monotone sequence estimator). Requires N >= 100.
/// nullopt when the series has zero variance.
std::optional<double> ess(std::span<const double> series, EssOptions options = {});

struct EssSummary {
  std::vector<double> ess_per_coordinate;  // NaN where undefined
  std::vector<int> undefined_coordinates;  // coordinates with zero variance
  double min_ess = 0.0;
  double median_ess = 0.0;
  double max_ess = 0.0;
  double wall_time = 0.0;
  std::uint64_t gradient_count = 0;
  double adapted_eps = 0.0;
  double min_ess_per_second = 0.0;
  double median_ess_per_second = 0.0;
  double min_ess_per_gradient = 0.0;

  bool complete() const { return undefined_coordinates.empty(); }
};

/// Per-coordinate ESS and its order statistics over the defined coordinates.
/// Throws std::invalid_argument for an empty chain or when no coordinate has
/// a defined ESS.
EssSummary summarize(const ChainOutput& chain, EssOptions options = {});

/// Field-wise mean over repeated runs (the per-coordinate vector is averaged
/// elementwise; undefined coordinates are the union).
EssSummary average_summaries(std::span<const EssSummary> runs);

}  // namespace hmc
