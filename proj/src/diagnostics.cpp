#include "hmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "hmc/samplers.hpp"

namespace hmc {

namespace {

double autocov_at(std::span<const double> centred, int lag) {
  const std::size_t n = centred.size();
  double sum = 0.0;
  for (std::size_t t = 0; t + lag < n; ++t) sum += centred[t] * centred[t + lag];
  return sum / static_cast<double>(n);
}

std::vector<double> centre(std::span<const double> series) {
  const double mean =
      std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
  std::vector<double> out(series.begin(), series.end());
  for (auto& x : out) x -= mean;
  return out;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<double> autocovariance(std::span<const double> series, int max_lag) {
  if (series.size() < 10) throw std::invalid_argument("autocovariance: need at least 10 values");
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= series.size()) {
    throw std::invalid_argument("autocovariance: max_lag must be in [0, N)");
  }
  const auto centred = centre(series);
  std::vector<double> out(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) out[k] = autocov_at(centred, k);
  return out;
}

std::optional<double> ess(std::span<const double> series, EssOptions options) {
  const std::size_t n = series.size();
  if (n < 100) throw std::invalid_argument("ess: need at least 100 draws");
  const auto centred = centre(series);
  const double c0 = autocov_at(centred, 0);
  if (!(c0 > 0.0) || c0 < 1e-300) return std::nullopt;

  double tau = -1.0;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
    const double pair = (autocov_at(centred, static_cast<int>(lag)) +
                         autocov_at(centred, static_cast<int>(lag + 1))) /
                        c0;
    if (pair <= 0.0) break;
    const double monotone = std::min(pair, previous);
    tau += 2.0 * monotone;
    previous = monotone;
  }
  const double nd = static_cast<double>(n);
  double value = tau > 0.0 ? nd / tau : std::numeric_limits<double>::infinity();
  if (options.cap_at_n) value = std::min(value, nd);
  return value;
}

EssSummary summarize(const ChainOutput& chain, EssOptions options) {
  const auto rows = chain.samples.rows();
  const auto cols = chain.samples.cols();
  if (rows == 0 || cols == 0) throw std::invalid_argument("summarize: empty chain");
  EssSummary out;
  out.ess_per_coordinate.resize(cols);
  std::vector<double> defined;
  std::vector<double> column(rows);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) column[i] = chain.samples(i, j);
    const auto value = ess(column, options);
    if (value) {
      out.ess_per_coordinate[j] = *value;
      defined.push_back(*value);
    } else {
      out.ess_per_coordinate[j] = std::numeric_limits<double>::quiet_NaN();
      out.undefined_coordinates.push_back(static_cast<int>(j));
    }
  }
  if (defined.empty()) throw std::invalid_argument("summarize: no coordinate has a defined ESS");
  out.min_ess = *std::min_element(defined.begin(), defined.end());
  out.max_ess = *std::max_element(defined.begin(), defined.end());
  out.median_ess = median_of(defined);
  out.wall_time = chain.wall_time;
  out.gradient_count = chain.gradient_count;
  out.adapted_eps = chain.adapted_eps;
  if (out.wall_time > 0.0) {
    out.min_ess_per_second = out.min_ess / out.wall_time;
    out.median_ess_per_second = out.median_ess / out.wall_time;
  }
  if (out.gradient_count > 0) {
    out.min_ess_per_gradient = out.min_ess / static_cast<double>(out.gradient_count);
  }
  return out;
}

EssSummary average_summaries(std::span<const EssSummary> runs) {
  if (runs.empty()) throw std::invalid_argument("average_summaries: no runs");
  EssSummary out;
  const double k = static_cast<double>(runs.size());
  out.ess_per_coordinate.assign(runs.front().ess_per_coordinate.size(), 0.0);
  std::set<int> undefined;
  double gradients = 0.0;
  for (const auto& r : runs) {
    if (r.ess_per_coordinate.size() != out.ess_per_coordinate.size()) {
      throw std::invalid_argument("average_summaries: runs differ in dimension");
    }
    for (std::size_t j = 0; j < r.ess_per_coordinate.size(); ++j) {
      out.ess_per_coordinate[j] += r.ess_per_coordinate[j] / k;
    }
    undefined.insert(r.undefined_coordinates.begin(), r.undefined_coordinates.end());
    out.min_ess += r.min_ess / k;
    out.median_ess += r.median_ess / k;
    out.max_ess += r.max_ess / k;
    out.wall_time += r.wall_time / k;
    gradients += static_cast<double>(r.gradient_count) / k;
    out.adapted_eps += r.adapted_eps / k;
    out.min_ess_per_second += r.min_ess_per_second / k;
    out.median_ess_per_second += r.median_ess_per_second / k;
    out.min_ess_per_gradient += r.min_ess_per_gradient / k;
  }
  out.gradient_count = static_cast<std::uint64_t>(std::llround(gradients));
  out.undefined_coordinates.assign(undefined.begin(), undefined.end());
  return out;
}

}  // namespace hmc
