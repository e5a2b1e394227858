#include "hmc/gaussian_analysis.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "scheme_constants.hpp"

namespace hmc {

namespace {

using boost::multiprecision::float128;
using Quad = float128;

struct QuadMatrix {
  Quad m11 = 1, m12 = 0, m21 = 0, m22 = 1;
};

// Position shear q += c * eps * p, i.e. left-multiply by [[1, c eps], [0, 1]].
void position_shear(QuadMatrix& m, const Quad& h) {
  m.m11 += h * m.m21;
  m.m12 += h * m.m22;
}

// Momentum shear p -= b * eps * q, i.e. left-multiply by [[1, 0], [-b eps, 1]].
void momentum_shear(QuadMatrix& m, const Quad& h) {
  m.m21 -= h * m.m11;
  m.m22 -= h * m.m12;
}

struct QuadCoefficients {
  Quad a1;
  Quad b1;
};

const QuadCoefficients& quad_coefficients(Scheme kind) {
  static const std::array<QuadCoefficients, 4> table = [] {
    std::array<QuadCoefficients, 4> t;
    for (auto k : kAllSchemes) {
      t[scheme_index(k)] = {detail::stage_a1<Quad>(k), detail::stage_b1<Quad>(k)};
    }
    return t;
  }();
  return table[scheme_index(kind)];
}

QuadMatrix quad_propagation(Scheme kind, const Quad& eps) {
  const auto& c = quad_coefficients(kind);
  QuadMatrix m;
  const Quad half(0.5);
  switch (kind) {
    case Scheme::Leapfrog:
      momentum_shear(m, half * eps);
      position_shear(m, eps);
      momentum_shear(m, half * eps);
      break;
    case Scheme::TwoStage:
    case Scheme::NewTwoStage:
      position_shear(m, c.a1 * eps);
      momentum_shear(m, half * eps);
      position_shear(m, (Quad(1) - 2 * c.a1) * eps);
      momentum_shear(m, half * eps);
      position_shear(m, c.a1 * eps);
      break;
    case Scheme::ThreeStage:
      position_shear(m, c.a1 * eps);
      momentum_shear(m, c.b1 * eps);
      position_shear(m, (half - c.a1) * eps);
      momentum_shear(m, (Quad(1) - 2 * c.b1) * eps);
      position_shear(m, (half - c.a1) * eps);
      momentum_shear(m, c.b1 * eps);
      position_shear(m, c.a1 * eps);
      break;
  }
  return m;
}

// cos(theta) of one step; the schemes are palindromic so m11 == m22 in exact
// arithmetic and the half trace is the diagonal itself.
Quad half_trace(const QuadMatrix& m) { return (m.m11 + m.m22) / 2; }

OffDiagonalPair pair_from_quad(const QuadMatrix& m, const Quad& sin_theta, int num_steps,
                               const Quad& eps) {
  OffDiagonalPair pair;
  pair.r_L = static_cast<double>(m.m12 / sin_theta);
  pair.s_L = static_cast<double>(m.m21 / sin_theta);
  pair.r_minus_one = static_cast<double>((m.m12 - sin_theta) / sin_theta);
  pair.s_plus_one = static_cast<double>((m.m21 + sin_theta) / sin_theta);
  pair.L = num_steps;
  pair.eps = static_cast<double>(eps);
  return pair;
}

double log_normal_cdf(double x) {
  if (x > -30.0) return std::log(standard_normal_cdf(x));
  // Mills-ratio expansion of the lower tail.
  const double x2 = x * x;
  return -0.5 * x2 - std::log(-x) - 0.5 * std::log(2.0 * boost::math::constants::pi<double>()) +
         std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
}

// Phi(hi) - Phi(lo) for lo < hi, accurate when the interval is narrow.
double normal_mass(double lo, double hi) {
  if (hi - lo > 0.5) {
    return standard_normal_cdf(hi) - standard_normal_cdf(lo);
  }
  // 16-point Gauss-Legendre.
  static constexpr std::array<double, 8> nodes = {
      0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
      0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
  static constexpr std::array<double, 8> weights = {
      0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
      0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * boost::math::constants::pi<double>());
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double a = mid - half * nodes[i];
    const double b = mid + half * nodes[i];
    sum += weights[i] * (std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b));
  }
  return sum * half * inv_sqrt_2pi;
}

}  // namespace

double Matrix2::max_abs_diff(const Matrix2& o) const {
  return std::max({std::abs(m11 - o.m11), std::abs(m12 - o.m12), std::abs(m21 - o.m21),
                   std::abs(m22 - o.m22)});
}

Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
  return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
          a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}

PropagationMatrix propagation_matrix(Scheme kind, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("propagation_matrix: eps must be positive");
  const QuadMatrix q = quad_propagation(kind, Quad(eps));
  return {kind, eps,
          Matrix2{static_cast<double>(q.m11), static_cast<double>(q.m12),
                  static_cast<double>(q.m21), static_cast<double>(q.m22)}};
}

MatrixPower matrix_power(const Matrix2& m, int num_steps) {
  if (num_steps < 1) throw std::invalid_argument("matrix_power: L must be >= 1");
  if (num_steps == 1) return {m, std::abs(m.trace()) < 2.0};
  const double c = 0.5 * m.trace();
  if (std::abs(c) < 1.0) {
    const double theta = std::acos(c);
    const double sin_theta = std::sin(theta);
    const double u1 = std::sin(num_steps * theta) / sin_theta;        // U_{L-1}(c)
    const double u2 = std::sin((num_steps - 1) * theta) / sin_theta;  // U_{L-2}(c)
    return {Matrix2{u1 * m.m11 - u2, u1 * m.m12, u1 * m.m21, u1 * m.m22 - u2}, true};
  }
  Matrix2 result;
  Matrix2 base = m;
  for (int n = num_steps; n > 0; n >>= 1) {
    if (n & 1) result = result * base;
    base = base * base;
  }
  return {result, false};
}

OffDiagonalPair OffDiagonalPair::from_entries(double r, double s, int num_steps, double eps) {
  return {r, s, r - 1.0, s + 1.0, num_steps, eps};
}

std::optional<IndependencePoint> independence_eps(Scheme kind, int num_steps) {
  if (num_steps < 1) throw std::invalid_argument("independence_eps: L must be >= 1");
  const Quad pi = boost::math::constants::pi<Quad>();
  const Quad theta = pi / (2 * Quad(num_steps));
  const Quad target = cos(theta);

  // theta(eps) ~ eps for small eps, so the first root sits near pi / (2L).
  // March upward until the half trace drops below cos(theta); leaving the
  // stability interval first means there is no root.
  const Quad h = theta / 32;
  Quad lo = 0;
  Quad hi = h;
  for (int i = 0;; ++i) {
    const Quad c = half_trace(quad_propagation(kind, hi));
    if (c <= target) break;
    if (c >= 1 || i > 100000) return std::nullopt;
    lo = hi;
    hi += h;
  }
  for (int i = 0; i < 200 && hi - lo > Quad(1e-32) * hi; ++i) {
    const Quad mid = (lo + hi) / 2;
    if (half_trace(quad_propagation(kind, mid)) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const Quad eps = (lo + hi) / 2;
  const QuadMatrix m = quad_propagation(kind, eps);
  return IndependencePoint{static_cast<double>(eps), pair_from_quad(m, sin(theta), num_steps, eps)};
}

std::optional<OffDiagonalPair> independence_pair_at(Scheme kind, double eps) {
  if (!(eps > 0.0)) return std::nullopt;
  const Quad e(eps);
  const QuadMatrix m = quad_propagation(kind, e);
  const Quad c = half_trace(m);
  if (!(c < 1 && c > -1)) return std::nullopt;
  const Quad theta = acos(c);
  if (theta > boost::math::constants::half_pi<Quad>()) return std::nullopt;
  // sin(theta) from 1 - c^2 keeps the deviations exact to quad rounding.
  const Quad sin_theta = sqrt((1 - c) * (1 + c));
  const Quad real_steps = boost::math::constants::half_pi<Quad>() / theta;
  auto pair = pair_from_quad(m, sin_theta, static_cast<int>(floor(real_steps)), e);
  return pair;
}

DeltaMoments delta_moments(const OffDiagonalPair& pair, std::int64_t d) {
  if (d < 1) throw std::invalid_argument("delta_moments: d must be positive");
  const double u = pair.r_minus_one;
  const double v = pair.s_plus_one;
  const double one_minus_r2 = -u * (2.0 + u);
  const double one_minus_s2 = v * (2.0 - v);
  const double half_d = 0.5 * static_cast<double>(d);
  DeltaMoments out;
  out.mu = -half_d * (u + v) * (u + v);
  out.sigma2 = half_d * (one_minus_s2 * one_minus_s2 + one_minus_r2 * one_minus_r2);
  out.d = d;
  return out;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double asymptotic_reject(const DeltaMoments& moments) {
  if (!(moments.sigma2 > 0.0)) return -std::expm1(std::min(moments.mu, 0.0));
  const double sigma = std::sqrt(moments.sigma2);
  const double a = -moments.mu / sigma;
  // 1 - E = [Phi(a) - Phi(a - sigma)] - expm1(mu + sigma^2/2) Phi(a - sigma)
  const double shift = moments.mu + 0.5 * moments.sigma2;
  const double mass = normal_mass(a - sigma, a);
  const double tail = standard_normal_cdf(a - sigma);
  return std::clamp(mass - std::expm1(shift) * tail, 0.0, 1.0);
}

double asymptotic_accept(const DeltaMoments& moments) {
  if (!(moments.sigma2 > 0.0)) return std::exp(std::min(moments.mu, 0.0));
  const double reject = asymptotic_reject(moments);
  if (reject < 0.5) return 1.0 - reject;
  const double sigma = std::sqrt(moments.sigma2);
  const double a = moments.mu / sigma;
  const double log_second = moments.mu + 0.5 * moments.sigma2 + log_normal_cdf(-sigma - a);
  return std::clamp(standard_normal_cdf(a) + std::exp(log_second), 0.0, 1.0);
}

const std::optional<IndependencePoint>& IndependenceCurve::at(int num_steps) {
  if (num_steps < 1) throw std::invalid_argument("IndependenceCurve: L must be >= 1");
  const auto idx = static_cast<std::size_t>(num_steps);
  if (cache_.size() <= idx) cache_.resize(idx + 1);
  if (!cache_[idx]) cache_[idx] = independence_eps(kind_, num_steps);
  return *cache_[idx];
}

EfficiencyPoint efficiency_at(const IndependencePoint& point, Scheme kind, std::int64_t d) {
  const auto moments = delta_moments(point.pair, d);
  EfficiencyPoint out;
  out.kind = kind;
  out.d = d;
  out.L = point.pair.L;
  out.eps = point.eps;
  out.expected_accept = asymptotic_accept(moments);
  out.expected_reject = asymptotic_reject(moments);
  out.upsilon =
      out.expected_accept / (coefficients(kind).gradient_cost_per_step * static_cast<double>(out.L));
  return out;
}

std::optional<EfficiencyPoint> scheme_acceptance(Scheme kind, std::int64_t d, int num_steps) {
  const auto point = independence_eps(kind, num_steps);
  if (!point) return std::nullopt;
  return efficiency_at(*point, kind, d);
}

std::optional<EfficiencyPoint> max_upsilon(Scheme kind, std::int64_t d, int max_steps) {
  IndependenceCurve curve(kind);
  return max_upsilon(curve, d, max_steps);
}

std::optional<EfficiencyPoint> max_upsilon(IndependenceCurve& curve, std::int64_t d,
                                           int max_steps) {
  if (max_steps < 1) throw std::invalid_argument("max_upsilon: L_max must be >= 1");
  std::optional<EfficiencyPoint> best;
  std::optional<double> previous;
  int decreasing = 0;
  for (int num_steps = 1; num_steps <= max_steps; ++num_steps) {
    const auto& point = curve.at(num_steps);
    if (!point) continue;
    const auto eff = efficiency_at(*point, curve.kind(), d);
    if (!best || eff.upsilon > best->upsilon) best = eff;
    if (previous && eff.upsilon < *previous) {
      if (++decreasing >= kUpsilonPatience) break;
    } else {
      decreasing = 0;
    }
    previous = eff.upsilon;
  }
  return best;
}

std::optional<double> eps_for_acceptance(Scheme kind, std::int64_t d, double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw std::invalid_argument("eps_for_acceptance: target must lie in (0, 1)");
  }
  auto accept_at = [&](double eps) -> std::optional<double> {
    const auto pair = independence_pair_at(kind, eps);
    if (!pair) return std::nullopt;
    return asymptotic_accept(delta_moments(*pair, d));
  };
  double lo = 1e-6;
  auto a_lo = accept_at(lo);
  if (!a_lo || *a_lo < target) return std::nullopt;
  double hi = lo;
  for (;;) {
    hi = lo * 1.02;
    const auto a_hi = accept_at(hi);
    if (!a_hi) return std::nullopt;
    if (*a_hi < target) break;
    lo = hi;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    const auto a_mid = accept_at(mid);
    if (a_mid && *a_mid >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<std::int64_t> log_dimension_grid(int lo_exponent, int hi_exponent, int per_decade) {
  if (hi_exponent < lo_exponent || per_decade < 1) {
    throw std::invalid_argument("log_dimension_grid: empty grid");
  }
  std::vector<std::int64_t> grid;
  const int points = (hi_exponent - lo_exponent) * per_decade;
  for (int i = 0; i <= points; ++i) {
    const double x = lo_exponent + static_cast<double>(i) / per_decade;
    const auto d = static_cast<std::int64_t>(std::llround(std::pow(10.0, x)));
    if (grid.empty() || grid.back() != d) grid.push_back(d);
  }
  return grid;
}

std::vector<EfficiencyRow> efficiency_curves(const std::vector<std::int64_t>& d_grid,
                                             int max_steps) {
  if (d_grid.empty()) throw std::invalid_argument("efficiency_curves: empty d grid");
  std::array<std::vector<EfficiencyRow>, 4> by_scheme;
  for (auto kind : kAllSchemes) {
    IndependenceCurve curve(kind);
    for (auto d : d_grid) {
      EfficiencyRow row;
      row.kind = kind;
      row.d = d;
      if (const auto best = max_upsilon(curve, d, max_steps)) {
        row.L = best->L;
        row.eps = best->eps;
        row.expected_accept = best->expected_accept;
        row.upsilon = best->upsilon;
      }
      by_scheme[scheme_index(kind)].push_back(row);
    }
  }
  std::vector<EfficiencyRow> rows;
  const auto& leapfrog = by_scheme[scheme_index(Scheme::Leapfrog)];
  for (auto kind : kAllSchemes) {
    auto& block = by_scheme[scheme_index(kind)];
    for (std::size_t i = 0; i < block.size(); ++i) {
      const double ref = leapfrog[i].upsilon;
      block[i].ratio_vs_leapfrog = ref > 0.0 ? block[i].upsilon / ref : 0.0;
      rows.push_back(block[i]);
    }
  }
  return rows;
}

void write_efficiency_csv(const std::vector<EfficiencyRow>& rows, std::ostream& out) {
  out << "scheme,d,L,eps,expected_accept,upsilon,ratio_vs_leapfrog\n";
  out << std::setprecision(12);
  for (const auto& r : rows) {
    out << scheme_name(r.kind) << ',' << r.d << ',' << r.L << ',' << r.eps << ','
        << r.expected_accept << ',' << r.upsilon << ',' << r.ratio_vs_leapfrog << '\n';
  }
  if (!out) throw std::runtime_error("write_efficiency_csv: write failed");
}

std::vector<EfficiencyRow> emit_efficiency_curves(const std::vector<std::int64_t>& d_grid,
                                                  int max_steps, std::ostream& out) {
  auto rows = efficiency_curves(d_grid, max_steps);
  write_efficiency_csv(rows, out);
  return rows;
}

}  // namespace hmc
