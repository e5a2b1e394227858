#pragma once

// Exact and large-d theory for the four schemes on the standard Gaussian
// model problem U(q) = q'q / 2.
//
// Each scheme acts on every (q_i, p_i) pair through the same 2x2 matrix
// M_eps. Choosing eps so that M_eps^L has a zero diagonal makes the proposal
// independent of the current state; the off-diagonal entries (r_L, s_L) then
// fix the law of the energy error, whose normal limit gives E(alpha).
//
// Root finding and the off-diagonal deviations r_L - 1, s_L + 1 are computed
// in quad precision: for the new two-stage scheme those deviations are
// O(eps^4) and vanish into double rounding noise for L in the hundreds.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hmc/integrators.hpp"

namespace hmc {

struct Matrix2 {
  double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;

  double determinant() const { return m11 * m22 - m12 * m21; }
  double trace() const { return m11 + m22; }
  double max_abs_diff(const Matrix2& o) const;
  friend Matrix2 operator*(const Matrix2& a, const Matrix2& b);
};

struct PropagationMatrix {
  Scheme kind = Scheme::Leapfrog;
  double eps = 0.0;
  Matrix2 m;
};

/// Product of the scheme's shears under grad U(q) = q, in application order.
PropagationMatrix propagation_matrix(Scheme kind, double eps);

struct MatrixPower {
  Matrix2 value;
  bool stable = true;  // |trace| < 2; otherwise computed by repeated squaring
};

/// M^L. In the stable regime uses M^L = U_{L-1}(c) M - U_{L-2}(c) I with
/// c = cos(theta) = trace/2 (Chebyshev form, valid for any det-1 matrix).
MatrixPower matrix_power(const Matrix2& m, int num_steps);

/// Off-diagonal entries of M^L at the independence condition.
///
/// r_minus_one and s_plus_one carry r_L - 1 and s_L + 1 at full relative
/// precision; the moment formulas use them instead of r_L, s_L.
struct OffDiagonalPair {
  double r_L = 1.0;
  double s_L = -1.0;
  double r_minus_one = 0.0;
  double s_plus_one = 0.0;
  int L = 1;
  double eps = 0.0;

  static OffDiagonalPair from_entries(double r, double s, int num_steps, double eps);
};

struct IndependencePoint {
  double eps = 0.0;
  OffDiagonalPair pair;
};

/// Smallest eps > 0 with zero diagonal in M_eps^L, i.e. L * theta(eps) = pi/2.
/// nullopt when the stability interval ends before the condition is met.
std::optional<IndependencePoint> independence_eps(Scheme kind, int num_steps);

/// Same family with L allowed to be real: for a given eps, the pair obtained
/// at L = pi / (2 theta(eps)). nullopt outside the stability interval.
std::optional<OffDiagonalPair> independence_pair_at(Scheme kind, double eps);

struct DeltaMoments {
  double mu = 0.0;      // E(Delta)
  double sigma2 = 0.0;  // Var(Delta)
  std::int64_t d = 1;
};

/// Moments of Delta = 1/2 sum[(1 - s^2) q_i^2 + (1 - r^2) p_i^2] with iid
/// standard normal q_i, p_i. Uses r * s = -1 to write the mean as
/// -(d/2) (r + s)^2, which avoids cancellation.
DeltaMoments delta_moments(const OffDiagonalPair& pair, std::int64_t d);

/// E[min(1, e^Z)] for Z ~ N(mu, sigma2):
///   Phi(mu/sigma) + exp(mu + sigma^2/2) Phi(-sigma - mu/sigma).
double asymptotic_accept(const DeltaMoments& moments);

/// 1 - asymptotic_accept, evaluated without cancellation near 1.
double asymptotic_reject(const DeltaMoments& moments);

double standard_normal_cdf(double x);

struct EfficiencyPoint {
  Scheme kind = Scheme::Leapfrog;
  std::int64_t d = 1;
  int L = 1;
  double eps = 0.0;
  double expected_accept = 0.0;
  double expected_reject = 1.0;
  double upsilon = 0.0;  // expected_accept / (cost * L)
};

/// Lazily memoised independence solutions for one scheme, keyed by L.
class IndependenceCurve {
 public:
  explicit IndependenceCurve(Scheme kind) : kind_(kind) {}
  Scheme kind() const { return kind_; }
  const std::optional<IndependencePoint>& at(int num_steps);

 private:
  Scheme kind_;
  std::vector<std::optional<std::optional<IndependencePoint>>> cache_;
};

EfficiencyPoint efficiency_at(const IndependencePoint& point, Scheme kind, std::int64_t d);

std::optional<EfficiencyPoint> scheme_acceptance(Scheme kind, std::int64_t d, int num_steps);

inline constexpr int kDefaultMaxSteps = 4096;
inline constexpr int kUpsilonPatience = 8;

/// Maximises upsilon over L in [1, L_max]; ties go to the smaller L. Stops
/// early once upsilon has decreased on kUpsilonPatience consecutive L.
std::optional<EfficiencyPoint> max_upsilon(Scheme kind, std::int64_t d,
                                           int max_steps = kDefaultMaxSteps);
std::optional<EfficiencyPoint> max_upsilon(IndependenceCurve& curve, std::int64_t d,
                                           int max_steps = kDefaultMaxSteps);

/// eps giving E(alpha) == target at dimension d along the real-L
/// independence family, searched upward from eps_min.
std::optional<double> eps_for_acceptance(Scheme kind, std::int64_t d, double target);

/// Rounded 10^x for x on an even grid from lo to hi with `per_decade` points
/// per decade (duplicates removed).
std::vector<std::int64_t> log_dimension_grid(int lo_exponent, int hi_exponent,
                                             int per_decade = 10);

struct EfficiencyRow {
  Scheme kind = Scheme::Leapfrog;
  std::int64_t d = 1;
  int L = 0;
  double eps = 0.0;
  double expected_accept = 0.0;
  double upsilon = 0.0;
  double ratio_vs_leapfrog = 0.0;
};

/// One row per (scheme, d), scheme order then ascending d. Missing optima
/// are reported with L = 0 and zero efficiency.
std::vector<EfficiencyRow> efficiency_curves(const std::vector<std::int64_t>& d_grid,
                                             int max_steps = kDefaultMaxSteps);

/// CSV with header scheme,d,L,eps,expected_accept,upsilon,ratio_vs_leapfrog
/// and 12 significant digits.
void write_efficiency_csv(const std::vector<EfficiencyRow>& rows, std::ostream& out);

/// efficiency_curves followed by write_efficiency_csv. Throws on write failure.
std::vector<EfficiencyRow> emit_efficiency_curves(const std::vector<std::int64_t>& d_grid,
                                                  int max_steps, std::ostream& out);

}  // namespace hmc
