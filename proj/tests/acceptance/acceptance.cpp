// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "../test_support.hpp"
#include "hmc/bench.hpp"
#include "hmc/diagnostics.hpp"
#include "hmc/gaussian_analysis.hpp"
#include "hmc/integrators.hpp"
#include "hmc/models.hpp"
#include "hmc/rng.hpp"
#include "hmc/samplers.hpp"

using namespace hmc;
namespace ts = hmc::test_support;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED{" << what << "}";
    }
  }
};

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string name(Scheme k) { return std::string(scheme_name(k)); }

// ---------------------------------------------------------------------------

void leapfrog_closed_form(Outcome& o) {
  double worst = 0.0;
  for (double e : {0.1, 0.5, 1.0, std::numbers::sqrt2}) {
    const Matrix2 exact{1.0 - e * e / 2.0, e, -e + e * e * e / 4.0, 1.0 - e * e / 2.0};
    const double diff = propagation_matrix(Scheme::Leapfrog, e).m.max_abs_diff(exact);
    worst = std::max(worst, diff);
    o.require(diff < 1e-14, "eps=" + fmt(e) + " diff=" + fmt(diff));
  }
  o.detail << " max entrywise diff " << fmt(worst, 3);
}

void leapfrog_series(Outcome& o) {
  const auto p = independence_eps(Scheme::Leapfrog, 50);
  if (!p) {
    o.require(false, "no independence step at L=50");
    return;
  }
  const double e2 = p->eps * p->eps, e4 = e2 * e2, e6 = e4 * e2, e8 = e4 * e4;
  const double dr = std::abs(p->pair.r_L - (1 + e2 / 8 + 3 * e4 / 128 + 5 * e6 / 1024));
  const double ds = std::abs(p->pair.s_L - (-1 + e2 / 8 + e4 / 128 + e6 / 1024));
  o.require(dr < 10 * e8, "r_L");
  o.require(ds < 10 * e8, "s_L");
  o.detail << " eps=" << fmt(p->eps, 6) << " |dr|=" << fmt(dr, 3) << " |ds|=" << fmt(ds, 3)
           << " bound=" << fmt(10 * e8, 3);
}

void acceptance_order(Outcome& o) {
  for (auto kind : kAllSchemes) {
    std::vector<double> lx, ly;
    for (int steps = 64; steps <= 1024; steps *= 2) {
      const auto pt = scheme_acceptance(kind, 10000, steps);
      if (!pt) {
        o.require(false, name(kind) + " L=" + std::to_string(steps));
        return;
      }
      lx.push_back(std::log(pt->eps));
      ly.push_back(std::log(pt->expected_reject));
    }
    const double slope = ts::fitted_slope(lx, ly);
    const bool fourth = kind == Scheme::NewTwoStage;
    o.require(std::abs(slope - (fourth ? 4.0 : 2.0)) <= (fourth ? 0.2 : 0.1), name(kind));
    o.detail << " " << name(kind) << "=" << fmt(slope);
  }
}

void dimension_scaling(Outcome& o) {
  for (auto kind : kAllSchemes) {
    std::vector<double> ld, le;
    for (std::int64_t d : {10000, 100000, 1000000}) {
      const auto e = eps_for_acceptance(kind, d, 0.8);
      if (!e) {
        o.require(false, name(kind) + " d=" + std::to_string(d));
        return;
      }
      ld.push_back(std::log(static_cast<double>(d)));
      le.push_back(std::log(*e));
    }
    const double slope = ts::fitted_slope(ld, le);
    const double expected = kind == Scheme::NewTwoStage ? -0.125 : -0.25;
    o.require(std::abs(slope - expected) <= 0.03, name(kind));
    o.detail << " " << name(kind) << "=" << fmt(slope);
  }
}

void efficiency_ranking(Outcome& o) {
  std::vector<double> low, high;
  for (auto kind : kAllSchemes) {
    low.push_back(max_upsilon(kind, 1).value().upsilon);
    high.push_back(max_upsilon(kind, 1000000).value().upsilon);
  }
  for (int k = 1; k < 4; ++k) {
    o.require(low[0] > low[k], "d=1 leapfrog vs " + name(kAllSchemes[k]));
    o.require(high[k] > high[0], "d=1e6 " + name(kAllSchemes[k]) + " vs leapfrog");
    if (k != 2) o.require(high[2] > high[k], "d=1e6 new-two-stage vs " + name(kAllSchemes[k]));
  }
  o.require(high[2] > high[0], "d=1e6 new-two-stage vs leapfrog");
  o.detail << " d=1:";
  for (int k = 0; k < 4; ++k) o.detail << " " << name(kAllSchemes[k]) << "=" << fmt(low[k]);
  o.detail << "; d=1e6:";
  for (int k = 0; k < 4; ++k) o.detail << " " << name(kAllSchemes[k]) << "=" << fmt(high[k]);
}

void theory_simulation_bridge(Outcome& o) {
  constexpr int d = 1000, steps = 100, proposals = 100000;
  StdGaussianModel model(d);
  for (auto kind : kAllSchemes) {
    const auto point = independence_eps(kind, steps);
    if (!point) {
      o.require(false, name(kind) + " independence step");
      continue;
    }
    const double theory = asymptotic_accept(delta_moments(point->pair, d));
    Rng rng(derive_seed(20, {static_cast<std::uint64_t>(scheme_index(kind))}));
    const HmcConfig cfg{kind, point->eps, steps, 0};
    Vector q = sample_momentum(rng, d);  // start in stationarity
    double total = 0.0;
    for (int i = 0; i < proposals; ++i) {
      auto t = hmc_iteration(model, q, cfg, rng);
      total += t.accept_prob;
      q = std::move(t.position);
    }
    const double empirical = total / proposals;
    o.require(std::abs(empirical - theory) <= 0.01, name(kind));
    o.detail << " " << name(kind) << " " << fmt(empirical) << " vs " << fmt(theory);
  }
}

double state_error(const PhasePoint& a, const PhasePoint& b) {
  const double num = std::sqrt((a.position - b.position).squaredNorm() +
                               (a.momentum - b.momentum).squaredNorm());
  const double den = std::sqrt(b.position.squaredNorm() + b.momentum.squaredNorm());
  return num / std::max(1.0, den);
}

void integrator_properties(Outcome& o) {
  Rng rng(71);
  const int d = 4;
  std::vector<std::unique_ptr<TargetModel>> models;
  models.push_back(std::make_unique<StdGaussianModel>(d));
  models.push_back(StudentTModel::ar1(d, 0.95));
  {
    Eigen::MatrixXd x(60, d);
    Eigen::VectorXd y(60);
    for (int i = 0; i < 60; ++i) {
      x(i, 0) = 1.0;
      for (int j = 1; j < d; ++j) x(i, j) = rng.normal();
      y[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;
    }
    models.push_back(std::make_unique<LogisticRegressionModel>(x, y));
  }
  double worst_rev = 0.0;
  for (const auto& model : models) {
    for (auto kind : kAllSchemes) {
      for (int trial = 0; trial < 20; ++trial) {
        const PhasePoint x(sample_momentum(rng, d), sample_momentum(rng, d));
        auto y = integrate(kind, *model, x, 0.1, 10).state;
        y.flip_momentum();
        auto z = integrate(kind, *model, y, 0.1, 10).state;
        z.flip_momentum();
        worst_rev = std::max(worst_rev, state_error(z, x));
      }
    }
  }
  o.require(worst_rev < 1e-10, "reversibility " + fmt(worst_rev));

  // Volume preservation: central-difference Jacobian of one step on the
  // correlated Student-t target.
  auto t_model = StudentTModel::ar1(2, 0.95);
  double worst_det = 0.0;
  for (auto kind : kAllSchemes) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vector z0 = 2.0 * sample_momentum(rng, 4);
      Eigen::Matrix4d jac;
      for (int j = 0; j < 4; ++j) {
        const double h = 1e-6;
        Vector a = z0, b = z0;
        a[j] += h;
        b[j] -= h;
        const auto fa = step(kind, *t_model, PhasePoint(a.head(2), a.tail(2)), 0.1).state;
        const auto fb = step(kind, *t_model, PhasePoint(b.head(2), b.tail(2)), 0.1).state;
        Vector col(4);
        col << fa.position - fb.position, fa.momentum - fb.momentum;
        jac.col(j) = col / (2.0 * h);
      }
      worst_det = std::max(worst_det, std::abs(jac.determinant() - 1.0));
    }
  }
  o.require(worst_det < 1e-6, "jacobian " + fmt(worst_det));

  // Global error against the exact rotation of the Gaussian flow.
  StdGaussianModel gauss(2);
  Vector q0(2), p0(2);
  q0 << 1.0, -0.5;
  p0 << 0.3, 0.8;
  const double t = 1.0;
  const Vector q_exact = q0 * std::cos(t) + p0 * std::sin(t);
  const Vector p_exact = -q0 * std::sin(t) + p0 * std::cos(t);
  o.detail << " rev=" << fmt(worst_rev, 2) << " |det-1|=" << fmt(worst_det, 2) << " ratios:";
  for (auto kind : kAllSchemes) {
    double err[2];
    int i = 0;
    for (double eps : {0.02, 0.01}) {
      const auto r = integrate(kind, gauss, PhasePoint(q0, p0), eps,
                               static_cast<int>(std::lround(t / eps))).state;
      err[i++] = std::sqrt((r.position - q_exact).squaredNorm() +
                           (r.momentum - p_exact).squaredNorm());
    }
    const double ratio = err[0] / err[1];
    o.require(std::abs(ratio - 4.0) <= 0.4, name(kind) + " ratio");
    o.detail << " " << name(kind) << "=" << fmt(ratio);
  }
}

void sampler_correctness(Outcome& o) {
  ChainSettings s;
  s.iterations = 20000;
  s.burn_in = 1000;
  double worst_z = 0.0, worst_var = 0.0;
  std::ostringstream adapt;
  for (int d : {2, 10}) {
    StdGaussianModel model(d);
    for (auto kind : kAllSchemes) {
      NutsConfig cfg;
      cfg.scheme = kind;
      cfg.seed = derive_seed(8, {static_cast<std::uint64_t>(d),
                                 static_cast<std::uint64_t>(scheme_index(kind))});
      const auto out = run_chain(model, cfg, s);
      for (int j = 0; j < d; ++j) {
        const std::vector<double> x(out.samples.col(j).data(),
                                    out.samples.col(j).data() + out.samples.rows());
        const double z = std::abs(ts::mean(x)) / ts::batch_mean_se(x);
        const double var_err = std::abs(ts::variance(x) - 1.0);
        worst_z = std::max(worst_z, z);
        worst_var = std::max(worst_var, var_err);
        o.require(z < 4.0, name(kind) + " d=" + std::to_string(d) + " mean");
        o.require(var_err < 0.1, name(kind) + " d=" + std::to_string(d) + " variance");
      }
      if (d == 10) {
        const double warm = ts::mean(out.warmup_accept_stat_trace);
        const double post = ts::mean(out.accept_stat_trace);
        o.require(std::abs(warm - 0.8) <= 0.05, name(kind) + " warm-up accept stat");
        if (kind == Scheme::Leapfrog) {
          o.require(std::abs(post - 0.8) <= 0.05, "leapfrog post-adaptation accept stat");
        }
        adapt << " " << name(kind) << " " << fmt(warm, 3) << "/" << fmt(post, 3);
      }
    }
  }
  o.detail << " max |mean|/SE=" << fmt(worst_z, 3) << " max |var-1|=" << fmt(worst_var, 3)
           << "; accept stat warm-up/post (d=10):" << adapt.str();
}

void ess_estimator(Outcome& o) {
  constexpr std::size_t n = 100000;
  Rng rng(9);
  std::vector<double> noise(n);
  for (auto& v : noise) v = rng.normal();
  const double white = ess(noise).value();
  o.require(std::abs(white - n) <= 0.1 * n, "white noise");
  o.detail << " white=" << fmt(white / n, 4) << "N";
  for (double rho : {0.0, 0.3, 0.6, 0.9}) {
    const auto x = ts::ar1_series(n, rho, rng);
    const double expected = n * (1 - rho) / (1 + rho);
    const double got = ess(x).value();
    o.require(std::abs(got - expected) <= 0.15 * expected, "rho=" + fmt(rho));
    o.detail << " rho=" << fmt(rho) << ":" << fmt(got / expected, 4);
  }
}

int paired_wins(const CellResult& better, const CellResult& base,
                const std::function<double(const EssSummary&)>& field) {
  int wins = 0;
  for (std::size_t r = 0; r < better.runs.size() && r < base.runs.size(); ++r) {
    if (field(better.runs[r].summary) > field(base.runs[r].summary)) ++wins;
  }
  return wins;
}

void benchmark_direction(Outcome& o) {
  const auto dir = std::filesystem::temp_directory_path() / "hmc_acceptance_bench";
  std::filesystem::create_directories(dir);
  RunConfig c;
  c.schemes = {Scheme::Leapfrog, Scheme::TwoStage, Scheme::ThreeStage};
  c.repetitions = 10;
  c.timing = false;
  c.out_dir = dir;
  c.seed = 1;
  std::ostringstream log;

  c.command = Command::BenchLogistic;
  c.synthetic = {{532, 7}};
  auto logistic = cmd_bench_logistic(c, log);
  c.command = Command::BenchStudentT;
  c.synthetic.clear();
  c.dims = {10, 100};
  auto student = cmd_bench_student_t(c, log);
  o.require(logistic.ok() && student.ok(), "benchmark runs reported errors");

  std::vector<BenchBlock> blocks = logistic.blocks;
  blocks.insert(blocks.end(), student.blocks.begin(), student.blocks.end());
  if (blocks.size() != 3) {
    o.require(false, "expected three benchmark blocks");
    return;
  }
  auto eps = [](const EssSummary& s) { return s.adapted_eps; };
  o.detail << " (a) eps wins ts/th over lf:";
  for (const auto& b : blocks) {
    const int ts_wins = paired_wins(b.cells[1], b.cells[0], eps);
    const int th_wins = paired_wins(b.cells[2], b.cells[0], eps);
    o.require(ts_wins >= 8, b.label + " two-stage eps");
    o.require(th_wins >= 8, b.label + " three-stage eps");
    o.detail << " " << b.label << " " << ts_wins << "/" << th_wins;
  }
  const auto& d100 = blocks[2];
  const int ess_wins = paired_wins(d100.cells[2], d100.cells[0],
                                   [](const EssSummary& s) { return s.min_ess_per_gradient; });
  o.require(ess_wins >= 7, "three-stage min ESS per gradient at d=100");
  o.detail << "; (b) " << d100.label << " three-stage min-ESS/grad wins " << ess_wins
           << "/10 (means th=" << fmt(d100.cells[2].mean.min_ess_per_gradient)
           << " lf=" << fmt(d100.cells[0].mean.min_ess_per_gradient) << ")";
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    void (*run)(Outcome&);
  };
  const Criterion criteria[] = {
      {"leapfrog propagation matrix closed form", leapfrog_closed_form},
      {"leapfrog off-diagonal series at L=50", leapfrog_series},
      {"order of the acceptance defect at d=1e4", acceptance_order},
      {"step-size scaling with dimension at E=0.8", dimension_scaling},
      {"max efficiency ranking at d=1 and d=1e6", efficiency_ranking},
      {"empirical vs asymptotic acceptance, d=1000 L=100", theory_simulation_bridge},
      {"integrator reversibility, volume, second order", integrator_properties},
      {"NUTS moments and dual averaging", sampler_correctness},
      {"ESS on white noise and AR(1)", ess_estimator},
      {"benchmark directional pattern", benchmark_direction},
  };
  int failures = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " AC" << index << " " << c.label << ":"
              << o.detail.str() << " (" << fmt(secs, 3) << "s)" << std::endl;
  }
  std::cout << (10 - failures) << "/10 criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
