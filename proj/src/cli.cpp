#include <charconv>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "hmc/bench.hpp"

namespace hmc {

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int parse_int(const std::string& s, const std::string& what) {
  int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw CLI::ValidationError(what, "'" + s + "' is not an integer");
  }
  return v;
}

SyntheticSpec parse_synthetic(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    throw CLI::ValidationError("--synthetic", "expected N:COVARIATES, got '" + s + "'");
  }
  return {parse_int(s.substr(0, colon), "--synthetic"),
          parse_int(s.substr(colon + 1), "--synthetic")};
}

}  // namespace

ParseOutcome parse_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Hamiltonian Monte Carlo with multi-stage splitting integrators"};
  app.set_config("--config", "", "key=value file; command-line flags take precedence");

  std::string command = "analyze-gaussian";
  std::string schemes;
  std::string dims;
  std::vector<std::string> synthetic;
  std::string out_dir = ".";
  bool burn_in_included = false;
  bool no_timing = false;

  app.add_option("--command", command, "analyze-gaussian | sample | bench-logistic | bench-student-t")
      ->check(CLI::IsMember({"analyze-gaussian", "sample", "bench-logistic", "bench-student-t"}));
  app.add_option("--schemes", schemes, "comma list of leapfrog, two-stage, new-two-stage, three-stage");
  app.add_option("--iterations", cfg.iterations, "retained draws (default 5000)");
  app.add_option("--burn-in", cfg.burn_in, "warm-up iterations (default 1000)");
  app.add_flag("--burn-in-included", burn_in_included,
               "count burn-in inside --iterations instead of on top of it");
  app.add_option("--reps", cfg.repetitions, "repetitions per table cell (default 10)");
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--target-accept", cfg.target_accept, "dual-averaging target (default 0.8)");
  app.add_option("--max-depth", cfg.max_depth, "NUTS maximum tree depth (default 10)");
  app.add_option("--dims", dims, "student-t dimensions, comma separated (default 2,10,100)");
  app.add_option("--rho", cfg.rho, "AR(1) correlation of the student-t precision");
  app.add_option("--nu", cfg.nu, "student-t degrees of freedom");
  app.add_option("--data", cfg.data, "dataset CSV files (label in last column)");
  app.add_option("--synthetic", synthetic, "synthetic logistic dataset N:COVARIATES");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--no-timing", no_timing, "write 0 in time-derived columns (byte-stable output)");
  app.add_option("--d-min-exp", cfg.d_min_exponent, "analyze-gaussian: smallest log10 d");
  app.add_option("--d-max-exp", cfg.d_max_exponent, "analyze-gaussian: largest log10 d");
  app.add_option("--per-decade", cfg.per_decade, "analyze-gaussian: grid points per decade");
  app.add_option("--max-steps", cfg.max_steps, "analyze-gaussian: largest L searched");
  app.add_option("--model", cfg.model, "sample: gaussian | student-t | logistic")
      ->check(CLI::IsMember({"gaussian", "student-t", "logistic"}));
  app.add_option("--dim", cfg.dim, "sample: model dimension");
  app.add_option("--sampler", cfg.sampler, "sample: nuts | hmc")->check(CLI::IsMember({"nuts", "hmc"}));
  app.add_option("--eps", cfg.eps, "sample: HMC step size");
  app.add_option("--steps", cfg.num_steps, "sample: HMC steps per trajectory");

  try {
    app.parse(argc, argv);
    if (command == "analyze-gaussian") cfg.command = Command::AnalyzeGaussian;
    if (command == "sample") cfg.command = Command::Sample;
    if (command == "bench-logistic") cfg.command = Command::BenchLogistic;
    if (command == "bench-student-t") cfg.command = Command::BenchStudentT;
    if (!schemes.empty()) {
      cfg.schemes.clear();
      for (const auto& name : split_list(schemes)) {
        const auto scheme = parse_scheme(name);
        if (!scheme) throw CLI::ValidationError("--schemes", "unknown scheme '" + name + "'");
        cfg.schemes.push_back(*scheme);
      }
    }
    if (!dims.empty()) {
      cfg.dims.clear();
      for (const auto& d : split_list(dims)) cfg.dims.push_back(parse_int(d, "--dims"));
    }
    for (const auto& s : synthetic) cfg.synthetic.push_back(parse_synthetic(s));
    cfg.out_dir = out_dir;
    cfg.convention = burn_in_included ? BurnIn::Included : BurnIn::Additional;
    cfg.timing = !no_timing;
    try {
      validate(cfg);
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("configuration", e.what());
    }
  } catch (const CLI::ParseError& e) {
    return {std::nullopt, app.exit(e, out, err)};
  }
  return {cfg, 0};
}

}  // namespace hmc
