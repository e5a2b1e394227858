#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hmc/csv.hpp"
#include "hmc/diagnostics.hpp"
#include "hmc/gaussian_analysis.hpp"
#include "hmc/integrators.hpp"
#include "hmc/samplers.hpp"

namespace hmc {

enum class Command { AnalyzeGaussian, Sample, BenchLogistic, BenchStudentT };

std::string_view command_name(Command c);

struct SyntheticSpec {
  int n = 532;
  int covariates = 7;
};

struct RunConfig {
  Command command = Command::AnalyzeGaussian;
  std::vector<Scheme> schemes{kAllSchemes.begin(), kAllSchemes.end()};
  int iterations = 5000;
  int burn_in = 1000;
  BurnIn convention = BurnIn::Additional;
  int repetitions = 10;
  std::uint64_t seed = 1;
  double target_accept = 0.8;
  int max_depth = 10;
  std::filesystem::path out_dir = ".";
  bool timing = true;  // false writes 0 for every time-derived column

  // bench-logistic
  std::vector<std::filesystem::path> data;
  std::vector<SyntheticSpec> synthetic;

  // bench-student-t
  std::vector<int> dims{2, 10, 100};
  double rho = 0.95;
  double nu = 5.0;

  // analyze-gaussian
  int d_min_exponent = 1;
  int d_max_exponent = 6;
  int per_decade = 10;
  int max_steps = kDefaultMaxSteps;

  // sample
  std::string model = "gaussian";  // gaussian | student-t | logistic
  int dim = 10;
  std::string sampler = "nuts";  // nuts | hmc
  double eps = 0.1;
  int num_steps = 10;
};

/// Throws std::invalid_argument describing the first invalid field.
void validate(const RunConfig& config);

/// Seed of one table cell: derive_seed(master, {block, scheme, repetition}).
std::uint64_t cell_seed(std::uint64_t master, int block, Scheme scheme, int repetition);

struct RunRecord {
  Scheme scheme = Scheme::Leapfrog;
  int repetition = 0;
  std::uint64_t seed = 0;
  EssSummary summary;
};

struct CellResult {
  Scheme scheme = Scheme::Leapfrog;
  std::vector<RunRecord> runs;
  EssSummary mean;
};

struct BenchBlock {
  std::string label;
  std::vector<CellResult> cells;
};

struct BenchReport {
  std::vector<BenchBlock> blocks;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

using ModelFactory = std::function<std::unique_ptr<TargetModel>()>;

/// Runs `repetitions` seeded NUTS chains per scheme; each run gets its own
/// freshly built model so gradient counts are per chain.
BenchBlock run_bench_block(const std::string& label, int block_index, const ModelFactory& factory,
                           const RunConfig& config, std::vector<std::string>& errors);

/// Column set of the per-block CSV.
const std::vector<std::string>& bench_columns();

csv::Table block_table(const BenchBlock& block, bool timing);
csv::Table runs_table(const BenchBlock& block, bool timing);

/// Aligned text rendering; '*' marks the best entry of each column within a
/// block (lowest cpu_time, highest ESS-based columns).
std::string render_text_table(const std::vector<BenchBlock>& blocks, bool timing);

BenchReport cmd_bench_logistic(const RunConfig& config, std::ostream& log);
BenchReport cmd_bench_student_t(const RunConfig& config, std::ostream& log);

struct AnalysisReport {
  std::vector<EfficiencyRow> rows;
  std::string crossover_table;
};

/// Writes efficiency_curves.csv and crossover.txt to out_dir.
AnalysisReport cmd_analyze_gaussian(const RunConfig& config, std::ostream& log);

struct SampleReport {
  ChainOutput chain;
  EssSummary summary;
  std::uint64_t model_gradient_count = 0;
};

/// Writes samples.csv (one row per retained draw) and samples.json.
SampleReport cmd_sample(const RunConfig& config, std::ostream& log);

/// Dispatches on config.command; returns the process exit status (nonzero
/// iff some unit of work failed).
int run_command(const RunConfig& config, std::ostream& log);

struct ParseOutcome {
  std::optional<RunConfig> config;  // empty when the process should exit
  int exit_code = 0;
};

/// Parses argv: flags plus an optional key=value file given by --config
/// (flags win on conflict). Help and parse errors are printed to out/err.
ParseOutcome parse_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hmc
