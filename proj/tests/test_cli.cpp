#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hmc/bench.hpp"
#include "hmc/dataset.hpp"
#include "hmc/models.hpp"
#include "json.hpp"

using namespace hmc;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hmc_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

csv::Table read_table(const fs::path& path) {
  std::ifstream in(path);
  return csv::read(in);
}

ParseOutcome parse(std::vector<std::string> args) {
  args.insert(args.begin(), "hmc_bench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return parse_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

RunConfig quick(Command command, const fs::path& out) {
  RunConfig c;
  c.command = command;
  c.iterations = 200;
  c.burn_in = 100;
  c.repetitions = 2;
  c.out_dir = out;
  c.timing = false;
  return c;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(HMC_BENCH_EXE) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(ParseCli, Defaults) {
  const auto r = parse({});
  ASSERT_TRUE(r.config.has_value());
  const auto& c = *r.config;
  EXPECT_EQ(c.command, Command::AnalyzeGaussian);
  EXPECT_EQ(c.iterations, 5000);
  EXPECT_EQ(c.burn_in, 1000);
  EXPECT_EQ(c.repetitions, 10);
  EXPECT_EQ(c.nu, 5.0);
  EXPECT_EQ(c.rho, 0.95);
  EXPECT_EQ(c.dims, (std::vector<int>{2, 10, 100}));
  EXPECT_EQ(c.schemes.size(), 4u);
  EXPECT_EQ(c.target_accept, 0.8);
  EXPECT_EQ(c.max_depth, 10);
  EXPECT_EQ(c.convention, BurnIn::Additional);
}

TEST(ParseCli, Flags) {
  const auto r = parse({"--command", "bench-student-t", "--schemes", "leapfrog,three-stage",
                        "--iterations", "300", "--burn-in", "50", "--reps", "3", "--seed", "9",
                        "--target-accept", "0.7", "--dims", "2,5", "--rho", "0.5", "--nu", "3",
                        "--out", "/tmp/x", "--max-depth", "8", "--no-timing", "--burn-in-included"});
  ASSERT_TRUE(r.config.has_value());
  const auto& c = *r.config;
  EXPECT_EQ(c.command, Command::BenchStudentT);
  EXPECT_EQ(c.schemes, (std::vector<Scheme>{Scheme::Leapfrog, Scheme::ThreeStage}));
  EXPECT_EQ(c.iterations, 300);
  EXPECT_EQ(c.burn_in, 50);
  EXPECT_EQ(c.repetitions, 3);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.target_accept, 0.7);
  EXPECT_EQ(c.dims, (std::vector<int>{2, 5}));
  EXPECT_EQ(c.rho, 0.5);
  EXPECT_EQ(c.nu, 3.0);
  EXPECT_EQ(c.out_dir, fs::path("/tmp/x"));
  EXPECT_EQ(c.max_depth, 8);
  EXPECT_FALSE(c.timing);
  EXPECT_EQ(c.convention, BurnIn::Included);
}

TEST(ParseCli, DataAndSynthetic) {
  const auto r = parse({"--command", "bench-logistic", "--data", "a.csv", "b.csv", "--synthetic", "532:7"});
  ASSERT_TRUE(r.config.has_value());
  EXPECT_EQ(r.config->data.size(), 2u);
  ASSERT_EQ(r.config->synthetic.size(), 1u);
  EXPECT_EQ(r.config->synthetic[0].n, 532);
  EXPECT_EQ(r.config->synthetic[0].covariates, 7);
}

TEST(ParseCli, RejectsInvalidInput) {
  EXPECT_FALSE(parse({"--schemes", "verlet"}).config.has_value());
  EXPECT_NE(parse({"--schemes", "verlet"}).exit_code, 0);
  EXPECT_FALSE(parse({"--reps", "0"}).config.has_value());
  EXPECT_FALSE(parse({"--command", "plot"}).config.has_value());
  EXPECT_FALSE(parse({"--target-accept", "1.5"}).config.has_value());
  EXPECT_FALSE(parse({"--synthetic", "12"}).config.has_value());
  EXPECT_FALSE(parse({"--command", "bench-logistic"}).config.has_value());  // no data
  const auto help = parse({"--help"});
  EXPECT_FALSE(help.config.has_value());
  EXPECT_EQ(help.exit_code, 0);
}

TEST(ParseCli, ConfigFileWithFlagPrecedence) {
  const auto dir = fresh_dir("config");
  const auto path = dir / "run.conf";
  {
    std::ofstream out(path);
    out << "command=bench-student-t\niterations=321\nreps=4\nrho=0.5\nschemes=\"two-stage,three-stage\"\n";
  }
  const auto r = parse({"--config", path.string(), "--reps", "6"});
  ASSERT_TRUE(r.config.has_value());
  EXPECT_EQ(r.config->command, Command::BenchStudentT);
  EXPECT_EQ(r.config->iterations, 321);
  EXPECT_EQ(r.config->rho, 0.5);
  EXPECT_EQ(r.config->repetitions, 6);
  EXPECT_EQ(r.config->schemes, (std::vector<Scheme>{Scheme::TwoStage, Scheme::ThreeStage}));
}

TEST(CellSeed, StableAndDistinct) {
  EXPECT_EQ(cell_seed(1, 0, Scheme::Leapfrog, 0), cell_seed(1, 0, Scheme::Leapfrog, 0));
  EXPECT_NE(cell_seed(1, 0, Scheme::Leapfrog, 0), cell_seed(1, 0, Scheme::Leapfrog, 1));
  EXPECT_NE(cell_seed(1, 0, Scheme::Leapfrog, 0), cell_seed(1, 0, Scheme::TwoStage, 0));
  EXPECT_NE(cell_seed(1, 0, Scheme::Leapfrog, 0), cell_seed(1, 1, Scheme::Leapfrog, 0));
  EXPECT_NE(cell_seed(1, 0, Scheme::Leapfrog, 0), cell_seed(2, 0, Scheme::Leapfrog, 0));
  EXPECT_EQ(cell_seed(5, 2, Scheme::ThreeStage, 7), derive_seed(5, {2, 3, 7}));
}

TEST(AnalyzeGaussian, DefaultGridOutputs) {
  const auto dir = fresh_dir("analysis");
  RunConfig c;
  c.out_dir = dir;
  std::ostringstream log;
  const auto report = cmd_analyze_gaussian(c, log);
  EXPECT_EQ(report.rows.size(), 4u * 51u);
  const auto table = read_table(dir / "efficiency_curves.csv");
  EXPECT_EQ(table.rows.size(), 4u * 51u);
  for (const auto& row : table.rows) {
    if (row[0] == "leapfrog") {
      EXPECT_EQ(row[6], "1");
    }
  }
  EXPECT_NE(slurp(dir / "crossover.txt").find("new-two-stage"), std::string::npos);
  const std::string first = slurp(dir / "efficiency_curves.csv");
  cmd_analyze_gaussian(c, log);
  EXPECT_EQ(slurp(dir / "efficiency_curves.csv"), first);
}

TEST(BenchLogistic, ColumnsReproducibilityAndRoundTrip) {
  const auto dir = fresh_dir("logistic");
  auto c = quick(Command::BenchLogistic, dir);
  c.synthetic = {{120, 3}};
  std::ostringstream log;
  const auto report = cmd_bench_logistic(c, log);
  EXPECT_TRUE(report.ok());
  ASSERT_EQ(report.blocks.size(), 1u);
  const std::string label = report.blocks[0].label;
  const auto csv_path = dir / ("bench_logistic_" + label + ".csv");
  const auto table = read_table(csv_path);
  EXPECT_EQ(table.header, (std::vector<std::string>{"scheme", "cpu_time", "step_size", "min_ess",
                                                    "med_ess", "max_ess", "min_ess_per_time",
                                                    "med_ess_per_time", "min_ess_per_grad"}));
  EXPECT_EQ(table.rows.size(), 4u);
  // Parse back losslessly.
  std::ostringstream rewritten;
  csv::write(table, rewritten);
  EXPECT_EQ(rewritten.str(), slurp(csv_path));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    EXPECT_NEAR(std::stod(table.rows[i][3]), report.blocks[0].cells[i].mean.min_ess,
                1e-9 * report.blocks[0].cells[i].mean.min_ess);
  }
  const std::string bytes = slurp(csv_path), runs = slurp(dir / ("bench_logistic_" + label + "_runs.csv"));
  cmd_bench_logistic(c, log);
  EXPECT_EQ(slurp(csv_path), bytes);
  EXPECT_EQ(slurp(dir / ("bench_logistic_" + label + "_runs.csv")), runs);
  EXPECT_NE(slurp(dir / "bench_logistic.txt").find('*'), std::string::npos);
}

TEST(BenchLogistic, DatasetFailuresAreReportedAndOthersRun) {
  const auto dir = fresh_dir("logistic_errors");
  const auto good = dir / "good.csv";
  {
    std::ofstream out(good);
    write_dataset(synthetic_logistic_dataset(80, 2, 4), out);
  }
  const auto bad = dir / "bad.csv";
  {
    std::ofstream out(bad);
    out << "x,y\n1,0\n2,7\n";
  }
  auto c = quick(Command::BenchLogistic, dir);
  c.repetitions = 1;
  c.schemes = {Scheme::Leapfrog};
  c.data = {bad, dir / "missing.csv", good};
  std::ostringstream log;
  const auto report = cmd_bench_logistic(c, log);
  EXPECT_EQ(report.errors.size(), 2u);
  ASSERT_EQ(report.blocks.size(), 1u);
  EXPECT_EQ(report.blocks[0].label, "good");
  EXPECT_TRUE(fs::exists(dir / "bench_logistic_good.csv"));
  EXPECT_NE(run_command(c, log), 0);
  c.data = {good};
  EXPECT_EQ(run_command(c, log), 0);
}

TEST(BenchLogistic, CellReproducibleInIsolation) {
  const auto dir = fresh_dir("logistic_cell");
  auto c = quick(Command::BenchLogistic, dir);
  c.synthetic = {{100, 2}};
  c.schemes = {Scheme::TwoStage};
  std::ostringstream log;
  const auto report = cmd_bench_logistic(c, log);
  const auto& run = report.blocks.at(0).cells.at(0).runs.at(1);
  const auto data = synthetic_logistic_dataset(100, 2, derive_seed(c.seed, {999}));
  const auto model = standardize_design(data);
  NutsConfig cfg;
  cfg.scheme = Scheme::TwoStage;
  cfg.seed = cell_seed(c.seed, 0, Scheme::TwoStage, 1);
  ChainSettings s;
  s.iterations = c.iterations;
  s.burn_in = c.burn_in;
  const auto chain = run_chain(*model, cfg, s);
  EXPECT_EQ(run.seed, cfg.seed);
  EXPECT_EQ(chain.adapted_eps, run.summary.adapted_eps);
  EXPECT_EQ(chain.gradient_count, run.summary.gradient_count);
}

TEST(BenchStudentT, DefaultBlocksAndMetadata) {
  const auto dir = fresh_dir("student");
  auto c = quick(Command::BenchStudentT, dir);
  c.repetitions = 1;
  c.iterations = 150;
  c.burn_in = 50;
  std::ostringstream log;
  const auto report = cmd_bench_student_t(c, log);
  ASSERT_EQ(report.blocks.size(), 3u);
  for (const auto& b : report.blocks) EXPECT_EQ(b.cells.size(), 4u);
  for (const char* d : {"d2", "d10", "d100"}) {
    EXPECT_TRUE(fs::exists(dir / (std::string("bench_student_t_") + d + ".csv")));
  }
  const auto meta = nlohmann::json::parse(slurp(dir / "bench_student_t.json"));
  EXPECT_EQ(meta["nu"].get<double>(), 5.0);
  EXPECT_EQ(meta["rho"].get<double>(), 0.95);
  EXPECT_EQ(meta["seed"].get<std::uint64_t>(), 1u);
  EXPECT_EQ(meta["repetitions"].get<int>(), 1);
}

TEST(BenchStudentT, DimsFlagRestrictsBlocks) {
  const auto dir = fresh_dir("student_dims");
  ASSERT_EQ(run_binary("--command bench-student-t --dims 2 --reps 1 --iterations 150 --burn-in 50 --no-timing --out " +
                       dir.string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "bench_student_t_d2.csv"));
  EXPECT_FALSE(fs::exists(dir / "bench_student_t_d10.csv"));
  const auto first = slurp(dir / "bench_student_t_d2.csv");
  ASSERT_EQ(run_binary("--command bench-student-t --dims 2 --reps 1 --iterations 150 --burn-in 50 --no-timing --out " +
                       dir.string()),
            0);
  EXPECT_EQ(slurp(dir / "bench_student_t_d2.csv"), first);
}

TEST(Sample, RetainedRowsAndSidecar) {
  const auto dir = fresh_dir("sample");
  RunConfig c;
  c.command = Command::Sample;
  c.dim = 2;
  c.out_dir = dir;
  c.timing = false;
  c.schemes = {Scheme::ThreeStage};
  std::ostringstream log;
  const auto report = cmd_sample(c, log);
  const auto table = read_table(dir / "samples.csv");
  EXPECT_EQ(table.rows.size(), 5000u);
  EXPECT_EQ(table.header, (std::vector<std::string>{"q1", "q2"}));
  const auto meta = nlohmann::json::parse(slurp(dir / "samples.json"));
  EXPECT_EQ(meta["gradient_count"].get<std::uint64_t>(), report.model_gradient_count);
  EXPECT_EQ(report.chain.gradient_count, report.model_gradient_count);
  EXPECT_EQ(meta["scheme"].get<std::string>(), "three-stage");
  EXPECT_EQ(meta["seed"].get<std::uint64_t>(), 1u);
  EXPECT_DOUBLE_EQ(meta["adapted_eps"].get<double>(), report.chain.adapted_eps);
  // Samples parse back to the recorded draws.
  for (int i : {0, 2500, 4999}) {
    EXPECT_EQ(std::stod(table.rows[i][1]), report.chain.samples(i, 1));
  }
  const auto samples = slurp(dir / "samples.csv"), sidecar = slurp(dir / "samples.json");
  cmd_sample(c, log);
  EXPECT_EQ(slurp(dir / "samples.csv"), samples);
  EXPECT_EQ(slurp(dir / "samples.json"), sidecar);
}

TEST(Sample, HmcAndStudentT) {
  const auto dir = fresh_dir("sample_hmc");
  ASSERT_EQ(run_binary("--command sample --model student-t --dim 3 --sampler hmc --eps 0.2 --steps 5 "
                       "--iterations 300 --burn-in 100 --schemes two-stage --out " + dir.string()),
            0);
  EXPECT_EQ(read_table(dir / "samples.csv").rows.size(), 300u);
  EXPECT_NE(run_binary("--command sample --model logistic --out " + dir.string()), 0);
}
