#include "hmc/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hmc/dataset.hpp"
#include "hmc/models.hpp"
#include "json.hpp"

namespace hmc {

namespace {

using nlohmann::json;

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_table(const std::filesystem::path& path, const csv::Table& table) {
  auto out = open_output(path);
  csv::write(table, out);
}

std::string num(double v) { return csv::format_number(v); }

json schemes_json(const std::vector<Scheme>& schemes) {
  json a = json::array();
  for (auto s : schemes) a.push_back(std::string(scheme_name(s)));
  return a;
}

json base_metadata(const RunConfig& c) {
  return json{{"command", std::string(command_name(c.command))},
              {"schemes", schemes_json(c.schemes)},
              {"iterations", c.iterations},
              {"burn_in", c.burn_in},
              {"burn_in_convention", c.convention == BurnIn::Additional ? "additional" : "included"},
              {"repetitions", c.repetitions},
              {"seed", c.seed},
              {"seed_rule", "derive_seed(master, {block, scheme_index, repetition})"},
              {"target_accept", c.target_accept},
              {"max_tree_depth", c.max_depth},
              {"timing", c.timing}};
}

// Per-block row values in bench_columns() order.
std::vector<double> row_values(const EssSummary& s, bool timing) {
  return {timing ? s.wall_time : 0.0,
          s.adapted_eps,
          s.min_ess,
          s.median_ess,
          s.max_ess,
          timing ? s.min_ess_per_second : 0.0,
          timing ? s.median_ess_per_second : 0.0,
          s.min_ess_per_gradient};
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

NutsConfig nuts_config(const RunConfig& c, Scheme scheme, std::uint64_t seed) {
  NutsConfig n;
  n.scheme = scheme;
  n.target_accept = c.target_accept;
  n.max_tree_depth = c.max_depth;
  n.seed = seed;
  return n;
}

ChainSettings chain_settings(const RunConfig& c) {
  ChainSettings s;
  s.iterations = c.iterations;
  s.burn_in = c.burn_in;
  s.convention = c.convention;
  return s;
}

void write_bench_outputs(const std::string& prefix, const BenchReport& report,
                         const RunConfig& config, json metadata) {
  for (const auto& block : report.blocks) {
    write_table(config.out_dir / (prefix + "_" + block.label + ".csv"),
                block_table(block, config.timing));
    write_table(config.out_dir / (prefix + "_" + block.label + "_runs.csv"),
                runs_table(block, config.timing));
  }
  write_text(config.out_dir / (prefix + ".txt"), render_text_table(report.blocks, config.timing));
  json blocks = json::array();
  for (const auto& b : report.blocks) blocks.push_back(b.label);
  metadata["blocks"] = blocks;
  metadata["errors"] = report.errors;
  write_text(config.out_dir / (prefix + ".json"), metadata.dump(2) + "\n");
}

}  // namespace

std::string_view command_name(Command c) {
  switch (c) {
    case Command::AnalyzeGaussian:
      return "analyze-gaussian";
    case Command::Sample:
      return "sample";
    case Command::BenchLogistic:
      return "bench-logistic";
    case Command::BenchStudentT:
      return "bench-student-t";
  }
  return "unknown";
}

void validate(const RunConfig& c) {
  if (c.schemes.empty()) throw std::invalid_argument("at least one scheme is required");
  if (c.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (c.burn_in < 0) throw std::invalid_argument("burn-in must be >= 0");
  if (c.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (c.convention == BurnIn::Included && c.iterations <= c.burn_in) {
    throw std::invalid_argument("iterations must exceed burn-in when burn-in is included");
  }
  if (!(c.target_accept > 0.0 && c.target_accept < 1.0)) {
    throw std::invalid_argument("target acceptance must lie in (0, 1)");
  }
  if (c.max_depth < 1 || c.max_depth > kMaxTreeDepthLimit) {
    throw std::invalid_argument("max depth must be in [1, 15]");
  }
  if (c.command == Command::BenchStudentT) {
    if (c.dims.empty()) throw std::invalid_argument("--dims must not be empty");
    for (int d : c.dims) {
      if (d < 2) throw std::invalid_argument("student-t dimensions must be >= 2");
    }
    if (!(std::abs(c.rho) < 1.0)) throw std::invalid_argument("|rho| must be < 1");
    if (!(c.nu > 0.0)) throw std::invalid_argument("nu must be positive");
  }
  if (c.command == Command::BenchLogistic && c.data.empty() && c.synthetic.empty()) {
    throw std::invalid_argument("bench-logistic needs --data or --synthetic");
  }
  if (c.command == Command::AnalyzeGaussian) {
    if (c.d_max_exponent < c.d_min_exponent || c.per_decade < 1 || c.max_steps < 1) {
      throw std::invalid_argument("invalid dimension grid");
    }
  }
}

std::uint64_t cell_seed(std::uint64_t master, int block, Scheme scheme, int repetition) {
  return derive_seed(master, {static_cast<std::uint64_t>(block),
                              static_cast<std::uint64_t>(scheme_index(scheme)),
                              static_cast<std::uint64_t>(repetition)});
}

BenchBlock run_bench_block(const std::string& label, int block_index, const ModelFactory& factory,
                           const RunConfig& config, std::vector<std::string>& errors) {
  BenchBlock block;
  block.label = label;
  for (auto scheme : config.schemes) {
    CellResult cell;
    cell.scheme = scheme;
    for (int rep = 0; rep < config.repetitions; ++rep) {
      const auto seed = cell_seed(config.seed, block_index, scheme, rep);
      try {
        const auto model = factory();
        const ChainOutput chain =
            run_chain(*model, nuts_config(config, scheme, seed), chain_settings(config));
        cell.runs.push_back({scheme, rep, seed, summarize(chain)});
      } catch (const std::exception& e) {
        errors.push_back(label + "/" + std::string(scheme_name(scheme)) + "/rep" +
                         std::to_string(rep) + ": " + e.what());
      }
    }
    if (!cell.runs.empty()) {
      std::vector<EssSummary> summaries;
      for (const auto& r : cell.runs) summaries.push_back(r.summary);
      cell.mean = average_summaries(summaries);
      block.cells.push_back(std::move(cell));
    }
  }
  return block;
}

const std::vector<std::string>& bench_columns() {
  static const std::vector<std::string> cols = {
      "scheme",  "cpu_time", "step_size",        "min_ess",          "med_ess",
      "max_ess", "min_ess_per_time", "med_ess_per_time", "min_ess_per_grad"};
  return cols;
}

csv::Table block_table(const BenchBlock& block, bool timing) {
  csv::Table t;
  t.header = bench_columns();
  for (const auto& cell : block.cells) {
    std::vector<std::string> row{std::string(scheme_name(cell.scheme))};
    for (double v : row_values(cell.mean, timing)) row.push_back(num(v));
    t.rows.push_back(std::move(row));
  }
  return t;
}

csv::Table runs_table(const BenchBlock& block, bool timing) {
  csv::Table t;
  t.header = {"scheme",  "repetition", "seed",     "cpu_time",       "step_size", "min_ess",
              "med_ess", "max_ess",    "gradients", "min_ess_per_grad"};
  for (const auto& cell : block.cells) {
    for (const auto& r : cell.runs) {
      const auto& s = r.summary;
      t.rows.push_back({std::string(scheme_name(r.scheme)), std::to_string(r.repetition),
                        std::to_string(r.seed), num(timing ? s.wall_time : 0.0),
                        num(s.adapted_eps), num(s.min_ess), num(s.median_ess), num(s.max_ess),
                        std::to_string(s.gradient_count), num(s.min_ess_per_gradient)});
    }
  }
  return t;
}

std::string render_text_table(const std::vector<BenchBlock>& blocks, bool timing) {
  const auto& cols = bench_columns();
  const std::vector<int> digits = {2, 4, 0, 0, 0, 2, 2, 5};
  constexpr std::size_t kWidth = 18;
  std::ostringstream os;
  for (const auto& block : blocks) {
    os << block.label << '\n';
    os << std::string(15, ' ');
    for (std::size_t c = 1; c < cols.size(); ++c) os << pad(cols[c], kWidth);
    os << '\n';
    const std::size_t ncol = cols.size() - 1;
    std::vector<std::vector<double>> values;
    for (const auto& cell : block.cells) values.push_back(row_values(cell.mean, timing));
    std::vector<std::size_t> best(ncol, values.size());
    for (std::size_t c = 0; c < ncol; ++c) {
      if (c == 1) continue;  // step size is not ranked
      if (!timing && (c == 0 || c == 5 || c == 6)) continue;
      for (std::size_t r = 0; r < values.size(); ++r) {
        const bool lower_better = c == 0;
        if (best[c] == values.size() ||
            (lower_better ? values[r][c] < values[best[c]][c] : values[r][c] > values[best[c]][c])) {
          best[c] = r;
        }
      }
    }
    for (std::size_t r = 0; r < block.cells.size(); ++r) {
      std::string name(scheme_name(block.cells[r].scheme));
      os << name << std::string(name.size() < 15 ? 15 - name.size() : 1, ' ');
      for (std::size_t c = 0; c < ncol; ++c) {
        std::string cell = fixed(values[r][c], digits[c]);
        if (best[c] == r) cell += '*';
        os << pad(cell, kWidth);
      }
      os << '\n';
    }
    os << '\n';
  }
  return os.str();
}

BenchReport cmd_bench_logistic(const RunConfig& config, std::ostream& log) {
  validate(config);
  BenchReport report;
  std::vector<std::pair<std::string, std::shared_ptr<const Dataset>>> sets;
  for (const auto& path : config.data) {
    try {
      sets.emplace_back(path.stem().string(), std::make_shared<Dataset>(load_dataset(path)));
    } catch (const std::exception& e) {
      report.errors.push_back(e.what());
      log << "error: " << e.what() << '\n';
    }
  }
  for (const auto& spec : config.synthetic) {
    const std::string label =
        "synthetic_n" + std::to_string(spec.n) + "_d" + std::to_string(spec.covariates + 1);
    sets.emplace_back(label, std::make_shared<Dataset>(synthetic_logistic_dataset(
                                 spec.n, spec.covariates, derive_seed(config.seed, {999}), label)));
  }
  json meta = base_metadata(config);
  json datasets = json::array();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& [label, data] = sets[i];
    log << "bench-logistic: " << label << " (n=" << data->n() << ", d=" << data->d() << ")\n";
    datasets.push_back({{"label", label}, {"n", data->n()}, {"d", data->d()}});
    try {
      std::shared_ptr<const LogisticRegressionModel> prototype = standardize_design(*data);
      ModelFactory factory = [prototype]() -> std::unique_ptr<TargetModel> {
        return std::make_unique<LogisticRegressionModel>(
            prototype->design(), prototype->labels(), prototype->prior_variance());
      };
      report.blocks.push_back(
          run_bench_block(label, static_cast<int>(i), factory, config, report.errors));
    } catch (const std::exception& e) {
      report.errors.push_back(label + ": " + e.what());
      log << "error: " << label << ": " << e.what() << '\n';
    }
  }
  meta["prior_variance"] = LogisticRegressionModel::kDefaultPriorVariance;
  meta["datasets"] = datasets;
  write_bench_outputs("bench_logistic", report, config, meta);
  log << render_text_table(report.blocks, config.timing);
  return report;
}

BenchReport cmd_bench_student_t(const RunConfig& config, std::ostream& log) {
  validate(config);
  BenchReport report;
  for (std::size_t i = 0; i < config.dims.size(); ++i) {
    const int d = config.dims[i];
    const std::string label = "d" + std::to_string(d);
    log << "bench-student-t: " << label << '\n';
    ModelFactory factory = [&config, d]() -> std::unique_ptr<TargetModel> {
      return StudentTModel::ar1(d, config.rho, config.nu);
    };
    report.blocks.push_back(
        run_bench_block(label, static_cast<int>(i), factory, config, report.errors));
  }
  json meta = base_metadata(config);
  meta["nu"] = config.nu;
  meta["rho"] = config.rho;
  meta["dims"] = config.dims;
  write_bench_outputs("bench_student_t", report, config, meta);
  log << render_text_table(report.blocks, config.timing);
  return report;
}

AnalysisReport cmd_analyze_gaussian(const RunConfig& config, std::ostream& log) {
  validate(config);
  const auto grid =
      log_dimension_grid(config.d_min_exponent, config.d_max_exponent, config.per_decade);
  AnalysisReport report;
  {
    auto out = open_output(config.out_dir / "efficiency_curves.csv");
    report.rows = emit_efficiency_curves(grid, config.max_steps, out);
  }
  std::ostringstream os;
  os << "scheme           first d with max-upsilon above leapfrog   ratio at largest d\n";
  for (auto kind : kAllSchemes) {
    if (kind == Scheme::Leapfrog) continue;
    std::string first = "none";
    double last_ratio = 0.0;
    for (const auto& r : report.rows) {
      if (r.kind != kind) continue;
      if (first == "none" && r.ratio_vs_leapfrog > 1.0) first = std::to_string(r.d);
      last_ratio = r.ratio_vs_leapfrog;
    }
    std::string name(scheme_name(kind));
    os << name << std::string(17 - name.size(), ' ') << pad(first, 41) << pad(fixed(last_ratio, 4), 21)
       << '\n';
  }
  report.crossover_table = os.str();
  write_text(config.out_dir / "crossover.txt", report.crossover_table);
  log << report.crossover_table;
  return report;
}

SampleReport cmd_sample(const RunConfig& config, std::ostream& log) {
  validate(config);
  std::unique_ptr<TargetModel> model;
  if (config.model == "gaussian") {
    model = std::make_unique<StdGaussianModel>(config.dim);
  } else if (config.model == "student-t") {
    model = StudentTModel::ar1(config.dim, config.rho, config.nu);
  } else if (config.model == "logistic") {
    if (config.data.size() != 1) throw std::invalid_argument("sample --model logistic needs one --data file");
    model = standardize_design(load_dataset(config.data[0]));
  } else {
    throw std::invalid_argument("unknown model '" + config.model + "'");
  }
  const Scheme scheme = config.schemes.front();
  SamplerConfig sampler;
  if (config.sampler == "nuts") {
    sampler = nuts_config(config, scheme, config.seed);
  } else if (config.sampler == "hmc") {
    sampler = HmcConfig{scheme, config.eps, config.num_steps, config.seed};
  } else {
    throw std::invalid_argument("unknown sampler '" + config.sampler + "'");
  }
  SampleReport report;
  report.chain = run_chain(*model, sampler, chain_settings(config));
  report.summary = summarize(report.chain);
  report.model_gradient_count = model->gradient_evaluations();

  csv::Table samples;
  for (int j = 0; j < model->dim(); ++j) samples.header.push_back("q" + std::to_string(j + 1));
  samples.rows.reserve(report.chain.samples.rows());
  for (Eigen::Index i = 0; i < report.chain.samples.rows(); ++i) {
    std::vector<std::string> row;
    for (Eigen::Index j = 0; j < report.chain.samples.cols(); ++j) {
      row.push_back(csv::format_number(report.chain.samples(i, j), 17));
    }
    samples.rows.push_back(std::move(row));
  }
  write_table(config.out_dir / "samples.csv", samples);

  const auto& s = report.summary;
  json ess_values = json::array();
  for (double v : s.ess_per_coordinate) {
    ess_values.push_back(std::isfinite(v) ? json(v) : json(nullptr));
  }
  json sidecar = base_metadata(config);
  sidecar["model"] = config.model;
  sidecar["dim"] = model->dim();
  sidecar["sampler"] = config.sampler;
  sidecar["scheme"] = std::string(scheme_name(scheme));
  sidecar["adapted_eps"] = report.chain.adapted_eps;
  sidecar["gradient_count"] = report.chain.gradient_count;
  sidecar["divergences"] = report.chain.divergence_count;
  sidecar["retained_draws"] = report.chain.samples.rows();
  sidecar["wall_time"] = config.timing ? report.chain.wall_time : 0.0;
  sidecar["ess"] = {{"per_coordinate", ess_values},
                    {"min", s.min_ess},
                    {"median", s.median_ess},
                    {"max", s.max_ess},
                    {"undefined_coordinates", s.undefined_coordinates},
                    {"min_per_gradient", s.min_ess_per_gradient}};
  write_text(config.out_dir / "samples.json", sidecar.dump(2) + "\n");
  log << "sample: " << report.chain.samples.rows() << " draws, eps=" << report.chain.adapted_eps
      << ", gradients=" << report.chain.gradient_count << ", min ESS=" << s.min_ess << '\n';
  return report;
}

int run_command(const RunConfig& config, std::ostream& log) {
  try {
    switch (config.command) {
      case Command::AnalyzeGaussian:
        cmd_analyze_gaussian(config, log);
        return 0;
      case Command::Sample:
        cmd_sample(config, log);
        return 0;
      case Command::BenchLogistic:
        return cmd_bench_logistic(config, log).ok() ? 0 : 1;
      case Command::BenchStudentT:
        return cmd_bench_student_t(config, log).ok() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace hmc
