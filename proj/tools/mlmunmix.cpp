// mlmunmix: synthetic scenes, MLM unmixing runs, evaluation and report artifacts.
//
// Exit codes: 0 success, 1 usage/config error, 2 data/dimension error,
// 3 numeric failure.

#include "mlmunmix/commands.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdio>
#include <iostream>
#include <regex>

namespace {

using namespace mlmunmix;
namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

PLaw parse_p_law(const std::string& text, double& constant) {
  if (text == "uniform") return PLaw::Uniform01;
  if (text == "zero") return PLaw::Zero;
  if (text.rfind("constant:", 0) == 0) {
    auto v = io::parse_double(std::string_view(text).substr(9));
    if (!v) throw CLI::ValidationError("--p-law", "bad constant in '" + text + "'");
    constant = *v;
    return PLaw::Constant;
  }
  throw CLI::ValidationError("--p-law", "expected uniform, zero or constant:<c>, got '" + text + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised nonlinear hyperspectral unmixing with the multilinear mixing model"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads for pixel loops (0 = all cores)")->check(CLI::NonNegativeNumber);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic MLM scene bundle");
  cli::SynthOptions synth_opts;
  std::string size = "100x100";
  std::string p_law = "uniform";
  std::string synth_out;
  std::string endmembers_csv;
  synth->add_option("--d", synth_opts.spec.d, "Number of bands")->check(CLI::PositiveNumber);
  synth->add_option("--m", synth_opts.spec.m, "Number of endmembers")->check(CLI::PositiveNumber);
  synth->add_option("--size", size, "Pixel grid HEIGHTxWIDTH");
  synth->add_option("--snr", synth_opts.spec.snr_db, "Target SNR in dB");
  synth->add_option("--seed", synth_opts.spec.seed, "Random seed");
  synth->add_option("--p-law", p_law, "uniform | zero | constant:<c>");
  synth->add_option("--endmembers", endmembers_csv, "Endmember CSV (bands x m, header row) instead of synthetic spectra")
      ->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "Output bundle directory")->required();

  // unmix
  auto* unmix = app.add_subcommand("unmix", "Run VCA initialization and BCD unmixing from a config file");
  std::string config_path;
  bool quiet = false;
  unmix->add_option("config", config_path, "Experiment config (key=value)")->required();
  unmix->add_flag("--quiet", quiet, "No per-iteration progress");

  // eval
  auto* eval = app.add_subcommand("eval", "Score run bundles against a synthetic truth bundle");
  std::string truth_dir;
  std::string eval_out;
  std::vector<std::string> eval_runs;
  eval->add_option("--truth", truth_dir, "Synthetic bundle directory")->required();
  eval->add_option("--out", eval_out, "Directory for eval.csv and per-run reports")->required();
  eval->add_option("runs", eval_runs, "Run bundle directories")->required();

  // report
  auto* report = app.add_subcommand("report", "Emit plot-ready spectra CSVs and PNG rasters");
  std::string report_out;
  std::string report_truth;
  std::vector<std::string> report_runs;
  report->add_option("--out", report_out, "Output directory")->required();
  report->add_option("--truth", report_truth, "Optional synthetic bundle for overlays and alignment");
  report->add_option("runs", report_runs, "Run bundle directories")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*synth) {
      const std::regex grid(R"((\d+)x(\d+))");
      std::smatch match;
      if (!std::regex_match(size, match, grid)) {
        std::cerr << "error: --size must look like 100x100, got '" << size << "'\n";
        return kUsage;
      }
      synth_opts.spec.height = std::stoll(match[1]);
      synth_opts.spec.width = std::stoll(match[2]);
      synth_opts.spec.p_law = parse_p_law(p_law, synth_opts.spec.p_constant);
      if (!endmembers_csv.empty()) synth_opts.endmembers_csv = endmembers_csv;
      synth_opts.out = synth_out;
      const GroundTruth gt = cli::cmd_synth(synth_opts);
      std::cout << "wrote " << synth_out << " (sigma2=" << io::format_double(gt.sigma2)
                << ", realized SNR " << io::format_double(gt.realized_snr_db()) << " dB)\n";
    } else if (*unmix) {
      const auto cfg = io::ExperimentConfig::load(config_path);
      std::function<void(const IterationReport&)> progress;
      if (!quiet) {
        progress = [](const IterationReport& r) {
          std::fprintf(stderr, "iter %5d  objective %.10g  [A %.3fs P %.3fs E %.3fs]\n", r.iteration, r.objective,
                       r.seconds_a, r.seconds_p, r.seconds_e);
        };
      }
      const UnmixingResult res = cli::cmd_unmix(cfg, progress);
      std::cout << "wrote " << cfg.output_dir.string() << " (" << to_string(res.termination) << " after "
                << res.iterations << " iterations, objective " << io::format_double(res.objective_trace.back())
                << ")\n";
    } else if (*eval) {
      std::vector<fs::path> runs(eval_runs.begin(), eval_runs.end());
      const auto rows = cli::cmd_eval(truth_dir, runs, eval_out);
      std::cout << csv_header() << "\n";
      for (const auto& row : rows) std::cout << to_csv_row(row.report, row.label) << "\n";
    } else if (*report) {
      std::vector<fs::path> runs(report_runs.begin(), report_runs.end());
      std::optional<fs::path> truth;
      if (!report_truth.empty()) truth = report_truth;
      const auto files = cli::cmd_report(runs, report_out, truth);
      std::cout << "wrote " << files.size() << " files to " << report_out << "\n";
    }
  } catch (const io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}
