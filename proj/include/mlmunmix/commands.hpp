#pragma once

#include "mlmunmix/io.hpp"
#include "mlmunmix/metrics.hpp"
#include "mlmunmix/solver.hpp"
#include "mlmunmix/synth.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mlmunmix::cli {

namespace fs = std::filesystem;

// File names inside synthetic and run bundles (see FORMATS.md).
inline constexpr const char* kCubeFile = "cube.bin";
inline constexpr const char* kCleanCubeFile = "clean.bin";
inline constexpr const char* kEndmembersFile = "endmembers.csv";
inline constexpr const char* kInitialEndmembersFile = "initial_endmembers.csv";
inline constexpr const char* kAbundancesFile = "abundances.bin";
inline constexpr const char* kProbabilitiesFile = "probabilities.csv";
inline constexpr const char* kSceneFile = "scene.txt";
inline constexpr const char* kTraceFile = "trace.csv";
inline constexpr const char* kResultFile = "result.txt";
inline constexpr const char* kConfigEchoFile = "config.txt";
inline constexpr const char* kTimingFile = "timing.txt";
inline constexpr const char* kEvalCsvFile = "eval.csv";

struct SynthOptions {
  SceneSpec spec;
  std::optional<fs::path> endmembers_csv;  // switches the source to ProvidedMatrix
  fs::path out;
};

/// Generates a scene and writes its bundle into `out` (created if missing).
GroundTruth cmd_synth(const SynthOptions& opts);

/// Runs VCA (unless an initial E is configured) and the solver, then writes
/// the run bundle into the configured output directory.
UnmixingResult cmd_unmix(const io::ExperimentConfig& cfg,
                         const std::function<void(const IterationReport&)>& progress = {});

struct EvalRow {
  std::string run;
  std::string label;
  EvalReport report;
};

/// Evaluates each run against a synthetic bundle. Writes `<out>/eval.csv`
/// (one row per run) and `<out>/<run>.eval.txt`.
std::vector<EvalRow> cmd_eval(const fs::path& truth_dir, const std::vector<fs::path>& run_dirs, const fs::path& out);

/// Plot-ready artifacts for each run: per-endmember spectra CSVs, abundance
/// and probability PNG rasters, and (given one linear and one nonlinear run)
/// the summed absolute abundance difference map. Returns the written files.
std::vector<fs::path> cmd_report(const std::vector<fs::path>& run_dirs, const fs::path& out,
                                 const std::optional<fs::path>& truth_dir = {});

/// A run bundle read back from disk.
struct RunBundle {
  std::string name;
  std::optional<Mode> mode;
  MatrixXd E;
  MatrixXd A;
  std::optional<VectorXd> P;
  Index height = 1;
  Index width = 1;
};
RunBundle load_run(const fs::path& dir);

}  // namespace mlmunmix::cli
