#include "mlmunmix/commands.hpp"

#include "mlmunmix/raster.hpp"
#include "mlmunmix/vca.hpp"

#include <fstream>
#include <sstream>

namespace mlmunmix::cli {

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw io::IoError("cannot create output directory " + dir.string());
}

std::vector<std::string> endmember_names(Index m) {
  std::vector<std::string> names;
  for (Index k = 0; k < m; ++k) names.push_back("endmember_" + std::to_string(k + 1));
  return names;
}

void write_abundances(const fs::path& path, const MatrixXd& A, Index height, Index width) {
  io::write_cube(path, HyperCube(A, {}, height, width));
}

std::string run_name(const fs::path& dir) {
  fs::path p = dir;
  if (p.filename().empty()) p = p.parent_path();
  return p.filename().string();
}

}  // namespace

GroundTruth cmd_synth(const SynthOptions& opts) {
  SceneSpec spec = opts.spec;
  std::optional<EndmemberMatrix> provided;
  if (opts.endmembers_csv) {
    spec.endmember_source = EndmemberSource::ProvidedMatrix;
    MatrixXd E = io::read_matrix_csv(*opts.endmembers_csv);
    spec.d = E.rows();
    spec.m = E.cols();
    provided = EndmemberMatrix(std::move(E));
  }
  GroundTruth gt = generate_scene(spec, provided);
  ensure_dir(opts.out);

  io::write_cube(opts.out / kCubeFile, gt.X_noisy);
  io::write_cube(opts.out / kCleanCubeFile,
                 HyperCube(gt.X_clean, gt.X_noisy.bands(), spec.height, spec.width));
  io::write_matrix_csv(opts.out / kEndmembersFile, gt.E_true.data(), endmember_names(spec.m));
  write_abundances(opts.out / kAbundancesFile, gt.A_true.data(), spec.height, spec.width);
  io::write_raster_csv(opts.out / kProbabilitiesFile, gt.P_true.data(), spec.height, spec.width);
  io::write_key_value(
      opts.out / kSceneFile,
      {{"d", std::to_string(spec.d)},
       {"m", std::to_string(spec.m)},
       {"height", std::to_string(spec.height)},
       {"width", std::to_string(spec.width)},
       {"snr_db", io::format_double(spec.snr_db)},
       {"p_law", std::string(to_string(spec.p_law))},
       {"p_constant", io::format_double(spec.p_constant)},
       {"p_upper", io::format_double(gt.p_upper)},
       {"seed", std::to_string(spec.seed)},
       {"endmember_source", spec.endmember_source == EndmemberSource::ProvidedMatrix ? "provided" : "synthetic"},
       {"sigma2", io::format_double(gt.sigma2)},
       {"realized_snr_db", io::format_double(gt.realized_snr_db())}});
  return gt;
}

UnmixingResult cmd_unmix(const io::ExperimentConfig& cfg, const std::function<void(const IterationReport&)>& progress) {
  const HyperCube cube = io::read_cube(cfg.cube);
  if (cfg.m > std::min(cube.num_bands(), cube.num_pixels()))
    throw DimensionError("m = " + std::to_string(cfg.m) + " exceeds min(bands, pixels) of " + cfg.cube.string());

  EndmemberMatrix E0;
  std::string init_source;
  if (cfg.init_endmembers) {
    E0 = EndmemberMatrix(io::read_matrix_csv(*cfg.init_endmembers));
    init_source = cfg.init_endmembers->string();
    if (E0.num_bands() != cube.num_bands() || E0.num_endmembers() != cfg.m)
      throw DimensionError(cfg.init_endmembers->string() + ": initial endmembers are " +
                           std::to_string(E0.num_bands()) + "x" + std::to_string(E0.num_endmembers()) +
                           ", expected " + std::to_string(cube.num_bands()) + "x" + std::to_string(cfg.m));
  } else {
    E0 = vca(cube, VcaConfig{cfg.m, cfg.vca_snr_db, cfg.vca_seed});
    init_source = "vca";
  }

  SolverCallbacks callbacks;
  callbacks.on_iteration = progress;
  UnmixingResult result = solve(cube, cfg.solver_config(), E0, {}, callbacks);

  const fs::path& out = cfg.output_dir;
  ensure_dir(out);
  io::write_matrix_csv(out / kEndmembersFile, result.endmembers.data(), endmember_names(cfg.m));
  io::write_matrix_csv(out / kInitialEndmembersFile, E0.data(), endmember_names(cfg.m));
  write_abundances(out / kAbundancesFile, result.abundances.data(), cube.height(), cube.width());
  io::write_raster_csv(out / kProbabilitiesFile, result.probabilities.data(), cube.height(), cube.width());

  std::ostringstream trace;
  trace << "iteration,objective\n0," << io::format_double(result.initial_objective) << "\n";
  for (std::size_t t = 0; t < result.objective_trace.size(); ++t)
    trace << (t + 1) << "," << io::format_double(result.objective_trace[t]) << "\n";
  io::write_text(out / kTraceFile, trace.str());

  io::write_key_value(out / kResultFile,
                      {{"mode", std::string(to_string(cfg.mode))},
                       {"termination", std::string(to_string(result.termination))},
                       {"iterations", std::to_string(result.iterations)},
                       {"initial_objective", io::format_double(result.initial_objective)},
                       {"final_objective", io::format_double(result.objective_trace.back())},
                       {"eta1", io::format_double(cfg.solver_config().absolute_threshold(cube.num_pixels()))},
                       {"eta2", io::format_double(cfg.eta2)},
                       {"init", init_source}});
  io::write_key_value(out / kConfigEchoFile, cfg.to_key_values());
  io::write_key_value(out / kTimingFile, {{"wall_time_s", io::format_double(result.wall_time)}});
  return result;
}

RunBundle load_run(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw io::IoError("run directory not found: " + dir.string());
  RunBundle run;
  run.name = run_name(dir);
  if (fs::exists(dir / kResultFile)) {
    const auto kv = io::read_key_value(dir / kResultFile);
    if (auto mode = io::lookup(kv, "mode")) run.mode = parse_mode(*mode);
  }
  run.E = io::read_matrix_csv(dir / kEndmembersFile);
  const HyperCube A = io::read_cube(dir / kAbundancesFile);
  run.A = A.data();
  run.height = A.height();
  run.width = A.width();
  const bool nonlinear = run.mode ? updates_probability(*run.mode) : true;
  if (nonlinear && fs::exists(dir / kProbabilitiesFile)) {
    run.P = io::read_raster_csv(dir / kProbabilitiesFile);
    if (run.P->size() != run.A.cols())
      throw DimensionError(dir.string() + ": probability raster does not match the abundance grid");
  }
  if (run.A.rows() != run.E.cols())
    throw DimensionError(dir.string() + ": abundance bands do not match the endmember count");
  return run;
}

std::vector<EvalRow> cmd_eval(const fs::path& truth_dir, const std::vector<fs::path>& run_dirs, const fs::path& out) {
  const RunBundle truth = load_run(truth_dir);
  if (!truth.P) throw io::IoError(truth_dir.string() + ": truth bundle has no probability raster");
  ensure_dir(out);

  std::vector<EvalRow> rows;
  std::string csv = csv_header() + "\n";
  for (const auto& dir : run_dirs) {
    const RunBundle run = load_run(dir);
    if (run.E.rows() != truth.E.rows() || run.E.cols() != truth.E.cols() || run.A.cols() != truth.A.cols())
      throw DimensionError(dir.string() + ": estimate shapes do not match the truth bundle " + truth_dir.string());
    EvalRow row;
    row.run = run.name;
    row.label = run.mode ? std::string(to_string(*run.mode)) : run.name;
    row.report = evaluate(run.E, run.A, run.P, truth.E, truth.A, *truth.P);
    csv += to_csv_row(row.report, row.label) + "\n";
    io::write_text(out / (run.name + ".eval.txt"), "run=" + run.name + "\n" + to_key_value(row.report, row.label));
    rows.push_back(std::move(row));
  }
  io::write_text(out / kEvalCsvFile, csv);
  return rows;
}

std::vector<fs::path> cmd_report(const std::vector<fs::path>& run_dirs, const fs::path& out,
                                 const std::optional<fs::path>& truth_dir) {
  ensure_dir(out);
  std::vector<fs::path> written;
  std::optional<RunBundle> truth;
  std::vector<double> wavelengths;
  if (truth_dir) {
    truth = load_run(*truth_dir);
    if (fs::exists(*truth_dir / kCubeFile)) wavelengths = io::read_cube(*truth_dir / kCubeFile).bands();
  }

  std::vector<RunBundle> runs;
  for (const auto& dir : run_dirs) runs.push_back(load_run(dir));

  for (std::size_t r = 0; r < runs.size(); ++r) {
    RunBundle& run = runs[r];
    const Index d = run.E.rows();
    const Index m = run.E.cols();
    MatrixXd initial;
    if (fs::exists(run_dirs[r] / kInitialEndmembersFile))
      initial = io::read_matrix_csv(run_dirs[r] / kInitialEndmembersFile);
    if (truth) {
      if (truth->E.rows() != d || truth->E.cols() != m)
        throw DimensionError(run.name + ": endmembers do not match the truth bundle");
      const Alignment al = align_endmembers(run.E, truth->E, run.A);
      if (initial.size() > 0) initial = align_endmembers(initial, truth->E).E_hat;
      run.E = al.E_hat;
      run.A = al.A_hat;
    }

    for (Index k = 0; k < m; ++k) {
      std::ostringstream csv;
      csv << "band,estimate" << (truth ? ",truth" : "") << (initial.size() ? ",initial" : "") << "\n";
      for (Index j = 0; j < d; ++j) {
        const double band = static_cast<Index>(wavelengths.size()) == d ? wavelengths[j] : double(j + 1);
        csv << io::format_double(band) << "," << io::format_double(run.E(j, k));
        if (truth) csv << "," << io::format_double(truth->E(j, k));
        if (initial.size()) csv << "," << io::format_double(initial(j, k));
        csv << "\n";
      }
      const fs::path spectra = out / (run.name + "_endmember_" + std::to_string(k + 1) + ".csv");
      io::write_text(spectra, csv.str());
      written.push_back(spectra);

      const fs::path png = out / (run.name + "_abundance_" + std::to_string(k + 1) + ".png");
      io::write_gray_png(png, run.A.row(k).transpose(), run.height, run.width);
      written.push_back(png);
    }
    if (run.P) {
      const fs::path png = out / (run.name + "_probability.png");
      io::write_gray_png(png, *run.P, run.height, run.width, io::RasterScale{0.0, 1.0});
      written.push_back(png);
    }
  }

  const RunBundle* linear = nullptr;
  const RunBundle* nonlinear = nullptr;
  for (const auto& run : runs) {
    if (!run.mode) continue;
    if (!updates_probability(*run.mode) && !linear) linear = &run;
    if (updates_probability(*run.mode) && !nonlinear) nonlinear = &run;
  }
  if (linear && nonlinear && linear->A.rows() == nonlinear->A.rows() && linear->A.cols() == nonlinear->A.cols()) {
    // Without a truth bundle the nonlinear endmembers are aligned to the linear ones.
    const MatrixXd A_nl = truth ? nonlinear->A : align_endmembers(nonlinear->E, linear->E, nonlinear->A).A_hat;
    const VectorXd diff = (linear->A - A_nl).cwiseAbs().colwise().sum().transpose();
    const std::string stem = "difference_" + linear->name + "_" + nonlinear->name;
    io::write_raster_csv(out / (stem + ".csv"), diff, linear->height, linear->width);
    io::write_gray_png(out / (stem + ".png"), diff, linear->height, linear->width);
    written.push_back(out / (stem + ".csv"));
    written.push_back(out / (stem + ".png"));
  }
  return written;
}

}  // namespace mlmunmix::cli
