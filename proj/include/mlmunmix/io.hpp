#pragma once

#include "mlmunmix/core.hpp"
#include "mlmunmix/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mlmunmix::io {

namespace fs = std::filesystem;

/// Unreadable/unwritable files and malformed data files.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
/// Strict parse of a whole field; nullopt on trailing garbage.
std::optional<double> parse_double(std::string_view text);

// Cubes: raw little-endian payload at `path`, band-interleaved-by-pixel
// (one contiguous d-vector per pixel), plus a key=value header at path + ".hdr".
// float32 payloads are widened to double on load; writes are always float64.
fs::path header_path(const fs::path& payload);
void write_cube(const fs::path& path, const HyperCube& cube);
HyperCube read_cube(const fs::path& path);

/// Matrix CSV: one header row of column names, then one row per matrix row.
void write_matrix_csv(const fs::path& path, const MatrixXd& M, std::vector<std::string> column_names = {});
MatrixXd read_matrix_csv(const fs::path& path, std::vector<std::string>* column_names = nullptr);

/// Raster CSV: `height` lines of `width` values, pixel i at row i / width,
/// column i % width. No header.
void write_raster_csv(const fs::path& path, const VectorXd& values, Index height, Index width);
VectorXd read_raster_csv(const fs::path& path, Index* height = nullptr, Index* width = nullptr);

using KeyValues = std::vector<std::pair<std::string, std::string>>;
/// `key=value` lines; blank lines and lines starting with '#' or ';' are
/// skipped. Duplicate keys and lines without '=' raise ConfigError with
/// file:line context.
KeyValues read_key_value(const fs::path& path);
void write_key_value(const fs::path& path, const KeyValues& values);
std::optional<std::string> lookup(const KeyValues& kv, std::string_view key);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

/// A complete description of one unmixing run.
struct ExperimentConfig {
  Mode mode = Mode::NLU_free_E;
  Index m = 0;
  fs::path cube;
  std::optional<fs::path> init_endmembers;
  fs::path output_dir;
  std::optional<double> eta1;
  double eta2 = 1e-3;
  int max_iterations = 500;
  std::optional<double> noise_power;
  /// Key-value file with a `sigma2` entry (e.g. a synthetic bundle's scene.txt).
  std::optional<fs::path> noise_power_file;
  std::optional<double> vca_snr_db;
  std::uint64_t vca_seed = 0;
  std::uint64_t seed = 0;

  /// Parses an ini-style file. Relative paths resolve against the config's
  /// directory. Errors carry file:line context.
  static ExperimentConfig load(const fs::path& path);
  KeyValues to_key_values() const;
  SolverConfig solver_config() const;
};

}  // namespace mlmunmix::io
