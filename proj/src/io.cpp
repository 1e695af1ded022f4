#include "mlmunmix/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace mlmunmix::io {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string where(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

template <typename T>
T byteswap_value(T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  std::reverse(bytes, bytes + sizeof(T));
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

Index parse_index(const std::string& text, const std::string& context) {
  Index v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw IoError(context + ": expected an integer, got '" + text + "'");
  return v;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || first == last) return std::nullopt;
  return v;
}

fs::path header_path(const fs::path& payload) { return fs::path(payload.string() + ".hdr"); }

void write_cube(const fs::path& path, const HyperCube& cube) {
  const Index d = cube.num_bands();
  const Index n = cube.num_pixels();
  KeyValues hdr{{"format", "mlmunmix-cube"},
                {"version", "1"},
                {"bands", std::to_string(d)},
                {"height", std::to_string(cube.height())},
                {"width", std::to_string(cube.width())},
                {"dtype", "float64"},
                {"byte_order", "little"},
                {"interleave", "bip"}};
  if (!cube.bands().empty()) {
    std::string labels;
    for (std::size_t k = 0; k < cube.bands().size(); ++k)
      labels += (k ? "," : "") + format_double(cube.bands()[k]);
    hdr.emplace_back("wavelengths", labels);
  }
  write_key_value(header_path(path), hdr);

  auto out = open_out(path, std::ios::binary);
  const MatrixXd& X = cube.data();  // column-major: pixel-contiguous already
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(X.data()), static_cast<std::streamsize>(d * n * sizeof(double)));
  } else {
    for (Index k = 0; k < d * n; ++k) {
      const double v = byteswap_value(X.data()[k]);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

HyperCube read_cube(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("cube file not found: " + path.string());
  const fs::path hpath = header_path(path);
  if (!fs::exists(hpath)) throw IoError("cube header not found: " + hpath.string());
  const KeyValues hdr = read_key_value(hpath);
  auto require = [&](std::string_view key) {
    auto v = lookup(hdr, key);
    if (!v) throw IoError(hpath.string() + ": missing key '" + std::string(key) + "'");
    return *v;
  };
  const Index d = parse_index(require("bands"), hpath.string());
  const Index h = parse_index(require("height"), hpath.string());
  const Index w = parse_index(require("width"), hpath.string());
  const std::string dtype = lookup(hdr, "dtype").value_or("float64");
  const std::string order = lookup(hdr, "byte_order").value_or("little");
  const std::string interleave = lookup(hdr, "interleave").value_or("bip");
  if (dtype != "float64" && dtype != "float32") throw IoError(hpath.string() + ": unsupported dtype " + dtype);
  if (order != "little" && order != "big") throw IoError(hpath.string() + ": unsupported byte_order " + order);
  if (interleave != "bip") throw IoError(hpath.string() + ": unsupported interleave " + interleave);
  if (d < 1 || h < 1 || w < 1) throw IoError(hpath.string() + ": dimensions must be positive");

  const Index n = h * w;
  const std::size_t width_bytes = dtype == "float64" ? 8 : 4;
  const auto expected = static_cast<std::uintmax_t>(d * n) * width_bytes;
  const auto actual = fs::file_size(path);
  if (actual != expected)
    throw IoError(path.string() + ": payload is " + std::to_string(actual) + " bytes, header implies " +
                  std::to_string(expected));

  const bool swap = (order == "little") != (std::endian::native == std::endian::little);
  MatrixXd X(d, n);
  auto in = open_in(path, std::ios::binary);
  if (width_bytes == 8) {
    in.read(reinterpret_cast<char*>(X.data()), static_cast<std::streamsize>(expected));
    if (swap)
      for (Index k = 0; k < d * n; ++k) X.data()[k] = byteswap_value(X.data()[k]);
  } else {
    std::vector<float> buf(static_cast<std::size_t>(d * n));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(expected));
    for (Index k = 0; k < d * n; ++k) {
      float v = buf[static_cast<std::size_t>(k)];
      if (swap) v = byteswap_value(v);
      X.data()[k] = static_cast<double>(v);
    }
  }
  if (!in) throw IoError("failed reading " + path.string());

  std::vector<double> labels;
  if (auto wl = lookup(hdr, "wavelengths")) {
    for (const auto& field : split(*wl, ',')) {
      auto v = parse_double(field);
      if (!v) throw IoError(hpath.string() + ": bad wavelength '" + field + "'");
      labels.push_back(*v);
    }
  }
  try {
    return HyperCube(std::move(X), std::move(labels), h, w);
  } catch (const ValidationError& e) {
    throw ValidationError(e.violations());
  }
}

void write_matrix_csv(const fs::path& path, const MatrixXd& M, std::vector<std::string> column_names) {
  if (column_names.empty())
    for (Index j = 0; j < M.cols(); ++j) column_names.push_back("col_" + std::to_string(j + 1));
  if (static_cast<Index>(column_names.size()) != M.cols())
    throw DimensionError("write_matrix_csv: column name count does not match matrix");
  std::ostringstream os;
  for (std::size_t j = 0; j < column_names.size(); ++j) os << (j ? "," : "") << column_names[j];
  os << "\n";
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) os << (j ? "," : "") << format_double(M(i, j));
    os << "\n";
  }
  write_text(path, os.str());
}

MatrixXd read_matrix_csv(const fs::path& path, std::vector<std::string>* column_names) {
  auto in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (header.empty()) {
      header = std::move(fields);
      continue;
    }
    if (fields.size() != header.size())
      throw IoError(where(path, lineno) + ": expected " + std::to_string(header.size()) + " fields, got " +
                    std::to_string(fields.size()));
    std::vector<double> row;
    for (const auto& f : fields) {
      auto v = parse_double(f);
      if (!v) throw IoError(where(path, lineno) + ": not a number: '" + f + "'");
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  if (header.empty()) throw IoError(path.string() + ": empty CSV file");
  MatrixXd M(static_cast<Index>(rows.size()), static_cast<Index>(header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < header.size(); ++j) M(Index(i), Index(j)) = rows[i][j];
  if (column_names) *column_names = std::move(header);
  return M;
}

void write_raster_csv(const fs::path& path, const VectorXd& values, Index height, Index width) {
  if (height * width != values.size()) throw DimensionError("write_raster_csv: grid does not match value count");
  std::ostringstream os;
  for (Index r = 0; r < height; ++r) {
    for (Index c = 0; c < width; ++c) os << (c ? "," : "") << format_double(values(r * width + c));
    os << "\n";
  }
  write_text(path, os.str());
}

VectorXd read_raster_csv(const fs::path& path, Index* height, Index* width) {
  auto in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> values;
  Index w = -1;
  Index h = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (w < 0) w = static_cast<Index>(fields.size());
    if (static_cast<Index>(fields.size()) != w)
      throw IoError(where(path, lineno) + ": ragged raster row");
    for (const auto& f : fields) {
      auto v = parse_double(f);
      if (!v) throw IoError(where(path, lineno) + ": not a number: '" + f + "'");
      values.push_back(*v);
    }
    ++h;
  }
  if (h == 0) throw IoError(path.string() + ": empty raster");
  if (height) *height = h;
  if (width) *width = w;
  return Eigen::Map<VectorXd>(values.data(), static_cast<Index>(values.size()));
}

KeyValues read_key_value(const fs::path& path) {
  auto in = open_in(path);
  KeyValues out;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where(path, lineno) + ": expected key=value");
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError(where(path, lineno) + ": empty key");
    if (!seen.insert(key).second) throw ConfigError(where(path, lineno) + ": duplicate key '" + key + "'");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

void write_key_value(const fs::path& path, const KeyValues& values) {
  std::string text;
  for (const auto& [k, v] : values) text += k + "=" + v + "\n";
  write_text(path, text);
}

std::optional<std::string> lookup(const KeyValues& kv, std::string_view key) {
  for (const auto& [k, v] : kv)
    if (k == key) return v;
  return std::nullopt;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  auto in = open_in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace {

// Line number of a key in a config file, for error messages.
std::size_t line_of(const fs::path& path, std::string_view key) {
  std::ifstream in(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto eq = line.find('=');
    if (eq != std::string::npos && trim(std::string_view(line).substr(0, eq)) == key) return lineno;
  }
  return 0;
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  const KeyValues kv = read_key_value(path);
  const fs::path base = path.parent_path();
  auto fail = [&](std::string_view key, const std::string& msg) -> ConfigError {
    return ConfigError(where(path, line_of(path, key)) + ": " + std::string(key) + ": " + msg);
  };
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  auto number = [&](std::string_view key, const std::string& v) {
    auto d = parse_double(v);
    if (!d) throw fail(key, "not a number: '" + v + "'");
    return *d;
  };
  auto integer = [&](std::string_view key, const std::string& v) -> long long {
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw fail(key, "not an integer: '" + v + "'");
    return out;
  };
  auto seed = [&](std::string_view key, const std::string& v) -> std::uint64_t {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw fail(key, "not a seed: '" + v + "'");
    return out;
  };

  static const std::set<std::string, std::less<>> known{
      "mode", "m", "cube", "init_endmembers", "output_dir", "eta1", "eta2", "max_iterations", "noise_power",
      "noise_power_file", "vca_snr_db", "vca_seed", "seed"};
  ExperimentConfig c;
  bool has_mode = false, has_m = false, has_cube = false, has_out = false;
  for (const auto& [k, v] : kv) {
    if (!known.count(k)) throw fail(k, "unknown key");
    if (k == "mode") {
      auto mode = parse_mode(v);
      if (!mode) throw fail(k, "expected one of LU_fixed_E, LU_free_E, NLU_fixed_E, NLU_free_E");
      c.mode = *mode;
      has_mode = true;
    } else if (k == "m") {
      c.m = static_cast<Index>(integer(k, v));
      if (c.m < 1) throw fail(k, "must be at least 1");
      has_m = true;
    } else if (k == "cube") {
      c.cube = resolve(v);
      has_cube = true;
    } else if (k == "init_endmembers") {
      c.init_endmembers = resolve(v);
    } else if (k == "output_dir") {
      c.output_dir = resolve(v);
      has_out = true;
    } else if (k == "eta1") {
      c.eta1 = number(k, v);
      if (*c.eta1 < 0) throw fail(k, "must be non-negative");
    } else if (k == "eta2") {
      c.eta2 = number(k, v);
      if (!(c.eta2 > 0)) throw fail(k, "must be positive");
    } else if (k == "max_iterations") {
      const long long it = integer(k, v);
      if (it < 1 || it > 100000000) throw fail(k, "must be a positive iteration count");
      c.max_iterations = static_cast<int>(it);
    } else if (k == "noise_power") {
      c.noise_power = number(k, v);
      if (*c.noise_power < 0) throw fail(k, "must be non-negative");
    } else if (k == "noise_power_file") {
      c.noise_power_file = resolve(v);
    } else if (k == "vca_snr_db") {
      c.vca_snr_db = number(k, v);
    } else if (k == "vca_seed") {
      c.vca_seed = seed(k, v);
    } else if (k == "seed") {
      c.seed = seed(k, v);
    }
  }
  if (!has_mode) throw ConfigError(path.string() + ": missing required key 'mode'");
  if (!has_m) throw ConfigError(path.string() + ": missing required key 'm'");
  if (!has_cube) throw ConfigError(path.string() + ": missing required key 'cube'");
  if (!has_out) throw ConfigError(path.string() + ": missing required key 'output_dir'");
  if (c.noise_power && c.noise_power_file)
    throw ConfigError(path.string() + ": noise_power and noise_power_file are mutually exclusive");
  if (!fs::exists(c.cube)) throw fail("cube", "file not found: " + c.cube.string());
  if (c.init_endmembers && !fs::exists(*c.init_endmembers))
    throw fail("init_endmembers", "file not found: " + c.init_endmembers->string());
  if (c.noise_power_file) {
    if (!fs::exists(*c.noise_power_file))
      throw fail("noise_power_file", "file not found: " + c.noise_power_file->string());
    const auto entries = read_key_value(*c.noise_power_file);
    auto s = lookup(entries, "sigma2");
    if (!s) throw fail("noise_power_file", "no sigma2 entry in " + c.noise_power_file->string());
    auto v = parse_double(*s);
    if (!v || *v < 0) throw fail("noise_power_file", "bad sigma2 value '" + *s + "'");
    c.noise_power = *v;
  }
  return c;
}

KeyValues ExperimentConfig::to_key_values() const {
  KeyValues kv{{"mode", std::string(to_string(mode))},
               {"m", std::to_string(m)},
               {"cube", cube.string()},
               {"output_dir", output_dir.string()},
               {"eta2", format_double(eta2)},
               {"max_iterations", std::to_string(max_iterations)},
               {"vca_seed", std::to_string(vca_seed)},
               {"seed", std::to_string(seed)}};
  if (init_endmembers) kv.emplace_back("init_endmembers", init_endmembers->string());
  if (eta1) kv.emplace_back("eta1", format_double(*eta1));
  if (noise_power) kv.emplace_back("noise_power", format_double(*noise_power));
  if (vca_snr_db) kv.emplace_back("vca_snr_db", format_double(*vca_snr_db));
  return kv;
}

SolverConfig ExperimentConfig::solver_config() const {
  SolverConfig s;
  s.mode = mode;
  s.eta1 = eta1;
  s.eta2 = eta2;
  s.max_outer_iterations = max_iterations;
  s.noise_power = noise_power;
  s.seed = seed;
  return s;
}

}  // namespace mlmunmix::io
