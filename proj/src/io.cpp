#include "eady/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "eady/dynamics.hpp"
#include "eady/errors.hpp"

namespace eady {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return os.str();
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::trunc) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::out | mode);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

double to_double(const std::string& token, const fs::path& path) {
  double x = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last)
    throw IoError("'" + path.string() + "': expected a number, got '" + token + "'");
  return x;
}

long to_long(const std::string& token, const fs::path& path) {
  long x = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw IoError("'" + path.string() + "': expected an integer, got '" + token + "'");
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (v == nullptr) return std::nullopt;
  return std::string(v);
}

std::string env_var_name(const std::string& key) {
  std::string out = "EADY_";
  for (char ch : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  RunConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", "expected 'key = value'", source, line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("", "missing key before '='", source, line_no);
    if (!seen.insert(key).second) throw ConfigError(key, "duplicate key", source, line_no);
    try {
      apply_config_value(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.key(), e.detail(), source, line_no);
    }
  }
  return config;
}

void apply_env_overrides(RunConfig& config, const EnvLookup& env) {
  for (const auto& key : config_keys()) {
    const std::string name = env_var_name(key);
    if (auto value = env(name)) {
      try {
        apply_config_value(config, key, trim(*value));
      } catch (const ConfigError& e) {
        throw ConfigError(e.key(), e.detail() + " (from " + name + ")");
      }
    }
  }
}

RunConfig parse_config(const fs::path& path, const EnvLookup& env) {
  RunConfig config = parse_config_text(read_file(path), path.string());
  apply_env_overrides(config, env);
  return validate_config(config);
}

std::string config_echo(const RunConfig& config) {
  std::string out;
  for (const auto& [k, v] : config_to_pairs(config)) out += k + " = " + v + "\n";
  return out;
}

fs::path write_config_echo(const RunConfig& config, const fs::path& dir) {
  const fs::path path = dir / "config.txt";
  auto out = open_out(path);
  out << "# effective configuration, hash " << config_hash(config) << "\n" << config_echo(config);
  finish(out, path);
  return path;
}

// ---------------------------------------------------------------------------
// Snapshots

namespace {

void write_meta(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& kv) {
  auto out = open_out(path);
  for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
  finish(out, path);
}

// x-fastest ordering of a column-major (i * rows + k) array.
template <typename Get>
void write_values(std::ostream& out, int nx, int rows, Get get) {
  for (int k = 0; k < rows; ++k) {
    for (int i = 0; i < nx; ++i) {
      out << format_double(get(i, k)) << (i + 1 == nx ? '\n' : ' ');
    }
  }
}

}  // namespace

void write_snapshot(const State& state, const Grid& grid, const PhysicalConstants& c,
                    const std::string& config_hash, const fs::path& path) {
  const int nx = grid.nx, nz = grid.nz;
  if (state.nx() != nx || state.nz() != nz) throw IoError("snapshot '" + path.string() + "': state/grid size mismatch");

  const auto pi = exner_field(state, c);
  const PVField q = potential_vorticity(state, grid, c);
  const auto u = state.u();
  const auto w = state.w();
  auto C = [nz](int i, int k) { return static_cast<std::size_t>(i) * nz + k; };
  auto W = [nz](int i, int k) { return static_cast<std::size_t>(i) * (nz + 1) + k; };

  auto out = open_out(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "eady slice t=" << format_double(state.t) << " config=" << config_hash << "\n";
  out << "ASCII\nDATASET RECTILINEAR_GRID\n";
  out << "FIELD FieldData 3\n";
  out << "TIME 1 1 double\n" << format_double(state.t) << "\n";
  out << "u_xface 1 " << static_cast<std::size_t>(nx) * nz << " double\n";
  write_values(out, nx, nz, [&](int i, int k) { return u[C(i, k)]; });
  out << "w_zface 1 " << static_cast<std::size_t>(nx) * (nz + 1) << " double\n";
  write_values(out, nx, nz + 1, [&](int i, int k) { return w[W(i, k)]; });

  out << "DIMENSIONS " << nx + 1 << " 1 " << nz + 1 << "\n";
  out << "X_COORDINATES " << nx + 1 << " double\n";
  for (int i = 0; i <= nx; ++i) out << format_double(grid.xf[i]) << (i == nx ? '\n' : ' ');
  out << "Y_COORDINATES 1 double\n0\n";
  out << "Z_COORDINATES " << nz + 1 << " double\n";
  for (int k = 0; k <= nz; ++k) out << format_double(grid.zf[k]) << (k == nz ? '\n' : ' ');

  out << "CELL_DATA " << static_cast<std::size_t>(nx) * nz << "\n";
  auto scalars = [&](const char* name, auto get) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    write_values(out, nx, nz, get);
  };
  const auto v = state.v();
  const auto th = state.theta();
  const auto rho = state.rho();
  scalars("v", [&](int i, int k) { return v[C(i, k)]; });
  scalars("theta", [&](int i, int k) { return th[C(i, k)]; });
  scalars("D", [&](int i, int k) { return rho[C(i, k)]; });
  scalars("Pi", [&](int i, int k) { return pi[C(i, k)]; });
  scalars("u", [&](int i, int k) { return 0.5 * (u[C(i, k)] + u[C(grid.wrap(i + 1), k)]); });
  scalars("w", [&](int i, int k) { return 0.5 * (w[W(i, k)] + w[W(i, k + 1)]); });

  out << "POINT_DATA " << static_cast<std::size_t>(nx + 1) * (nz + 1) << "\n";
  out << "SCALARS q double 1\nLOOKUP_TABLE default\n";
  write_values(out, nx + 1, nz + 1, [&](int i, int k) { return q.at(i == nx ? 0 : i, k); });
  finish(out, path);

  write_meta(fs::path(path.string() + ".meta"), {{"t", format_double(state.t)},
                                                  {"nx", std::to_string(nx)},
                                                  {"nz", std::to_string(nz)},
                                                  {"config_hash", config_hash}});
}

Snapshot read_snapshot(const fs::path& path) {
  std::istringstream in(read_file(path));
  auto fail = [&](const std::string& what) -> IoError {
    return IoError("snapshot '" + path.string() + "': " + what);
  };

  std::string line;
  if (!std::getline(in, line) || line.rfind("# vtk DataFile", 0) != 0) throw fail("missing VTK header");
  std::string title;
  std::getline(in, title);
  std::string hash;
  if (auto p = title.find("config="); p != std::string::npos) hash = trim(title.substr(p + 7));
  std::getline(in, line);
  if (trim(line) != "ASCII") throw fail("only ASCII files are supported");

  std::string tok;
  auto next = [&]() -> std::string {
    if (!(in >> tok)) throw fail("unexpected end of file");
    return tok;
  };
  auto expect = [&](const std::string& want) {
    if (next() != want) throw fail("expected '" + want + "', got '" + tok + "'");
  };
  auto read_array = [&](std::size_t n) {
    std::vector<double> a(n);
    for (auto& x : a) x = to_double(next(), path);
    return a;
  };

  expect("DATASET");
  expect("RECTILINEAR_GRID");
  expect("FIELD");
  next();
  const long n_arrays = to_long(next(), path);
  double t = 0.0;
  std::vector<double> u_raw, w_raw;
  for (long a = 0; a < n_arrays; ++a) {
    const std::string name = next();
    const long comps = to_long(next(), path);
    const long tuples = to_long(next(), path);
    next();
    auto values = read_array(static_cast<std::size_t>(comps * tuples));
    if (name == "TIME" && !values.empty()) t = values[0];
    if (name == "u_xface") u_raw = std::move(values);
    if (name == "w_zface") w_raw = std::move(values);
  }
  expect("DIMENSIONS");
  const long npx = to_long(next(), path);
  to_long(next(), path);
  const long npz = to_long(next(), path);
  const int nx = static_cast<int>(npx - 1), nz = static_cast<int>(npz - 1);
  if (nx < 1 || nz < 1) throw fail("bad dimensions");
  if (u_raw.size() != static_cast<std::size_t>(nx) * nz ||
      w_raw.size() != static_cast<std::size_t>(nx) * (nz + 1))
    throw fail("staggered field arrays do not match DIMENSIONS");
  for (const char* axis : {"X_COORDINATES", "Y_COORDINATES", "Z_COORDINATES"}) {
    expect(axis);
    const long n = to_long(next(), path);
    next();
    read_array(static_cast<std::size_t>(n));
  }

  Snapshot snap;
  snap.config_hash = hash;
  snap.state = State(nx, nz);
  snap.state.t = t;
  auto C = [nz](int i, int k) { return static_cast<std::size_t>(i) * nz + k; };
  auto W = [nz](int i, int k) { return static_cast<std::size_t>(i) * (nz + 1) + k; };
  auto u = snap.state.u();
  auto w = snap.state.w();
  for (int k = 0; k < nz; ++k)
    for (int i = 0; i < nx; ++i) u[C(i, k)] = u_raw[static_cast<std::size_t>(k) * nx + i];
  for (int k = 0; k <= nz; ++k)
    for (int i = 0; i < nx; ++i) w[W(i, k)] = w_raw[static_cast<std::size_t>(k) * nx + i];

  expect("CELL_DATA");
  const long ncells = to_long(next(), path);
  if (ncells != static_cast<long>(nx) * nz) throw fail("CELL_DATA count does not match DIMENSIONS");
  std::set<std::string> found;
  while (in >> tok) {
    if (tok == "POINT_DATA") break;
    if (tok != "SCALARS") throw fail("expected SCALARS, got '" + tok + "'");
    const std::string name = next();
    next();
    next();
    expect("LOOKUP_TABLE");
    next();
    const auto values = read_array(static_cast<std::size_t>(ncells));
    std::span<double> dst;
    if (name == "v") dst = snap.state.v();
    if (name == "theta") dst = snap.state.theta();
    if (name == "D") dst = snap.state.rho();
    if (dst.empty()) continue;
    found.insert(name);
    for (int k = 0; k < nz; ++k)
      for (int i = 0; i < nx; ++i) dst[C(i, k)] = values[static_cast<std::size_t>(k) * nx + i];
  }
  if (found.size() != 3) throw fail("missing one of the v, theta, D cell arrays");
  return snap;
}

// ---------------------------------------------------------------------------
// Time series

namespace {

std::string timeseries_row(const DiagnosticRecord& r) {
  std::string row;
  for (double x : {r.t, r.ku, r.kv, r.p, r.e, r.rmsv, r.mass, r.front_intensity, r.noise_metric}) {
    row += format_double(x);
    row += ',';
  }
  row += std::to_string(r.newton_iters) + "," + std::to_string(r.gmres_iters);
  return row;
}

}  // namespace

void append_timeseries(const DiagnosticRecord& record, const fs::path& path) {
  std::error_code ec;
  const bool fresh = !fs::exists(path, ec) || fs::file_size(path, ec) == 0;
  auto out = open_out(path, std::ios::app);
  if (fresh) out << kTimeseriesHeader << "\n";
  out << timeseries_row(record) << "\n";
  finish(out, path);
}

std::vector<DiagnosticRecord> read_timeseries(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || trim(line) != kTimeseriesHeader)
    throw IoError("timeseries '" + path.string() + "': unexpected header");
  std::vector<DiagnosticRecord> out;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (cols.size() != 11) throw IoError("timeseries '" + path.string() + "': expected 11 columns");
    DiagnosticRecord r;
    double* fields[] = {&r.t, &r.ku, &r.kv, &r.p, &r.e, &r.rmsv, &r.mass, &r.front_intensity, &r.noise_metric};
    for (int c = 0; c < 9; ++c) *fields[c] = to_double(cols[c], path);
    r.newton_iters = static_cast<int>(to_long(cols[9], path));
    r.gmres_iters = static_cast<int>(to_long(cols[10], path));
    out.push_back(r);
  }
  return out;
}

void truncate_timeseries(const fs::path& path, double t_max) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return;
  const auto rows = read_timeseries(path);
  auto out = open_out(path);
  out << kTimeseriesHeader << "\n";
  for (const auto& r : rows)
    if (r.t <= t_max) out << timeseries_row(r) << "\n";
  finish(out, path);
}

void write_timeseries_meta(const fs::path& path, const std::string& config_hash) {
  write_meta(fs::path(path.string() + ".meta"), {{"columns", kTimeseriesHeader}, {"config_hash", config_hash}});
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr std::array<char, 8> kMagic{'E', 'A', 'D', 'Y', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes little-endian");

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const fs::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw IoError("checkpoint '" + path.string() + "': truncated file");
  return v;
}

}  // namespace

void write_checkpoint(const fs::path& path, const State& state, const RunConfig& config,
                      const CheckpointMeta& meta) {
  // Written beside the target and renamed so a crash never leaves a torn file.
  const fs::path tmp = fs::path(path.string() + ".tmp");
  {
    auto out = open_out(tmp, std::ios::binary | std::ios::trunc);
    out.write(kMagic.data(), kMagic.size());
    put(out, kCheckpointVersion);
    const std::string echo = config_echo(config);
    put(out, static_cast<std::uint64_t>(echo.size()));
    out.write(echo.data(), static_cast<std::streamsize>(echo.size()));
    put(out, state.t);
    put(out, meta.t_breed);
    put(out, static_cast<std::uint8_t>(meta.bred ? 1 : 0));
    put(out, meta.steps);
    put(out, meta.pending_newton);
    put(out, meta.pending_gmres);
    put(out, static_cast<std::int32_t>(state.nx()));
    put(out, static_cast<std::int32_t>(state.nz()));
    const auto data = state.data();
    put(out, static_cast<std::uint64_t>(data.size()));
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size_bytes()));
    finish(out, tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place at '" + path.string() + "': " + ec.message());
}

Checkpoint read_checkpoint(const fs::path& path, const RunConfig* expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw IoError("checkpoint '" + path.string() + "': not a checkpoint file");
  const auto version = get<std::uint32_t>(in, path);
  if (version != kCheckpointVersion)
    throw IoError("checkpoint '" + path.string() + "': format version " + std::to_string(version) +
                  " is not supported (expected " + std::to_string(kCheckpointVersion) + ")");
  const auto echo_len = get<std::uint64_t>(in, path);
  if (echo_len > (1u << 20)) throw IoError("checkpoint '" + path.string() + "': corrupt config block");
  std::string echo(echo_len, '\0');
  if (!in.read(echo.data(), static_cast<std::streamsize>(echo_len)))
    throw IoError("checkpoint '" + path.string() + "': truncated file");

  Checkpoint ck;
  try {
    ck.config = parse_config_text(echo, path.string() + " (embedded config)");
  } catch (const ConfigError& e) {
    throw IoError("checkpoint '" + path.string() + "': " + e.what());
  }
  const double t = get<double>(in, path);
  ck.meta.t_breed = get<double>(in, path);
  ck.meta.bred = get<std::uint8_t>(in, path) != 0;
  ck.meta.steps = get<std::int64_t>(in, path);
  ck.meta.pending_newton = get<std::int64_t>(in, path);
  ck.meta.pending_gmres = get<std::int64_t>(in, path);
  const int nx = get<std::int32_t>(in, path);
  const int nz = get<std::int32_t>(in, path);
  const auto count = get<std::uint64_t>(in, path);
  if (nx != ck.config.nx || nz != ck.config.nz)
    throw IoError("checkpoint '" + path.string() + "': stored dimensions disagree with embedded config");
  if (expected != nullptr && (expected->nx != nx || expected->nz != nz))
    throw IoError("checkpoint '" + path.string() + "': dimension mismatch (checkpoint " + std::to_string(nx) +
                  "x" + std::to_string(nz) + ", config " + std::to_string(expected->nx) + "x" +
                  std::to_string(expected->nz) + ")");
  ck.state = State(nx, nz);
  if (count != ck.state.size()) throw IoError("checkpoint '" + path.string() + "': payload size mismatch");
  auto data = ck.state.data();
  if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size_bytes())))
    throw IoError("checkpoint '" + path.string() + "': truncated file");
  ck.state.t = t;
  return ck;
}

}  // namespace eady
