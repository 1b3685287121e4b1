#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eady/config.hpp"
#include "eady/diagnostics.hpp"
#include "eady/grid.hpp"
#include "eady/state.hpp"

namespace eady {

// ---------------------------------------------------------------------------
// Configuration files
//
// One `key = value` per line. Blank lines and text after '#' are ignored.
// Unknown keys, duplicate keys and lines without '=' are errors reported with
// their line number.

/// Looks up an environment variable; returns nullopt when unset.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Name of the override variable for a key: EADY_ followed by the key in
/// upper case (nx -> EADY_NX, output_dir -> EADY_OUTPUT_DIR).
std::string env_var_name(const std::string& key);

/// Applies defaults, then the text, without validation.
RunConfig parse_config_text(const std::string& text, const std::string& source = "<config>");

/// Applies every EADY_<KEY> variable present in `env`.
void apply_env_overrides(RunConfig& config, const EnvLookup& env);

/// Reads a config file, applies environment overrides and validates.
/// Throws IoError for an unreadable file, ConfigError otherwise.
RunConfig parse_config(const std::filesystem::path& path, const EnvLookup& env = process_env);

/// Canonical `key = value` text for a config; parse_config_text inverts it.
std::string config_echo(const RunConfig& config);

/// Writes config_echo to `<dir>/config.txt`, creating `dir` if needed.
std::filesystem::path write_config_echo(const RunConfig& config, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Snapshots: legacy VTK rectilinear grid (ASCII).
//
// Points are the cell corners (xf, 0, zf); cells are the tracer cells. Cell
// data: v, theta, D, Pi and u, w averaged to centres. Point data: PV q, with
// the x = L column repeating x = -L. The staggered u and w are also stored
// unaveraged as dataset field arrays u_xface and w_zface so a snapshot can be
// read back into a State. All arrays are ordered x fastest. A sidecar
// `<path>.meta` holds the time, dimensions and config hash.

struct Snapshot {
  State state;
  std::string config_hash;
};

void write_snapshot(const State& state, const Grid& grid, const PhysicalConstants& c,
                    const std::string& config_hash, const std::filesystem::path& path);

/// Reads a file written by write_snapshot. Throws IoError on malformed input.
Snapshot read_snapshot(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Time series CSV

inline constexpr const char* kTimeseriesHeader =
    "t,K_u,K_v,P,E,rmsv,mass,front_intensity,noise_metric,newton_iters,gmres_iters";

/// Appends one row, writing the header first if the file is missing or empty.
void append_timeseries(const DiagnosticRecord& record, const std::filesystem::path& path);

/// Parses a file written by append_timeseries.
std::vector<DiagnosticRecord> read_timeseries(const std::filesystem::path& path);

/// Rewrites the file keeping only rows with t <= t_max.
void truncate_timeseries(const std::filesystem::path& path, double t_max);

/// Writes `<path>.meta` with the config hash.
void write_timeseries_meta(const std::filesystem::path& path, const std::string& config_hash);

// ---------------------------------------------------------------------------
// Checkpoints: little-endian binary, bit-exact.

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  bool bred = false;         // breeding finished and the clock was reset
  double t_breed = 0.0;      // s of model time spent breeding
  std::int64_t steps = 0;    // steps taken since the clock reset
  std::int64_t pending_newton = 0;  // iteration counts not yet logged
  std::int64_t pending_gmres = 0;
};

struct Checkpoint {
  State state;
  RunConfig config;
  CheckpointMeta meta;
};

void write_checkpoint(const std::filesystem::path& path, const State& state, const RunConfig& config,
                      const CheckpointMeta& meta);

/// Throws IoError on a bad magic number, version mismatch, truncation, or when
/// `expected` is given and its nx, nz differ from the stored dimensions.
Checkpoint read_checkpoint(const std::filesystem::path& path, const RunConfig* expected = nullptr);

}  // namespace eady
