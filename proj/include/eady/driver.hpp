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
#include "eady/init.hpp"
#include "eady/io.hpp"
#include "eady/state.hpp"
#include "eady/timestep.hpp"

namespace eady {

/// A model run: configuration, grid, state and the bookkeeping needed to log
/// and checkpoint it deterministically.
class Simulation {
 public:
  /// Validates the config and builds the balanced, perturbed initial state.
  explicit Simulation(const RunConfig& config);
  /// Continues from a checkpoint.
  explicit Simulation(const Checkpoint& checkpoint);

  const RunConfig& config() const { return config_; }
  const Grid& grid() const { return grid_; }
  const State& state() const { return state_; }
  const CheckpointMeta& meta() const { return meta_; }
  std::int64_t steps() const { return meta_.steps; }
  bool bred() const { return meta_.bred; }

  /// Breeds to the amplitude threshold and resets the clock. With breeding
  /// disabled in the config this only marks the run as started.
  BreedResult breed();

  /// One time step with the configured integrator.
  SolverStats step();

  /// Diagnostics of the current state. Iteration counts are those accumulated
  /// since the previous call to record(), which clears them.
  DiagnosticRecord record();

  void save_checkpoint(const std::filesystem::path& path) const;

  /// Number of steps in config().run_days.
  std::int64_t total_steps() const;

 private:
  RunConfig config_;
  Grid grid_;
  Stepper stepper_;
  State state_;
  CheckpointMeta meta_;
};

struct ProtocolOptions {
  /// Where outputs go; empty disables all file output.
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> resume;
  /// Called after every logged record.
  std::function<void(const DiagnosticRecord&)> on_record;
};

struct ProtocolResult {
  std::vector<DiagnosticRecord> records;
  double t_breed = 0.0;
  long breed_steps = 0;
  State final_state;
};

/// File names used inside an output directory.
std::string snapshot_name(double t);
std::string checkpoint_name(std::int64_t steps);
inline constexpr const char* kTimeseriesFile = "timeseries.csv";

/// init -> breed -> reset clock -> integrate run_days, logging the time series
/// and writing snapshots and checkpoints at their cadences.
ProtocolResult run_protocol(const RunConfig& config, const ProtocolOptions& options);

/// Writes the initial state (initial.vtk) and, when breeding is enabled, the
/// bred state (bred.vtk, bred.ckpt). Returns the breeding result.
BreedResult run_init(const RunConfig& config, const std::filesystem::path& out_dir);

/// Recomputes diagnostics for every *.vtk snapshot in `dir`, in time order.
std::vector<DiagnosticRecord> diagnose_snapshots(const std::filesystem::path& dir, const RunConfig& config);

struct CompareReport {
  double day = 0.0;
  DiagnosticRecord advective;
  DiagnosticRecord vector_invariant;
  double ratio() const {
    return vector_invariant.noise_metric / (advective.noise_metric + 1e-300);
  }
};

/// Runs advective and vector-invariant twins, each bred independently, to
/// `day` days after the clock reset. With a non-empty out_dir, writes both
/// final snapshots and compare_report.txt.
CompareReport run_compare(const RunConfig& config, double day, const std::filesystem::path& out_dir);

std::string format_compare_report(const CompareReport& report);

}  // namespace eady
