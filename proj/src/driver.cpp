#include "eady/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "eady/errors.hpp"

namespace eady {

namespace fs = std::filesystem;

namespace {

std::int64_t cadence_steps(double interval, double dt) {
  return interval > 0.0 ? static_cast<std::int64_t>(std::llround(interval / dt)) : 0;
}

bool due(std::int64_t step, std::int64_t every) { return every > 0 && step % every == 0; }

}  // namespace

Simulation::Simulation(const RunConfig& config)
    : config_(validate_config(config)),
      grid_(build_grid(config_.nx, config_.nz, config_.constants)),
      stepper_(config_, grid_),
      state_(initial_state(config_, grid_)) {}

Simulation::Simulation(const Checkpoint& checkpoint)
    : config_(validate_config(checkpoint.config)),
      grid_(build_grid(config_.nx, config_.nz, config_.constants)),
      stepper_(config_, grid_),
      state_(checkpoint.state),
      meta_(checkpoint.meta) {}

BreedResult Simulation::breed() {
  BreedResult result;
  if (config_.breed) {
    result = eady::breed(state_, config_, [this](State& s) { stepper_.step(s); });
    meta_.t_breed = result.t_breed;
  }
  state_.t = 0.0;
  meta_.bred = true;
  meta_.steps = 0;
  meta_.pending_newton = 0;
  meta_.pending_gmres = 0;
  return result;
}

SolverStats Simulation::step() {
  const SolverStats stats = stepper_.step(state_);
  ++meta_.steps;
  // Model time is exactly steps * dt once the clock has been reset.
  if (meta_.bred) state_.t = static_cast<double>(meta_.steps) * config_.dt;
  meta_.pending_newton += stats.newton_iterations;
  meta_.pending_gmres += stats.linear_iterations_total;
  return stats;
}

DiagnosticRecord Simulation::record() {
  DiagnosticRecord r = diagnose(state_, grid_, config_.constants, config_.rmsv_weighting);
  r.newton_iters = static_cast<int>(meta_.pending_newton);
  r.gmres_iters = static_cast<int>(meta_.pending_gmres);
  meta_.pending_newton = 0;
  meta_.pending_gmres = 0;
  return r;
}

void Simulation::save_checkpoint(const fs::path& path) const { write_checkpoint(path, state_, config_, meta_); }

std::int64_t Simulation::total_steps() const {
  return static_cast<std::int64_t>(std::llround(config_.run_days * 86400.0 / config_.dt));
}

std::string snapshot_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_t%010lld.vtk", static_cast<long long>(std::llround(t)));
  return buf;
}

std::string checkpoint_name(std::int64_t steps) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "checkpoint_s%08lld.ckpt", static_cast<long long>(steps));
  return buf;
}

ProtocolResult run_protocol(const RunConfig& config, const ProtocolOptions& options) {
  const bool files = !options.out_dir.empty();
  std::optional<Simulation> sim;
  ProtocolResult result;

  if (options.resume) {
    Checkpoint ck = read_checkpoint(*options.resume, &config);
    // Physics comes from the checkpoint; where outputs go and how long to run
    // come from the caller.
    ck.config.output_dir = config.output_dir;
    ck.config.run_days = config.run_days;
    sim.emplace(ck);
    result.t_breed = sim->meta().t_breed;
  } else {
    sim.emplace(config);
  }

  const std::string hash = config_hash(sim->config());
  const fs::path ts_path = options.out_dir / kTimeseriesFile;
  if (files) {
    write_config_echo(sim->config(), options.out_dir);
    write_timeseries_meta(ts_path, hash);
  }

  auto log_record = [&](const DiagnosticRecord& r) {
    result.records.push_back(r);
    if (files) append_timeseries(r, ts_path);
    if (options.on_record) options.on_record(r);
  };
  auto snapshot = [&] {
    if (files) write_snapshot(sim->state(), sim->grid(), sim->config().constants, hash,
                              options.out_dir / snapshot_name(sim->state().t));
  };

  const RunConfig& cfg = sim->config();
  const std::int64_t ts_every = cadence_steps(cfg.timeseries_interval, cfg.dt);
  const std::int64_t snap_every = cadence_steps(cfg.snapshot_interval, cfg.dt);
  const std::int64_t ckpt_every = cadence_steps(cfg.checkpoint_interval, cfg.dt);

  if (!sim->bred()) {
    const BreedResult b = sim->breed();
    result.t_breed = b.t_breed;
    result.breed_steps = b.steps;
    if (files) {
      std::error_code ec;
      fs::remove(ts_path, ec);
    }
    log_record(sim->record());
    snapshot();
  } else if (files) {
    truncate_timeseries(ts_path, sim->state().t);
  }

  const std::int64_t total = sim->total_steps();
  while (sim->steps() < total) {
    sim->step();
    const std::int64_t n = sim->steps();
    if (due(n, ts_every)) log_record(sim->record());
    if (due(n, snap_every)) snapshot();
    if (files && due(n, ckpt_every)) sim->save_checkpoint(options.out_dir / checkpoint_name(n));
  }
  result.final_state = sim->state();
  return result;
}

BreedResult run_init(const RunConfig& config, const fs::path& out_dir) {
  Simulation sim(config);
  const std::string hash = config_hash(sim.config());
  write_config_echo(sim.config(), out_dir);
  write_snapshot(sim.state(), sim.grid(), sim.config().constants, hash, out_dir / "initial.vtk");
  BreedResult b;
  if (sim.config().breed) {
    b = sim.breed();
    write_snapshot(sim.state(), sim.grid(), sim.config().constants, hash, out_dir / "bred.vtk");
    sim.save_checkpoint(out_dir / "bred.ckpt");
  }
  return b;
}

std::vector<DiagnosticRecord> diagnose_snapshots(const fs::path& dir, const RunConfig& config) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".vtk") files.push_back(entry.path());
  if (ec) throw IoError("cannot list '" + dir.string() + "': " + ec.message());

  std::vector<std::pair<double, DiagnosticRecord>> rows;
  for (const auto& f : files) {
    const Snapshot snap = read_snapshot(f);
    const Grid grid = build_grid(snap.state.nx(), snap.state.nz(), config.constants);
    rows.emplace_back(snap.state.t, diagnose(snap.state, grid, config.constants, config.rmsv_weighting));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<DiagnosticRecord> out;
  for (auto& [t, r] : rows) out.push_back(r);
  return out;
}

CompareReport run_compare(const RunConfig& config, double day, const fs::path& out_dir) {
  CompareReport report;
  report.day = day;
  for (VelocityForm form : {VelocityForm::kAdvective, VelocityForm::kVectorInvariant}) {
    RunConfig c = config;
    c.velocity_form = form;
    c.run_days = day;
    Simulation sim(c);
    sim.breed();
    while (sim.steps() < sim.total_steps()) sim.step();
    const DiagnosticRecord r = sim.record();
    (form == VelocityForm::kAdvective ? report.advective : report.vector_invariant) = r;
    if (!out_dir.empty())
      write_snapshot(sim.state(), sim.grid(), c.constants, config_hash(c),
                     out_dir / ("compare_" + to_string(form) + ".vtk"));
  }
  if (!out_dir.empty()) {
    const fs::path path = out_dir / "compare_report.txt";
    std::ofstream out(path);
    out << format_compare_report(report);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
  }
  return report;
}

std::string format_compare_report(const CompareReport& r) {
  std::string s;
  s += "day = " + format_double(r.day) + "\n";
  s += "noise_metric advective = " + format_double(r.advective.noise_metric) + "\n";
  s += "noise_metric vector-invariant = " + format_double(r.vector_invariant.noise_metric) + "\n";
  s += "ratio = " + format_double(r.ratio()) + "\n";
  s += "rmsv advective = " + format_double(r.advective.rmsv) + "\n";
  s += "rmsv vector-invariant = " + format_double(r.vector_invariant.rmsv) + "\n";
  return s;
}

}  // namespace eady
