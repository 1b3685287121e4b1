// Command-line driver for the Eady slice model.
//
//   eady_cli run      [--config F] [--out D] [--dry-run] [--resume CKPT]
//   eady_cli init     [--config F] [--out D]
//   eady_cli diagnose [--config F] [--out D]
//   eady_cli compare  [--config F] [--out D] [--day N]
//
// Exit status: 0 success, 2 configuration error, 3 solver failure, 4 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "eady/config.hpp"
#include "eady/driver.hpp"
#include "eady/errors.hpp"
#include "eady/io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

struct Common {
  std::string config_path;
  std::string out_dir;
};

eady::RunConfig load(const Common& common) {
  eady::RunConfig config;
  if (!common.config_path.empty()) {
    config = eady::parse_config(common.config_path);
  } else {
    eady::apply_env_overrides(config, eady::process_env);
  }
  if (!common.out_dir.empty()) config.output_dir = common.out_dir;
  return eady::validate_config(config);
}

void print_record(const eady::DiagnosticRecord& r) {
  std::fprintf(stderr, "day %7.3f  rmsv %9.4f  E %.10e  front %.3e  noise %.4f  newton %d  gmres %d\n",
               r.t / 86400.0, r.rmsv, r.e, r.front_intensity, r.noise_metric, r.newton_iters,
               r.gmres_iters);
}

int cmd_run(const Common& common, bool dry_run, const std::string& resume) {
  const eady::RunConfig config = load(common);
  const fs::path out = config.output_dir;
  if (dry_run) {
    eady::write_config_echo(config, out);
    std::cout << eady::config_echo(config);
    return 0;
  }
  eady::ProtocolOptions opts;
  opts.out_dir = out;
  if (!resume.empty()) opts.resume = fs::path(resume);
  const double day = 86400.0;
  opts.on_record = [day, last = -1.0](const eady::DiagnosticRecord& r) mutable {
    if (r.t - last >= day || r.t == 0.0) {
      print_record(r);
      last = r.t;
    }
  };
  const eady::ProtocolResult res = eady::run_protocol(config, opts);
  std::printf("bred for %.2f h (%ld steps); %zu records written to %s\n", res.t_breed / 3600.0,
              res.breed_steps, res.records.size(), (out / eady::kTimeseriesFile).string().c_str());
  return 0;
}

int cmd_init(const Common& common) {
  const eady::RunConfig config = load(common);
  const eady::BreedResult b = eady::run_init(config, config.output_dir);
  std::printf("initial state written; bred for %.2f h (%ld steps), max|v| %.4f m/s\n", b.t_breed / 3600.0,
              b.steps, b.max_v);
  return 0;
}

int cmd_diagnose(const Common& common) {
  const eady::RunConfig config = load(common);
  const fs::path dir = config.output_dir;
  const auto rows = eady::diagnose_snapshots(dir, config);
  const fs::path path = dir / "diagnostics.csv";
  std::error_code ec;
  fs::remove(path, ec);
  for (const auto& r : rows) eady::append_timeseries(r, path);
  std::printf("%zu snapshots diagnosed into %s\n", rows.size(), path.string().c_str());
  return 0;
}

int cmd_compare(const Common& common, double day) {
  const eady::RunConfig config = load(common);
  const eady::CompareReport report = eady::run_compare(config, day, config.output_dir);
  std::cout << eady::format_compare_report(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressible Eady vertical-slice frontogenesis model"};
  app.require_subcommand(1);

  Common common;
  bool dry_run = false;
  bool seed_free = false;
  std::string resume;
  double day = 6.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "key = value configuration file");
    sub->add_option("--out", common.out_dir, "output directory (overrides output_dir)");
    sub->add_flag("--seed-free", seed_free, "accepted for compatibility; the model uses no random numbers");
  };

  CLI::App* run = app.add_subcommand("run", "init, breed, reset the clock and integrate run_days");
  add_common(run);
  run->add_flag("--dry-run", dry_run, "validate and echo the configuration only");
  run->add_option("--resume", resume, "continue from a checkpoint file");

  CLI::App* init = app.add_subcommand("init", "write the initial and bred states");
  add_common(init);

  CLI::App* diag = app.add_subcommand("diagnose", "recompute diagnostics from snapshots in the output directory");
  add_common(diag);

  CLI::App* cmp = app.add_subcommand("compare", "advective vs vector-invariant twin runs");
  add_common(cmp);
  cmp->add_option("--day", day, "days after the clock reset at which to compare")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(common, dry_run, resume);
    if (*init) return cmd_init(common);
    if (*diag) return cmd_diagnose(common);
    if (*cmp) return cmd_compare(common, day);
  } catch (const eady::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const eady::IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const eady::SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const eady::DomainError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIo;
  }
  return 0;
}
