#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eady/driver.hpp"
#include "eady/errors.hpp"

using namespace eady;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("eady_test_driver_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig small_config() {
  RunConfig c;
  c.nx = 12;
  c.nz = 10;
  c.dt = 600.0;
  c.breed = false;
  c.run_days = 0.5;
  c.timeseries_interval = 3600.0;
  c.snapshot_interval = 21600.0;
  c.checkpoint_interval = 7200.0;
  return c;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EADY_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool same_bits(const State& a, const State& b) {
  return a.size() == b.size() && a.t == b.t &&
         std::memcmp(a.data().data(), b.data().data(), a.data().size_bytes()) == 0;
}

}  // namespace

TEST_CASE("file names") {
  CHECK(snapshot_name(172800.0) == "snapshot_t0000172800.vtk");
  CHECK(checkpoint_name(72) == "checkpoint_s00000072.ckpt");
}

TEST_CASE("restore then step reproduces the uninterrupted trajectory bit for bit") {
  const fs::path dir = scratch_dir("restore");
  Simulation a(small_config());
  a.breed();
  for (int n = 0; n < 10; ++n) a.step();
  a.save_checkpoint(dir / "mid.ckpt");
  for (int n = 0; n < 10; ++n) a.step();
  const DiagnosticRecord ra = a.record();

  Simulation b(read_checkpoint(dir / "mid.ckpt"));
  CHECK(b.steps() == 10);
  for (int n = 0; n < 10; ++n) b.step();
  const DiagnosticRecord rb = b.record();
  CHECK(same_bits(a.state(), b.state()));
  CHECK(ra.e == rb.e);
  CHECK(ra.rmsv == rb.rmsv);
  CHECK(ra.newton_iters == rb.newton_iters);
  CHECK(ra.gmres_iters == rb.gmres_iters);
}

TEST_CASE("clock runs as steps times dt after the reset") {
  Simulation sim(small_config());
  sim.breed();
  CHECK(sim.state().t == 0.0);
  for (int n = 0; n < 7; ++n) sim.step();
  CHECK(sim.state().t == 7 * 600.0);
  CHECK(sim.total_steps() == 72);
}

TEST_CASE("protocol output is deterministic and resumable") {
  const RunConfig cfg = small_config();
  const fs::path a = scratch_dir("proto_a");
  const fs::path b = scratch_dir("proto_b");
  ProtocolOptions oa;
  oa.out_dir = a;
  const ProtocolResult r = run_protocol(cfg, oa);
  ProtocolOptions ob;
  ob.out_dir = b;
  run_protocol(cfg, ob);

  const std::string ts = read_text(a / kTimeseriesFile);
  CHECK(ts == read_text(b / kTimeseriesFile));
  CHECK(r.records.size() == 13);
  for (std::size_t n = 1; n < r.records.size(); ++n) CHECK(r.records[n].t > r.records[n - 1].t);
  CHECK(r.records.back().t == 43200.0);
  CHECK(fs::exists(a / "config.txt"));
  CHECK(fs::exists(a / snapshot_name(0.0)));
  CHECK(fs::exists(a / snapshot_name(21600.0)));
  CHECK(fs::exists(a / snapshot_name(43200.0)));
  CHECK(fs::exists(a / checkpoint_name(36)));
  CHECK(read_text(fs::path((a / kTimeseriesFile).string() + ".meta")).find(config_hash(cfg)) != std::string::npos);

  // Resume into b from the midpoint checkpoint: the log is cut back and regrown identically.
  ProtocolOptions resume;
  resume.out_dir = b;
  resume.resume = a / checkpoint_name(36);
  const ProtocolResult rr = run_protocol(cfg, resume);
  CHECK(read_text(b / kTimeseriesFile) == ts);
  CHECK(same_bits(rr.final_state, r.final_state));
}

TEST_CASE("default cadence yields the day 2, 4, 7 and 11 snapshots") {
  RunConfig cfg = small_config();
  cfg.dt = 3600.0;
  cfg.run_days = 11.0;
  cfg.snapshot_interval = 43200.0;
  cfg.checkpoint_interval = 0.0;
  const fs::path dir = scratch_dir("cadence");
  ProtocolOptions o;
  o.out_dir = dir;
  run_protocol(cfg, o);
  for (double day : {2.0, 4.0, 7.0, 11.0}) CHECK(fs::exists(dir / snapshot_name(day * 86400.0)));
  const auto rows = read_timeseries(dir / kTimeseriesFile);
  CHECK(rows.size() == 11 * 24 + 1);
}

TEST_CASE("diagnose recomputes from snapshots") {
  const RunConfig cfg = small_config();
  const fs::path dir = scratch_dir("diag");
  ProtocolOptions o;
  o.out_dir = dir;
  const ProtocolResult r = run_protocol(cfg, o);
  const auto rows = diagnose_snapshots(dir, cfg);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].t == 0.0);
  CHECK(rows[2].t == 43200.0);
  CHECK(rows[2].e == r.records.back().e);
  CHECK(rows[2].rmsv == r.records.back().rmsv);
}

TEST_CASE("compare report") {
  RunConfig cfg = small_config();
  cfg.run_days = 0.25;
  const CompareReport rep = run_compare(cfg, 0.25, {});
  CHECK(rep.day == 0.25);
  CHECK(rep.advective.noise_metric > 0.0);
  CHECK(rep.vector_invariant.noise_metric > 0.0);
  CHECK(rep.ratio() == doctest::Approx(rep.vector_invariant.noise_metric / rep.advective.noise_metric));
  const std::string text = format_compare_report(rep);
  CHECK(text.find("noise_metric advective = ") != std::string::npos);
  CHECK(text.find("noise_metric vector-invariant = ") != std::string::npos);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch_dir("cli");
  {
    std::ofstream(dir / "bad.cfg") << "integrator = rk7\n";
    std::ofstream(dir / "ok.cfg") << "nx = 8\nnz = 6\n";
    std::ofstream(dir / "stuck.cfg") << "nx = 8\nnz = 6\namplitude = 0\nbreed_max_days = 0.05\n";
    std::ofstream(dir / "short.cfg") << "nx = 12\nnz = 10\ndt = 600\nbreed = false\nrun_days = 0.25\n"
                                     << "checkpoint_interval = 3600\n";
  }
  const std::string d = dir.string();
  CHECK(run_cli("run --config " + d + "/bad.cfg --dry-run") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("run --config " + d + "/missing.cfg") == 4);

  CHECK(run_cli("run --config " + d + "/ok.cfg --out " + d + "/dry --dry-run --seed-free") == 0);
  CHECK(fs::exists(dir / "dry" / "config.txt"));
  CHECK_FALSE(fs::exists(dir / "dry" / kTimeseriesFile));

  CHECK(run_cli("init --config " + d + "/stuck.cfg --out " + d + "/stuck") == 3);

  CHECK(run_cli("run --config " + d + "/short.cfg --out " + d + "/short") == 0);
  CHECK(fs::exists(dir / "short" / kTimeseriesFile));
  CHECK(run_cli("run --config " + d + "/ok.cfg --out " + d + "/mismatch --resume " + d + "/short/" +
                checkpoint_name(6)) == 4);
  CHECK(run_cli("diagnose --config " + d + "/short.cfg --out " + d + "/short") == 0);
  CHECK(fs::exists(dir / "short" / "diagnostics.csv"));
}
