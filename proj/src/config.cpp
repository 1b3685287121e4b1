#include "eady/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <system_error>

#include "eady/errors.hpp"

namespace eady {

std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

namespace {

double parse_double(const std::string& key, const std::string& text) {
  double out = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || text.empty())
    throw ConfigError(key, "expected a number, got '" + text + "'");
  return out;
}

int parse_int(const std::string& key, const std::string& text) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key, "expected a boolean (true|false), got '" + text + "'");
}

template <typename Enum, std::size_t N>
Enum parse_enum(const std::string& key, const std::string& text,
                const std::array<std::pair<const char*, Enum>, N>& table) {
  std::string allowed;
  for (const auto& [name, value] : table) {
    if (text == name) return value;
    allowed += allowed.empty() ? name : std::string("|") + name;
  }
  throw ConfigError(key, "unknown value '" + text + "', allowed values: " + allowed);
}

constexpr std::array<std::pair<const char*, Integrator>, 2> kIntegrators{{
    {"implicit-midpoint", Integrator::kImplicitMidpoint},
    {"explicit-ssprk3", Integrator::kSsprk3},
}};
constexpr std::array<std::pair<const char*, VelocityForm>, 2> kForms{{
    {"advective", VelocityForm::kAdvective},
    {"vector-invariant", VelocityForm::kVectorInvariant},
}};
constexpr std::array<std::pair<const char*, Preconditioner>, 2> kPreconditioners{{
    {"column", Preconditioner::kColumn},
    {"none", Preconditioner::kNone},
}};
constexpr std::array<std::pair<const char*, HydrostaticAnchor>, 2> kAnchors{{
    {"surface", HydrostaticAnchor::kSurface},
    {"lid", HydrostaticAnchor::kLid},
}};
constexpr std::array<std::pair<const char*, RmsvWeighting>, 2> kWeightings{{
    {"area", RmsvWeighting::kArea},
    {"mass", RmsvWeighting::kMass},
}};

template <typename Enum, std::size_t N>
std::string enum_name(Enum v, const std::array<std::pair<const char*, Enum>, N>& table) {
  for (const auto& [name, value] : table)
    if (value == v) return name;
  return "?";
}

struct KeyEntry {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define EADY_DOUBLE(name, member)                                                    \
  KeyEntry {                                                                         \
    name, [](const RunConfig& c) { return format_double(c.member); },                \
        [](RunConfig& c, const std::string& s) { c.member = parse_double(name, s); } \
  }
#define EADY_INT(name, member)                                                    \
  KeyEntry {                                                                      \
    name, [](const RunConfig& c) { return std::to_string(c.member); },            \
        [](RunConfig& c, const std::string& s) { c.member = parse_int(name, s); } \
  }
#define EADY_BOOL(name, member)                                                      \
  KeyEntry {                                                                         \
    name, [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }, \
        [](RunConfig& c, const std::string& s) { c.member = parse_bool(name, s); }   \
  }
#define EADY_ENUM(name, member, table)                                                     \
  KeyEntry {                                                                               \
    name, [](const RunConfig& c) { return enum_name(c.member, table); },                   \
        [](RunConfig& c, const std::string& s) { c.member = parse_enum(name, s, table); } \
  }

const std::vector<KeyEntry>& key_table() {
  static const std::vector<KeyEntry> table = {
      EADY_DOUBLE("L", constants.L),
      EADY_DOUBLE("H", constants.H),
      EADY_DOUBLE("f", constants.f),
      EADY_DOUBLE("g", constants.g),
      EADY_DOUBLE("p0", constants.p0),
      EADY_DOUBLE("theta0", constants.theta0),
      EADY_DOUBLE("shear", constants.shear),
      EADY_DOUBLE("n2", constants.n2),
      EADY_DOUBLE("pi0", constants.pi0),
      EADY_DOUBLE("R", constants.R),
      EADY_DOUBLE("cp", constants.cp),
      EADY_DOUBLE("u0", constants.u0),
      EADY_INT("nx", nx),
      EADY_INT("nz", nz),
      EADY_DOUBLE("dt", dt),
      EADY_ENUM("integrator", integrator, kIntegrators),
      EADY_ENUM("velocity_form", velocity_form, kForms),
      EADY_INT("scalar_upwind_order", scalar_upwind_order),
      EADY_BOOL("upwinding", upwinding),
      EADY_DOUBLE("amplitude", amplitude),
      EADY_BOOL("breed", breed),
      EADY_DOUBLE("breed_vmax", breed_vmax),
      EADY_DOUBLE("breed_max_days", breed_max_days),
      EADY_DOUBLE("run_days", run_days),
      EADY_DOUBLE("snapshot_interval", snapshot_interval),
      EADY_DOUBLE("timeseries_interval", timeseries_interval),
      EADY_DOUBLE("checkpoint_interval", checkpoint_interval),
      EADY_DOUBLE("newton_abs_tol", solver.newton_abs_tol),
      EADY_DOUBLE("newton_rel_tol", solver.newton_rel_tol),
      EADY_INT("newton_max_iters", solver.newton_max_iters),
      EADY_DOUBLE("linear_rel_tol", solver.linear_rel_tol),
      EADY_INT("linear_max_iters", solver.linear_max_iters),
      EADY_INT("linear_restart", solver.linear_restart),
      EADY_DOUBLE("jacobian_fd_epsilon", solver.jacobian_fd_epsilon),
      EADY_ENUM("preconditioner", solver.preconditioner, kPreconditioners),
      EADY_DOUBLE("cfl_max", cfl_max),
      EADY_ENUM("hydrostatic_anchor", anchor, kAnchors),
      EADY_DOUBLE("anchor_exner", anchor_exner),
      EADY_ENUM("rmsv_weighting", rmsv_weighting, kWeightings),
      KeyEntry{"output_dir", [](const RunConfig& c) { return c.output_dir; },
               [](RunConfig& c, const std::string& s) { c.output_dir = s; }},
  };
  return table;
}

#undef EADY_DOUBLE
#undef EADY_INT
#undef EADY_BOOL
#undef EADY_ENUM

void require_multiple_of_dt(const char* key, double interval, double dt) {
  if (!(interval > 0.0) || !std::isfinite(interval))
    throw ConfigError(key, "cadence must be positive");
  const double ratio = interval / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio) || std::round(ratio) < 1.0)
    throw ConfigError(key, "cadence not a multiple of dt");
}

}  // namespace

std::string to_string(Integrator v) { return enum_name(v, kIntegrators); }
std::string to_string(VelocityForm v) { return enum_name(v, kForms); }
std::string to_string(Preconditioner v) { return enum_name(v, kPreconditioners); }
std::string to_string(HydrostaticAnchor v) { return enum_name(v, kAnchors); }
std::string to_string(RmsvWeighting v) { return enum_name(v, kWeightings); }

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& e : key_table()) out.emplace_back(e.key);
    return out;
  }();
  return keys;
}

std::vector<std::pair<std::string, std::string>> config_to_pairs(const RunConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : key_table()) out.emplace_back(e.key, e.get(config));
  return out;
}

void apply_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  for (const auto& e : key_table()) {
    if (key == e.key) {
      e.set(config, value);
      return;
    }
  }
  throw ConfigError(key, "unknown config key");
}

RunConfig validate_config(const RunConfig& config) {
  validate_constants(config.constants);
  if (config.nx < 4) throw ConfigError("nx", "cell count must be at least 4");
  if (config.nz < 4) throw ConfigError("nz", "cell count must be at least 4");
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) throw ConfigError("dt", "nonpositive timestep");
  require_multiple_of_dt("snapshot_interval", config.snapshot_interval, config.dt);
  require_multiple_of_dt("timeseries_interval", config.timeseries_interval, config.dt);
  if (config.checkpoint_interval != 0.0)
    require_multiple_of_dt("checkpoint_interval", config.checkpoint_interval, config.dt);
  if (config.scalar_upwind_order != 1 && config.scalar_upwind_order != 3)
    throw ConfigError("scalar_upwind_order", "must be 1 or 3");
  if (!std::isfinite(config.amplitude)) throw ConfigError("amplitude", "must be finite");
  if (!(config.breed_vmax > 0.0)) throw ConfigError("breed_vmax", "must be positive");
  if (!(config.breed_max_days > 0.0)) throw ConfigError("breed_max_days", "must be positive");
  if (!(config.run_days >= 0.0)) throw ConfigError("run_days", "must be non-negative");

  const SolverConfig& s = config.solver;
  if (!(s.newton_abs_tol > 0.0)) throw ConfigError("newton_abs_tol", "tolerance must be positive");
  if (!(s.newton_rel_tol > 0.0)) throw ConfigError("newton_rel_tol", "tolerance must be positive");
  if (s.newton_max_iters < 1) throw ConfigError("newton_max_iters", "iteration cap must be at least 1");
  if (!(s.linear_rel_tol > 0.0)) throw ConfigError("linear_rel_tol", "tolerance must be positive");
  if (s.linear_max_iters < 1) throw ConfigError("linear_max_iters", "iteration cap must be at least 1");
  if (s.linear_restart < 1) throw ConfigError("linear_restart", "restart length must be at least 1");
  if (!(s.jacobian_fd_epsilon > 0.0)) throw ConfigError("jacobian_fd_epsilon", "must be positive");

  if (!(config.cfl_max > 0.0)) throw ConfigError("cfl_max", "must be positive");
  if (!(config.anchor_exner > 0.0)) throw ConfigError("anchor_exner", "must be positive");
  if (config.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  return config;
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& [k, v] : config_to_pairs(config)) {
    if (k == "output_dir") continue;
    for (char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ULL;
    }
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace eady
