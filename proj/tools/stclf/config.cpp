#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "json.hpp"

#include "stclf/types.hpp"

namespace stclf::cli {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      std::ostringstream os;
      os << "unknown key \"" << item.key() << "\" in " << where << "; allowed keys:";
      for (const char* k : allowed) os << ' ' << k;
      bad(os.str());
    }
  }
}

double num(const json& obj, const char* key, const char* where) {
  const json& v = obj.at(key);
  if (!v.is_number()) bad(std::string(where) + "." + key + " must be a number");
  return v.get<double>();
}

int integer(const json& obj, const char* key, const char* where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad(std::string(where) + "." + key + " must be an integer");
  return v.get<int>();
}

std::string str(const json& obj, const char* key, const char* where) {
  const json& v = obj.at(key);
  if (!v.is_string()) bad(std::string(where) + "." + key + " must be a string");
  return v.get<std::string>();
}

Strategy parse_strategy(const std::string& s) {
  if (s == "midpoint") return Strategy::Midpoint;
  if (s == "chebyshev") return Strategy::Chebyshev;
  if (s == "mincost") return Strategy::MinCost;
  bad("unknown strategy \"" + s + "\" (expected midpoint, chebyshev, or mincost)");
}

NoiseTag parse_noise(const std::string& s) {
  if (s == "uniform-ball") return NoiseTag::UniformBall;
  if (s == "sphere-surface") return NoiseTag::SphereSurface;
  if (s == "adversarial-radial") return NoiseTag::AdversarialRadial;
  bad("unknown noise model \"" + s +
      "\" (expected uniform-ball, sphere-surface, or adversarial-radial)");
}

Vec to_state(const json& arr, const char* where, int n) {
  if (!arr.is_array() || arr.empty()) bad(std::string(where) + " must be a nonempty array");
  if (static_cast<int>(arr.size()) != n) {
    std::ostringstream os;
    os << where << " has " << arr.size() << " entries but the system state has "
       << n << " dimensions";
    bad(os.str());
  }
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    if (!arr[static_cast<std::size_t>(i)].is_number()) {
      bad(std::string(where) + " entries must be numbers");
    }
    v[i] = arr[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

}  // namespace

std::string resolve_out_dir(const std::optional<std::string>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("STCLF_OUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return "stclf-out";
}

Job build_job(const std::optional<std::string>& config_path, const Overrides& ov) {
  json cfg = json::object();
  if (config_path) {
    std::ifstream in(*config_path);
    if (!in) bad("cannot open config file " + *config_path);
    try {
      in >> cfg;
    } catch (const json::parse_error& e) {
      bad("config file " + *config_path + " is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) bad("config root must be a JSON object");
    check_keys(cfg, "config",
               {"scenario", "eps", "r", "r_star", "alpha", "grid", "sim", "x0",
                "x0s", "out"});
  }

  std::string name;
  if (ov.scenario) {
    name = *ov.scenario;
  } else if (cfg.contains("scenario")) {
    name = str(cfg, "scenario", "config");
  } else {
    std::ostringstream os;
    os << "no scenario named; pass --scenario or set \"scenario\" in the config"
       << " (available:";
    for (const std::string& s : scenario_names()) os << ' ' << s;
    os << ')';
    bad(os.str());
  }

  std::optional<double> alpha = ov.alpha;
  if (!alpha && cfg.contains("alpha")) alpha = num(cfg, "alpha", "config");

  ScenarioBundle b = make_scenario(name, alpha);

  if (cfg.contains("eps")) b.eps = num(cfg, "eps", "config");
  if (cfg.contains("r")) b.r = num(cfg, "r", "config");
  if (cfg.contains("r_star")) b.r_star = num(cfg, "r_star", "config");

  std::optional<int> field_points;
  if (cfg.contains("grid")) {
    const json& g = cfg.at("grid");
    if (!g.is_object()) bad("config.grid must be an object");
    check_keys(g, "grid",
               {"L_points", "wbar_points", "F_points", "vhat_points", "pad",
                "safety_factor", "field_points"});
    if (g.contains("L_points")) b.grid.L_points = integer(g, "L_points", "grid");
    if (g.contains("wbar_points")) b.grid.wbar_points = integer(g, "wbar_points", "grid");
    if (g.contains("F_points")) b.grid.F_points = integer(g, "F_points", "grid");
    if (g.contains("vhat_points")) b.grid.vhat_points = integer(g, "vhat_points", "grid");
    if (g.contains("pad")) b.grid.pad = num(g, "pad", "grid");
    if (g.contains("safety_factor")) b.grid.safety_factor = num(g, "safety_factor", "grid");
    if (g.contains("field_points")) field_points = integer(g, "field_points", "grid");
  }

  if (cfg.contains("sim")) {
    const json& s = cfg.at("sim");
    if (!s.is_object()) bad("config.sim must be an object");
    check_keys(s, "sim",
               {"h", "T", "seed", "strategy", "noise", "trace_stride",
                "level_set_refresh", "decay_band_C"});
    if (s.contains("h")) b.sim.h = num(s, "h", "sim");
    if (s.contains("T")) b.sim.T = num(s, "T", "sim");
    if (s.contains("seed")) {
      const json& v = s.at("seed");
      if (!v.is_number_integer()) bad("sim.seed must be an integer");
      b.sim.seed = v.get<std::uint64_t>();
    }
    if (s.contains("strategy")) b.sim.strategy = parse_strategy(str(s, "strategy", "sim"));
    if (s.contains("noise")) b.sim.noise = parse_noise(str(s, "noise", "sim"));
    if (s.contains("trace_stride")) {
      b.sim.trace_stride = integer(s, "trace_stride", "sim");
      if (b.sim.trace_stride < 1) bad("sim.trace_stride must be at least 1");
    }
    if (s.contains("level_set_refresh")) {
      const json& v = s.at("level_set_refresh");
      if (!v.is_boolean()) bad("sim.level_set_refresh must be a boolean");
      b.sim.level_set_refresh = v.get<bool>();
    }
    if (s.contains("decay_band_C")) b.sim.decay_band_C = num(s, "decay_band_C", "sim");
  }

  if (cfg.contains("x0") && cfg.contains("x0s")) {
    bad("give either x0 or x0s in the config, not both");
  }
  if (cfg.contains("x0")) {
    b.x0s = {to_state(cfg.at("x0"), "x0", b.sys.n)};
  } else if (cfg.contains("x0s")) {
    const json& xs = cfg.at("x0s");
    if (!xs.is_array() || xs.empty()) bad("x0s must be a nonempty array of states");
    b.x0s.clear();
    for (const json& x : xs) b.x0s.push_back(to_state(x, "x0s entry", b.sys.n));
  }

  if (ov.eps) b.eps = *ov.eps;
  if (ov.r) b.r = *ov.r;
  if (ov.r_star) b.r_star = *ov.r_star;
  if (ov.seed) b.sim.seed = *ov.seed;
  if (ov.strategy) b.sim.strategy = parse_strategy(*ov.strategy);
  if (ov.grid) field_points = *ov.grid;

  if (!(b.eps >= 0.0)) bad("eps must be nonnegative");
  if (!(b.r > 0.0)) bad("r must be positive");
  if (field_points && *field_points < 1) bad("the field grid needs at least one point per axis");
  b.sim.eps = b.eps;

  Job job;
  job.bundle = std::move(b);
  job.field_points = field_points;
  job.verify_seed = ov.seed.value_or(2026);

  if (ov.out) {
    job.out_dir = *ov.out;
  } else if (cfg.contains("out")) {
    job.out_dir = str(cfg, "out", "config");
  } else {
    job.out_dir = resolve_out_dir(std::nullopt);
  }
  return job;
}

}  // namespace stclf::cli
