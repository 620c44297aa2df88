#include "dbsplace/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dbsplace/coexistence.hpp"
#include "dbsplace/csv.hpp"
#include "dbsplace/errors.hpp"

namespace dbsplace {

namespace {

using nlohmann::json;

// Strict object reader: every key must be consumed, typos surface as errors.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string scope, std::vector<std::string>& errors)
      : obj_(obj), scope_(std::move(scope)), errors_(errors) {
    if (!obj_.is_object()) {
      errors_.push_back(scope_ + ": expected a JSON object");
    }
  }

  ~ObjectReader() {
    if (!obj_.is_object()) return;
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) errors_.push_back(scope_ + ": unknown field '" + key + "'");
    }
  }

  bool has(const std::string& key) {
    if (!obj_.is_object()) return false;
    return obj_.contains(key);
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!obj_.is_object() || !obj_.contains(key)) return;
    seen_.insert(key);
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      errors_.push_back(scope_ + "." + key + ": wrong type");
    }
  }

  const json* sub(const std::string& key) {
    if (!obj_.is_object() || !obj_.contains(key)) return nullptr;
    seen_.insert(key);
    return &obj_.at(key);
  }

 private:
  const json& obj_;
  std::string scope_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

Region3D read_region(const json& obj, const std::string& scope, bool ground,
                     Region3D defaults, std::vector<std::string>& errors) {
  Region3D r = defaults;
  ObjectReader reader(obj, scope, errors);
  reader.read("x_min_km", r.x_min);
  reader.read("x_max_km", r.x_max);
  reader.read("y_min_km", r.y_min);
  reader.read("y_max_km", r.y_max);
  if (!ground) {
    reader.read("z_min_km", r.z_min);
    reader.read("z_max_km", r.z_max);
  }
  return r;
}

json region_to_json(const Region3D& r, bool ground) {
  json obj{{"x_min_km", r.x_min}, {"x_max_km", r.x_max},
           {"y_min_km", r.y_min}, {"y_max_km", r.y_max}};
  if (!ground) {
    obj["z_min_km"] = r.z_min;
    obj["z_max_km"] = r.z_max;
  }
  return obj;
}

Vec3 read_vec3(const json& arr, const std::string& scope, std::vector<std::string>& errors) {
  Vec3 v;
  if (!arr.is_array() || arr.size() != 3 || !arr[0].is_number() || !arr[1].is_number() ||
      !arr[2].is_number()) {
    errors.push_back(scope + ": expected [x_km, y_km, z_km]");
    return v;
  }
  v.x = arr[0].get<double>();
  v.y = arr[1].get<double>();
  v.z = arr[2].get<double>();
  return v;
}

Scenario from_json(const json& root) {
  Scenario s;
  std::vector<std::string> errors;
  {
    ObjectReader reader(root, "config", errors);
    reader.read("rng_seed", s.rng_seed);
    reader.read("num_terminals", s.num_terminals);
    reader.read("num_dbs", s.num_dbs);
    if (const json* v = reader.sub("mbs_pos_km")) s.mbs_pos = read_vec3(*v, "mbs_pos_km", errors);
    if (const json* v = reader.sub("mbs_region_km"))
      s.mbs_region = read_region(*v, "mbs_region_km", true, s.mbs_region, errors);
    if (const json* v = reader.sub("terminal_region_km"))
      s.terminal_region = read_region(*v, "terminal_region_km", true, s.terminal_region, errors);
    if (const json* v = reader.sub("dbs_region_km"))
      s.dbs_region = read_region(*v, "dbs_region_km", false, s.dbs_region, errors);
    if (const json* v = reader.sub("terminal_pos_km")) {
      if (!v->is_array()) {
        errors.push_back("terminal_pos_km: expected an array of [x, y, z]");
      } else {
        for (std::size_t i = 0; i < v->size(); ++i) {
          std::ostringstream scope;
          scope << "terminal_pos_km[" << i << "]";
          s.terminal_pos.push_back(read_vec3((*v)[i], scope.str(), errors));
        }
      }
    }
    if (const json* v = reader.sub("radio")) {
      ObjectReader r(*v, "radio", errors);
      r.read("total_bandwidth_hz", s.radio.total_bandwidth_hz);
      r.read("total_power_w", s.radio.total_power_w);
      r.read("dbs_bandwidth_hz", s.radio.dbs_bandwidth_hz);
      r.read("dbs_power_w", s.radio.dbs_power_w);
      r.read("noise_psd_w_per_hz", s.radio.noise_psd_w_per_hz);
      r.read("carrier_licensed_hz", s.radio.carrier_licensed_hz);
      r.read("carrier_unlicensed_hz", s.radio.carrier_unlicensed_hz);
      r.read("target_rate_bps", s.radio.target_rate_bps);
    }
    if (const json* v = reader.sub("env")) {
      ObjectReader r(*v, "env", errors);
      r.read("alpha", s.env.alpha);
      r.read("beta", s.env.beta);
      r.read("loss_los_db", s.env.loss_los_db);
      r.read("loss_nlos_db", s.env.loss_nlos_db);
    }
    if (const json* v = reader.sub("wifi")) {
      ObjectReader r(*v, "wifi", errors);
      r.read("omega_slots", s.wifi.omega_slots);
      r.read("max_backoff_stage", s.wifi.max_backoff_stage);
      r.read("num_aps", s.wifi.num_aps);
      r.read("cw_dbs_slots", s.wifi.cw_dbs_slots);
      r.read("collision_cap", s.wifi.collision_cap);
      r.read("airtime_share", s.wifi.airtime_share);
    }
    if (const json* v = reader.sub("pso")) {
      ObjectReader r(*v, "pso", errors);
      r.read("num_particles", s.pso.num_particles);
      r.read("inertia", s.pso.inertia);
      r.read("accel_personal", s.pso.accel_personal);
      r.read("accel_social", s.pso.accel_social);
      r.read("max_iterations", s.pso.max_iterations);
      r.read("stall_window", s.pso.stall_window);
      r.read("stall_rel_tol", s.pso.stall_rel_tol);
    }
    if (const json* v = reader.sub("solver")) {
      ObjectReader r(*v, "solver", errors);
      r.read("step_base", s.solver.step_base);
      r.read("max_iterations", s.solver.max_iterations);
      r.read("tolerance", s.solver.tolerance);
      r.read("polish", s.solver.polish);
    }
    if (const json* v = reader.sub("experiments")) {
      ObjectReader r(*v, "experiments", errors);
      r.read("replications", s.experiments.replications);
      r.read("target_rates_bps", s.experiments.target_rates_bps);
      r.read("dbs_counts", s.experiments.dbs_counts);
    }
  }
  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  std::vector<std::string> violations = validate(s);
  if (!violations.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& e : violations) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return s;
}

}  // namespace

Scenario parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
  return from_json(root);
}

Scenario load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const Scenario& s) {
  json root;
  root["rng_seed"] = s.rng_seed;
  root["num_terminals"] = s.num_terminals;
  root["num_dbs"] = s.num_dbs;
  root["mbs_pos_km"] = {s.mbs_pos.x, s.mbs_pos.y, s.mbs_pos.z};
  root["mbs_region_km"] = region_to_json(s.mbs_region, true);
  root["terminal_region_km"] = region_to_json(s.terminal_region, true);
  root["dbs_region_km"] = region_to_json(s.dbs_region, false);
  if (!s.terminal_pos.empty()) {
    json arr = json::array();
    for (const Vec3& t : s.terminal_pos) arr.push_back({t.x, t.y, t.z});
    root["terminal_pos_km"] = arr;
  }
  root["radio"] = {{"total_bandwidth_hz", s.radio.total_bandwidth_hz},
                   {"total_power_w", s.radio.total_power_w},
                   {"dbs_bandwidth_hz", s.radio.dbs_bandwidth_hz},
                   {"dbs_power_w", s.radio.dbs_power_w},
                   {"noise_psd_w_per_hz", s.radio.noise_psd_w_per_hz},
                   {"carrier_licensed_hz", s.radio.carrier_licensed_hz},
                   {"carrier_unlicensed_hz", s.radio.carrier_unlicensed_hz},
                   {"target_rate_bps", s.radio.target_rate_bps}};
  root["env"] = {{"alpha", s.env.alpha},
                 {"beta", s.env.beta},
                 {"loss_los_db", s.env.loss_los_db},
                 {"loss_nlos_db", s.env.loss_nlos_db}};
  root["wifi"] = {{"omega_slots", s.wifi.omega_slots},
                  {"max_backoff_stage", s.wifi.max_backoff_stage},
                  {"num_aps", s.wifi.num_aps},
                  {"cw_dbs_slots", s.wifi.cw_dbs_slots},
                  {"collision_cap", s.wifi.collision_cap},
                  {"airtime_share", s.wifi.airtime_share}};
  root["pso"] = {{"num_particles", s.pso.num_particles},
                 {"inertia", s.pso.inertia},
                 {"accel_personal", s.pso.accel_personal},
                 {"accel_social", s.pso.accel_social},
                 {"max_iterations", s.pso.max_iterations},
                 {"stall_window", s.pso.stall_window},
                 {"stall_rel_tol", s.pso.stall_rel_tol}};
  root["solver"] = {{"step_base", s.solver.step_base},
                    {"max_iterations", s.solver.max_iterations},
                    {"tolerance", s.solver.tolerance},
                    {"polish", s.solver.polish}};
  root["experiments"] = {{"replications", s.experiments.replications},
                         {"target_rates_bps", s.experiments.target_rates_bps},
                         {"dbs_counts", s.experiments.dbs_counts}};
  return root.dump(2) + "\n";
}

void save_config(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << config_to_json(scenario);
  if (!out) throw IoError("write failed for " + path);
}

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> errors;
  auto require = [&errors](bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  };

  require(s.mbs_region.well_formed(), "mbs_region_km: min > max on some axis");
  require(s.terminal_region.well_formed(), "terminal_region_km: min > max on some axis");
  require(s.dbs_region.well_formed(), "dbs_region_km: min > max on some axis");
  require(s.mbs_region.z_min == 0.0 && s.mbs_region.z_max == 0.0,
          "mbs_region_km: must lie in the ground plane");
  require(s.terminal_region.z_min == 0.0 && s.terminal_region.z_max == 0.0,
          "terminal_region_km: must lie in the ground plane");

  require(s.num_terminals >= 1, "num_terminals: must be >= 1");
  require(s.num_dbs >= 0, "num_dbs: must be >= 0");
  require(s.mbs_region.contains(s.mbs_pos), "mbs_pos_km: MBS not inside its region");
  for (std::size_t k = 0; k < s.terminal_pos.size(); ++k) {
    if (!s.terminal_region.contains(s.terminal_pos[k])) {
      std::ostringstream msg;
      msg << "terminal_pos_km[" << k << "]: terminal not inside terminal_region_km";
      errors.push_back(msg.str());
    }
  }
  if (!s.terminal_pos.empty() &&
      s.terminal_pos.size() != static_cast<std::size_t>(s.num_terminals)) {
    errors.push_back("terminal_pos_km: length must equal num_terminals");
  }

  require(s.radio.total_bandwidth_hz > 0.0, "radio.total_bandwidth_hz: must be > 0");
  require(s.radio.total_power_w > 0.0, "radio.total_power_w: must be > 0");
  require(s.radio.dbs_bandwidth_hz > 0.0, "radio.dbs_bandwidth_hz: must be > 0");
  require(s.radio.dbs_power_w > 0.0, "radio.dbs_power_w: must be > 0");
  require(s.radio.noise_psd_w_per_hz > 0.0, "radio.noise_psd_w_per_hz: must be > 0");
  require(s.radio.carrier_licensed_hz > 0.0, "radio.carrier_licensed_hz: must be > 0");
  require(s.radio.carrier_unlicensed_hz > 0.0, "radio.carrier_unlicensed_hz: must be > 0");
  require(s.radio.target_rate_bps >= 0.0, "radio.target_rate_bps: must be >= 0");

  require(s.env.alpha > 0.0, "env.alpha: must be > 0");
  require(s.env.beta > 0.0, "env.beta: must be > 0");

  require(s.wifi.omega_slots >= 2, "wifi.omega_slots: must be >= 2");
  require(s.wifi.max_backoff_stage >= 0, "wifi.max_backoff_stage: must be >= 0");
  require(s.wifi.num_aps >= 1, "wifi.num_aps: must be >= 1");
  require(s.wifi.cw_dbs_slots >= 0, "wifi.cw_dbs_slots: must be >= 0 (0 derives it)");
  require(s.wifi.collision_cap > 0.0 && s.wifi.collision_cap <= 1.0,
          "wifi.collision_cap: must be in (0, 1]");
  require(s.wifi.airtime_share <= 1.0, "wifi.airtime_share: must be <= 1");

  require(s.pso.num_particles >= 1, "pso.num_particles: must be >= 1");
  require(s.pso.inertia >= 0.0, "pso.inertia: must be >= 0");
  require(s.pso.accel_personal >= 0.0, "pso.accel_personal: must be >= 0");
  require(s.pso.accel_social >= 0.0, "pso.accel_social: must be >= 0");
  require(s.pso.max_iterations >= 0, "pso.max_iterations: must be >= 0");
  require(s.pso.stall_window >= 1, "pso.stall_window: must be >= 1");
  require(s.pso.stall_rel_tol >= 0.0, "pso.stall_rel_tol: must be >= 0");

  require(s.solver.step_base > 0.0, "solver.step_base: must be > 0");
  require(s.solver.max_iterations >= 1, "solver.max_iterations: must be >= 1");
  require(s.solver.tolerance > 0.0, "solver.tolerance: must be > 0");

  require(s.experiments.replications >= 1, "experiments.replications: must be >= 1");
  for (double r : s.experiments.target_rates_bps) {
    if (r < 0.0) {
      errors.push_back("experiments.target_rates_bps: entries must be >= 0");
      break;
    }
  }
  for (int n : s.experiments.dbs_counts) {
    if (n < 0) {
      errors.push_back("experiments.dbs_counts: entries must be >= 0");
      break;
    }
  }
  return errors;
}

std::vector<Vec3> sample_terminals(RngStream& rng, int count, const Region3D& region) {
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Vec3 p;
    p.x = rng.uniform(region.x_min, region.x_max);
    p.y = rng.uniform(region.y_min, region.y_max);
    p.z = region.z_min;
    out.push_back(p);
  }
  return out;
}

std::vector<Vec3> scenario_terminals(const Scenario& scenario) {
  if (!scenario.terminal_pos.empty()) return scenario.terminal_pos;
  RngStream rng(scenario.rng_seed, "terminals");
  return sample_terminals(rng, scenario.num_terminals, scenario.terminal_region);
}

std::vector<double> resolve_airtime(const Scenario& scenario) {
  double share;
  if (scenario.wifi.airtime_share >= 0.0) {
    share = scenario.wifi.airtime_share;
  } else {
    WifiParams params;
    params.omega = scenario.wifi.omega_slots;
    params.max_stage = scenario.wifi.max_backoff_stage;
    params.num_aps = scenario.wifi.num_aps;
    params.collision_cap = scenario.wifi.collision_cap;
    params.cw_dbs = scenario.wifi.cw_dbs_slots >= 1
                        ? scenario.wifi.cw_dbs_slots
                        : optimize_cw(params.omega, params.max_stage, params.num_aps,
                                      params.collision_cap);
    share = solve_fixed_point(params).airtime;
  }
  return std::vector<double>(static_cast<std::size_t>(scenario.num_dbs), share);
}

std::uint64_t scenario_hash(const Scenario& scenario) {
  const std::string text = config_to_json(scenario);
  std::uint64_t h = 1469598103934665603ull;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace dbsplace
