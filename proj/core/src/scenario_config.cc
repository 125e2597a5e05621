/*
 * Copyright 2026 The agsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "agsim/error.h"
#include "agsim/scenario.h"
#include "json_util.h"

namespace agsim::scenario {
namespace {

using nlohmann::json;

// Strict view of one JSON object at a dotted field path.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) {
      throw ConfigError("field '" + (path_.empty() ? std::string("<root>") : path_) +
                        "' must be an object");
    }
  }

  std::string Path(std::string_view key) const { return internal::FieldPath(path_, key); }
  bool Has(std::string_view key) const { return j_.contains(std::string(key)); }

  void Allow(std::initializer_list<std::string_view> keys) const {
    internal::RejectUnknownFields<ConfigError>(j_, keys, path_);
  }

  const json& Raw(std::string_view key) const {
    return internal::RequireField<ConfigError>(j_, key, path_);
  }

  double Number(std::string_view key) const {
    const double v = internal::AsNumber<ConfigError>(Raw(key), Path(key));
    if (!std::isfinite(v)) throw ConfigError("field '" + Path(key) + "' must be finite");
    return v;
  }
  double Number(std::string_view key, double fallback) const {
    return Has(key) ? Number(key) : fallback;
  }
  double Positive(std::string_view key, double fallback) const {
    const double v = Number(key, fallback);
    if (!(v > 0.0)) throw ConfigError("field '" + Path(key) + "' must be > 0");
    return v;
  }

  int Int(std::string_view key, int fallback) const {
    if (!Has(key)) return fallback;
    const json& v = Raw(key);
    if (!v.is_number_integer()) throw ConfigError("field '" + Path(key) + "' must be an integer");
    return v.get<int>();
  }

  bool Bool(std::string_view key, bool fallback) const {
    if (!Has(key)) return fallback;
    const json& v = Raw(key);
    if (!v.is_boolean()) throw ConfigError("field '" + Path(key) + "' must be a boolean");
    return v.get<bool>();
  }

  std::string String(std::string_view key) const {
    return internal::AsString<ConfigError>(Raw(key), Path(key));
  }

  Vec3 Point(std::string_view key) const { return ParsePoint(Raw(key), Path(key)); }
  Vec3 Point(std::string_view key, const Vec3& fallback) const {
    return Has(key) ? Point(key) : fallback;
  }

  std::vector<Vec3> Points(std::string_view key) const {
    const json& v = Raw(key);
    if (!v.is_array() || v.empty()) {
      throw ConfigError("field '" + Path(key) + "' must be a nonempty array of points");
    }
    std::vector<Vec3> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(ParsePoint(v[i], Path(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  Fields Object(std::string_view key) const { return Fields(Raw(key), Path(key)); }

  // [n, e] (d = 0) or [n, e, d].
  static Vec3 ParsePoint(const json& v, const std::string& path) {
    if (!v.is_array() || (v.size() != 2 && v.size() != 3)) {
      throw ConfigError("field '" + path + "' must be [n, e] or [n, e, d]");
    }
    Vec3 p;
    p.n = internal::AsNumber<ConfigError>(v[0], path);
    p.e = internal::AsNumber<ConfigError>(v[1], path);
    if (v.size() == 3) p.d = internal::AsNumber<ConfigError>(v[2], path);
    if (!p.IsFinite()) throw ConfigError("field '" + path + "' must be finite");
    return p;
  }

 private:
  const json& j_;
  std::string path_;
};

RigidTransform ParseTransform(const Fields& f) {
  f.Allow({"position", "ypr_deg"});
  RigidTransform t;
  t.translation = f.Point("position", {});
  if (f.Has("ypr_deg")) {
    const Vec3 ypr = f.Point("ypr_deg");
    t.rotation =
        Quaternion::FromYawPitchRoll(DegToRad(ypr.n), DegToRad(ypr.e), DegToRad(ypr.d));
  }
  return t;
}

sensors::LidarConfig ParseLidar(const Fields& f, int* period) {
  f.Allow({"channels", "vfov_min_deg", "vfov_max_deg", "hfov_deg", "points_per_channel",
           "max_range", "noise_sigma", "period_ticks", "mount"});
  sensors::LidarConfig c;
  c.channels = f.Int("channels", c.channels);
  c.vfov_min_deg = f.Number("vfov_min_deg", c.vfov_min_deg);
  c.vfov_max_deg = f.Number("vfov_max_deg", c.vfov_max_deg);
  c.hfov_deg = f.Number("hfov_deg", c.hfov_deg);
  c.points_per_channel = f.Int("points_per_channel", c.points_per_channel);
  c.max_range = f.Number("max_range", c.max_range);
  c.noise_sigma = f.Number("noise_sigma", c.noise_sigma);
  if (f.Has("mount")) c.mount = ParseTransform(f.Object("mount"));
  *period = f.Int("period_ticks", 1);
  return c;
}

sensors::DepthConfig ParseDepth(const Fields& f, int* period) {
  f.Allow({"width", "height", "hfov_deg", "max_range", "period_ticks", "mount"});
  sensors::DepthConfig c;
  c.width = f.Int("width", c.width);
  c.height = f.Int("height", c.height);
  c.hfov_deg = f.Number("hfov_deg", c.hfov_deg);
  c.max_range = f.Number("max_range", c.max_range);
  if (f.Has("mount")) c.mount = ParseTransform(f.Object("mount"));
  if (period != nullptr) *period = f.Int("period_ticks", 1);
  return c;
}

template <typename Fn>
void Checked(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    throw ConfigError("field '" + path + "': " + e.what());
  }
}

VehicleSpec ParseVehicle(const Fields& f) {
  f.Allow({"id", "type", "position", "yaw_deg", "sensors"});
  VehicleSpec v;
  v.id = f.String("id");
  if (v.id.empty()) throw ConfigError("field '" + f.Path("id") + "' must be nonempty");
  const std::string type = f.String("type");
  const auto parsed = ParseVehicleType(type);
  if (!parsed) {
    throw ConfigError("field '" + f.Path("type") + "' must be \"multirotor\" or \"car\", got '" +
                      type + "'");
  }
  v.type = *parsed;
  v.initial.position = f.Point("position");
  v.initial.orientation = Quaternion::FromYaw(DegToRad(f.Number("yaw_deg", 0.0)));
  if (f.Has("sensors")) {
    const Fields s = f.Object("sensors");
    s.Allow({"lidar", "depth"});
    if (s.Has("lidar")) v.sensors.lidar = ParseLidar(s.Object("lidar"), &v.sensors.lidar_period_ticks);
    if (s.Has("depth")) v.sensors.depth = ParseDepth(s.Object("depth"), &v.sensors.depth_period_ticks);
    Checked(f.Path("sensors"), [&] { sim::Validate(v.sensors); });
  }
  return v;
}

registration::IcpParams ParseIcp(const Fields& f) {
  f.Allow({"max_iterations", "correspondence_max_dist", "convergence_eps", "min_pairs"});
  registration::IcpParams p;
  p.max_iterations = f.Int("max_iterations", p.max_iterations);
  p.correspondence_max_dist = f.Number("correspondence_max_dist", p.correspondence_max_dist);
  p.convergence_eps = f.Number("convergence_eps", p.convergence_eps);
  p.min_pairs = f.Int("min_pairs", p.min_pairs);
  Checked(f.Path(""), [&] { registration::Validate(p); });
  return p;
}

MappingTask ParseMapping(const Fields& f) {
  f.Allow({"kind", "uav", "ugv", "uav_route", "uav_speed", "ugv_route", "ugv_speed", "voxel",
           "uav_map_offset", "icp"});
  MappingTask t;
  t.uav_id = f.String("uav");
  t.ugv_id = f.String("ugv");
  t.uav_route = f.Points("uav_route");
  t.uav_speed = f.Positive("uav_speed", t.uav_speed);
  t.ugv_route = f.Points("ugv_route");
  t.ugv_speed = f.Positive("ugv_speed", t.ugv_speed);
  t.voxel = f.Positive("voxel", t.voxel);
  if (f.Has("uav_map_offset")) t.uav_map_offset = ParseTransform(f.Object("uav_map_offset"));
  if (f.Has("icp")) t.icp = ParseIcp(f.Object("icp"));
  return t;
}

PlanningTask ParsePlanning(const Fields& f) {
  f.Allow({"kind", "uav", "ugv", "survey_route", "survey_altitude", "survey_speed",
           "capture_period_s", "camera", "grid", "height_threshold", "inflation", "goal",
           "pure_pursuit", "replan_after_s", "max_replans", "escort_altitude"});
  PlanningTask t;
  t.uav_id = f.String("uav");
  t.ugv_id = f.String("ugv");
  t.survey_route = f.Points("survey_route");
  t.survey_altitude = f.Positive("survey_altitude", t.survey_altitude);
  t.survey_speed = f.Positive("survey_speed", t.survey_speed);
  t.capture_period_s = f.Positive("capture_period_s", t.capture_period_s);
  // Nadir camera by default: optical axis pitched straight down.
  t.camera.mount.rotation = Quaternion::FromYawPitchRoll(0.0, -kPi / 2.0, 0.0);
  if (f.Has("camera")) {
    const Fields c = f.Object("camera");
    const RigidTransform nadir = t.camera.mount;
    t.camera = ParseDepth(c, nullptr);
    if (c.Has("period_ticks")) throw ConfigError("field '" + c.Path("period_ticks") + "' is not used here");
    if (!c.Has("mount")) t.camera.mount = nadir;
    Checked(f.Path("camera"), [&] { sensors::Validate(t.camera); });
  }
  const Fields g = f.Object("grid");
  g.Allow({"origin", "resolution", "rows", "cols"});
  const Vec3 origin = g.Point("origin", {});
  t.grid = {origin.n, origin.e, g.Positive("resolution", 0.5), g.Int("rows", 0), g.Int("cols", 0)};
  Checked(f.Path("grid"), [&] { planning::Validate(t.grid); });
  t.height_threshold = f.Positive("height_threshold", t.height_threshold);
  t.inflation = f.Number("inflation", t.inflation);
  if (t.inflation < 0.0) throw ConfigError("field '" + f.Path("inflation") + "' must be >= 0");
  t.goal = f.Point("goal");
  if (f.Has("pure_pursuit")) {
    const Fields p = f.Object("pure_pursuit");
    p.Allow({"lookahead", "waypoint_capture", "cruise_speed"});
    t.pursuit.lookahead = p.Positive("lookahead", t.pursuit.lookahead);
    t.pursuit.waypoint_capture = p.Positive("waypoint_capture", t.pursuit.waypoint_capture);
    t.pursuit.cruise_speed = p.Positive("cruise_speed", t.pursuit.cruise_speed);
  }
  t.replan_after_s = f.Positive("replan_after_s", t.replan_after_s);
  t.max_replans = f.Int("max_replans", t.max_replans);
  t.escort_altitude = f.Positive("escort_altitude", t.escort_altitude);
  return t;
}

tracking::StandoffParams ParseStandoff(const Fields& f, tracking::StandoffParams p) {
  f.Allow({"desired_distance", "gain", "observer_altitude"});
  p.desired_distance = f.Positive("desired_distance", p.desired_distance);
  p.gain = f.Positive("gain", p.gain);
  if (f.Has("observer_altitude")) p.observer_altitude = f.Number("observer_altitude");
  return p;
}

TrackingTask ParseTracking(const Fields& f) {
  f.Allow({"kind", "uav", "ugv", "target", "uav_standoff", "ugv_standoff", "target_height",
           "ugv_sensor_height", "yaw_settle_s", "steady_fraction"});
  TrackingTask t;
  t.uav_id = f.String("uav");
  t.ugv_id = f.String("ugv");
  const Fields target = f.Object("target");
  target.Allow({"waypoints", "speed", "loop"});
  t.target.waypoints = target.Points("waypoints");
  t.target.speed = target.Positive("speed", t.target.speed);
  t.target.loop = target.Bool("loop", false);
  Checked(f.Path("target"), [&] { tracking::Validate(t.target); });
  if (f.Has("uav_standoff")) t.uav = ParseStandoff(f.Object("uav_standoff"), t.uav);
  if (f.Has("ugv_standoff")) t.ugv = ParseStandoff(f.Object("ugv_standoff"), t.ugv);
  t.target_height = f.Number("target_height", t.target_height);
  t.ugv_sensor_height = f.Number("ugv_sensor_height", t.ugv_sensor_height);
  t.yaw_settle_s = f.Number("yaw_settle_s", t.yaw_settle_s);
  t.steady_fraction = f.Positive("steady_fraction", t.steady_fraction);
  if (t.steady_fraction > 1.0) {
    throw ConfigError("field '" + f.Path("steady_fraction") + "' must be in (0, 1]");
  }
  return t;
}

std::vector<std::string> ParseIds(const Fields& f, std::string_view key) {
  const json& v = f.Raw(key);
  if (!v.is_array()) throw ConfigError("field '" + f.Path(key) + "' must be an array of ids");
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < v.size(); ++i) {
    ids.push_back(internal::AsString<ConfigError>(v[i], f.Path(key) + "[" + std::to_string(i) + "]"));
  }
  return ids;
}

FormationTask ParseFormation(const Fields& f) {
  f.Allow({"kind", "ugvs", "uavs", "circle", "square"});
  FormationTask t;
  t.ugv_ids = ParseIds(f, "ugvs");
  t.uav_ids = ParseIds(f, "uavs");
  const Fields c = f.Object("circle");
  c.Allow({"center", "radius", "angular_speed"});
  t.spec.ugv.center = c.Point("center");
  t.spec.ugv.radius = c.Positive("radius", t.spec.ugv.radius);
  t.spec.ugv.angular_speed = c.Number("angular_speed", t.spec.ugv.angular_speed);
  const Fields s = f.Object("square");
  s.Allow({"center", "side", "altitude", "speed"});
  t.spec.uav.center = s.Point("center");
  t.spec.uav.side = s.Positive("side", t.spec.uav.side);
  t.spec.uav.altitude = s.Number("altitude", t.spec.uav.altitude);
  t.spec.uav.speed = s.Positive("speed", t.spec.uav.speed);
  t.spec.ugv_count = static_cast<int>(t.ugv_ids.size());
  t.spec.uav_count = static_cast<int>(t.uav_ids.size());
  Checked(f.Path(""), [&] { tracking::Validate(t.spec); });
  return t;
}

void RequireVehicle(const ScenarioConfig& c, const std::string& id, VehicleType type,
                    const std::string& field) {
  for (const auto& v : c.vehicles) {
    if (v.id != id) continue;
    if (v.type != type) {
      throw ConfigError("field '" + field + "': vehicle '" + id + "' must be a " +
                        std::string(VehicleTypeName(type)));
    }
    return;
  }
  throw ConfigError("field '" + field + "': no vehicle with id '" + id + "'");
}

}  // namespace

std::string_view TaskKindName(TaskKind kind) {
  switch (kind) {
    case TaskKind::kNone:
      return "none";
    case TaskKind::kMapping:
      return "mapping";
    case TaskKind::kPlanning:
      return "planning";
    case TaskKind::kTracking:
      return "tracking";
    case TaskKind::kFormation:
      return "formation";
  }
  return "none";
}

std::string ReportFileName(TaskKind kind) {
  if (kind == TaskKind::kNone) return "run_report.json";
  return std::string(TaskKindName(kind)) + "_report.json";
}

ScenarioConfig ParseScenario(std::string_view json_text, const std::filesystem::path& base_dir) {
  const json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded()) throw ConfigError("config is not valid JSON");
  const Fields f(root, "");
  f.Allow({"scene", "sim", "vehicle_params", "vehicles", "task", "outputs"});

  ScenarioConfig c;
  c.scene_path = base_dir / f.String("scene");

  const Fields s = f.Object("sim");
  s.Allow({"dt", "duration", "seed", "realtime_factor"});
  c.sim.dt = s.Positive("dt", c.sim.dt);
  c.sim.duration = s.Positive("duration", c.sim.duration);
  if (s.Has("seed")) {
    const json& seed = s.Raw("seed");
    if (!seed.is_number_unsigned()) {
      throw ConfigError("field 'sim.seed' must be an unsigned integer");
    }
    c.sim.seed = seed.get<std::uint64_t>();
  }
  c.sim.realtime_factor = s.Number("realtime_factor", 0.0);
  Checked("sim", [&] { sim::Validate(c.sim); });

  if (f.Has("vehicle_params")) {
    const Fields vp = f.Object("vehicle_params");
    vp.Allow({"car", "uav"});
    if (vp.Has("car")) {
      const Fields car = vp.Object("car");
      car.Allow({"wheelbase", "max_speed", "max_steer", "max_step", "clearance"});
      CarParams& p = c.vehicle_params.car;
      p.wheelbase = car.Positive("wheelbase", p.wheelbase);
      p.max_speed = car.Positive("max_speed", p.max_speed);
      p.max_steer = car.Positive("max_steer", p.max_steer);
      p.max_step = car.Positive("max_step", p.max_step);
      p.clearance = car.Positive("clearance", p.clearance);
    }
    if (vp.Has("uav")) {
      const Fields uav = vp.Object("uav");
      uav.Allow({"tau", "max_speed", "max_climb", "capture_radius"});
      UavParams& p = c.vehicle_params.uav;
      p.tau = uav.Positive("tau", p.tau);
      p.max_speed = uav.Positive("max_speed", p.max_speed);
      p.max_climb = uav.Positive("max_climb", p.max_climb);
      p.capture_radius = uav.Positive("capture_radius", p.capture_radius);
    }
  }

  const json& vehicles = f.Raw("vehicles");
  if (!vehicles.is_array()) throw ConfigError("field 'vehicles' must be an array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const std::string path = "vehicles[" + std::to_string(i) + "]";
    VehicleSpec v = ParseVehicle(Fields(vehicles[i], path));
    if (!seen.insert(v.id).second) {
      throw ConfigError("field '" + path + ".id': duplicate vehicle id '" + v.id + "'");
    }
    c.vehicles.push_back(std::move(v));
  }

  if (f.Has("task")) {
    const Fields t = f.Object("task");
    const std::string kind = t.String("kind");
    if (kind == "none") {
      t.Allow({"kind"});
      c.task = TaskKind::kNone;
    } else if (kind == "mapping") {
      c.task = TaskKind::kMapping;
      c.mapping = ParseMapping(t);
      RequireVehicle(c, c.mapping.uav_id, VehicleType::kMultirotor, "task.uav");
      RequireVehicle(c, c.mapping.ugv_id, VehicleType::kCar, "task.ugv");
      for (const auto& v : c.vehicles) {
        if ((v.id == c.mapping.uav_id || v.id == c.mapping.ugv_id) && !v.sensors.lidar) {
          throw ConfigError("field 'vehicles': mapping vehicle '" + v.id + "' needs a lidar");
        }
      }
    } else if (kind == "planning") {
      c.task = TaskKind::kPlanning;
      c.planning = ParsePlanning(t);
      RequireVehicle(c, c.planning.uav_id, VehicleType::kMultirotor, "task.uav");
      RequireVehicle(c, c.planning.ugv_id, VehicleType::kCar, "task.ugv");
    } else if (kind == "tracking") {
      c.task = TaskKind::kTracking;
      c.tracking = ParseTracking(t);
      RequireVehicle(c, c.tracking.uav_id, VehicleType::kMultirotor, "task.uav");
      RequireVehicle(c, c.tracking.ugv_id, VehicleType::kCar, "task.ugv");
    } else if (kind == "formation") {
      c.task = TaskKind::kFormation;
      c.formation = ParseFormation(t);
      for (std::size_t i = 0; i < c.formation.ugv_ids.size(); ++i) {
        RequireVehicle(c, c.formation.ugv_ids[i], VehicleType::kCar,
                       "task.ugvs[" + std::to_string(i) + "]");
      }
      for (std::size_t i = 0; i < c.formation.uav_ids.size(); ++i) {
        RequireVehicle(c, c.formation.uav_ids[i], VehicleType::kMultirotor,
                       "task.uavs[" + std::to_string(i) + "]");
      }
    } else {
      throw ConfigError("field 'task.kind' must be one of none, mapping, planning, tracking, "
                        "formation; got '" + kind + "'");
    }
  }
  if (f.Has("outputs")) c.outputs = base_dir / f.String("outputs");
  return c;
}

ScenarioConfig LoadScenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::stringstream text;
  text << in.rdbuf();
  return ParseScenario(text.str(), path.parent_path());
}

std::shared_ptr<const world::Scene> LoadScenarioScene(const ScenarioConfig& config) {
  try {
    return std::make_shared<const world::Scene>(world::LoadScene(config.scene_path));
  } catch (const Error& e) {
    throw ConfigError(std::string("field 'scene': ") + e.what());
  }
}

std::unique_ptr<sim::Simulation> BuildSimulation(const ScenarioConfig& config,
                                                 std::shared_ptr<const world::Scene> scene) {
  std::unique_ptr<sim::Simulation> sim;
  Checked("vehicle_params", [&] {
    sim = std::make_unique<sim::Simulation>(std::move(scene), config.sim, config.vehicle_params);
  });
  for (std::size_t i = 0; i < config.vehicles.size(); ++i) {
    const auto& v = config.vehicles[i];
    Checked("vehicles[" + std::to_string(i) + "]",
            [&] { sim->RegisterVehicle(v.id, v.type, v.initial, v.sensors); });
  }
  return sim;
}

}  // namespace agsim::scenario
