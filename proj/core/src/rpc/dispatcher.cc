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

#include "agsim/rpc/dispatcher.h"

#include <algorithm>
#include <cmath>

#include "agsim/error.h"
#include "json_util.h"

namespace agsim::rpc {
namespace {

using nlohmann::json;
using internal::Vec3Json;

bool Contains(std::span<const std::string_view> names, std::string_view name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

json QuaternionJson(const Quaternion& q) { return json::array({q.w, q.x, q.y, q.z}); }

json PoseJson(const NedPose& pose) {
  return {{"position", Vec3Json(pose.position)}, {"orientation", QuaternionJson(pose.orientation)}};
}

std::optional<VehicleType> PortVehicleType(PortKind port) {
  if (port == PortKind::kMultirotor) return VehicleType::kMultirotor;
  if (port == PortKind::kCar) return VehicleType::kCar;
  return std::nullopt;
}

std::uint64_t TryReadId(std::string_view body) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_object()) {
    const auto it = j.find("id");
    if (it != j.end() && it->is_number_unsigned()) return it->get<std::uint64_t>();
  }
  return 0;
}

}  // namespace

json StampJson(const SimTime& t) {
  return {{"tick", t.tick}, {"seconds", t.seconds()}, {"dt", t.dt}};
}

json StateJson(const VehicleState& s) {
  return {{"vehicle_id", s.id},
          {"type", std::string(VehicleTypeName(s.vtype))},
          {"stamp", StampJson(s.stamp)},
          {"position", Vec3Json(s.pose.position)},
          {"orientation", QuaternionJson(s.pose.orientation)},
          {"yaw", s.pose.Yaw()},
          {"velocity", Vec3Json(s.velocity)},
          {"yaw_rate", s.yaw_rate}};
}

json OdometryJson(const sensors::Odometry& o) {
  return {{"vehicle_id", o.vehicle_id},
          {"stamp", StampJson(o.stamp)},
          {"position", Vec3Json(o.pose.position)},
          {"orientation", QuaternionJson(o.pose.orientation)},
          {"velocity", Vec3Json(o.velocity)}};
}

json LidarJson(const sim::LidarFrame& frame) {
  json points = json::array();
  for (const auto& p : frame.cloud.points) points.push_back(Vec3Json(p));
  return {{"frame_id", frame.cloud.frame_id},
          {"stamp", StampJson(frame.cloud.stamp)},
          {"sensor_pose", PoseJson(frame.sensor_pose)},
          {"points", std::move(points)}};
}

json DepthJson(const sensors::DepthGrid& grid) {
  json ranges = json::array();
  for (const double r : grid.ranges) {
    if (std::isfinite(r)) {
      ranges.push_back(r);
    } else {
      ranges.push_back(nullptr);
    }
  }
  return {{"stamp", StampJson(grid.stamp)},     {"width", grid.width},
          {"height", grid.height},              {"hfov_deg", grid.hfov_deg},
          {"max_range", grid.max_range},        {"ranges", std::move(ranges)},
          {"mount", PoseJson(grid.mount.ToPose())}};
}

VehicleCommand ParseCommand(const json& params, VehicleType type) {
  using internal::AsString;
  using internal::AsVec3;
  using internal::NumberOr;
  using internal::RejectUnknownFields;
  using internal::RequireField;
  using internal::RequireObject;
  RequireObject<ValidationError>(params, "params");
  const std::string mode =
      AsString<ValidationError>(RequireField<ValidationError>(params, "mode", "params"), "params.mode");
  if (type == VehicleType::kMultirotor) {
    const double yaw = NumberOr<ValidationError>(params, "yaw", 0.0, "params");
    const double limit = NumberOr<ValidationError>(params, "speed_limit", 5.0, "params");
    if (mode == "velocity") {
      RejectUnknownFields<ValidationError>(params, {"mode", "velocity", "yaw", "speed_limit"}, "params");
      return UavCommand::Velocity(
          AsVec3<ValidationError>(RequireField<ValidationError>(params, "velocity", "params"),
                                  "params.velocity"),
          yaw, limit);
    }
    if (mode == "waypoint") {
      RejectUnknownFields<ValidationError>(params, {"mode", "waypoint", "yaw", "speed_limit"}, "params");
      return UavCommand::Waypoint(
          AsVec3<ValidationError>(RequireField<ValidationError>(params, "waypoint", "params"),
                                  "params.waypoint"),
          yaw, limit);
    }
    throw ValidationError("params.mode must be \"velocity\" or \"waypoint\" for a multirotor");
  }
  if (mode == "drive") {
    RejectUnknownFields<ValidationError>(params, {"mode", "speed", "steer"}, "params");
    return CarCommand::Drive(NumberOr<ValidationError>(params, "speed", 0.0, "params"),
                             NumberOr<ValidationError>(params, "steer", 0.0, "params"));
  }
  if (mode == "waypoint") {
    RejectUnknownFields<ValidationError>(params, {"mode", "waypoint", "speed"}, "params");
    return CarCommand::Waypoint(
        AsVec3<ValidationError>(RequireField<ValidationError>(params, "waypoint", "params"),
                                "params.waypoint"),
        NumberOr<ValidationError>(params, "speed", 2.0, "params"));
  }
  throw ValidationError("params.mode must be \"drive\" or \"waypoint\" for a car");
}

Response Dispatcher::Handle(const Envelope& env, PortKind port) const {
  if (env.vehicle_type != PortKindName(port)) {
    return Response::Fail(env.id, codes::kVehicleTypeMismatch,
                          "envelope type '" + env.vehicle_type + "' arrived on the " +
                              std::string(PortKindName(port)) + " port");
  }
  const bool endpoint_method = Contains(kEndpointMethods, env.method);
  const bool vehicle_method = port != PortKind::kWorld && Contains(kVehicleMethods, env.method);
  if (!endpoint_method && !vehicle_method) {
    return Response::Fail(env.id, codes::kUnknownMethod,
                          "method '" + env.method + "' is not served on the " +
                              std::string(PortKindName(port)) + " port");
  }
  std::optional<sim::VehicleInfo> info;
  if (!env.vehicle_id.empty()) {
    const auto port_type = PortVehicleType(port);
    info = port_type ? sim_->Info(env.vehicle_id) : std::nullopt;
    if (!info) {
      return Response::Fail(env.id, codes::kUnknownVehicle,
                            "no vehicle '" + env.vehicle_id + "' on the " +
                                std::string(PortKindName(port)) + " port");
    }
    if (info->type != *port_type) {
      return Response::Fail(env.id, codes::kVehicleTypeMismatch,
                            "vehicle '" + env.vehicle_id + "' is a " +
                                std::string(VehicleTypeName(info->type)));
    }
  }
  try {
    if (vehicle_method) {
      if (!info) {
        return Response::Fail(env.id, codes::kUnknownVehicle,
                              "method '" + env.method + "' needs a vehicle_id");
      }
      return HandleVehicle(env, *info);
    }
    return HandleEndpoint(env, port);
  } catch (const NoSuchSensor& e) {
    return Response::Fail(env.id, codes::kNoSuchSensor, e.what());
  } catch (const ValidationError& e) {
    return Response::Fail(env.id, codes::kInvalidParams, e.what());
  }
}

Response Dispatcher::HandleVehicle(const Envelope& env, const sim::VehicleInfo& info) const {
  const auto snapshot = sim_->Latest();
  const auto it = snapshot->vehicles.find(info.id);
  if (it == snapshot->vehicles.end()) {
    return Response::Fail(env.id, codes::kUnknownVehicle, "vehicle '" + info.id + "' not yet live");
  }
  const sim::VehicleSnapshot& v = it->second;
  if (env.method == "get_state") return Response::Ok(env.id, StateJson(v.state));
  if (env.method == "get_odometry") {
    return Response::Ok(env.id,
                        OdometryJson({v.state.id, v.state.stamp, v.state.pose, v.state.velocity}));
  }
  if (env.method == "get_lidar") {
    if (!v.lidar) throw NoSuchSensor("vehicle '" + info.id + "' has no lidar");
    return Response::Ok(env.id, LidarJson(*v.lidar));
  }
  if (env.method == "get_depth") {
    if (!v.depth) throw NoSuchSensor("vehicle '" + info.id + "' has no depth camera");
    return Response::Ok(env.id, DepthJson(*v.depth));
  }
  // send_command
  const VehicleCommand cmd = ParseCommand(env.params, info.type);
  try {
    const SimTime accepted = sim_->Submit(info.id, cmd);
    return Response::Ok(env.id, {{"accepted", true}, {"tick", accepted.tick}});
  } catch (const TypeMismatch& e) {
    return Response::Fail(env.id, codes::kVehicleTypeMismatch, e.what());
  }
}

Response Dispatcher::HandleEndpoint(const Envelope& env, PortKind port) const {
  const auto snapshot = sim_->Latest();
  if (env.method == "ping") {
    return Response::Ok(env.id, {{"pong", true},
                                 {"port", std::string(PortKindName(port))},
                                 {"tick", snapshot->time.tick}});
  }
  if (env.method == "list_vehicles") {
    json list = json::array();
    for (const auto& info : sim_->ListVehicles()) {
      list.push_back({{"id", info.id},
                      {"type", std::string(VehicleTypeName(info.type))},
                      {"lidar", info.has_lidar},
                      {"depth", info.has_depth}});
    }
    return Response::Ok(env.id, {{"vehicles", std::move(list)}});
  }
  if (env.method == "get_sim_time") return Response::Ok(env.id, StampJson(snapshot->time));
  // get_target_truth
  if (!snapshot->target) return Response::Fail(env.id, codes::kNoTarget, "scenario has no target");
  const auto& target = *snapshot->target;
  return Response::Ok(env.id, {{"stamp", StampJson(target.stamp)},
                               {"position", Vec3Json(target.sample.position)},
                               {"velocity", Vec3Json(target.sample.velocity)},
                               {"yaw", target.sample.yaw}});
}

std::string Dispatcher::HandleBody(std::string_view body, PortKind port) const {
  Response response;
  try {
    response = Handle(DecodeEnvelope(body), port);
  } catch (const MissingField& e) {
    response = Response::Fail(TryReadId(body), codes::kMissingField, e.what());
  } catch (const MalformedJson& e) {
    response = Response::Fail(TryReadId(body), codes::kMalformedJson, e.what());
  }
  try {
    return EncodeResponse(response);
  } catch (const FrameTooLarge& e) {
    return EncodeResponse(Response::Fail(response.id, codes::kFrameTooLarge, e.what()));
  }
}

}  // namespace agsim::rpc
