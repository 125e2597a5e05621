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

#include <map>

#include "agsim/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace agsim::rpc {
namespace {

using nlohmann::json;

class DispatcherTest : public ::testing::Test {
 protected:
  DispatcherTest() : sim_(testing::OpenScene(), Config()), dispatcher_(&sim_) {
    sim::SensorSuiteConfig lidar;
    sensors::LidarConfig cfg;
    cfg.channels = 2;
    cfg.points_per_channel = 8;
    cfg.vfov_min_deg = -20;
    cfg.vfov_max_deg = -10;
    lidar.lidar = cfg;
    sim_.RegisterVehicle("ugv1", VehicleType::kCar, {}, lidar);
    sim_.RegisterVehicle("uav1", VehicleType::kMultirotor, {{0, 0, -10}, {}});
  }

  static sim::SimConfig Config() {
    sim::SimConfig c;
    c.duration = 10.0;
    return c;
  }

  Response Call(PortKind port, const std::string& type, const std::string& id,
                const std::string& method, json params = json::object()) {
    return dispatcher_.Handle({++next_id_, type, id, method, std::move(params)}, port);
  }

  sim::Simulation sim_;
  Dispatcher dispatcher_;
  std::uint64_t next_id_ = 0;
};

TEST_F(DispatcherTest, TypeMismatchOnWrongPort) {
  const Response r = Call(PortKind::kCar, "multirotor", "uav1", "get_state");
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.error_code, codes::kVehicleTypeMismatch);
  EXPECT_EQ(r.id, next_id_);
}

TEST_F(DispatcherTest, VehicleOfOtherTypeOnPort) {
  const Response r = Call(PortKind::kCar, "car", "uav1", "get_state");
  EXPECT_EQ(r.error_code, codes::kVehicleTypeMismatch);
}

TEST_F(DispatcherTest, UnknownVehicle) {
  EXPECT_EQ(Call(PortKind::kCar, "car", "ugv9", "get_odometry").error_code, codes::kUnknownVehicle);
  EXPECT_EQ(Call(PortKind::kCar, "car", "", "get_odometry").error_code, codes::kUnknownVehicle);
}

TEST_F(DispatcherTest, UnknownMethod) {
  EXPECT_EQ(Call(PortKind::kCar, "car", "ugv1", "fly_away").error_code, codes::kUnknownMethod);
  EXPECT_EQ(Call(PortKind::kWorld, "world", "", "get_state").error_code, codes::kUnknownMethod);
}

TEST_F(DispatcherTest, OdometryHappyPath) {
  const Response r = Call(PortKind::kCar, "car", "ugv1", "get_odometry");
  ASSERT_TRUE(r.ok) << r.message;
  EXPECT_EQ(r.payload["vehicle_id"], "ugv1");
  EXPECT_EQ(r.payload["velocity"], json::array({0.0, 0.0, 0.0}));
  EXPECT_EQ(r.payload["stamp"]["tick"], 0);
}

TEST_F(DispatcherTest, SensorsAndNoSuchSensor) {
  const Response lidar = Call(PortKind::kCar, "car", "ugv1", "get_lidar");
  ASSERT_TRUE(lidar.ok) << lidar.message;
  EXPECT_FALSE(lidar.payload["points"].empty());
  EXPECT_EQ(Call(PortKind::kMultirotor, "multirotor", "uav1", "get_lidar").error_code,
            codes::kNoSuchSensor);
  EXPECT_EQ(Call(PortKind::kMultirotor, "multirotor", "uav1", "get_depth").error_code,
            codes::kNoSuchSensor);
}

TEST_F(DispatcherTest, SendCommandReachesMailbox) {
  const Response r = Call(PortKind::kMultirotor, "multirotor", "uav1", "send_command",
                          {{"mode", "velocity"}, {"velocity", {1.0, 0.0, 0.0}}});
  ASSERT_TRUE(r.ok) << r.message;
  EXPECT_EQ(r.payload["accepted"], true);
  sim_.Step();
  EXPECT_GT(sim_.Vehicle("uav1")->State().velocity.n, 0.0);
  const Response car = Call(PortKind::kCar, "car", "ugv1", "send_command",
                            {{"mode", "drive"}, {"speed", 1.0}, {"steer", 0.1}});
  EXPECT_TRUE(car.ok) << car.message;
}

TEST_F(DispatcherTest, InvalidCommandParams) {
  EXPECT_EQ(Call(PortKind::kCar, "car", "ugv1", "send_command", {{"mode", "hover"}}).error_code,
            codes::kInvalidParams);
  EXPECT_EQ(Call(PortKind::kCar, "car", "ugv1", "send_command",
                 {{"mode", "drive"}, {"speed", 1.0}, {"turbo", true}})
                .error_code,
            codes::kInvalidParams);
  EXPECT_EQ(Call(PortKind::kCar, "car", "ugv1", "send_command", {{"mode", "drive"}, {"steer", 3.0}})
                .error_code,
            codes::kInvalidParams);
  EXPECT_EQ(Call(PortKind::kMultirotor, "multirotor", "uav1", "send_command", {{"mode", "waypoint"}})
                .error_code,
            codes::kInvalidParams);
}

TEST_F(DispatcherTest, EndpointMethods) {
  for (const auto& [port, name] : {std::pair{PortKind::kMultirotor, "multirotor"},
                                   std::pair{PortKind::kCar, "car"},
                                   std::pair{PortKind::kWorld, "world"}}) {
    const Response ping = Call(port, name, "", "ping");
    ASSERT_TRUE(ping.ok);
    EXPECT_EQ(ping.payload["port"], name);
  }
  const Response list = Call(PortKind::kWorld, "world", "", "list_vehicles");
  ASSERT_TRUE(list.ok);
  EXPECT_EQ(list.payload["vehicles"].size(), 2u);
  sim_.Step();
  EXPECT_EQ(Call(PortKind::kWorld, "world", "", "get_sim_time").payload["tick"], 1);
  EXPECT_EQ(Call(PortKind::kWorld, "world", "", "get_target_truth").error_code, codes::kNoTarget);
  sim_.SetTarget({{{0, 0, 0}, {10, 0, 0}}, 1.0, false});
  sim_.Step();
  const Response truth = Call(PortKind::kWorld, "world", "", "get_target_truth");
  ASSERT_TRUE(truth.ok) << truth.message;
  EXPECT_EQ(truth.payload["stamp"]["tick"], 2);
}

TEST_F(DispatcherTest, HandleBodyReportsDecodeErrors) {
  const Response malformed = DecodeResponse(dispatcher_.HandleBody("{oops", PortKind::kCar).substr(4));
  EXPECT_EQ(malformed.error_code, codes::kMalformedJson);
  const Response missing = DecodeResponse(
      dispatcher_.HandleBody(R"({"id":7,"vehicle_type":"car","vehicle_id":""})", PortKind::kCar).substr(4));
  EXPECT_EQ(missing.error_code, codes::kMissingField);
  EXPECT_EQ(missing.id, 7u);
}

// Snapshot coherence: reads for different vehicles within one tick share a stamp.
TEST_F(DispatcherTest, CoherentStamps) {
  for (int i = 0; i < 5; ++i) sim_.Step();
  const Response a = Call(PortKind::kCar, "car", "ugv1", "get_state");
  const Response b = Call(PortKind::kMultirotor, "multirotor", "uav1", "get_state");
  EXPECT_EQ(a.payload["stamp"], b.payload["stamp"]);
}

// Property: acceptance matches the routing oracle on random requests, and
// every ok payload is nonempty.
TEST_F(DispatcherTest, RoutingFuzz) {
  const std::map<std::string, std::string> registry = {{"ugv1", "car"}, {"uav1", "multirotor"}};
  const char* types[] = {"multirotor", "car", "world", "boat", ""};
  const char* ids[] = {"ugv1", "uav1", "ugv9", "", "UGV1"};
  const char* methods[] = {"ping", "get_state", "get_odometry", "list_vehicles", "get_sim_time", "nope"};
  const PortKind ports[] = {PortKind::kMultirotor, PortKind::kCar, PortKind::kWorld};
  Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    const PortKind port = ports[static_cast<int>(rng.Uniform() * 3)];
    const std::string type = rng.Uniform() < 0.5 ? std::string(PortKindName(port))
                                                  : types[static_cast<int>(rng.Uniform() * 5)];
    const std::string id = ids[static_cast<int>(rng.Uniform() * 5)];
    const std::string method = methods[static_cast<int>(rng.Uniform() * 6)];
    const Response r = Call(port, type, id, method);
    const bool expected =
        testing::RoutingShouldAccept(registry, std::string(PortKindName(port)), type, id, method);
    ASSERT_EQ(r.ok, expected) << PortKindName(port) << " " << type << " " << id << " " << method
                              << ": " << r.error_code;
    if (r.ok) {
      EXPECT_FALSE(r.payload.is_null() || r.payload.empty());
    }
    if (r.ok && (method == "get_state" || method == "get_odometry")) {
      EXPECT_EQ(r.payload.value("vehicle_id", ""), id);
    }
  }
}

TEST(ParseCommandTest, Defaults) {
  const VehicleCommand cmd = ParseCommand({{"mode", "waypoint"}, {"waypoint", {1, 2, -3}}},
                                          VehicleType::kMultirotor);
  const auto& uav = std::get<UavCommand>(cmd);
  EXPECT_EQ(uav.mode, UavCommand::Mode::kWaypoint);
  EXPECT_EQ(uav.waypoint, (Vec3{1, 2, -3}));
  EXPECT_DOUBLE_EQ(uav.speed_limit, 5.0);
  EXPECT_THROW(ParseCommand(json::array(), VehicleType::kCar), ValidationError);
}

}  // namespace
}  // namespace agsim::rpc
