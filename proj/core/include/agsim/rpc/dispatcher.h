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

#ifndef AGSIM_RPC_DISPATCHER_H_
#define AGSIM_RPC_DISPATCHER_H_

#include <string>
#include <string_view>
#include <vector>

#include "agsim/rpc/protocol.h"
#include "agsim/sim.h"

namespace agsim::rpc {

// Methods answered on every port without a vehicle.
inline constexpr std::string_view kEndpointMethods[] = {"ping", "list_vehicles", "get_sim_time",
                                                        "get_target_truth"};
// Methods scoped to one vehicle, served only on that vehicle type's port.
inline constexpr std::string_view kVehicleMethods[] = {"get_state", "get_odometry", "get_lidar",
                                                       "get_depth", "send_command"};

// Routes decoded envelopes to the simulation. Reads only published snapshots
// and writes only to the command mailbox, so any number of threads may call
// Handle concurrently.
class Dispatcher {
 public:
  explicit Dispatcher(sim::Simulation* sim) : sim_(sim) {}

  // Rules, in order: envelope type must equal the port type
  // (VEHICLE_TYPE_MISMATCH); the method must exist on this port
  // (UNKNOWN_METHOD); a vehicle id must be registered (UNKNOWN_VEHICLE) with
  // the port's type (VEHICLE_TYPE_MISMATCH); vehicle methods need an id.
  Response Handle(const Envelope& env, PortKind port) const;

  // Frame body in, encoded response frame out. Decode failures become error
  // responses carrying the id when it could be read.
  std::string HandleBody(std::string_view body, PortKind port) const;

 private:
  Response HandleVehicle(const Envelope& env, const sim::VehicleInfo& info) const;
  Response HandleEndpoint(const Envelope& env, PortKind port) const;

  sim::Simulation* sim_;
};

// Payload builders shared with tests and the conformance vectors.
nlohmann::json StampJson(const SimTime& t);
nlohmann::json StateJson(const VehicleState& s);
nlohmann::json OdometryJson(const sensors::Odometry& o);
nlohmann::json LidarJson(const sim::LidarFrame& frame);
nlohmann::json DepthJson(const sensors::DepthGrid& grid);

// Parses send_command params for the given vehicle type. Throws
// ValidationError with a message naming the offending field.
VehicleCommand ParseCommand(const nlohmann::json& params, VehicleType type);

}  // namespace agsim::rpc

#endif  // AGSIM_RPC_DISPATCHER_H_
