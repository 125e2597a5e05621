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

#include "agsim/rpc/server.h"

#include <sys/socket.h>
#include <netinet/in.h>
#include <unistd.h>

#include <thread>
#include <vector>

#include "agsim/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace agsim::rpc {
namespace {

class ServerTest : public ::testing::Test {
 protected:
  ServerTest() : sim_(testing::OpenScene(), sim::SimConfig{}), dispatcher_(&sim_) {
    sim_.RegisterVehicle("ugv1", VehicleType::kCar, {});
    sim_.RegisterVehicle("uav1", VehicleType::kMultirotor, {{0, 0, -10}, {}});
    server_ = std::make_unique<Server>(&dispatcher_, EndpointConfig{}, /*ephemeral=*/true);
    server_->Start();
  }
  ~ServerTest() override { server_->Stop(); }

  Client Connect(PortKind kind) { return Client::Connect("127.0.0.1", server_->port(kind)); }

  sim::Simulation sim_;
  Dispatcher dispatcher_;
  std::unique_ptr<Server> server_;
};

TEST_F(ServerTest, EphemeralPortsAreDistinct) {
  const auto m = server_->port(PortKind::kMultirotor);
  const auto c = server_->port(PortKind::kCar);
  const auto w = server_->port(PortKind::kWorld);
  EXPECT_NE(m, 0);
  EXPECT_NE(m, c);
  EXPECT_NE(c, w);
  EXPECT_NE(m, w);
}

TEST_F(ServerTest, PingOnEveryPort) {
  for (const auto& [kind, name] : {std::pair{PortKind::kMultirotor, "multirotor"},
                                   std::pair{PortKind::kCar, "car"},
                                   std::pair{PortKind::kWorld, "world"}}) {
    Client client = Connect(kind);
    const Response r = client.Call(name, "", "ping");
    ASSERT_TRUE(r.ok) << r.message;
    EXPECT_EQ(r.payload["port"], name);
  }
}

TEST_F(ServerTest, ErrorsTravelAsResponses) {
  Client client = Connect(PortKind::kCar);
  const Response r = client.Call("multirotor", "uav1", "get_state");
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.error_code, codes::kVehicleTypeMismatch);
  // The connection stays usable afterwards.
  EXPECT_TRUE(client.Call("car", "ugv1", "get_state").ok);
}

TEST_F(ServerTest, PipelinedRequestsAnswerInOrder) {
  Client client = Connect(PortKind::kCar);
  std::string bytes;
  for (std::uint64_t id = 10; id < 30; ++id) {
    bytes += EncodeEnvelope({id, "car", "ugv1", "get_odometry", nlohmann::json::object()});
  }
  client.SendBytes(bytes);
  for (std::uint64_t id = 10; id < 30; ++id) {
    const Response r = client.ReadResponse();
    EXPECT_EQ(r.id, id);
    EXPECT_TRUE(r.ok);
  }
}

TEST_F(ServerTest, PartialFramesAreReassembled) {
  Client client = Connect(PortKind::kWorld);
  const std::string frame = EncodeEnvelope({77, "world", "", "get_sim_time", nlohmann::json::object()});
  for (std::size_t i = 0; i < frame.size(); i += 3) {
    client.SendBytes(std::string_view(frame).substr(i, 3));
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  const Response r = client.ReadResponse();
  EXPECT_EQ(r.id, 77u);
  EXPECT_TRUE(r.ok);
}

TEST_F(ServerTest, MalformedBodyGetsErrorResponse) {
  Client client = Connect(PortKind::kCar);
  client.SendBytes(EncodeFrame("[1, 2"));
  const Response r = client.ReadResponse();
  EXPECT_EQ(r.error_code, codes::kMalformedJson);
}

TEST_F(ServerTest, OversizedFrameClosesTheConnection) {
  Client client = Connect(PortKind::kCar);
  client.SendBytes(std::string("\x01\x00\x00\x01", 4));
  const Response r = client.ReadResponse();
  EXPECT_EQ(r.error_code, codes::kFrameTooLarge);
  EXPECT_THROW(client.ReadResponse(), Error);
}

TEST_F(ServerTest, ConcurrentClientsGetTheirOwnIds) {
  constexpr int kClients = 4;
  constexpr int kCalls = 100;
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int c = 0; c < kClients; ++c) {
    threads.emplace_back([&, c] {
      Client client = Connect(c % 2 ? PortKind::kCar : PortKind::kMultirotor);
      const char* type = c % 2 ? "car" : "multirotor";
      const char* id = c % 2 ? "ugv1" : "uav1";
      for (int i = 0; i < kCalls; ++i) {
        const std::uint64_t rid = 1000 * (c + 1) + i;
        const Response r = client.Call({rid, type, id, "get_state", nlohmann::json::object()});
        if (r.id != rid || !r.ok || r.payload["vehicle_id"] != id) ++mismatches;
      }
    });
  }
  // Keep the clock moving while clients read.
  for (int i = 0; i < 100; ++i) sim_.Step();
  for (auto& t : threads) t.join();
  EXPECT_EQ(mismatches.load(), 0);
}

TEST_F(ServerTest, StopIsIdempotentAndRefusesConnections) {
  const auto port = server_->port(PortKind::kCar);
  server_->Stop();
  server_->Stop();
  EXPECT_THROW(Client::Connect("127.0.0.1", port, 0.5), Error);
}

TEST(ServerBindTest, TakenPortRaisesBindError) {
  // Hold a port, then ask the server to use it as its base.
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  ASSERT_GE(fd, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ASSERT_EQ(::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)), 0);
  ASSERT_EQ(::listen(fd, 1), 0);
  socklen_t len = sizeof(addr);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  const std::uint16_t taken = ntohs(addr.sin_port);

  sim::Simulation sim(testing::OpenScene(), sim::SimConfig{});
  Dispatcher dispatcher(&sim);
  EndpointConfig config;
  config.base_port = taken;
  Server server(&dispatcher, config);
  try {
    server.Start();
    ADD_FAILURE() << "expected BindError";
  } catch (const BindError& e) {
    EXPECT_NE(std::string(e.what()).find(std::to_string(taken)), std::string::npos) << e.what();
  }
  ::close(fd);
}

}  // namespace
}  // namespace agsim::rpc
