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

#include <string>

#include "agsim/error.h"
#include "agsim/rpc/dispatcher.h"
#include "agsim/rpc/protocol.h"
#include "gtest/gtest.h"
#include "nlohmann/json.hpp"
#include "test_util.h"

namespace agsim::rpc {
namespace {

using nlohmann::json;

json LoadVectors() { return json::parse(testing::ReadFile(testing::VectorsDir() / "wire_vectors.json")); }

std::string Unhex(const std::string& hex) {
  std::string out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    out.push_back(static_cast<char>(std::stoi(hex.substr(i, 2), nullptr, 16)));
  }
  return out;
}

TEST(WireVectorsTest, Envelopes) {
  const json vectors = LoadVectors();
  ASSERT_FALSE(vectors["envelopes"].empty());
  for (const json& v : vectors["envelopes"]) {
    const std::string frame = Unhex(v["frame_hex"]);
    FrameDecoder decoder;
    decoder.Feed(frame);
    const auto body = decoder.NextFrame();
    ASSERT_TRUE(body.has_value());
    EXPECT_EQ(*body, v["body"].get<std::string>());
    const Envelope env = DecodeEnvelope(*body);
    const json& value = v["value"];
    EXPECT_EQ(env.id, value["id"].get<std::uint64_t>());
    EXPECT_EQ(env.vehicle_type, value["vehicle_type"]);
    EXPECT_EQ(env.vehicle_id, value["vehicle_id"]);
    EXPECT_EQ(env.method, value["method"]);
    EXPECT_EQ(env.params, value["params"]);
    // Byte-exact re-serialization.
    EXPECT_EQ(EncodeEnvelope(env), frame) << v["body"];
  }
}

TEST(WireVectorsTest, Responses) {
  for (const json& v : LoadVectors()["responses"]) {
    const std::string frame = Unhex(v["frame_hex"]);
    ASSERT_EQ(frame.substr(4), v["body"].get<std::string>());
    const Response r = DecodeResponse(frame.substr(4));
    const json& value = v["value"];
    EXPECT_EQ(r.id, value["id"].get<std::uint64_t>());
    EXPECT_EQ(r.ok, value["status"] == "ok");
    if (r.ok) {
      EXPECT_EQ(r.payload, value["payload"]);
    } else {
      EXPECT_EQ(r.error_code, value["error_code"]);
      EXPECT_EQ(r.message, value["message"]);
    }
    EXPECT_EQ(EncodeResponse(r), frame) << v["body"];
  }
}

TEST(WireVectorsTest, BadEnvelopes) {
  sim::Simulation sim(testing::OpenScene(), sim::SimConfig{});
  Dispatcher dispatcher(&sim);
  for (const json& v : LoadVectors()["bad_envelopes"]) {
    const std::string reply = dispatcher.HandleBody(v["body"].get<std::string>(), PortKind::kCar);
    const Response r = DecodeResponse(reply.substr(kHeaderBytes));
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.error_code, v["error"]) << v["body"];
  }
}

TEST(WireVectorsTest, OversizedPrefix) {
  FrameDecoder decoder;
  decoder.Feed(Unhex(LoadVectors()["oversized_prefix_hex"]));
  EXPECT_THROW(decoder.NextFrame(), FrameTooLarge);
}

}  // namespace
}  // namespace agsim::rpc
