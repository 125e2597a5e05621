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

#ifndef AGSIM_RPC_PROTOCOL_H_
#define AGSIM_RPC_PROTOCOL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "nlohmann/json.hpp"

namespace agsim::rpc {

// Frames are a 4-byte big-endian payload length followed by that many bytes
// of UTF-8 JSON.
inline constexpr std::uint32_t kMaxFrameBytes = 16u * 1024u * 1024u;
inline constexpr std::size_t kHeaderBytes = 4;

enum class PortKind { kMultirotor, kCar, kWorld };

std::string_view PortKindName(PortKind kind);
std::optional<PortKind> ParsePortKind(std::string_view name);

inline constexpr std::uint16_t kDefaultBasePort = 41451;

struct EndpointConfig {
  std::string host = "127.0.0.1";
  std::uint16_t base_port = kDefaultBasePort;

  std::uint16_t Port(PortKind kind) const;
};

// Default endpoints with the base port taken from AGSIM_BASE_PORT when set.
// Throws ConfigError for an unparsable value.
EndpointConfig EndpointConfigFromEnv();

struct Envelope {
  std::uint64_t id = 0;
  std::string vehicle_type;  // "multirotor", "car" or "world"
  std::string vehicle_id;    // empty for endpoint-level methods
  std::string method;
  nlohmann::json params = nlohmann::json::object();

  bool operator==(const Envelope&) const = default;
};

struct Response {
  std::uint64_t id = 0;
  bool ok = false;
  std::string error_code;  // set iff !ok
  std::string message;
  nlohmann::json payload;  // set iff ok

  static Response Ok(std::uint64_t id, nlohmann::json payload);
  static Response Fail(std::uint64_t id, std::string code, std::string message);
  bool operator==(const Response&) const = default;
};

namespace codes {
inline constexpr const char* kVehicleTypeMismatch = "VEHICLE_TYPE_MISMATCH";
inline constexpr const char* kUnknownVehicle = "UNKNOWN_VEHICLE";
inline constexpr const char* kUnknownMethod = "UNKNOWN_METHOD";
inline constexpr const char* kNoSuchSensor = "NO_SUCH_SENSOR";
inline constexpr const char* kInvalidParams = "INVALID_PARAMS";
inline constexpr const char* kMalformedJson = "MALFORMED_JSON";
inline constexpr const char* kMissingField = "MISSING_FIELD";
inline constexpr const char* kFrameTooLarge = "FRAME_TOO_LARGE";
inline constexpr const char* kNoTarget = "NO_TARGET";
}  // namespace codes

// Length prefix plus body. Throws FrameTooLarge.
std::string EncodeFrame(std::string_view body);

nlohmann::json EnvelopeToJson(const Envelope& env);
nlohmann::json ResponseToJson(const Response& response);
std::string EncodeEnvelope(const Envelope& env);
std::string EncodeResponse(const Response& response);

// Throws MalformedJson or MissingField.
Envelope DecodeEnvelope(std::string_view body);
Response DecodeResponse(std::string_view body);

// Incremental decoder over a byte stream. A clean prefix of a frame is never
// an error: NextFrame returns nullopt until the frame is complete.
class FrameDecoder {
 public:
  void Feed(std::string_view bytes) { buffer_.append(bytes); }
  // Throws FrameTooLarge as soon as an oversized length prefix is visible.
  std::optional<std::string> NextFrame();
  std::size_t buffered() const { return buffer_.size() - offset_; }

 private:
  std::string buffer_;
  std::size_t offset_ = 0;
};

}  // namespace agsim::rpc

#endif  // AGSIM_RPC_PROTOCOL_H_
