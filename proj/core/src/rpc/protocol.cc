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

#include "agsim/rpc/protocol.h"

#include <charconv>
#include <cstdlib>

#include "agsim/error.h"

namespace agsim::rpc {
namespace {

using nlohmann::json;

json ParseObject(std::string_view body) {
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw MalformedJson("frame body is not valid JSON");
  if (!j.is_object()) throw MalformedJson("frame body must be a JSON object");
  return j;
}

const json& Require(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw MissingField(std::string("missing field '") + key + "'");
  return *it;
}

std::uint64_t RequireId(const json& obj) {
  const json& id = Require(obj, "id");
  if (!id.is_number_unsigned()) throw MalformedJson("field 'id' must be an unsigned integer");
  return id.get<std::uint64_t>();
}

std::string RequireString(const json& obj, const char* key) {
  const json& v = Require(obj, key);
  if (!v.is_string()) throw MalformedJson(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

std::string_view PortKindName(PortKind kind) {
  switch (kind) {
    case PortKind::kMultirotor:
      return "multirotor";
    case PortKind::kCar:
      return "car";
    case PortKind::kWorld:
      return "world";
  }
  return "world";
}

std::optional<PortKind> ParsePortKind(std::string_view name) {
  if (name == "multirotor") return PortKind::kMultirotor;
  if (name == "car") return PortKind::kCar;
  if (name == "world") return PortKind::kWorld;
  return std::nullopt;
}

std::uint16_t EndpointConfig::Port(PortKind kind) const {
  switch (kind) {
    case PortKind::kMultirotor:
      return base_port;
    case PortKind::kCar:
      return static_cast<std::uint16_t>(base_port + 1);
    case PortKind::kWorld:
      return static_cast<std::uint16_t>(base_port + 2);
  }
  return base_port;
}

EndpointConfig EndpointConfigFromEnv() {
  EndpointConfig config;
  const char* value = std::getenv("AGSIM_BASE_PORT");
  if (value == nullptr || *value == '\0') return config;
  const std::string_view text(value);
  unsigned port = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), port);
  if (ec != std::errc() || end != text.data() + text.size() || port == 0 || port > 65533) {
    throw ConfigError("AGSIM_BASE_PORT must be an integer in [1, 65533], got '" +
                      std::string(text) + "'");
  }
  config.base_port = static_cast<std::uint16_t>(port);
  return config;
}

Response Response::Ok(std::uint64_t id, nlohmann::json payload) {
  return {id, true, "", "", std::move(payload)};
}

Response Response::Fail(std::uint64_t id, std::string code, std::string message) {
  return {id, false, std::move(code), std::move(message), nullptr};
}

std::string EncodeFrame(std::string_view body) {
  if (body.size() > kMaxFrameBytes) {
    throw FrameTooLarge("frame body of " + std::to_string(body.size()) + " bytes exceeds 16 MiB");
  }
  const auto n = static_cast<std::uint32_t>(body.size());
  std::string out;
  out.reserve(kHeaderBytes + body.size());
  out.push_back(static_cast<char>((n >> 24) & 0xff));
  out.push_back(static_cast<char>((n >> 16) & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out.append(body);
  return out;
}

json EnvelopeToJson(const Envelope& env) {
  return {{"id", env.id},
          {"vehicle_type", env.vehicle_type},
          {"vehicle_id", env.vehicle_id},
          {"method", env.method},
          {"params", env.params}};
}

json ResponseToJson(const Response& response) {
  json j = {{"id", response.id}, {"status", response.ok ? "ok" : "error"}};
  if (response.ok) {
    j["payload"] = response.payload;
  } else {
    j["error_code"] = response.error_code;
    j["message"] = response.message;
  }
  return j;
}

std::string EncodeEnvelope(const Envelope& env) { return EncodeFrame(EnvelopeToJson(env).dump()); }

std::string EncodeResponse(const Response& response) {
  return EncodeFrame(ResponseToJson(response).dump());
}

Envelope DecodeEnvelope(std::string_view body) {
  const json j = ParseObject(body);
  Envelope env;
  env.id = RequireId(j);
  env.vehicle_type = RequireString(j, "vehicle_type");
  env.vehicle_id = RequireString(j, "vehicle_id");
  env.method = RequireString(j, "method");
  if (env.method.empty()) throw MissingField("field 'method' must be nonempty");
  env.params = Require(j, "params");
  return env;
}

Response DecodeResponse(std::string_view body) {
  const json j = ParseObject(body);
  Response r;
  r.id = RequireId(j);
  const std::string status = RequireString(j, "status");
  if (status == "ok") {
    r.ok = true;
    r.payload = Require(j, "payload");
  } else if (status == "error") {
    r.error_code = RequireString(j, "error_code");
    if (r.error_code.empty()) throw MalformedJson("error response with empty error_code");
    if (const auto it = j.find("message"); it != j.end() && it->is_string()) {
      r.message = it->get<std::string>();
    }
  } else {
    throw MalformedJson("field 'status' must be \"ok\" or \"error\"");
  }
  return r;
}

std::optional<std::string> FrameDecoder::NextFrame() {
  if (buffered() < kHeaderBytes) return std::nullopt;
  const auto* p = reinterpret_cast<const unsigned char*>(buffer_.data() + offset_);
  const std::uint32_t n = (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
                          (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
  if (n > kMaxFrameBytes) {
    throw FrameTooLarge("declared frame length " + std::to_string(n) + " exceeds 16 MiB");
  }
  if (buffered() < kHeaderBytes + n) return std::nullopt;
  std::string frame = buffer_.substr(offset_ + kHeaderBytes, n);
  offset_ += kHeaderBytes + n;
  // Compact once the consumed prefix dominates the buffer.
  if (offset_ > 4096 && offset_ * 2 > buffer_.size()) {
    buffer_.erase(0, offset_);
    offset_ = 0;
  }
  return frame;
}

}  // namespace agsim::rpc
