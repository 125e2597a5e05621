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

#ifndef AGSIM_SRC_JSON_UTIL_H_
#define AGSIM_SRC_JSON_UTIL_H_

#include <initializer_list>
#include <string>
#include <string_view>

#include "agsim/geometry.h"
#include "nlohmann/json.hpp"

namespace agsim::internal {

using nlohmann::json;

inline std::string FieldPath(std::string_view where, std::string_view key) {
  if (where.empty()) return std::string(key);
  return std::string(where) + "." + std::string(key);
}

template <typename Err>
void RequireObject(const json& j, std::string_view where) {
  if (!j.is_object()) throw Err("field '" + std::string(where) + "' must be an object");
}

template <typename Err>
void RejectUnknownFields(const json& obj, std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const auto name : allowed) known = known || it.key() == name;
    if (!known) throw Err("unknown field '" + FieldPath(where, it.key()) + "'");
  }
}

template <typename Err>
const json& RequireField(const json& obj, std::string_view key, std::string_view where) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) throw Err("missing field '" + FieldPath(where, key) + "'");
  return *it;
}

template <typename Err>
double AsNumber(const json& j, std::string_view path) {
  if (!j.is_number()) throw Err("field '" + std::string(path) + "' must be a number");
  return j.get<double>();
}

template <typename Err>
std::string AsString(const json& j, std::string_view path) {
  if (!j.is_string()) throw Err("field '" + std::string(path) + "' must be a string");
  return j.get<std::string>();
}

template <typename Err>
Vec3 AsVec3(const json& j, std::string_view path) {
  if (!j.is_array() || j.size() != 3) {
    throw Err("field '" + std::string(path) + "' must be an array [n, e, d]");
  }
  return {AsNumber<Err>(j[0], path), AsNumber<Err>(j[1], path), AsNumber<Err>(j[2], path)};
}

template <typename Err>
double NumberOr(const json& obj, std::string_view key, double fallback, std::string_view where) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) return fallback;
  return AsNumber<Err>(*it, FieldPath(where, key));
}

inline json Vec3Json(const Vec3& v) { return json::array({v.n, v.e, v.d}); }

}  // namespace agsim::internal

#endif  // AGSIM_SRC_JSON_UTIL_H_
