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

#ifndef AGSIM_METRICS_H_
#define AGSIM_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "agsim/geometry.h"
#include "nlohmann/json.hpp"

namespace agsim::metrics {

struct StampedPosition {
  double seconds = 0.0;
  Vec3 position;
};

struct Range {
  double min = 0.0;
  double max = 0.0;
};

struct TrajStats {
  double duration = 0.0;
  double total_length = 0.0;
  double average_speed = 0.0;  // total_length / duration, 0 for a single sample
  Range n_range;
  Range e_range;
  Range alt_range;  // up-positive (-d)
  std::size_t samples = 0;
};

// Throws EmptyLog.
TrajStats ComputeTrajStats(std::span<const StampedPosition> log);

struct ErrorStats {
  double mean = 0.0;
  double variance = 0.0;  // population variance (divide by N)
  double max = 0.0;
  std::size_t count = 0;
};

// Throws EmptySeries.
ErrorStats ComputeErrorStats(std::span<const double> errors);

nlohmann::json ToJson(const TrajStats& stats);
nlohmann::json ToJson(const ErrorStats& stats);

// One decimal place, as used in rendered tables.
std::string Fixed1(double value);

// Aligned plain-text table. Each row is {group, metric, value}; rows with an
// empty group continue the group above and no separator is drawn before them.
struct TableRow {
  std::string group;
  std::string metric;
  std::string value;
};
std::string RenderTable(const std::string& title, const std::vector<TableRow>& rows);

// Table renderers for the stored task reports.
std::string RenderMappingReport(const nlohmann::json& report);
std::string RenderPlanningReport(const nlohmann::json& report);
std::string RenderTrackingReport(const nlohmann::json& report);
std::string RenderFormationReport(const nlohmann::json& report);

}  // namespace agsim::metrics

#endif  // AGSIM_METRICS_H_
