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

#include "agsim/metrics.h"

#include <algorithm>
#include <cmath>

#include "agsim/error.h"
#include "fmt/format.h"

namespace agsim::metrics {
namespace {

using nlohmann::json;

void Extend(Range& range, double value) {
  range.min = std::min(range.min, value);
  range.max = std::max(range.max, value);
}

json RangeJson(const Range& r) { return json::array({r.min, r.max}); }

std::string RangeText(const json& r) {
  return "[" + Fixed1(r.at(0).get<double>()) + ", " + Fixed1(r.at(1).get<double>()) + "]";
}

std::string VecText(const json& v, int decimals) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt::format("{:.{}f}", v.at(i).get<double>(), decimals);
  }
  return out + "]";
}

void AppendKinematics(std::vector<TableRow>& rows, const std::string& group, const json& stats) {
  rows.push_back({group, "Duration (s)", Fixed1(stats.at("duration_s").get<double>())});
  rows.push_back({"", "Total Length (m)", Fixed1(stats.at("total_length_m").get<double>())});
  rows.push_back({"", "Average Speed (m/s)", Fixed1(stats.at("average_speed_mps").get<double>())});
}

}  // namespace

TrajStats ComputeTrajStats(std::span<const StampedPosition> log) {
  if (log.empty()) throw EmptyLog("trajectory statistics need at least one sample");
  TrajStats stats;
  stats.samples = log.size();
  const Vec3& first = log.front().position;
  stats.n_range = {first.n, first.n};
  stats.e_range = {first.e, first.e};
  stats.alt_range = {first.Altitude(), first.Altitude()};
  for (std::size_t i = 0; i < log.size(); ++i) {
    const Vec3& p = log[i].position;
    Extend(stats.n_range, p.n);
    Extend(stats.e_range, p.e);
    Extend(stats.alt_range, p.Altitude());
    if (i > 0) stats.total_length += Distance(log[i - 1].position, p);
  }
  stats.duration = log.back().seconds - log.front().seconds;
  stats.average_speed = stats.duration > 0.0 ? stats.total_length / stats.duration : 0.0;
  return stats;
}

ErrorStats ComputeErrorStats(std::span<const double> errors) {
  if (errors.empty()) throw EmptySeries("error statistics need a nonempty series");
  ErrorStats stats;
  stats.count = errors.size();
  double sum = 0.0;
  stats.max = errors.front();
  for (const double e : errors) {
    sum += e;
    stats.max = std::max(stats.max, e);
  }
  stats.mean = sum / static_cast<double>(errors.size());
  double squares = 0.0;
  for (const double e : errors) squares += (e - stats.mean) * (e - stats.mean);
  stats.variance = squares / static_cast<double>(errors.size());
  return stats;
}

json ToJson(const TrajStats& stats) {
  return {{"duration_s", stats.duration},
          {"total_length_m", stats.total_length},
          {"average_speed_mps", stats.average_speed},
          {"n_range_m", RangeJson(stats.n_range)},
          {"e_range_m", RangeJson(stats.e_range)},
          {"alt_range_m", RangeJson(stats.alt_range)},
          {"samples", stats.samples}};
}

json ToJson(const ErrorStats& stats) {
  return {{"mean", stats.mean}, {"variance", stats.variance}, {"max", stats.max},
          {"count", stats.count}};
}

std::string Fixed1(double value) {
  std::string text = fmt::format("{:.1f}", value);
  if (text == "-0.0") text = "0.0";
  return text;
}

std::string RenderTable(const std::string& title, const std::vector<TableRow>& rows) {
  std::size_t group_w = 0, metric_w = 0, value_w = 0;
  for (const auto& row : rows) {
    group_w = std::max(group_w, row.group.size());
    metric_w = std::max(metric_w, row.metric.size());
    value_w = std::max(value_w, row.value.size());
  }
  const std::size_t total = group_w + metric_w + value_w + 6;
  std::string out = title + "\n" + std::string(total, '-') + "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (i > 0 && !row.group.empty()) out += std::string(total, '-') + "\n";
    out += fmt::format("{:<{}} | {:<{}} | {:>{}}\n", row.group, group_w, row.metric, metric_w,
                       row.value, value_w);
  }
  out += std::string(total, '-') + "\n";
  return out;
}

std::string RenderMappingReport(const json& report) {
  std::vector<TableRow> rows;
  AppendKinematics(rows, "UGV", report.at("ugv"));
  AppendKinematics(rows, "UAV", report.at("uav"));
  const json& reg = report.at("registration");
  rows.push_back({"Cloud Points (ICP)", "Est Translation (m)", VecText(reg.at("est_translation"), 3)});
  rows.push_back({"", "RMSE (m)", fmt::format("{:.3f}", reg.at("rmse_m").get<double>())});
  return RenderTable("Cooperative mapping: kinematics and ICP registration", rows);
}

std::string RenderPlanningReport(const json& report) {
  const json& ugv = report.at("ugv");
  std::vector<TableRow> rows;
  rows.push_back({"Metric", "Duration (s)", Fixed1(ugv.at("duration_s").get<double>())});
  rows.push_back({"", "Total Length (m)", Fixed1(ugv.at("total_length_m").get<double>())});
  rows.push_back({"", "Average Speed (m/s)", Fixed1(ugv.at("average_speed_mps").get<double>())});
  rows.push_back({"", "X Range (m)", RangeText(ugv.at("n_range_m"))});
  rows.push_back({"", "Y Range (m)", RangeText(ugv.at("e_range_m"))});
  rows.push_back({"", "Z Range (m)", RangeText(ugv.at("alt_range_m"))});
  return RenderTable("Aerial-assisted navigation: UGV kinematics (X=north, Y=east, Z=altitude)",
                     rows);
}

std::string RenderTrackingReport(const json& report) {
  std::vector<TableRow> rows;
  for (const auto& id : report.at("summary").at("agents")) {
    const json& agent = report.at(id.get<std::string>());
    rows.push_back({id.get<std::string>(), "Mean XY Error (m)",
                    Fixed1(agent.at("mean_xy_err_m").get<double>())});
    rows.push_back({"", "XY Error Variance (m^2)", Fixed1(agent.at("var_xy_err_m2").get<double>())});
    rows.push_back({"", "Max XY Error (m)", Fixed1(agent.at("max_xy_err_m").get<double>())});
    rows.push_back({"", "Desired Distance (m)", Fixed1(agent.at("desired_distance_m").get<double>())});
    rows.push_back({"", "Steady |Distance Error| (m)",
                    fmt::format("{:.2f}", agent.at("steady_abs_distance_err_m").get<double>())});
  }
  const json& summary = report.at("summary");
  rows.push_back({"UGV heading", "Mean Yaw Error after settle (deg)",
                  fmt::format("{:.2f}", summary.at("ugv_mean_yaw_err_after_settle_deg").get<double>())});
  return RenderTable("Cooperative tracking: standoff errors", rows);
}

std::string RenderFormationReport(const json& report) {
  std::vector<TableRow> rows;
  rows.push_back({"Run", "Vehicles", std::to_string(report.at("vehicle_count").get<int>())});
  rows.push_back({"", "Ticks", std::to_string(report.at("ticks").get<std::uint64_t>())});
  rows.push_back({"", "Odometry Rate (Hz)", Fixed1(report.at("odometry_rate_hz").get<double>())});
  rows.push_back({"", "Image Rate (Hz)", Fixed1(report.at("image_rate_hz").get<double>())});
  rows.push_back({"", "Sync Violations", std::to_string(report.at("sync_violations").get<int>())});
  rows.push_back({"", "Wall Time per Tick (ms)",
                  fmt::format("{:.3f}", report.at("wall_ms_per_tick").get<double>())});
  return RenderTable("Multi-agent formation: scalability", rows);
}

}  // namespace agsim::metrics
